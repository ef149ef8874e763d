//! Simulation orchestration: single runs, seeded batches, and trace files.
//!
//! Row `k` of a trace covers the step `[start + k·dt, start + (k+1)·dt)`:
//! boundary conditions and the control value are the ones applied during the
//! step, the node temperatures are the ones reached at its end.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::Controller;
use crate::rng::{self, RngStream, Substream};
use crate::signals::{Signal, WalkerSpec};
use crate::thermal::{
    equilibrium_control, steady_state, BuildingParams, ThermalError, ThermalModel, ThermalState,
};
use crate::variation::{choose_preset, sample_building, ConverterChain, VariationError, VariationSpec};
use crate::weather::{Boundary, GainSchedule, WeatherError, WeatherModel};

/// Exact header of trace CSV files.
pub const TRACE_HEADER: [&str; 8] = [
    "time_s",
    "t_out_c",
    "solar_wm2",
    "internal_gain_w",
    "control_signal",
    "heat_power_w",
    "t_air_c",
    "t_env_c",
];

pub const DEFAULT_DT: u64 = 900;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid run window: {0}")]
    Window(String),
    #[error("control signal has {got} values but the run needs {needed}")]
    SignalTooShort { needed: usize, got: usize },
    #[error("signal step of {signal} s does not match run step of {run} s")]
    SignalStep { signal: u32, run: u64 },
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Variation(#[from] VariationError),
    #[error(transparent)]
    Weather(#[from] WeatherError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: trace schema mismatch; missing columns [{missing}], unexpected columns [{unexpected}]")]
    Schema {
        path: PathBuf,
        missing: String,
        unexpected: String,
    },
    #[error("{path}, row {row}: {reason}")]
    Parse {
        path: PathBuf,
        row: usize,
        reason: String,
    },
    #[error("{path}: metadata sidecar: {reason}")]
    Meta { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EngineError + '_ {
    move |source| EngineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where the control value of each step comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlSource {
    Controller(Controller),
    Signal(Signal),
}

impl ControlSource {
    pub fn kind(&self) -> &'static str {
        match self {
            ControlSource::Controller(c) => c.kind(),
            ControlSource::Signal(_) => "signal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialState {
    /// Equilibrium at the first boundary sample under the control source's
    /// initial value: the setpoint-holding fraction for controllers (which are
    /// primed accordingly), the first signal value otherwise.
    #[default]
    Steady,
    Explicit(ThermalState),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub start_time: u64,
    pub stop_time: u64,
    pub dt: u64,
    pub building: BuildingParams,
    pub boundary: Boundary,
    pub control: ControlSource,
    pub initial: InitialState,
    /// Recorded in the trace metadata.
    pub seed: Option<u64>,
    /// Free-form label recorded in the metadata (e.g. the walker kind).
    pub label: Option<String>,
}

impl RunConfig {
    pub fn num_steps(&self) -> Result<usize, EngineError> {
        if self.dt == 0 {
            return Err(EngineError::Window("dt must be positive".into()));
        }
        if self.stop_time <= self.start_time {
            return Err(EngineError::Window(format!(
                "stop_time {} must be after start_time {}",
                self.stop_time, self.start_time
            )));
        }
        let span = self.stop_time - self.start_time;
        if !span.is_multiple_of(self.dt) {
            return Err(EngineError::Window(format!(
                "run length {span} s is not a multiple of dt {} s",
                self.dt
            )));
        }
        Ok((span / self.dt) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time_s: u64,
    pub t_out_c: f64,
    pub solar_wm2: f64,
    pub internal_gain_w: f64,
    pub control_signal: f64,
    pub heat_power_w: f64,
    pub t_air_c: f64,
    pub t_env_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMeta {
    pub building: BuildingParams,
    pub seed: Option<u64>,
    pub control_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub start_s: u64,
    pub dt_s: u64,
    pub rng: String,
    pub weather: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub meta: TraceMeta,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn t_air(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t_air_c).collect()
    }

    pub fn control(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.control_signal).collect()
    }

    /// Thermal state at the end of the last row.
    pub fn final_state(&self) -> Option<ThermalState> {
        self.rows
            .last()
            .map(|r| ThermalState::new(r.t_air_c, r.t_env_c))
    }
}

pub fn run(cfg: &RunConfig) -> Result<Trace, EngineError> {
    let n = cfg.num_steps()?;
    let model = ThermalModel::new(&cfg.building, cfg.dt as f64)?;
    let mut controller = match &cfg.control {
        ControlSource::Signal(s) => {
            if s.len() < n {
                return Err(EngineError::SignalTooShort {
                    needed: n,
                    got: s.len(),
                });
            }
            if s.step_seconds as u64 != cfg.dt {
                return Err(EngineError::SignalStep {
                    signal: s.step_seconds,
                    run: cfg.dt,
                });
            }
            None
        }
        ControlSource::Controller(c) => Some(*c),
    };

    let first = cfg.boundary.at(cfg.start_time as f64);
    let mut state = match cfg.initial {
        InitialState::Explicit(s) => s,
        InitialState::Steady => {
            let u0 = match (&cfg.control, controller.as_mut()) {
                (_, Some(c)) => {
                    let u0 = equilibrium_control(&cfg.building, &first, c.setpoint())?;
                    c.prime(u0);
                    u0
                }
                (ControlSource::Signal(s), None) => s.values[0],
                (ControlSource::Controller(_), None) => unreachable!(),
            };
            steady_state(&cfg.building, &first, u0)?
        }
    };

    let dt = cfg.dt as f64;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let t = cfg.start_time + k as u64 * cfg.dt;
        let b = cfg.boundary.at(t as f64);
        let u = match (&cfg.control, controller.as_mut()) {
            (_, Some(c)) => c.step(state.t_air, dt),
            (ControlSource::Signal(s), None) => s.values[k],
            (ControlSource::Controller(_), None) => unreachable!(),
        };
        state = model.step(&state, &b, u)?;
        rows.push(TraceRow {
            time_s: t,
            t_out_c: b.t_out,
            solar_wm2: b.solar,
            internal_gain_w: b.internal_gain,
            control_signal: u,
            heat_power_w: u * cfg.building.q_nominal,
            t_air_c: state.t_air,
            t_env_c: state.t_env,
        });
    }
    Ok(Trace {
        rows,
        meta: TraceMeta {
            building: cfg.building.clone(),
            seed: cfg.seed,
            control_kind: cfg.control.kind().to_string(),
            label: cfg.label.clone(),
            start_s: cfg.start_time,
            dt_s: cfg.dt,
            rng: rng::ALGORITHM.to_string(),
            weather: cfg.boundary.weather.kind().to_string(),
        },
    })
}

/// Control side of a run template.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlSpec {
    Controller(Controller),
    Walker(WalkerSpec),
    /// Constant heating fraction.
    Constant(f64),
}

impl ControlSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ControlSpec::Controller(c) => c.kind(),
            ControlSpec::Walker(w) => w.kind(),
            ControlSpec::Constant(_) => "constant",
        }
    }
}

/// Named alternatives for boundary sources, chosen uniformly per sampled run.
#[derive(Debug, Clone, Default)]
pub struct PresetChoices {
    /// Gain schedule preset names.
    pub gains: Vec<String>,
    /// Weather sources by name, already loaded.
    pub weather: BTreeMap<String, WeatherModel>,
}

/// Everything needed to instantiate a seeded run.
#[derive(Debug, Clone)]
pub struct RunTemplate {
    pub start_time: u64,
    pub stop_time: u64,
    pub dt: u64,
    /// Building before variation; converters run after sampling.
    pub building: BuildingParams,
    pub chain: ConverterChain,
    pub boundary: Boundary,
    pub control: ControlSpec,
    pub initial: InitialState,
    pub presets: PresetChoices,
}

impl RunTemplate {
    /// A one-year run of the default building starting January 1 of year 1.
    pub fn year(control: ControlSpec) -> Self {
        Self {
            start_time: 0,
            stop_time: crate::weather::SECONDS_PER_YEAR as u64,
            dt: DEFAULT_DT,
            building: BuildingParams::default(),
            chain: ConverterChain::empty(),
            boundary: Boundary::default(),
            control,
            initial: InitialState::Steady,
            presets: PresetChoices::default(),
        }
    }

    /// Builds the run for `seed`. With a variation spec the building is drawn
    /// from the `Variation` substream and presets from the `Presets` substream;
    /// walkers always draw from the `Walker` substream.
    pub fn instantiate(
        &self,
        seed: u64,
        variation: Option<&VariationSpec>,
    ) -> Result<RunConfig, EngineError> {
        let mut building = self.building.clone();
        let mut boundary = self.boundary.clone();
        if let Some(spec) = variation {
            let mut rng = RngStream::with_substream(seed, Substream::Variation);
            building = sample_building(spec, &self.building, &self.chain, &mut rng)?;
            let mut presets = RngStream::with_substream(seed, Substream::Presets);
            if let Some(name) = choose_preset(&self.presets.gains, &mut presets) {
                boundary.gains = GainSchedule::preset(name)?;
            }
            let names: Vec<String> = self.presets.weather.keys().cloned().collect();
            if let Some(name) = choose_preset(&names, &mut presets) {
                boundary.weather = self.presets.weather[name].clone();
            }
        }
        let run = RunConfig {
            start_time: self.start_time,
            stop_time: self.stop_time,
            dt: self.dt,
            building,
            boundary,
            control: ControlSource::Signal(Signal::new(Vec::new())),
            initial: self.initial,
            seed: Some(seed),
            label: Some(self.control.kind().to_string()),
        };
        let n = run.num_steps()?;
        let control = match &self.control {
            ControlSpec::Controller(c) => ControlSource::Controller(*c),
            ControlSpec::Walker(w) => {
                let mut rng = RngStream::with_substream(seed, Substream::Walker);
                ControlSource::Signal(w.generate(n, &mut rng).with_step_seconds(self.dt as u32))
            }
            ControlSpec::Constant(level) => {
                ControlSource::Signal(Signal::constant(*level, n).with_step_seconds(self.dt as u32))
            }
        };
        Ok(RunConfig { control, ..run })
    }
}

#[derive(Debug, Error)]
#[error("run {index} (seed {seed}): {source}")]
pub struct BatchError {
    pub index: usize,
    pub seed: u64,
    #[source]
    pub source: EngineError,
}

/// Runs `n` sampled buildings; run `i` uses seed `base_seed + i`.
///
/// `workers` bounds the thread pool; the output order is always by index.
pub fn batch_run(
    n: usize,
    template: &RunTemplate,
    spec: &VariationSpec,
    base_seed: u64,
    workers: usize,
) -> Vec<Result<Trace, BatchError>> {
    let one = |i: usize| {
        let seed = base_seed.wrapping_add(i as u64);
        template
            .instantiate(seed, Some(spec))
            .and_then(|cfg| run(&cfg))
            .map_err(|source| BatchError {
                index: i,
                seed,
                source,
            })
    };
    if workers <= 1 {
        return (0..n).map(one).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(one).collect()),
        Err(_) => (0..n).map(one).collect(),
    }
}

/// Sidecar path holding the metadata of a trace CSV.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<(), EngineError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "{}", TRACE_HEADER.join(","))?;
        for r in &trace.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.time_s,
                r.t_out_c,
                r.solar_wm2,
                r.internal_gain_w,
                r.control_signal,
                r.heat_power_w,
                r.t_air_c,
                r.t_env_c
            )?;
        }
        w.flush()
    };
    write().map_err(io_err(path))?;
    let meta = serde_json::to_string_pretty(&trace.meta).expect("metadata serializes");
    let mp = meta_path(path);
    std::fs::write(&mp, meta + "\n").map_err(io_err(&mp))
}

pub fn read_trace(path: &Path) -> Result<Trace, EngineError> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| parse_err(path, 1, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers != TRACE_HEADER {
        let missing: Vec<&str> = TRACE_HEADER
            .iter()
            .filter(|c| !headers.iter().any(|h| h == *c))
            .copied()
            .collect();
        let unexpected: Vec<&str> = headers
            .iter()
            .filter(|h| !TRACE_HEADER.contains(&h.as_str()))
            .map(String::as_str)
            .collect();
        return Err(EngineError::Schema {
            path: path.to_path_buf(),
            missing: missing.join(", "),
            unexpected: if missing.is_empty() && unexpected.is_empty() {
                format!("(column order differs: {})", headers.join(","))
            } else {
                unexpected.join(", ")
            },
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| parse_err(path, row, e))?;
        let f = |k: usize| -> Result<f64, EngineError> {
            rec[k].parse::<f64>().map_err(|e| EngineError::Parse {
                path: path.to_path_buf(),
                row,
                reason: format!("`{}`: {e}", TRACE_HEADER[k]),
            })
        };
        let time_s = rec[0].parse::<u64>().map_err(|e| EngineError::Parse {
            path: path.to_path_buf(),
            row,
            reason: format!("`time_s`: {e}"),
        })?;
        rows.push(TraceRow {
            time_s,
            t_out_c: f(1)?,
            solar_wm2: f(2)?,
            internal_gain_w: f(3)?,
            control_signal: f(4)?,
            heat_power_w: f(5)?,
            t_air_c: f(6)?,
            t_env_c: f(7)?,
        });
    }
    let mp = meta_path(path);
    let text = std::fs::read_to_string(&mp).map_err(|e| EngineError::Meta {
        path: mp.clone(),
        reason: e.to_string(),
    })?;
    let meta: TraceMeta = serde_json::from_str(&text).map_err(|e| EngineError::Meta {
        path: mp.clone(),
        reason: e.to_string(),
    })?;
    Ok(Trace { rows, meta })
}

fn parse_err(path: &Path, row: usize, e: csv::Error) -> EngineError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => EngineError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => EngineError::Parse {
            path: path.to_path_buf(),
            row,
            reason: format!("{other:?}"),
        },
    }
}
