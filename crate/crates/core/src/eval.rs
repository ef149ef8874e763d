//! Next-step temperature prediction and its action-response evaluation.
//!
//! A ridge regressor is trained on a trace to predict `t_air` one step ahead
//! from a window of past rows plus the action applied during the next step.
//! It is scored on a grid of (initial state, action) cells whose ground truth
//! comes from the thermal model itself.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, ControlSource, EngineError, InitialState, RunConfig, Trace, TraceRow};
use crate::signals::Signal;
use crate::thermal::{BoundarySample, BuildingParams, ThermalError, ThermalModel, ThermalState};
use crate::weather::{Boundary, SECONDS_PER_DAY, SECONDS_PER_YEAR};

pub const DEFAULT_LOOKBACK: usize = 96;
pub const DEFAULT_LAMBDA: f64 = 1e3;
pub const DEFAULT_EPS: f64 = 0.01;
pub const DEFAULT_VALIDATION_DAYS: u32 = 31;

/// Columns below this standard deviation are treated as constant.
const MIN_STD: f64 = 1e-9;
const CHUNK_ROWS: usize = 1024;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid feature spec: {0}")]
    Spec(String),
    #[error("trace has {got} rows, at least {needed} are needed for lookback {lookback}")]
    TooShort {
        got: usize,
        needed: usize,
        lookback: usize,
    },
    #[error("no training samples")]
    NoSamples,
    #[error("normal equations are singular; use lambda > 0")]
    Singular,
    #[error("lambda must be finite and non-negative, got {0}")]
    Lambda(f64),
    #[error("history window has {got} rows, the model needs {needed}")]
    History { got: usize, needed: usize },
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    TAir,
    ControlSignal,
    TOut,
    Solar,
    InternalGain,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::TAir,
        Channel::ControlSignal,
        Channel::TOut,
        Channel::Solar,
        Channel::InternalGain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::TAir => "t_air",
            Channel::ControlSignal => "control_signal",
            Channel::TOut => "t_out",
            Channel::Solar => "solar",
            Channel::InternalGain => "internal_gain",
        }
    }

    pub fn of(self, r: &TraceRow) -> f64 {
        match self {
            Channel::TAir => r.t_air_c,
            Channel::ControlSignal => r.control_signal,
            Channel::TOut => r.t_out_c,
            Channel::Solar => r.solar_wm2,
            Channel::InternalGain => r.internal_gain_w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub lookback: usize,
    pub channels: Vec<Channel>,
    /// Trailing days of each training trace held out for validation.
    #[serde(default = "default_validation_days")]
    pub validation_days: u32,
    #[serde(default)]
    pub target: Target,
}

/// What the regression fits. Predictions are always next-step `t_air`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `t_air(t + 1)` directly.
    Level,
    /// `t_air(t + 1) − t_air(t)`, added back onto the last observed temperature.
    #[default]
    Increment,
}

impl Target {
    fn offset(self, last: &TraceRow) -> f64 {
        match self {
            Target::Level => 0.0,
            Target::Increment => last.t_air_c,
        }
    }
}

fn default_validation_days() -> u32 {
    DEFAULT_VALIDATION_DAYS
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            lookback: DEFAULT_LOOKBACK,
            channels: Channel::ALL.to_vec(),
            validation_days: DEFAULT_VALIDATION_DAYS,
            target: Target::default(),
        }
    }
}

impl FeatureSpec {
    pub fn new(lookback: usize, channels: Vec<Channel>) -> Result<Self, EvalError> {
        let s = Self {
            lookback,
            channels,
            validation_days: DEFAULT_VALIDATION_DAYS,
            target: Target::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.lookback == 0 {
            return Err(EvalError::Spec("lookback must be at least 1".into()));
        }
        for required in [Channel::TAir, Channel::ControlSignal] {
            if !self.channels.contains(&required) {
                return Err(EvalError::Spec(format!(
                    "channel `{}` is required",
                    required.name()
                )));
            }
        }
        for (i, c) in self.channels.iter().enumerate() {
            if self.channels[..i].contains(c) {
                return Err(EvalError::Spec(format!("channel `{}` listed twice", c.name())));
            }
        }
        Ok(())
    }

    /// Window features plus the action feature, before constant channels are dropped.
    pub fn num_features(&self) -> usize {
        self.lookback * self.channels.len() + 1
    }

    /// Smallest trace that yields at least one sample.
    pub fn min_rows(&self) -> usize {
        self.lookback + 2
    }
}

/// Per-channel affine normalization; `None` marks a dropped constant channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub channels: Vec<Channel>,
    pub stats: Vec<Option<(f64, f64)>>,
}

impl Normalization {
    fn from_rows<'a>(channels: &[Channel], rows: impl Iterator<Item = &'a TraceRow> + Clone) -> Self {
        let stats = channels
            .iter()
            .map(|&c| {
                let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
                for r in rows.clone() {
                    let x = c.of(r);
                    n += 1.0;
                    let d = x - mean;
                    mean += d / n;
                    m2 += d * (x - mean);
                }
                let std = if n > 0.0 { (m2 / n).sqrt() } else { 0.0 };
                (std > MIN_STD * mean.abs().max(1.0)).then_some((mean, std))
            })
            .collect();
        Self {
            channels: channels.to_vec(),
            stats,
        }
    }

    fn kept(&self) -> impl Iterator<Item = (Channel, f64, f64)> + '_ {
        self.channels
            .iter()
            .zip(&self.stats)
            .filter_map(|(&c, s)| s.map(|(m, sd)| (c, m, sd)))
    }

    fn action(&self) -> Option<(f64, f64)> {
        self.channels
            .iter()
            .position(|&c| c == Channel::ControlSignal)
            .and_then(|i| self.stats[i])
    }
}

/// Linear next-step predictor over normalized window features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPredictor {
    pub spec: FeatureSpec,
    pub norm: Normalization,
    /// Kept window features (row-major over the window, channels in order),
    /// then the action feature when kept.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    pub notes: Vec<String>,
}

impl LinearPredictor {
    fn num_features(&self) -> usize {
        self.spec.lookback * self.norm.kept().count() + self.norm.action().is_some() as usize
    }

    /// Fills `out` with the features of the window ending at `history`'s last row.
    fn features(&self, history: &[TraceRow], action: f64, out: &mut Vec<f64>) {
        features_into(&self.spec, &self.norm, history, action, out);
    }

    /// Predicted `t_air` after applying `action` for one step following `history`.
    pub fn predict(&self, history: &[TraceRow], action: f64) -> Result<f64, EvalError> {
        let l = self.spec.lookback;
        if history.len() < l {
            return Err(EvalError::History {
                got: history.len(),
                needed: l,
            });
        }
        let window = &history[history.len() - l..];
        let mut x = Vec::with_capacity(self.num_features());
        self.features(window, action, &mut x);
        let offset = self.spec.target.offset(&window[l - 1]);
        Ok(offset + self.bias + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>())
    }
}

fn features_into(
    spec: &FeatureSpec,
    norm: &Normalization,
    window: &[TraceRow],
    action: f64,
    out: &mut Vec<f64>,
) {
    debug_assert_eq!(window.len(), spec.lookback);
    out.clear();
    for r in window {
        for (c, m, sd) in norm.kept() {
            out.push((c.of(r) - m) / sd);
        }
    }
    if let Some((m, sd)) = norm.action() {
        out.push((action - m) / sd);
    }
}

/// Samples drawn from one or more traces for a given feature spec.
#[derive(Debug, Clone)]
pub struct Dataset<'a> {
    pub spec: FeatureSpec,
    pub norm: Normalization,
    traces: Vec<&'a Trace>,
    /// (trace, t) of every training sample.
    pub train: Vec<(usize, usize)>,
    pub validation: Vec<(usize, usize)>,
    pub notes: Vec<String>,
}

impl Dataset<'_> {
    pub fn num_features(&self) -> usize {
        self.spec.lookback * self.norm.kept().count() + self.norm.action().is_some() as usize
    }

    /// Features and regression target of sample `(trace, t)`.
    pub fn sample(&self, (k, t): (usize, usize), out: &mut Vec<f64>) -> f64 {
        let rows = &self.traces[k].rows;
        let l = self.spec.lookback;
        features_into(&self.spec, &self.norm, &rows[t + 1 - l..=t], rows[t + 1].control_signal, out);
        rows[t + 1].t_air_c - self.spec.target.offset(&rows[t])
    }

    /// Dense feature matrix and targets of the given samples.
    pub fn matrix(&self, samples: &[(usize, usize)]) -> (DMatrix<f64>, DVector<f64>) {
        let p = self.num_features();
        let mut x = DMatrix::zeros(samples.len(), p);
        let mut y = DVector::zeros(samples.len());
        let mut buf = Vec::with_capacity(p);
        for (i, &s) in samples.iter().enumerate() {
            y[i] = self.sample(s, &mut buf);
            for (j, v) in buf.iter().enumerate() {
                x[(i, j)] = *v;
            }
        }
        (x, y)
    }
}

/// Builds samples `t ∈ [lookback, n − 2]` of every trace: features are
/// the rows `t − lookback + 1 ..= t` plus the control signal of row `t + 1`,
/// the target is `t_air` of row `t + 1`. Samples whose target falls in the
/// trailing `validation_days` go to the validation set.
pub fn build_dataset<'a>(traces: &[&'a Trace], spec: &FeatureSpec) -> Result<Dataset<'a>, EvalError> {
    spec.validate()?;
    if traces.is_empty() {
        return Err(EvalError::NoSamples);
    }
    let l = spec.lookback;
    let mut notes = Vec::new();
    let mut train = Vec::new();
    let mut validation = Vec::new();
    let mut train_rows: Vec<(usize, usize)> = Vec::new();
    for (k, tr) in traces.iter().enumerate() {
        let n = tr.len();
        if n < spec.min_rows() {
            return Err(EvalError::TooShort {
                got: n,
                needed: spec.min_rows(),
                lookback: l,
            });
        }
        let per_day = (SECONDS_PER_DAY as u64 / tr.meta.dt_s.max(1)) as usize;
        let held = spec.validation_days as usize * per_day;
        // hold out only when the remainder still has samples
        let cut = if held > 0 && n > held + spec.min_rows() {
            n - held
        } else {
            if held > 0 {
                notes.push(format!(
                    "trace {k}: {n} rows is too short to hold out {} days, no validation samples",
                    spec.validation_days
                ));
            }
            n
        };
        for t in l..=n - 2 {
            if t + 1 >= cut {
                validation.push((k, t));
            } else {
                train.push((k, t));
            }
        }
        train_rows.push((k, cut));
    }
    let norm = Normalization::from_rows(
        &spec.channels,
        train_rows
            .iter()
            .flat_map(|&(k, cut)| traces[k].rows[..cut].iter()),
    );
    for (c, s) in norm.channels.iter().zip(&norm.stats) {
        if s.is_none() {
            notes.push(format!("channel `{}` is constant in the training data and was dropped", c.name()));
        }
    }
    Ok(Dataset {
        spec: spec.clone(),
        norm,
        traces: traces.to_vec(),
        train,
        validation,
        notes,
    })
}

/// Accumulated sufficient statistics of a least-squares problem.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    sum_x: DVector<f64>,
    sum_y: f64,
    n: usize,
}

impl NormalEquations {
    pub fn new(p: usize) -> Self {
        Self {
            xtx: DMatrix::zeros(p, p),
            xty: DVector::zeros(p),
            sum_x: DVector::zeros(p),
            sum_y: 0.0,
            n: 0,
        }
    }

    pub fn add(&mut self, x: &DMatrix<f64>, y: &DVector<f64>) {
        self.xtx.gemm_tr(1.0, x, x, 1.0);
        self.xty.gemv_tr(1.0, x, y, 1.0);
        for (j, col) in x.column_iter().enumerate() {
            self.sum_x[j] += col.sum();
        }
        self.sum_y += y.sum();
        self.n += x.nrows();
    }

    /// Ridge solution with an unpenalized intercept: returns `(weights, bias)`.
    pub fn solve(&self, lambda: f64) -> Result<(Vec<f64>, f64), EvalError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(EvalError::Lambda(lambda));
        }
        if self.n == 0 {
            return Err(EvalError::NoSamples);
        }
        let n = self.n as f64;
        let mean_x = &self.sum_x / n;
        let mean_y = self.sum_y / n;
        let p = self.sum_x.len();
        if p == 0 {
            return Ok((Vec::new(), mean_y));
        }
        // centered normal equations
        let mut a = &self.xtx - (&mean_x * mean_x.transpose()) * n;
        let b = &self.xty - &mean_x * (mean_y * n);
        let scale = (0..p).map(|i| a[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        for i in 0..p {
            a[(i, i)] += lambda;
        }
        let chol = a.cholesky().ok_or(EvalError::Singular)?;
        let l = chol.l();
        let min_pivot = (0..p).map(|i| l[(i, i)]).fold(f64::INFINITY, f64::min);
        if lambda == 0.0 && min_pivot * min_pivot < 1e-12 * scale {
            return Err(EvalError::Singular);
        }
        let w = chol.solve(&b);
        let bias = mean_y - w.dot(&mean_x);
        Ok((w.iter().copied().collect(), bias))
    }
}

/// Ridge regression with an unpenalized intercept on a dense design matrix.
pub fn fit(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<(Vec<f64>, f64), EvalError> {
    let mut ne = NormalEquations::new(x.ncols());
    ne.add(x, y);
    ne.solve(lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub train_samples: usize,
    pub validation_samples: usize,
    /// Mean absolute one-step error on the held-out samples.
    pub validation_mae: Option<f64>,
}

/// Fits a predictor on the training samples of `traces`.
pub fn train(
    traces: &[&Trace],
    spec: &FeatureSpec,
    lambda: f64,
) -> Result<(LinearPredictor, TrainReport), EvalError> {
    let ds = build_dataset(traces, spec)?;
    if ds.train.is_empty() {
        return Err(EvalError::NoSamples);
    }
    let p = ds.num_features();
    let mut ne = NormalEquations::new(p);
    for chunk in ds.train.chunks(CHUNK_ROWS) {
        let (x, y) = ds.matrix(chunk);
        ne.add(&x, &y);
    }
    let (weights, bias) = ne.solve(lambda)?;
    let model = LinearPredictor {
        spec: spec.clone(),
        norm: ds.norm.clone(),
        weights,
        bias,
        lambda,
        notes: ds.notes.clone(),
    };
    let mut buf = Vec::with_capacity(p);
    let validation_mae = (!ds.validation.is_empty()).then(|| {
        ds.validation
            .iter()
            .map(|&s| {
                let y = ds.sample(s, &mut buf);
                let pred = model.bias + buf.iter().zip(&model.weights).map(|(a, b)| a * b).sum::<f64>();
                (pred - y).abs()
            })
            .sum::<f64>()
            / ds.validation.len() as f64
    });
    let report = TrainReport {
        train_samples: ds.train.len(),
        validation_samples: ds.validation.len(),
        validation_mae,
    };
    Ok((model, report))
}

/// One initial condition of the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioState {
    /// Constant heating level used during preconditioning.
    pub level: f64,
    pub state: ThermalState,
    /// Trailing trace rows leading up to the evaluation instant.
    pub history: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalScenario {
    pub states: Vec<ScenarioState>,
    pub actions: Vec<f64>,
    /// Boundary held during the evaluated step.
    pub boundary: BoundarySample,
    pub time_s: u64,
    pub dt: u64,
}

/// The 11-level grid `0, 0.1, …, 1`.
pub fn default_levels() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Start of January of the second simulated year, in seconds.
pub const PRECONDITION_START: u64 = SECONDS_PER_YEAR as u64;
/// February 1, 00:00 of the second year.
pub const EVAL_INSTANT: u64 = PRECONDITION_START + 31 * SECONDS_PER_DAY as u64;

#[derive(Debug, Clone)]
pub struct PreconditionConfig {
    pub building: BuildingParams,
    pub boundary: Boundary,
    pub dt: u64,
    pub start_time: u64,
    pub eval_time: u64,
    pub levels: Vec<f64>,
    pub actions: Vec<f64>,
    /// Rows of history kept per state.
    pub history_len: usize,
}

impl PreconditionConfig {
    pub fn new(building: BuildingParams, boundary: Boundary) -> Self {
        Self {
            building,
            boundary,
            dt: engine::DEFAULT_DT,
            start_time: PRECONDITION_START,
            eval_time: EVAL_INSTANT,
            levels: default_levels(),
            actions: default_levels(),
            history_len: DEFAULT_LOOKBACK,
        }
    }
}

/// Runs the preconditioning window once per constant heating level, each
/// starting from steady state at its level, and captures the state and the
/// trailing history at the evaluation instant.
pub fn precondition_states(cfg: &PreconditionConfig) -> Result<EvalScenario, EvalError> {
    if cfg.actions.windows(2).any(|w| w[0] >= w[1])
        || cfg.actions.iter().any(|a| !(0.0..=1.0).contains(a))
    {
        return Err(EvalError::Spec("actions must be ascending within [0, 1]".into()));
    }
    let mut states = Vec::with_capacity(cfg.levels.len());
    for &level in &cfg.levels {
        let run = RunConfig {
            start_time: cfg.start_time,
            stop_time: cfg.eval_time,
            dt: cfg.dt,
            building: cfg.building.clone(),
            boundary: cfg.boundary.clone(),
            control: ControlSource::Signal(Signal::constant(level, 0)),
            initial: InitialState::Steady,
            seed: None,
            label: None,
        };
        let n = run.num_steps()?;
        let run = RunConfig {
            control: ControlSource::Signal(Signal::constant(level, n).with_step_seconds(cfg.dt as u32)),
            ..run
        };
        let trace = engine::run(&run)?;
        if trace.len() < cfg.history_len {
            return Err(EvalError::History {
                got: trace.len(),
                needed: cfg.history_len,
            });
        }
        let state = trace.final_state().expect("non-empty run");
        states.push(ScenarioState {
            level,
            state,
            history: trace.rows[trace.len() - cfg.history_len..].to_vec(),
        });
    }
    Ok(EvalScenario {
        states,
        actions: cfg.actions.clone(),
        boundary: cfg.boundary.at(cfg.eval_time as f64),
        time_s: cfg.eval_time,
        dt: cfg.dt,
    })
}

/// Anything that predicts the next-step air temperature for a scenario cell.
pub trait Predictor {
    fn predict_cell(&self, s: &ScenarioState, action: f64) -> Result<f64, EvalError>;
}

impl Predictor for LinearPredictor {
    fn predict_cell(&self, s: &ScenarioState, action: f64) -> Result<f64, EvalError> {
        self.predict(&s.history, action)
    }
}

/// The thermal model itself, used as ground truth.
pub struct TruthOracle {
    pub model: ThermalModel,
    pub boundary: BoundarySample,
}

impl Predictor for TruthOracle {
    fn predict_cell(&self, s: &ScenarioState, action: f64) -> Result<f64, EvalError> {
        Ok(self.model.step(&s.state, &self.boundary, action)?.t_air)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub levels: Vec<f64>,
    pub initial_t_air: Vec<f64>,
    pub actions: Vec<f64>,
    pub truth: Vec<Vec<f64>>,
    pub prediction: Vec<Vec<f64>>,
    pub ae: Vec<Vec<f64>>,
    pub arc: f64,
    pub mean_ae: f64,
    /// Fraction of same-state action pairs whose predicted order matches the true order.
    pub pairwise_arc: f64,
    pub eps: f64,
    pub time_s: u64,
    pub boundary: BoundarySample,
}

fn direction(delta: f64, eps: f64) -> i8 {
    if delta.abs() < eps {
        0
    } else if delta > 0.0 {
        1
    } else {
        -1
    }
}

pub fn evaluate(
    model: &dyn Predictor,
    scenario: &EvalScenario,
    building: &BuildingParams,
    eps: f64,
) -> Result<EvalReport, EvalError> {
    let oracle = TruthOracle {
        model: ThermalModel::new(building, scenario.dt as f64)?,
        boundary: scenario.boundary,
    };
    let mut truth = Vec::new();
    let mut prediction = Vec::new();
    for s in &scenario.states {
        let mut t_row = Vec::new();
        let mut p_row = Vec::new();
        for &a in &scenario.actions {
            t_row.push(oracle.predict_cell(s, a)?);
            p_row.push(model.predict_cell(s, a)?);
        }
        truth.push(t_row);
        prediction.push(p_row);
    }
    let ae: Vec<Vec<f64>> = truth
        .iter()
        .zip(&prediction)
        .map(|(t, p)| t.iter().zip(p).map(|(a, b)| (a - b).abs()).collect())
        .collect();
    let cells = scenario.states.len() * scenario.actions.len();
    let mut correct = 0usize;
    let (mut pairs, mut pairs_ok) = (0usize, 0usize);
    for (k, s) in scenario.states.iter().enumerate() {
        let now = s.state.t_air;
        for j in 0..scenario.actions.len() {
            correct += (direction(prediction[k][j] - now, eps) == direction(truth[k][j] - now, eps)) as usize;
            for i in 0..j {
                pairs += 1;
                let dp = direction(prediction[k][j] - prediction[k][i], 0.0);
                let dt = direction(truth[k][j] - truth[k][i], 0.0);
                pairs_ok += (dp == dt) as usize;
            }
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(EvalReport {
        levels: scenario.states.iter().map(|s| s.level).collect(),
        initial_t_air: scenario.states.iter().map(|s| s.state.t_air).collect(),
        actions: scenario.actions.clone(),
        mean_ae: if cells == 0 {
            0.0
        } else {
            ae.iter().flatten().sum::<f64>() / cells as f64
        },
        truth,
        prediction,
        ae,
        arc: ratio(correct, cells),
        pairwise_arc: ratio(pairs_ok, pairs),
        eps,
        time_s: scenario.time_s,
        boundary: scenario.boundary,
    })
}

impl EvalReport {
    fn matrix_csv(&self, m: &[Vec<f64>]) -> String {
        let mut out = String::from("level,t_air_c");
        for a in &self.actions {
            let _ = write!(out, ",u_{a}");
        }
        out.push('\n');
        for (k, row) in m.iter().enumerate() {
            let _ = write!(out, "{},{}", self.levels[k], self.initial_t_air[k]);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Writes `truth.csv`, `prediction.csv`, `ae.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path, extra: serde_json::Value) -> Result<(), EvalError> {
        let io = |path: PathBuf| move |source| EvalError::Io { path, source };
        std::fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
        for (name, m) in [("truth", &self.truth), ("prediction", &self.prediction), ("ae", &self.ae)] {
            let path = dir.join(format!("{name}.csv"));
            std::fs::write(&path, self.matrix_csv(m)).map_err(io(path.clone()))?;
        }
        let summary = serde_json::json!({
            "arc": self.arc,
            "pairwise_arc": self.pairwise_arc,
            "mean_ae": self.mean_ae,
            "eps": self.eps,
            "actions": self.actions,
            "levels": self.levels,
            "initial_t_air": self.initial_t_air,
            "time_s": self.time_s,
            "boundary": self.boundary,
            "model": extra,
        });
        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&summary).expect("json") + "\n")
            .map_err(io(path.clone()))
    }
}
