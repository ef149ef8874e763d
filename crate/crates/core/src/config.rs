//! Project configuration file (TOML, or JSON by extension).
//!
//! Unknown keys are rejected everywhere. `ProjectConfig::default()` matches
//! the document written by [`init_document`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{Controller, HysteresisState, PiState};
use crate::coverage::{DEFAULT_SIGNAL_BINS, DEFAULT_TEMP_BINS, DEFAULT_TEMP_RANGE};
use crate::engine::{ControlSpec, InitialState, PresetChoices, RunTemplate, DEFAULT_DT};
use crate::eval::{self, Channel, FeatureSpec, Target};
use crate::signals::{
    IntDist, MixedWalkConfig, PoissonWalkConfig, RampWalkConfig, SinusoidWalkConfig, WalkerConfig,
    WalkerSpec,
};
use crate::thermal::{BuildingParams, ThermalState};
use crate::variation::{
    ConverterChain, ConverterRegistry, Distribution, HeaterSizing, VariationSpec, DEFAULT_GRID_CAP,
};
use crate::weather::{
    load_weather_csv, Boundary, ColumnMapping, GainSchedule, SyntheticWeather, WeatherModel,
    SECONDS_PER_YEAR,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectConfig {
    pub run: RunSection,
    pub building: BuildingSection,
    pub weather: WeatherSection,
    pub gains: GainsSection,
    pub control: ControlSection,
    pub walker: WalkerSection,
    pub variation: VariationSection,
    pub coverage: CoverageSection,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub start_s: u64,
    pub stop_s: u64,
    pub dt_s: u64,
    /// Used when neither `--seed` nor `THERMEX_SEED` is given.
    pub seed: u64,
    /// Explicit initial temperatures; steady state at the first boundary sample when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_t_air_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_t_env_c: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            start_s: 0,
            stop_s: SECONDS_PER_YEAR as u64,
            dt_s: DEFAULT_DT,
            seed: 0,
            initial_t_air_c: None,
            initial_t_env_c: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildingSection {
    pub floor_area: f64,
    pub ceiling_height: f64,
    /// Defaults to floor_area × ceiling_height.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    pub u_ext: f64,
    pub envelope_area: f64,
    pub window_area: f64,
    pub u_window: f64,
    pub c_air: f64,
    pub c_env: f64,
    pub ach: f64,
    pub solar_aperture: f64,
    /// Defaults to the sizing rule in `variation.sizing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_nominal: Option<f64>,
}

impl Default for BuildingSection {
    fn default() -> Self {
        let p = BuildingParams::unsized_default();
        Self {
            floor_area: p.floor_area,
            ceiling_height: p.ceiling_height,
            volume: None,
            u_ext: p.u_ext,
            envelope_area: p.envelope_area,
            window_area: p.window_area,
            u_window: p.u_window,
            c_air: p.c_air,
            c_env: p.c_env,
            ach: p.ach,
            solar_aperture: p.solar_aperture,
            q_nominal: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeatherSection {
    Synthetic(SyntheticWeather),
    File {
        path: PathBuf,
        #[serde(default)]
        columns: ColumnMapping,
    },
}

impl Default for WeatherSection {
    fn default() -> Self {
        WeatherSection::Synthetic(SyntheticWeather::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainsSection {
    /// One of `residential`, `home_office`, `none`; ignored when both profiles are given.
    pub preset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weekday: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weekend: Option<Vec<f64>>,
}

impl Default for GainsSection {
    fn default() -> Self {
        Self {
            preset: "residential".into(),
            weekday: None,
            weekend: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    Pi,
    Hysteresis,
    Walker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSection {
    pub kind: ControlKind,
    pub setpoint_c: f64,
    pub kp: f64,
    pub ki: f64,
    pub band_k: f64,
}

impl Default for ControlSection {
    fn default() -> Self {
        let pi = PiState::default();
        Self {
            kind: ControlKind::Pi,
            setpoint_c: pi.setpoint,
            kp: pi.kp,
            ki: pi.ki,
            band_k: HysteresisState::default().band,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkerKind {
    Poisson,
    Sinusoid,
    Ramp,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkerSection {
    pub kind: WalkerKind,
    pub poisson: PoissonWalkConfig,
    pub sinusoid: SinusoidWalkConfig,
    pub ramp: RampWalkConfig,
    pub mixed: MixedSection,
}

impl Default for WalkerSection {
    fn default() -> Self {
        Self {
            kind: WalkerKind::Ramp,
            poisson: PoissonWalkConfig::default(),
            sinusoid: SinusoidWalkConfig::default(),
            ramp: RampWalkConfig::default(),
            mixed: MixedSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixedSection {
    /// Member walkers, each configured by its own table above.
    pub members: Vec<WalkerKind>,
    pub segment_len: IntDist,
}

impl Default for MixedSection {
    fn default() -> Self {
        Self {
            members: vec![WalkerKind::Poisson, WalkerKind::Sinusoid, WalkerKind::Ramp],
            segment_len: IntDist::Poisson { lam: 96.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSection {
    pub converters: Vec<String>,
    pub grid_cap: usize,
    pub sizing: HeaterSizing,
    pub presets: PresetSection,
    pub params: BTreeMap<String, Distribution>,
}

impl Default for VariationSection {
    fn default() -> Self {
        let u_ext = Distribution::gauss(0.8, 0.5)
            .and_then(|d| d.truncated(0.1, 2.5))
            .expect("default u_ext distribution");
        Self {
            converters: vec!["volume".into(), "size_heater".into()],
            grid_cap: DEFAULT_GRID_CAP,
            sizing: HeaterSizing::default(),
            presets: PresetSection::default(),
            params: BTreeMap::from([("UExt".to_string(), u_ext)]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PresetSection {
    /// Gain presets drawn uniformly per sampled run.
    pub gains: Vec<String>,
    /// Weather sources drawn uniformly per sampled run: `synthetic` or a CSV path.
    pub weather: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoverageSection {
    pub temp_lo_c: f64,
    pub temp_hi_c: f64,
    pub temp_bins: usize,
    pub signal_bins: usize,
}

impl Default for CoverageSection {
    fn default() -> Self {
        Self {
            temp_lo_c: DEFAULT_TEMP_RANGE.0,
            temp_hi_c: DEFAULT_TEMP_RANGE.1,
            temp_bins: DEFAULT_TEMP_BINS,
            signal_bins: DEFAULT_SIGNAL_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub lookback: usize,
    pub channels: Vec<Channel>,
    pub target: Target,
    pub lambda: f64,
    pub eps: f64,
    pub validation_days: u32,
    pub levels: Vec<f64>,
    pub actions: Vec<f64>,
}

impl Default for EvalSection {
    fn default() -> Self {
        let f = FeatureSpec::default();
        Self {
            lookback: f.lookback,
            channels: f.channels,
            target: f.target,
            lambda: eval::DEFAULT_LAMBDA,
            eps: eval::DEFAULT_EPS,
            validation_days: f.validation_days,
            levels: eval::default_levels(),
            actions: eval::default_levels(),
        }
    }
}

impl EvalSection {
    pub fn feature_spec(&self) -> Result<FeatureSpec, ConfigError> {
        let spec = FeatureSpec {
            lookback: self.lookback,
            channels: self.channels.clone(),
            validation_days: self.validation_days,
            target: self.target,
        };
        spec.validate().map_err(|e| invalid("eval", e))?;
        Ok(spec)
    }
}

impl ProjectConfig {
    /// Parses TOML, or JSON when the file name ends in `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg = if is_json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            Self::from_toml(&text)
        }
        .map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Validates everything that does not need file access.
    pub fn check(&self) -> Result<(), ConfigError> {
        self.building()?;
        self.control_spec()?;
        self.chain()?;
        self.variation_spec()?;
        self.gains()?;
        self.eval.feature_spec()?;
        if !(self.eval.lambda >= 0.0 && self.eval.lambda.is_finite()) {
            return Err(invalid("eval.lambda", "must be finite and non-negative"));
        }
        if !(self.eval.eps >= 0.0) {
            return Err(invalid("eval.eps", "must be non-negative"));
        }
        let r = &self.run;
        if r.dt_s == 0 || r.stop_s <= r.start_s || !(r.stop_s - r.start_s).is_multiple_of(r.dt_s) {
            return Err(invalid(
                "run",
                format!(
                    "need dt_s > 0, stop_s > start_s and a whole number of steps (start {}, stop {}, dt {})",
                    r.start_s, r.stop_s, r.dt_s
                ),
            ));
        }
        if r.initial_t_air_c.is_some() != r.initial_t_env_c.is_some() {
            return Err(invalid(
                "run.initial_t_air_c",
                "initial_t_air_c and initial_t_env_c must be given together",
            ));
        }
        if let WeatherSection::Synthetic(params) = &self.weather {
            params.validate().map_err(|e| invalid("weather", e))?;
        }
        Ok(())
    }

    pub fn sizing(&self) -> HeaterSizing {
        self.variation.sizing
    }

    /// The configured building; missing volume and heater power are derived.
    pub fn building(&self) -> Result<BuildingParams, ConfigError> {
        let b = &self.building;
        let mut p = BuildingParams {
            floor_area: b.floor_area,
            ceiling_height: b.ceiling_height,
            volume: b.volume.unwrap_or(b.floor_area * b.ceiling_height),
            u_ext: b.u_ext,
            envelope_area: b.envelope_area,
            window_area: b.window_area,
            u_window: b.u_window,
            c_air: b.c_air,
            c_env: b.c_env,
            ach: b.ach,
            solar_aperture: b.solar_aperture,
            q_nominal: 1.0,
        };
        self.sizing().validate().map_err(|e| invalid("variation.sizing", e))?;
        p.q_nominal = b.q_nominal.unwrap_or_else(|| self.sizing().size(&p));
        p.validate().map_err(|e| match e {
            crate::thermal::ThermalError::InvalidParam { field, reason } => {
                invalid(&format!("building.{field}"), reason)
            }
            other => invalid("building", other),
        })?;
        Ok(p)
    }

    pub fn gains(&self) -> Result<GainSchedule, ConfigError> {
        let g = &self.gains;
        match (&g.weekday, &g.weekend) {
            (Some(wd), Some(we)) => {
                let arr = |v: &Vec<f64>, key: &str| -> Result<[f64; 24], ConfigError> {
                    v.as_slice()
                        .try_into()
                        .map_err(|_| invalid(key, format!("needs 24 hourly values, got {}", v.len())))
                };
                let s = GainSchedule {
                    weekday: arr(wd, "gains.weekday")?,
                    weekend: arr(we, "gains.weekend")?,
                };
                s.validate().map_err(|e| invalid("gains", e))?;
                Ok(s)
            }
            (None, None) => GainSchedule::preset(&g.preset).map_err(|e| invalid("gains.preset", e)),
            _ => Err(invalid("gains", "weekday and weekend profiles must be given together")),
        }
    }

    /// Weather model; relative file paths resolve against `base_dir`.
    pub fn weather(&self, base_dir: &Path) -> Result<WeatherModel, ConfigError> {
        match &self.weather {
            WeatherSection::Synthetic(params) => {
                params.validate().map_err(|e| invalid("weather", e))?;
                Ok(WeatherModel::Synthetic(params.clone()))
            }
            WeatherSection::File { path, columns } => {
                load_weather_csv(&base_dir.join(path), columns).map_err(|e| invalid("weather.path", e))
            }
        }
    }

    pub fn boundary(&self, base_dir: &Path) -> Result<Boundary, ConfigError> {
        Ok(Boundary::new(self.weather(base_dir)?, self.gains()?))
    }

    fn walker_config(&self, kind: WalkerKind) -> Option<WalkerConfig> {
        let w = &self.walker;
        match kind {
            WalkerKind::Poisson => Some(WalkerConfig::Poisson(w.poisson.clone())),
            WalkerKind::Sinusoid => Some(WalkerConfig::Sinusoid(w.sinusoid.clone())),
            WalkerKind::Ramp => Some(WalkerConfig::Ramp(w.ramp.clone())),
            WalkerKind::Mixed => None,
        }
    }

    pub fn walker_spec(&self) -> Result<WalkerSpec, ConfigError> {
        if let Some(single) = self.walker_config(self.walker.kind) {
            return Ok(WalkerSpec::Single(single));
        }
        let members = self
            .walker
            .mixed
            .members
            .iter()
            .map(|&k| {
                self.walker_config(k)
                    .ok_or_else(|| invalid("walker.mixed.members", "a mixture cannot contain `mixed`"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MixedWalkConfig::new(members, self.walker.mixed.segment_len.clone())
            .map(WalkerSpec::Mixed)
            .map_err(|e| invalid("walker.mixed", e))
    }

    pub fn control_spec(&self) -> Result<ControlSpec, ConfigError> {
        let c = &self.control;
        match c.kind {
            ControlKind::Pi => PiState::new(c.kp, c.ki, c.setpoint_c)
                .map(|s| ControlSpec::Controller(Controller::Pi(s)))
                .map_err(|e| invalid("control", e)),
            ControlKind::Hysteresis => HysteresisState::new(c.setpoint_c, c.band_k)
                .map(|s| ControlSpec::Controller(Controller::Hysteresis(s)))
                .map_err(|e| invalid("control.band_k", e)),
            ControlKind::Walker => self.walker_spec().map(ControlSpec::Walker),
        }
    }

    pub fn chain(&self) -> Result<ConverterChain, ConfigError> {
        ConverterRegistry::builtin(self.sizing())
            .chain(&self.variation.converters)
            .map_err(|e| invalid("variation.converters", e))
    }

    pub fn variation_spec(&self) -> Result<VariationSpec, ConfigError> {
        VariationSpec::from_map(&self.variation.params).map_err(|e| invalid("variation.params", e))
    }

    pub fn initial(&self) -> InitialState {
        match (self.run.initial_t_air_c, self.run.initial_t_env_c) {
            (Some(a), Some(e)) => InitialState::Explicit(ThermalState::new(a, e)),
            _ => InitialState::Steady,
        }
    }

    pub fn presets(&self, base_dir: &Path) -> Result<PresetChoices, ConfigError> {
        for g in &self.variation.presets.gains {
            GainSchedule::preset(g).map_err(|e| invalid("variation.presets.gains", e))?;
        }
        let mut weather = BTreeMap::new();
        for w in &self.variation.presets.weather {
            let model = if w == "synthetic" {
                WeatherModel::Synthetic(SyntheticWeather::default())
            } else {
                load_weather_csv(&base_dir.join(w), &ColumnMapping::default())
                    .map_err(|e| invalid("variation.presets.weather", e))?
            };
            weather.insert(w.clone(), model);
        }
        Ok(PresetChoices {
            gains: self.variation.presets.gains.clone(),
            weather,
        })
    }

    pub fn template(&self, base_dir: &Path) -> Result<RunTemplate, ConfigError> {
        self.check()?;
        Ok(RunTemplate {
            start_time: self.run.start_s,
            stop_time: self.run.stop_s,
            dt: self.run.dt_s,
            building: self.building()?,
            chain: self.chain()?,
            boundary: self.boundary(base_dir)?,
            control: self.control_spec()?,
            initial: self.initial(),
            presets: self.presets(base_dir)?,
        })
    }
}

/// Fully commented default configuration written by `thermex init`.
pub fn init_document() -> String {
    let b = BuildingSection::default();
    let w = SyntheticWeather::default();
    let c = ControlSection::default();
    let s = HeaterSizing::default();
    let e = EvalSection::default();
    let cov = CoverageSection::default();
    let r = RunSection::default();
    let f = |x: f64| format!("{x:?}");
    let list = |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(", ");
    format!(
        r#"# thermex project configuration. Every key is optional; the values below are the defaults.

[run]
# Simulation window in seconds since January 1 of year 1 (365-day years).
start_s = {start}
stop_s = {stop}
dt_s = {dt}
# Seed used when neither --seed nor THERMEX_SEED is set.
seed = {seed}
# Give both to start from fixed temperatures instead of steady state:
# initial_t_air_c = 20.0
# initial_t_env_c = 18.0

[building]
floor_area = {fa}        # m²
ceiling_height = {ch}      # m
# volume = 375.0          # m³, defaults to floor_area × ceiling_height
u_ext = {uext}               # W/(m²K), exterior wall U-value
envelope_area = {ea}     # m², including windows
window_area = {wa}        # m²
u_window = {uw}            # W/(m²K)
c_air = {cair}         # J/K, air and furnishings
c_env = {cenv}         # J/K, envelope
ach = {ach}                 # 1/h air changes
solar_aperture = {sa}      # fraction of irradiance entering through windows
# q_nominal = 12715.5     # W, defaults to the sizing rule in [variation.sizing]

[weather]
kind = "synthetic"        # or "file" with `path` and an optional [weather.columns] table
t_mean = {tm}
t_annual_amp = {tam}
t_diurnal_amp = {tdm}
solar_peak = {sp}        # W/m²
coldest_day = {cd}       # day of year

[gains]
preset = "residential"    # residential, home_office or none
# weekday = [24 hourly values in W]
# weekend = [24 hourly values in W]

[control]
kind = "pi"               # pi, hysteresis or walker
setpoint_c = {set}
kp = {kp}                  # fraction per K
ki = {ki}               # fraction per K·s
band_k = {band}              # hysteresis half-width

[walker]
kind = "ramp"             # poisson, sinusoid, ramp or mixed

[walker.poisson]
lam = 8.0                 # mean hold, steps
level_low = 0.0
level_high = 1.0

[walker.sinusoid]
freq = {{ kind = "uniform_int", lo = 8, hi = 96 }}     # steps per period
amp = {{ kind = "uniform", lo = 0.2, hi = 1.0 }}
steady = {{ kind = "poisson", lam = 4.0 }}             # hold steps between segments

[walker.ramp]
freq = {{ kind = "uniform_int", lo = 4, hi = 48 }}     # steps per ramp leg
steady = {{ kind = "poisson", lam = 8.0 }}

[walker.mixed]
members = ["poisson", "sinusoid", "ramp"]
segment_len = {{ kind = "poisson", lam = 96.0 }}

[variation]
# Dependent-parameter updates applied after sampling, in order.
converters = ["volume", "size_heater"]
grid_cap = {cap}

[variation.sizing]
design_delta_t = {ddt}     # K
design_margin = {dm}

[variation.presets]
gains = []                # e.g. ["residential", "home_office"]
weather = []              # e.g. ["synthetic", "weather/site.csv"]

[variation.params]
# Distribution kinds: gauss, uniform, mixture, piecewise_pdf, grid, constant;
# any of them takes optional `bounds = [lo, hi]`.
UExt = {{ kind = "gauss", mu = 0.8, sigma = 0.5, bounds = [0.1, 2.5] }}

[coverage]
temp_lo_c = {tlo}
temp_hi_c = {thi}
temp_bins = {tb}
signal_bins = {sb}

[eval]
lookback = {lb}             # steps of history per sample
channels = ["t_air", "control_signal", "t_out", "solar", "internal_gain"]
target = "increment"      # or "level"
lambda = {lam}
eps = {eps}                # K, temperature changes below this count as zero
validation_days = {vd}
levels = [{levels}]
actions = [{actions}]
"#,
        start = r.start_s,
        stop = r.stop_s,
        dt = r.dt_s,
        seed = r.seed,
        fa = f(b.floor_area),
        ch = f(b.ceiling_height),
        uext = f(b.u_ext),
        ea = f(b.envelope_area),
        wa = f(b.window_area),
        uw = f(b.u_window),
        cair = f(b.c_air),
        cenv = f(b.c_env),
        ach = f(b.ach),
        sa = f(b.solar_aperture),
        tm = f(w.t_mean),
        tam = f(w.t_annual_amp),
        tdm = f(w.t_diurnal_amp),
        sp = f(w.solar_peak),
        cd = f(w.coldest_day),
        set = f(c.setpoint_c),
        kp = f(c.kp),
        ki = f(c.ki),
        band = f(c.band_k),
        cap = DEFAULT_GRID_CAP,
        ddt = f(s.design_delta_t),
        dm = f(s.design_margin),
        tlo = f(cov.temp_lo_c),
        thi = f(cov.temp_hi_c),
        tb = cov.temp_bins,
        sb = cov.signal_bins,
        lb = e.lookback,
        lam = f(e.lambda),
        eps = f(e.eps),
        vd = e.validation_days,
        levels = list(&e.levels),
        actions = list(&e.actions),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_document_parses_to_defaults() {
        let cfg = ProjectConfig::from_toml(&init_document()).unwrap();
        assert_eq!(cfg, ProjectConfig::default());
        cfg.check().unwrap();
    }

    #[test]
    fn reemit_is_fixed_point() {
        let once = ProjectConfig::from_toml(&init_document()).unwrap().to_toml();
        let twice = ProjectConfig::from_toml(&once).unwrap().to_toml();
        assert_eq!(once, twice);
    }

    #[test]
    fn json_matches_toml() {
        let cfg = ProjectConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ProjectConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ProjectConfig::from_toml("[building]\nflor_area = 3.0\n").unwrap_err();
        assert!(err.contains("flor_area"), "{err}");
        let err = ProjectConfig::from_toml("[variation.params]\nUExt = { kind = \"gaus\", mu = 1.0 }\n")
            .unwrap_err();
        assert!(err.contains("gaus"), "{err}");
        assert!(ProjectConfig::from_toml("[weather]\nkind = \"synthetic\"\nt_meen = 3.0\n").is_err());
    }

    #[test]
    fn invalid_values_name_key() {
        let cfg = ProjectConfig::from_toml("[building]\nu_ext = -1.0\n").unwrap();
        let err = cfg.check().unwrap_err().to_string();
        assert!(err.contains("building.u_ext"), "{err}");
        let cfg = ProjectConfig::from_toml("[variation.params]\nUExtra = { kind = \"constant\", value = 1.0 }\n").unwrap();
        let err = cfg.check().unwrap_err().to_string();
        assert!(err.contains("UExtra"), "{err}");
    }

    #[test]
    fn default_building_is_sized() {
        let p = ProjectConfig::default().building().unwrap();
        assert_eq!(p, BuildingParams::default());
    }

    #[test]
    fn mixed_walker_from_config() {
        let mut cfg = ProjectConfig::default();
        cfg.control.kind = ControlKind::Walker;
        cfg.walker.kind = WalkerKind::Mixed;
        match cfg.control_spec().unwrap() {
            ControlSpec::Walker(WalkerSpec::Mixed(m)) => assert_eq!(m.members().len(), 3),
            other => panic!("{other:?}"),
        }
        cfg.walker.mixed.members.push(WalkerKind::Mixed);
        assert!(cfg.control_spec().is_err());
    }
}
