//! Excitation walkers.
//!
//! Each walker turns a configuration and a random stream into a sequence of
//! heating fractions in `[0, 1]`, one value per simulation step. The walkers
//! consume random draws in a fixed order per iteration (documented on each
//! function) so that a mixture of walkers sharing one stream stays
//! reproducible.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;

/// Default simulation step used by generated signals, in seconds.
pub const DEFAULT_STEP_SECONDS: u32 = 900;

/// Largest Poisson mean accepted anywhere in a walker config.
pub const MAX_POISSON_LAM: f64 = 500.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("invalid walker config: {0}")]
    Config(String),
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, SignalError> {
    Err(SignalError::Config(msg.into()))
}

/// A precomputed control sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub values: Vec<f64>,
    pub step_seconds: u32,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            step_seconds: DEFAULT_STEP_SECONDS,
        }
    }

    pub fn constant(level: f64, num_steps: usize) -> Self {
        Self::new(vec![level; num_steps])
    }

    pub fn with_step_seconds(mut self, step_seconds: u32) -> Self {
        self.step_seconds = step_seconds;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Distribution over non-negative integers (periods, hold counts, segment lengths).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntDist {
    Constant { value: u64 },
    UniformInt { lo: u64, hi: u64 },
    Poisson { lam: f64 },
}

impl IntDist {
    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        match *self {
            IntDist::Constant { value } => value,
            IntDist::UniformInt { lo, hi } => rng.uniform_int(lo, hi),
            IntDist::Poisson { lam } => rng.poisson(lam),
        }
    }

    /// Smallest value the distribution can produce.
    pub fn min_value(&self) -> u64 {
        match *self {
            IntDist::Constant { value } => value,
            IntDist::UniformInt { lo, .. } => lo,
            IntDist::Poisson { .. } => 0,
        }
    }

    /// Largest value the distribution can produce, `None` when unbounded.
    pub fn max_value(&self) -> Option<u64> {
        match *self {
            IntDist::Constant { value } => Some(value),
            IntDist::UniformInt { hi, .. } => Some(hi),
            IntDist::Poisson { .. } => None,
        }
    }

    fn validate(&self, what: &str) -> Result<(), SignalError> {
        match *self {
            IntDist::Constant { .. } => Ok(()),
            IntDist::UniformInt { lo, hi } if lo > hi => {
                config_err(format!("{what}: uniform_int lo {lo} > hi {hi}"))
            }
            IntDist::UniformInt { .. } => Ok(()),
            IntDist::Poisson { lam } if !(lam > 0.0 && lam <= MAX_POISSON_LAM) => config_err(
                format!("{what}: poisson lam must lie in (0, {MAX_POISSON_LAM}], got {lam}"),
            ),
            IntDist::Poisson { .. } => Ok(()),
        }
    }

    fn validate_period(&self, what: &str) -> Result<(), SignalError> {
        self.validate(what)?;
        if self.min_value() < 2 {
            return config_err(format!(
                "{what}: every drawn period must be >= 2, distribution can produce {}",
                self.min_value()
            ));
        }
        Ok(())
    }
}

/// Distribution over the unit interval (sinusoid amplitudes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnitDist {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl UnitDist {
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            UnitDist::Constant { value } => value,
            UnitDist::Uniform { lo, hi } => rng.uniform(lo, hi),
        }
    }

    fn validate(&self, what: &str) -> Result<(), SignalError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        match *self {
            UnitDist::Constant { value } if unit(value) => Ok(()),
            UnitDist::Uniform { lo, hi } if unit(lo) && unit(hi) && lo <= hi => Ok(()),
            ref d => config_err(format!("{what}: must be supported on [0, 1], got {d:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoissonWalkRaw {
    lam: f64,
    #[serde(default)]
    level_low: f64,
    #[serde(default = "one")]
    level_high: f64,
}

fn one() -> f64 {
    1.0
}

/// Piecewise-constant levels held for Poisson-distributed durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoissonWalkRaw", into = "PoissonWalkRaw")]
pub struct PoissonWalkConfig {
    lam: f64,
    level_low: f64,
    level_high: f64,
}

impl PoissonWalkConfig {
    pub fn new(lam: f64, level_low: f64, level_high: f64) -> Result<Self, SignalError> {
        if !(lam > 0.0 && lam <= MAX_POISSON_LAM) {
            return config_err(format!(
                "poisson lam must lie in (0, {MAX_POISSON_LAM}], got {lam}"
            ));
        }
        if !(0.0 <= level_low && level_low <= level_high && level_high <= 1.0) {
            return config_err(format!(
                "poisson levels must satisfy 0 <= low <= high <= 1, got [{level_low}, {level_high}]"
            ));
        }
        Ok(Self {
            lam,
            level_low,
            level_high,
        })
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn levels(&self) -> (f64, f64) {
        (self.level_low, self.level_high)
    }
}

impl Default for PoissonWalkConfig {
    fn default() -> Self {
        Self::new(8.0, 0.0, 1.0).expect("default poisson config")
    }
}

impl TryFrom<PoissonWalkRaw> for PoissonWalkConfig {
    type Error = SignalError;
    fn try_from(r: PoissonWalkRaw) -> Result<Self, Self::Error> {
        Self::new(r.lam, r.level_low, r.level_high)
    }
}

impl From<PoissonWalkConfig> for PoissonWalkRaw {
    fn from(c: PoissonWalkConfig) -> Self {
        Self {
            lam: c.lam,
            level_low: c.level_low,
            level_high: c.level_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SinusoidWalkRaw {
    freq: IntDist,
    amp: UnitDist,
    steady: IntDist,
}

/// Chained sine segments of random period and amplitude around 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SinusoidWalkRaw", into = "SinusoidWalkRaw")]
pub struct SinusoidWalkConfig {
    freq: IntDist,
    amp: UnitDist,
    steady: IntDist,
}

impl SinusoidWalkConfig {
    /// Midline of every segment.
    pub const MID: f64 = 0.5;

    pub fn new(freq: IntDist, amp: UnitDist, steady: IntDist) -> Result<Self, SignalError> {
        freq.validate_period("sinusoid freq")?;
        amp.validate("sinusoid amp")?;
        steady.validate("sinusoid steady")?;
        Ok(Self { freq, amp, steady })
    }

    pub fn freq(&self) -> &IntDist {
        &self.freq
    }

    pub fn amp(&self) -> &UnitDist {
        &self.amp
    }

    pub fn steady(&self) -> &IntDist {
        &self.steady
    }
}

impl Default for SinusoidWalkConfig {
    fn default() -> Self {
        Self::new(
            IntDist::UniformInt { lo: 8, hi: 96 },
            UnitDist::Uniform { lo: 0.2, hi: 1.0 },
            IntDist::Poisson { lam: 4.0 },
        )
        .expect("default sinusoid config")
    }
}

impl TryFrom<SinusoidWalkRaw> for SinusoidWalkConfig {
    type Error = SignalError;
    fn try_from(r: SinusoidWalkRaw) -> Result<Self, Self::Error> {
        Self::new(r.freq, r.amp, r.steady)
    }
}

impl From<SinusoidWalkConfig> for SinusoidWalkRaw {
    fn from(c: SinusoidWalkConfig) -> Self {
        Self {
            freq: c.freq,
            amp: c.amp,
            steady: c.steady,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RampWalkRaw {
    freq: IntDist,
    steady: IntDist,
}

/// Linear ramps between 0 and 1 with holds at both extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RampWalkRaw", into = "RampWalkRaw")]
pub struct RampWalkConfig {
    freq: IntDist,
    steady: IntDist,
}

impl RampWalkConfig {
    pub const MIN_LEVEL: f64 = 0.0;
    pub const MAX_LEVEL: f64 = 1.0;

    pub fn new(freq: IntDist, steady: IntDist) -> Result<Self, SignalError> {
        freq.validate_period("ramp freq")?;
        steady.validate("ramp steady")?;
        Ok(Self { freq, steady })
    }

    pub fn freq(&self) -> &IntDist {
        &self.freq
    }

    pub fn steady(&self) -> &IntDist {
        &self.steady
    }
}

impl Default for RampWalkConfig {
    fn default() -> Self {
        Self::new(
            IntDist::UniformInt { lo: 4, hi: 48 },
            IntDist::Poisson { lam: 8.0 },
        )
        .expect("default ramp config")
    }
}

impl TryFrom<RampWalkRaw> for RampWalkConfig {
    type Error = SignalError;
    fn try_from(r: RampWalkRaw) -> Result<Self, Self::Error> {
        Self::new(r.freq, r.steady)
    }
}

impl From<RampWalkConfig> for RampWalkRaw {
    fn from(c: RampWalkConfig) -> Self {
        Self {
            freq: c.freq,
            steady: c.steady,
        }
    }
}

/// One of the three elementary walkers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkerConfig {
    Poisson(PoissonWalkConfig),
    Sinusoid(SinusoidWalkConfig),
    Ramp(RampWalkConfig),
}

impl WalkerConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            WalkerConfig::Poisson(_) => "poisson",
            WalkerConfig::Sinusoid(_) => "sinusoid",
            WalkerConfig::Ramp(_) => "ramp",
        }
    }

    pub fn generate(&self, num_steps: usize, rng: &mut RngStream) -> Signal {
        match self {
            WalkerConfig::Poisson(c) => poisson_walk(c, num_steps, rng),
            WalkerConfig::Sinusoid(c) => sinusoid_walk(c, num_steps, rng),
            WalkerConfig::Ramp(c) => ramp_walk(c, num_steps, rng),
        }
    }
}

/// Random alternation of elementary walkers in segments.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedWalkConfig {
    members: Vec<WalkerConfig>,
    segment_len: IntDist,
}

impl MixedWalkConfig {
    pub fn new(members: Vec<WalkerConfig>, segment_len: IntDist) -> Result<Self, SignalError> {
        if members.is_empty() {
            return config_err("mixed walker needs at least one member config");
        }
        segment_len.validate("mixed segment_len")?;
        if segment_len.max_value() == Some(0) {
            return config_err("mixed segment_len can only produce 0, generation would not progress");
        }
        Ok(Self {
            members,
            segment_len,
        })
    }

    pub fn members(&self) -> &[WalkerConfig] {
        &self.members
    }

    pub fn segment_len(&self) -> &IntDist {
        &self.segment_len
    }
}

/// Any excitation source: a single walker or a mixture of walkers.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkerSpec {
    Single(WalkerConfig),
    Mixed(MixedWalkConfig),
}

impl WalkerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            WalkerSpec::Single(w) => w.kind(),
            WalkerSpec::Mixed(_) => "mixed",
        }
    }

    pub fn generate(&self, num_steps: usize, rng: &mut RngStream) -> Signal {
        match self {
            WalkerSpec::Single(w) => w.generate(num_steps, rng),
            WalkerSpec::Mixed(m) => mixed_walk(m, num_steps, rng),
        }
    }
}

fn truncated(mut values: Vec<f64>, num_steps: usize) -> Signal {
    values.truncate(num_steps);
    Signal::new(values)
}

/// Poisson walker.
///
/// Per iteration: draw the level `v ~ U[level_low, level_high)`, then the
/// repeat count `k ~ Poisson(lam)`, and append `k` copies of `v`.
pub fn poisson_walk(cfg: &PoissonWalkConfig, num_steps: usize, rng: &mut RngStream) -> Signal {
    let mut out = Vec::with_capacity(num_steps + 64);
    while out.len() < num_steps {
        let v = rng.uniform(cfg.level_low, cfg.level_high);
        let k = rng.poisson(cfg.lam) as usize;
        out.resize(out.len() + k, v);
    }
    truncated(out, num_steps)
}

/// Sinusoid walker.
///
/// Per iteration: draw period, amplitude, and hold count (in that order), emit
/// one full period of `0.5 + 0.5 * amp * sin(phase)` clipped to `[0, 1]`, then
/// repeat the last value `hold` times. The phase carries over between
/// segments.
pub fn sinusoid_walk(cfg: &SinusoidWalkConfig, num_steps: usize, rng: &mut RngStream) -> Signal {
    let mut out = Vec::with_capacity(num_steps + 128);
    let mut phase = 0.0_f64;
    while out.len() < num_steps {
        let freq = cfg.freq.sample(rng);
        let amp = cfg.amp.sample(rng);
        let hold = cfg.steady.sample(rng) as usize;
        let omega = TAU / freq as f64;
        for _ in 0..freq {
            out.push((SinusoidWalkConfig::MID + 0.5 * amp * phase.sin()).clamp(0.0, 1.0));
            phase += omega;
        }
        let last = *out.last().expect("period is at least 2");
        out.resize(out.len() + hold, last);
    }
    truncated(out, num_steps)
}

/// Ramp walker.
///
/// Per iteration: draw the leg length `freq`, ramp up over `freq` values from
/// 0 to 1 in steps of `1 / (freq - 1)`, draw and apply the high hold, ramp
/// down over the `freq - 2` interior values, then draw and apply the low hold.
pub fn ramp_walk(cfg: &RampWalkConfig, num_steps: usize, rng: &mut RngStream) -> Signal {
    let mut out = Vec::with_capacity(num_steps + 128);
    while out.len() < num_steps {
        let freq = cfg.freq.sample(rng);
        let step = 1.0 / (freq - 1) as f64;
        out.extend((0..freq).map(|i| RampWalkConfig::MIN_LEVEL + step * i as f64));
        let high = cfg.steady.sample(rng) as usize;
        out.resize(out.len() + high, RampWalkConfig::MAX_LEVEL);
        out.extend((1..freq - 1).map(|i| RampWalkConfig::MAX_LEVEL - step * i as f64));
        let low = cfg.steady.sample(rng) as usize;
        out.resize(out.len() + low, RampWalkConfig::MIN_LEVEL);
    }
    truncated(out, num_steps)
}

/// Mixed walker.
///
/// Per segment: pick a member uniformly, draw the segment length, then run
/// the member for exactly that many steps on the same stream.
pub fn mixed_walk(cfg: &MixedWalkConfig, num_steps: usize, rng: &mut RngStream) -> Signal {
    let mut out = Vec::with_capacity(num_steps);
    while out.len() < num_steps {
        let member = &cfg.members[rng.index(cfg.members.len())];
        let len = cfg.segment_len.sample(rng) as usize;
        out.extend(member.generate(len, rng).values);
    }
    truncated(out, num_steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_is_empty() {
        let mut rng = RngStream::new(0);
        assert!(poisson_walk(&PoissonWalkConfig::default(), 0, &mut rng).is_empty());
        assert!(sinusoid_walk(&SinusoidWalkConfig::default(), 0, &mut rng).is_empty());
        assert!(ramp_walk(&RampWalkConfig::default(), 0, &mut rng).is_empty());
    }

    #[test]
    fn degenerate_level_range() {
        let cfg = PoissonWalkConfig::new(3.0, 0.7, 0.7).unwrap();
        let s = poisson_walk(&cfg, 5, &mut RngStream::new(1));
        assert_eq!(s.values, vec![0.7; 5]);
    }

    #[test]
    fn rejects_bad_poisson() {
        assert!(PoissonWalkConfig::new(0.0, 0.0, 1.0).is_err());
        assert!(PoissonWalkConfig::new(-1.0, 0.0, 1.0).is_err());
        assert!(PoissonWalkConfig::new(2.0, 0.6, 0.4).is_err());
        assert!(PoissonWalkConfig::new(2.0, 0.0, 1.2).is_err());
    }

    #[test]
    fn rejects_short_periods() {
        let err = RampWalkConfig::new(IntDist::Constant { value: 1 }, IntDist::Constant { value: 0 });
        assert!(err.is_err());
        let err = SinusoidWalkConfig::new(
            IntDist::Poisson { lam: 5.0 },
            UnitDist::Constant { value: 0.5 },
            IntDist::Constant { value: 0 },
        );
        assert!(err.is_err());
        assert!(RampWalkConfig::new(
            IntDist::UniformInt { lo: 2, hi: 2 },
            IntDist::Constant { value: 0 }
        )
        .is_ok());
    }

    #[test]
    fn zero_amplitude_is_midline() {
        let cfg = SinusoidWalkConfig::new(
            IntDist::UniformInt { lo: 3, hi: 20 },
            UnitDist::Constant { value: 0.0 },
            IntDist::Constant { value: 0 },
        )
        .unwrap();
        let s = sinusoid_walk(&cfg, 300, &mut RngStream::new(4));
        assert!(s.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn full_amplitude_spans_range() {
        let cfg = SinusoidWalkConfig::new(
            IntDist::Constant { value: 40 },
            UnitDist::Constant { value: 1.0 },
            IntDist::Constant { value: 0 },
        )
        .unwrap();
        let s = sinusoid_walk(&cfg, 120, &mut RngStream::new(4));
        let lo = s.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = s.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= 0.05 && hi >= 0.95, "range [{lo}, {hi}]");
        assert!(s.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn ramp_single_cycle() {
        let cfg = RampWalkConfig::new(IntDist::Constant { value: 5 }, IntDist::Constant { value: 1 })
            .unwrap();
        let s = ramp_walk(&cfg, 10, &mut RngStream::new(0));
        assert_eq!(
            s.values,
            vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 0.75, 0.5, 0.25, 0.0]
        );
    }

    #[test]
    fn ramp_minimal_period_alternates() {
        let cfg = RampWalkConfig::new(IntDist::Constant { value: 2 }, IntDist::Constant { value: 0 })
            .unwrap();
        let s = ramp_walk(&cfg, 9, &mut RngStream::new(0));
        let expected: Vec<f64> = (0..9).map(|i| (i % 2) as f64).collect();
        assert_eq!(s.values, expected);
    }

    #[test]
    fn mixed_requires_members() {
        assert!(MixedWalkConfig::new(vec![], IntDist::Constant { value: 10 }).is_err());
        assert!(MixedWalkConfig::new(
            vec![WalkerConfig::Ramp(RampWalkConfig::default())],
            IntDist::Constant { value: 0 }
        )
        .is_err());
    }

    #[test]
    fn config_serde_validates() {
        let ok: PoissonWalkConfig = serde_json::from_str(r#"{"lam": 8.0}"#).unwrap();
        assert_eq!(ok.levels(), (0.0, 1.0));
        assert!(serde_json::from_str::<PoissonWalkConfig>(r#"{"lam": -1.0}"#).is_err());
        assert!(serde_json::from_str::<PoissonWalkConfig>(r#"{"lam": 1.0, "lamda": 2}"#).is_err());
        let ramp: Result<RampWalkConfig, _> = serde_json::from_str(
            r#"{"freq": {"kind": "constant", "value": 1}, "steady": {"kind": "constant", "value": 0}}"#,
        );
        assert!(ramp.is_err());
    }
}
