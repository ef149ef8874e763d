//! Building populations: parameter distributions and converter chains.
//!
//! A [`VariationSpec`] maps building parameter names to distributions. A
//! sampled building starts as a copy of a base building, receives one draw per
//! varied parameter, and is then passed through an ordered chain of
//! [`Converter`]s that recompute dependent parameters (air volume, heater
//! size).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;
use crate::thermal::{derive_conductances, BuildingParams, ThermalError};

/// Attempts before truncated sampling gives up.
pub const REJECTION_CAP: usize = 10_000;

/// Default cap on the size of a grid product.
pub const DEFAULT_GRID_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("truncation bounds [{lo}, {hi}] rejected {REJECTION_CAP} consecutive draws; the interval carries almost no probability mass")]
    RejectionCap { lo: f64, hi: f64 },
    #[error("unknown building parameter `{0}`")]
    UnknownParam(String),
    #[error("unknown converter `{0}`")]
    UnknownConverter(String),
    #[error("converter `{later}` writes `{param}`, which the earlier converter `{earlier}` already read")]
    ChainOrder {
        earlier: String,
        later: String,
        param: Param,
    },
    #[error("grid parameter `{0}` uses a non-grid distribution")]
    NotGrid(String),
    #[error("grid product has {size} combinations, above the cap of {cap}")]
    GridTooLarge { size: usize, cap: usize },
    #[error("sampled building rejected after conversion: {0}")]
    Rejected(ThermalError),
    #[error("invalid heater sizing: {0}")]
    Sizing(String),
}

/// Named fields of [`BuildingParams`] that can be varied or converted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    FloorArea,
    CeilingHeight,
    Volume,
    UExt,
    EnvelopeArea,
    WindowArea,
    UWindow,
    CAir,
    CEnv,
    Ach,
    SolarAperture,
    QNominal,
}

impl Param {
    pub const ALL: [Param; 12] = [
        Param::FloorArea,
        Param::CeilingHeight,
        Param::Volume,
        Param::UExt,
        Param::EnvelopeArea,
        Param::WindowArea,
        Param::UWindow,
        Param::CAir,
        Param::CEnv,
        Param::Ach,
        Param::SolarAperture,
        Param::QNominal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::FloorArea => "floor_area",
            Param::CeilingHeight => "ceiling_height",
            Param::Volume => "volume",
            Param::UExt => "u_ext",
            Param::EnvelopeArea => "envelope_area",
            Param::WindowArea => "window_area",
            Param::UWindow => "u_window",
            Param::CAir => "c_air",
            Param::CEnv => "c_env",
            Param::Ach => "ach",
            Param::SolarAperture => "solar_aperture",
            Param::QNominal => "q_nominal",
        }
    }

    /// Resolves a field name; `UExt` is accepted for the wall U-value.
    pub fn from_name(name: &str) -> Result<Param, VariationError> {
        if name == "UExt" {
            return Ok(Param::UExt);
        }
        Param::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| VariationError::UnknownParam(name.to_string()))
    }

    pub fn get(self, p: &BuildingParams) -> f64 {
        match self {
            Param::FloorArea => p.floor_area,
            Param::CeilingHeight => p.ceiling_height,
            Param::Volume => p.volume,
            Param::UExt => p.u_ext,
            Param::EnvelopeArea => p.envelope_area,
            Param::WindowArea => p.window_area,
            Param::UWindow => p.u_window,
            Param::CAir => p.c_air,
            Param::CEnv => p.c_env,
            Param::Ach => p.ach,
            Param::SolarAperture => p.solar_aperture,
            Param::QNominal => p.q_nominal,
        }
    }

    pub fn set(self, p: &mut BuildingParams, v: f64) {
        let slot = match self {
            Param::FloorArea => &mut p.floor_area,
            Param::CeilingHeight => &mut p.ceiling_height,
            Param::Volume => &mut p.volume,
            Param::UExt => &mut p.u_ext,
            Param::EnvelopeArea => &mut p.envelope_area,
            Param::WindowArea => &mut p.window_area,
            Param::UWindow => &mut p.u_window,
            Param::CAir => &mut p.c_air,
            Param::CEnv => &mut p.c_env,
            Param::Ach => &mut p.ach,
            Param::SolarAperture => &mut p.solar_aperture,
            Param::QNominal => &mut p.q_nominal,
        };
        *slot = v;
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub dist: Distribution,
}

/// Serialized form of [`Distribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionConfig {
    Gauss {
        mu: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<[f64; 2]>,
    },
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<[f64; 2]>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<[f64; 2]>,
    },
    PiecewisePdf {
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<[f64; 2]>,
    },
    Grid {
        values: Vec<f64>,
    },
    Constant {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Gauss { mu: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    Mixture { cumulative: Vec<f64>, components: Vec<MixtureComponent> },
    Piecewise { breakpoints: Vec<f64>, densities: Vec<f64>, cdf: Vec<f64> },
    Grid(Vec<f64>),
    Constant(f64),
}

/// A validated univariate distribution with optional truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionConfig", into = "DistributionConfig")]
pub struct Distribution {
    shape: Shape,
    bounds: Option<(f64, f64)>,
}

fn dist_err<T>(msg: impl Into<String>) -> Result<T, VariationError> {
    Err(VariationError::Distribution(msg.into()))
}

impl Distribution {
    pub fn constant(value: f64) -> Self {
        Self {
            shape: Shape::Constant(value),
            bounds: None,
        }
    }

    pub fn gauss(mu: f64, sigma: f64) -> Result<Self, VariationError> {
        DistributionConfig::Gauss {
            mu,
            sigma,
            bounds: None,
        }
        .try_into()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, VariationError> {
        DistributionConfig::Uniform {
            lo,
            hi,
            bounds: None,
        }
        .try_into()
    }

    pub fn grid(values: Vec<f64>) -> Result<Self, VariationError> {
        DistributionConfig::Grid { values }.try_into()
    }

    pub fn mixture(components: Vec<(f64, Distribution)>) -> Result<Self, VariationError> {
        DistributionConfig::Mixture {
            components: components
                .into_iter()
                .map(|(weight, dist)| MixtureComponent { weight, dist })
                .collect(),
            bounds: None,
        }
        .try_into()
    }

    pub fn piecewise_pdf(breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self, VariationError> {
        DistributionConfig::PiecewisePdf {
            breakpoints,
            densities,
            bounds: None,
        }
        .try_into()
    }

    /// Restricts the support to `[lo, hi]`, sampled by rejection.
    pub fn truncated(self, lo: f64, hi: f64) -> Result<Self, VariationError> {
        let mut cfg = DistributionConfig::from(self);
        match &mut cfg {
            DistributionConfig::Gauss { bounds, .. }
            | DistributionConfig::Uniform { bounds, .. }
            | DistributionConfig::Mixture { bounds, .. }
            | DistributionConfig::PiecewisePdf { bounds, .. } => *bounds = Some([lo, hi]),
            DistributionConfig::Grid { .. } | DistributionConfig::Constant { .. } => {
                return dist_err("grid and constant distributions cannot be truncated")
            }
        }
        cfg.try_into()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// Values of a grid or constant distribution, in declaration order.
    pub fn grid_values(&self) -> Option<Vec<f64>> {
        match &self.shape {
            Shape::Grid(v) => Some(v.clone()),
            Shape::Constant(v) => Some(vec![*v]),
            _ => None,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Result<f64, VariationError> {
        Ok(match &self.shape {
            Shape::Gauss { mu, sigma } => mu + sigma * rng.standard_normal(),
            Shape::Uniform { lo, hi } => rng.uniform(*lo, *hi),
            Shape::Mixture {
                cumulative,
                components,
            } => {
                let u = rng.next_f64();
                let idx = cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(components.len() - 1);
                components[idx].dist.sample(rng)?
            }
            Shape::Piecewise {
                breakpoints,
                densities,
                cdf,
            } => {
                let total = *cdf.last().expect("validated non-empty");
                let target = rng.next_f64() * total;
                // first interval whose cumulative mass exceeds the target; zero-density
                // intervals have zero width in cdf space and are never selected
                let i = cdf[1..]
                    .iter()
                    .position(|&c| target < c)
                    .unwrap_or(densities.len() - 1);
                let i = (0..=i).rev().find(|&j| densities[j] > 0.0).unwrap_or(i);
                let x = breakpoints[i] + (target - cdf[i]) / densities[i];
                x.clamp(breakpoints[i], breakpoints[i + 1])
            }
            Shape::Grid(values) => values[rng.index(values.len())],
            Shape::Constant(v) => *v,
        })
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<f64, VariationError> {
        let Some((lo, hi)) = self.bounds else {
            return self.draw(rng);
        };
        for _ in 0..REJECTION_CAP {
            let x = self.draw(rng)?;
            if (lo..=hi).contains(&x) {
                return Ok(x);
            }
        }
        Err(VariationError::RejectionCap { lo, hi })
    }

    /// Whether `[lo, hi]` overlaps the support with positive length (or hits an atom).
    fn support_meets(&self, lo: f64, hi: f64) -> bool {
        match &self.shape {
            Shape::Gauss { .. } => true,
            Shape::Uniform { lo: a, hi: b } => {
                if a == b {
                    (lo..=hi).contains(a)
                } else {
                    lo.max(*a) < hi.min(*b)
                }
            }
            Shape::Mixture { components, .. } => components.iter().any(|c| {
                let (l, h) = match c.dist.bounds {
                    Some((cl, ch)) => (lo.max(cl), hi.min(ch)),
                    None => (lo, hi),
                };
                l <= h && c.dist.support_meets(l, h)
            }),
            Shape::Piecewise {
                breakpoints,
                densities,
                ..
            } => densities.iter().enumerate().any(|(i, &d)| {
                d > 0.0 && lo.max(breakpoints[i]) < hi.min(breakpoints[i + 1])
            }),
            Shape::Grid(values) => values.iter().any(|v| (lo..=hi).contains(v)),
            Shape::Constant(v) => (lo..=hi).contains(v),
        }
    }
}

fn check_finite(values: &[f64], what: &str) -> Result<(), VariationError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        dist_err(format!("{what} must be finite"))
    }
}

impl TryFrom<DistributionConfig> for Distribution {
    type Error = VariationError;

    fn try_from(cfg: DistributionConfig) -> Result<Self, Self::Error> {
        let (shape, bounds) = match cfg {
            DistributionConfig::Gauss { mu, sigma, bounds } => {
                check_finite(&[mu, sigma], "gauss parameters")?;
                if sigma <= 0.0 {
                    return dist_err(format!("gauss sigma must be positive, got {sigma}"));
                }
                (Shape::Gauss { mu, sigma }, bounds)
            }
            DistributionConfig::Uniform { lo, hi, bounds } => {
                check_finite(&[lo, hi], "uniform limits")?;
                if lo > hi {
                    return dist_err(format!("uniform lo {lo} > hi {hi}"));
                }
                (Shape::Uniform { lo, hi }, bounds)
            }
            DistributionConfig::Mixture { components, bounds } => {
                if components.is_empty() {
                    return dist_err("mixture needs at least one component");
                }
                if components.iter().any(|c| !(c.weight > 0.0)) {
                    return dist_err("mixture weights must be positive");
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return dist_err(format!("mixture weights sum to {total}, expected 1"));
                }
                let cumulative = components
                    .iter()
                    .scan(0.0, |acc, c| {
                        *acc += c.weight;
                        Some(*acc)
                    })
                    .collect();
                (
                    Shape::Mixture {
                        cumulative,
                        components,
                    },
                    bounds,
                )
            }
            DistributionConfig::PiecewisePdf {
                breakpoints,
                densities,
                bounds,
            } => {
                check_finite(&breakpoints, "piecewise breakpoints")?;
                check_finite(&densities, "piecewise densities")?;
                if breakpoints.len() < 2 || densities.len() != breakpoints.len() - 1 {
                    return dist_err(format!(
                        "piecewise_pdf needs n+1 breakpoints for n densities, got {} and {}",
                        breakpoints.len(),
                        densities.len()
                    ));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return dist_err("piecewise breakpoints must be strictly increasing");
                }
                if densities.iter().any(|&d| d < 0.0) {
                    return dist_err("piecewise densities must be non-negative");
                }
                let mut cdf = Vec::with_capacity(breakpoints.len());
                cdf.push(0.0);
                for (i, d) in densities.iter().enumerate() {
                    let last = *cdf.last().unwrap();
                    cdf.push(last + d * (breakpoints[i + 1] - breakpoints[i]));
                }
                if !(*cdf.last().unwrap() > 0.0) {
                    return dist_err("piecewise density has zero total mass");
                }
                (
                    Shape::Piecewise {
                        breakpoints,
                        densities,
                        cdf,
                    },
                    bounds,
                )
            }
            DistributionConfig::Grid { values } => {
                check_finite(&values, "grid values")?;
                if values.is_empty() {
                    return dist_err("grid needs at least one value");
                }
                (Shape::Grid(values), None)
            }
            DistributionConfig::Constant { value } => {
                check_finite(&[value], "constant value")?;
                (Shape::Constant(value), None)
            }
        };
        let bounds = bounds.map(|[lo, hi]| (lo, hi));
        let d = Distribution { shape, bounds };
        if let Some((lo, hi)) = bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return dist_err(format!("truncation bounds [{lo}, {hi}] must be finite with lo < hi"));
            }
            if !d.support_meets(lo, hi) {
                return dist_err(format!(
                    "truncation bounds [{lo}, {hi}] carry no probability mass"
                ));
            }
        }
        Ok(d)
    }
}

impl From<Distribution> for DistributionConfig {
    fn from(d: Distribution) -> Self {
        let bounds = d.bounds.map(|(lo, hi)| [lo, hi]);
        match d.shape {
            Shape::Gauss { mu, sigma } => DistributionConfig::Gauss { mu, sigma, bounds },
            Shape::Uniform { lo, hi } => DistributionConfig::Uniform { lo, hi, bounds },
            Shape::Mixture { components, .. } => DistributionConfig::Mixture { components, bounds },
            Shape::Piecewise {
                breakpoints,
                densities,
                ..
            } => DistributionConfig::PiecewisePdf {
                breakpoints,
                densities,
                bounds,
            },
            Shape::Grid(values) => DistributionConfig::Grid { values },
            Shape::Constant(value) => DistributionConfig::Constant { value },
        }
    }
}

pub fn sample(d: &Distribution, rng: &mut RngStream) -> Result<f64, VariationError> {
    d.sample(rng)
}

/// Heater sizing rule used by the `size_heater` converter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeaterSizing {
    /// Indoor-outdoor design temperature difference, K.
    pub design_delta_t: f64,
    /// Oversizing factor.
    pub design_margin: f64,
}

impl Default for HeaterSizing {
    fn default() -> Self {
        Self {
            design_delta_t: 35.0,
            design_margin: 1.2,
        }
    }
}

impl HeaterSizing {
    pub fn validate(&self) -> Result<(), VariationError> {
        if !(self.design_delta_t > 0.0 && self.design_margin > 0.0)
            || !(self.design_delta_t.is_finite() && self.design_margin.is_finite())
        {
            return Err(VariationError::Sizing(format!(
                "design_delta_t {} and design_margin {} must be positive",
                self.design_delta_t, self.design_margin
            )));
        }
        Ok(())
    }

    /// Design heat-loss coefficient, W/K: transmission through the wall
    /// (both wall conductances in series) and windows, plus ventilation.
    pub fn design_conductance(&self, p: &BuildingParams) -> f64 {
        let g = derive_conductances(p);
        g.wall_series() + g.window + g.vent
    }

    /// Nominal heater power for `p`, W.
    pub fn size(&self, p: &BuildingParams) -> f64 {
        self.design_margin * self.design_conductance(p) * self.design_delta_t
    }
}

/// A dependent-parameter recalculation.
pub trait Converter: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn reads(&self) -> &[Param];
    fn writes(&self) -> &[Param];
    fn apply(&self, p: &mut BuildingParams);
}

/// Recomputes the air volume from floor area and ceiling height.
#[derive(Debug, Clone, Copy, Default)]
pub struct VolumeConverter;

impl Converter for VolumeConverter {
    fn name(&self) -> &str {
        "volume"
    }
    fn reads(&self) -> &[Param] {
        &[Param::FloorArea, Param::CeilingHeight]
    }
    fn writes(&self) -> &[Param] {
        &[Param::Volume]
    }
    fn apply(&self, p: &mut BuildingParams) {
        p.volume = p.floor_area * p.ceiling_height;
    }
}

/// Sizes the heater for transmission and ventilation losses.
#[derive(Debug, Clone, Copy, Default)]
pub struct SizeHeaterConverter(pub HeaterSizing);

impl Converter for SizeHeaterConverter {
    fn name(&self) -> &str {
        "size_heater"
    }
    fn reads(&self) -> &[Param] {
        &[
            Param::UExt,
            Param::EnvelopeArea,
            Param::WindowArea,
            Param::UWindow,
            Param::Ach,
            Param::Volume,
        ]
    }
    fn writes(&self) -> &[Param] {
        &[Param::QNominal]
    }
    fn apply(&self, p: &mut BuildingParams) {
        p.q_nominal = self.0.size(p);
    }
}

/// Converters available by name.
#[derive(Debug, Clone, Default)]
pub struct ConverterRegistry {
    by_name: BTreeMap<String, Arc<dyn Converter>>,
}

impl ConverterRegistry {
    pub fn builtin(sizing: HeaterSizing) -> Self {
        let mut r = Self::default();
        r.register(Arc::new(VolumeConverter));
        r.register(Arc::new(SizeHeaterConverter(sizing)));
        r
    }

    pub fn register(&mut self, c: Arc<dyn Converter>) {
        self.by_name.insert(c.name().to_string(), c);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn Converter>> {
        self.by_name.get(name)
    }

    /// Resolves names into an ordered chain and checks that no converter
    /// overwrites an input of an earlier one.
    pub fn chain<S: AsRef<str>>(&self, names: &[S]) -> Result<ConverterChain, VariationError> {
        let steps = names
            .iter()
            .map(|n| {
                self.get(n.as_ref())
                    .cloned()
                    .ok_or_else(|| VariationError::UnknownConverter(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (i, earlier) in steps.iter().enumerate() {
            for later in &steps[i + 1..] {
                if let Some(&param) = later.writes().iter().find(|w| earlier.reads().contains(w)) {
                    return Err(VariationError::ChainOrder {
                        earlier: earlier.name().to_string(),
                        later: later.name().to_string(),
                        param,
                    });
                }
            }
        }
        Ok(ConverterChain { steps })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConverterChain {
    steps: Vec<Arc<dyn Converter>>,
}

impl ConverterChain {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The `[volume, size_heater]` chain with the given sizing rule.
    pub fn standard(sizing: HeaterSizing) -> Self {
        ConverterRegistry::builtin(sizing)
            .chain(&["volume", "size_heater"])
            .expect("built-in chain is ordered")
    }

    pub fn names(&self) -> Vec<&str> {
        self.steps.iter().map(|c| c.name()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn apply_converters(p: &BuildingParams, chain: &ConverterChain) -> BuildingParams {
    let mut out = p.clone();
    for c in &chain.steps {
        c.apply(&mut out);
    }
    out
}

/// Distributions per building parameter, applied in name order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariationSpec {
    params: BTreeMap<String, (Param, Distribution)>,
}

impl VariationSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, d: Distribution) -> Result<Self, VariationError> {
        let param = Param::from_name(name)?;
        self.params.insert(name.to_string(), (param, d));
        Ok(self)
    }

    pub fn from_map(map: &BTreeMap<String, Distribution>) -> Result<Self, VariationError> {
        map.iter()
            .try_fold(Self::new(), |spec, (name, d)| spec.with(name, d.clone()))
    }

    pub fn to_map(&self) -> BTreeMap<String, Distribution> {
        self.params
            .iter()
            .map(|(k, (_, d))| (k.clone(), d.clone()))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Param, &Distribution)> {
        self.params.iter().map(|(k, (p, d))| (k.as_str(), *p, d))
    }
}

pub fn sample_building(
    spec: &VariationSpec,
    base: &BuildingParams,
    chain: &ConverterChain,
    rng: &mut RngStream,
) -> Result<BuildingParams, VariationError> {
    let mut p = base.clone();
    for (_, param, d) in spec.iter() {
        param.set(&mut p, d.sample(rng)?);
    }
    let p = apply_converters(&p, chain);
    p.validate().map_err(VariationError::Rejected)?;
    Ok(p)
}

/// Cartesian product of grid (or constant) distributions.
///
/// The first parameter in name order varies slowest.
pub fn grid_variations(
    spec: &VariationSpec,
    base: &BuildingParams,
    chain: &ConverterChain,
    cap: usize,
) -> Result<Vec<BuildingParams>, VariationError> {
    let axes = spec
        .iter()
        .map(|(name, param, d)| {
            d.grid_values()
                .map(|v| (param, v))
                .ok_or_else(|| VariationError::NotGrid(name.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let size = axes
        .iter()
        .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()))
        .unwrap_or(usize::MAX);
    if size > cap {
        return Err(VariationError::GridTooLarge { size, cap });
    }
    let mut out = Vec::with_capacity(size);
    let mut index = vec![0usize; axes.len()];
    for _ in 0..size {
        let mut p = base.clone();
        for ((param, values), &i) in axes.iter().zip(&index) {
            param.set(&mut p, values[i]);
        }
        let p = apply_converters(&p, chain);
        p.validate().map_err(VariationError::Rejected)?;
        out.push(p);
        // odometer increment, last axis fastest
        for k in (0..axes.len()).rev() {
            index[k] += 1;
            if index[k] < axes[k].1.len() {
                break;
            }
            index[k] = 0;
        }
    }
    Ok(out)
}

/// Uniform choice among named presets (gain schedules, weather sources).
pub fn choose_preset<'a>(choices: &'a [String], rng: &mut RngStream) -> Option<&'a str> {
    if choices.is_empty() {
        None
    } else {
        Some(choices[rng.index(choices.len())].as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_always() {
        let d = Distribution::constant(0.8);
        let mut rng = RngStream::new(0);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut rng).unwrap(), 0.8);
        }
    }

    #[test]
    fn invalid_distributions() {
        assert!(Distribution::gauss(0.0, 0.0).is_err());
        assert!(Distribution::uniform(2.0, 1.0).is_err());
        assert!(Distribution::mixture(vec![(0.4, Distribution::constant(1.0))]).is_err());
        assert!(Distribution::mixture(vec![]).is_err());
        assert!(Distribution::piecewise_pdf(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(Distribution::piecewise_pdf(vec![0.0, 1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(Distribution::grid(vec![]).is_err());
        assert!(Distribution::uniform(0.0, 1.0).unwrap().truncated(2.0, 3.0).is_err());
        assert!(Distribution::uniform(0.0, 1.0).unwrap().truncated(0.5, 0.5).is_err());
    }

    #[test]
    fn truncation_respected() {
        let d = Distribution::gauss(0.8, 0.5).unwrap().truncated(0.1, 2.5).unwrap();
        let mut rng = RngStream::new(3);
        for _ in 0..10_000 {
            let x = d.sample(&mut rng).unwrap();
            assert!((0.1..=2.5).contains(&x));
        }
    }

    #[test]
    fn rejection_cap_reports_error() {
        let d = Distribution::gauss(0.0, 1.0).unwrap().truncated(40.0, 41.0).unwrap();
        assert_eq!(
            d.sample(&mut RngStream::new(0)),
            Err(VariationError::RejectionCap { lo: 40.0, hi: 41.0 })
        );
    }

    #[test]
    fn serde_syntax() {
        let d: Distribution =
            serde_json::from_str(r#"{"kind":"gauss","mu":0.8,"sigma":0.5,"bounds":[0.1,2.5]}"#).unwrap();
        assert_eq!(d.bounds(), Some((0.1, 2.5)));
        assert!(serde_json::from_str::<Distribution>(r#"{"kind":"gaus","mu":0.8,"sigma":0.5}"#).is_err());
        assert!(
            serde_json::from_str::<Distribution>(r#"{"kind":"gauss","mu":0.8,"sigma":0.5,"sd":1}"#).is_err()
        );
        let mix: Distribution = serde_json::from_str(
            r#"{"kind":"mixture","components":[
                {"weight":0.5,"dist":{"kind":"gauss","mu":100,"sigma":10}},
                {"weight":0.5,"dist":{"kind":"gauss","mu":180,"sigma":10}}]}"#,
        )
        .unwrap();
        let back: Distribution = serde_json::from_str(&serde_json::to_string(&mix).unwrap()).unwrap();
        assert_eq!(back, mix);
    }

    #[test]
    fn param_names_resolve() {
        assert_eq!(Param::from_name("UExt").unwrap(), Param::UExt);
        assert_eq!(Param::from_name("floor_area").unwrap(), Param::FloorArea);
        assert!(Param::from_name("u_wall").is_err());
        for p in Param::ALL {
            assert_eq!(Param::from_name(p.name()).unwrap(), p);
        }
    }

    #[test]
    fn empty_chain_is_identity() {
        let p = BuildingParams::default();
        assert_eq!(apply_converters(&p, &ConverterChain::empty()), p);
    }

    #[test]
    fn unknown_converter() {
        let r = ConverterRegistry::builtin(HeaterSizing::default());
        assert_eq!(
            r.chain(&["volume", "dehumidify"]).unwrap_err(),
            VariationError::UnknownConverter("dehumidify".into())
        );
    }

    #[test]
    fn chain_order_enforced() {
        let r = ConverterRegistry::builtin(HeaterSizing::default());
        assert!(matches!(
            r.chain(&["size_heater", "volume"]),
            Err(VariationError::ChainOrder { param: Param::Volume, .. })
        ));
    }

    #[test]
    fn doubling_floor_area_increases_heater() {
        let chain = ConverterChain::standard(HeaterSizing::default());
        let base = apply_converters(&BuildingParams::default(), &chain);
        let mut big = base.clone();
        big.floor_area *= 2.0;
        let big = apply_converters(&big, &chain);
        assert!((big.volume - 2.0 * base.volume).abs() < 1e-9);
        assert!(big.q_nominal > base.q_nominal);
    }

    #[test]
    fn sizing_hand_evaluated() {
        let chain = ConverterChain::standard(HeaterSizing::default());
        let p = apply_converters(&BuildingParams::unsized_default(), &chain);
        // env_out = air_env = 400, window = 39, vent = 0.34 * 0.5 * 375 = 63.75, series = 200
        let expected = 1.2 * (200.0 + 39.0 + 63.75) * 35.0;
        assert_eq!(expected, 12715.5);
        assert!((p.q_nominal - expected).abs() < 1e-9, "{}", p.q_nominal);
        assert_eq!(p.volume, 375.0);
    }

    #[test]
    fn builtin_chain_idempotent() {
        let chain = ConverterChain::standard(HeaterSizing::default());
        let mut p = BuildingParams::default();
        p.floor_area = 210.0;
        p.u_ext = 1.4;
        let once = apply_converters(&p, &chain);
        assert_eq!(apply_converters(&once, &chain), once);
    }

    #[test]
    fn sample_building_basics() {
        let chain = ConverterChain::standard(HeaterSizing::default());
        let base = BuildingParams::default();
        let mut rng = RngStream::new(0);
        let same = sample_building(&VariationSpec::new(), &base, &chain, &mut rng).unwrap();
        assert_eq!(same, apply_converters(&base, &chain));

        let spec = VariationSpec::new().with("UExt", Distribution::constant(1.2)).unwrap();
        let p = sample_building(&spec, &base, &ConverterChain::empty(), &mut rng).unwrap();
        let mut expected = base.clone();
        expected.u_ext = 1.2;
        assert_eq!(p, expected);
    }

    #[test]
    fn sample_building_rejects_nonphysical() {
        let spec = VariationSpec::new().with("UExt", Distribution::constant(-0.3)).unwrap();
        let err = sample_building(
            &spec,
            &BuildingParams::default(),
            &ConverterChain::empty(),
            &mut RngStream::new(0),
        )
        .unwrap_err();
        assert!(err.to_string().contains("u_ext"), "{err}");
    }

    #[test]
    fn grid_counts_and_order() {
        let chain = ConverterChain::standard(HeaterSizing::default());
        let base = BuildingParams::default();
        let one = VariationSpec::new()
            .with("u_ext", Distribution::grid(vec![0.4, 0.8, 1.2]).unwrap())
            .unwrap();
        assert_eq!(grid_variations(&one, &base, &chain, 100).unwrap().len(), 3);

        let us: Vec<f64> = vec![0.3, 0.6, 0.9, 1.2];
        let areas: Vec<f64> = (0..10).map(|i| 100.0 + 10.0 * i as f64).collect();
        let two = VariationSpec::new()
            .with("u_ext", Distribution::grid(us.clone()).unwrap())
            .unwrap()
            .with("floor_area", Distribution::grid(areas.clone()).unwrap())
            .unwrap();
        let out = grid_variations(&two, &base, &chain, 100).unwrap();
        assert_eq!(out.len(), 40);
        let mut pairs: Vec<(u64, u64)> = out.iter().map(|p| (p.u_ext.to_bits(), p.floor_area.to_bits())).collect();
        // floor_area sorts before u_ext, so it varies slowest
        assert_eq!(out[0].floor_area, 100.0);
        assert_eq!(out[1].floor_area, 100.0);
        assert_eq!(out[1].u_ext, 0.6);
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 40);
        assert_eq!(out, grid_variations(&two, &base, &chain, 100).unwrap());

        assert_eq!(
            grid_variations(&two, &base, &chain, 39).unwrap_err(),
            VariationError::GridTooLarge { size: 40, cap: 39 }
        );
        let g = VariationSpec::new().with("u_ext", Distribution::gauss(1.0, 0.1).unwrap()).unwrap();
        assert!(matches!(grid_variations(&g, &base, &chain, 10), Err(VariationError::NotGrid(_))));
    }
}
