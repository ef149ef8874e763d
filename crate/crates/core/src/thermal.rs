//! Two-node (air + envelope) lumped thermal model of a single zone.
//!
//! ```text
//!   T_out ──[ua_window + ua_vent]── T_air ──[ua_air_env]── T_env ──[ua_env_out]── T_out
//!                                     │                      │
//!                                   c_air                  c_env
//! ```
//!
//! Heater power, internal gains, and transmitted solar enter the air node.
//! Inputs are held constant over a step and the linear system is integrated
//! exactly through the 2x2 matrix exponential.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Volumetric heat capacity of air used for ventilation losses, Wh/(m³K).
pub const AIR_HEAT_FACTOR: f64 = 0.34;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermalError {
    #[error("invalid building parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("control fraction {0} outside [0, 1]")]
    ControlRange(f64),
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error("steady state undefined: no conductive path fixes both node temperatures")]
    Singular,
}

/// Envelope and heater parameters of one simulated building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingParams {
    /// Heated floor area, m².
    pub floor_area: f64,
    /// Clear ceiling height, m.
    pub ceiling_height: f64,
    /// Heated air volume, m³. Kept consistent by the `volume` converter.
    pub volume: f64,
    /// Exterior wall U-value, W/(m²K).
    pub u_ext: f64,
    /// Total exterior envelope area including windows, m².
    pub envelope_area: f64,
    /// Window area, m².
    pub window_area: f64,
    /// Window U-value, W/(m²K).
    pub u_window: f64,
    /// Air node capacitance (air plus furnishings), J/K.
    pub c_air: f64,
    /// Envelope node capacitance, J/K.
    pub c_env: f64,
    /// Air changes per hour.
    pub ach: f64,
    /// Fraction of horizontal irradiance on the window area entering the zone.
    pub solar_aperture: f64,
    /// Heater power at full command, W.
    pub q_nominal: f64,
}

impl BuildingParams {
    /// Default building before heater sizing; `q_nominal` is a placeholder.
    pub fn unsized_default() -> Self {
        Self {
            floor_area: 150.0,
            ceiling_height: 2.5,
            volume: 375.0,
            u_ext: 0.8,
            envelope_area: 280.0,
            window_area: 30.0,
            u_window: 1.3,
            c_air: 10.0e6,
            c_env: 80.0e6,
            ach: 0.5,
            solar_aperture: 0.6,
            q_nominal: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        let fields: [(&'static str, f64); 12] = [
            ("floor_area", self.floor_area),
            ("ceiling_height", self.ceiling_height),
            ("volume", self.volume),
            ("u_ext", self.u_ext),
            ("envelope_area", self.envelope_area),
            ("window_area", self.window_area),
            ("u_window", self.u_window),
            ("c_air", self.c_air),
            ("c_env", self.c_env),
            ("ach", self.ach),
            ("solar_aperture", self.solar_aperture),
            ("q_nominal", self.q_nominal),
        ];
        for (field, v) in fields {
            if !v.is_finite() {
                return Err(invalid(field, format!("{v} is not finite")));
            }
            if field == "ach" {
                if !(0.0..=5.0).contains(&v) {
                    return Err(invalid(field, format!("{v} outside [0, 5]")));
                }
            } else if v <= 0.0 {
                return Err(invalid(field, format!("{v} must be strictly positive")));
            }
        }
        if !(self.u_ext > 0.05 && self.u_ext <= 5.0) {
            return Err(invalid("u_ext", format!("{} outside (0.05, 5.0]", self.u_ext)));
        }
        if self.window_area > self.envelope_area {
            return Err(invalid(
                "window_area",
                format!(
                    "{} exceeds envelope_area {}",
                    self.window_area, self.envelope_area
                ),
            ));
        }
        if self.solar_aperture > 1.0 {
            return Err(invalid(
                "solar_aperture",
                format!("{} exceeds 1", self.solar_aperture),
            ));
        }
        Ok(())
    }
}

impl Default for BuildingParams {
    /// Default building with its heater sized by the built-in converter.
    fn default() -> Self {
        let mut p = Self::unsized_default();
        p.q_nominal = crate::variation::HeaterSizing::default().size(&p);
        p
    }
}

fn invalid(field: &'static str, reason: String) -> ThermalError {
    ThermalError::InvalidParam { field, reason }
}

/// Node temperatures, °C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub t_air: f64,
    pub t_env: f64,
}

impl ThermalState {
    pub fn new(t_air: f64, t_env: f64) -> Self {
        Self { t_air, t_env }
    }

    fn as_array(self) -> [f64; 2] {
        [self.t_air, self.t_env]
    }
}

/// Boundary conditions held over one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    /// Outdoor temperature, °C.
    pub t_out: f64,
    /// Horizontal irradiance, W/m².
    pub solar: f64,
    /// Occupant and equipment gains, W.
    pub internal_gain: f64,
}

impl BoundarySample {
    pub fn new(t_out: f64, solar: f64, internal_gain: f64) -> Self {
        Self {
            t_out,
            solar,
            internal_gain,
        }
    }
}

/// Conductances of the network, W/K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conductances {
    pub env_out: f64,
    pub air_env: f64,
    pub window: f64,
    pub vent: f64,
}

impl Conductances {
    /// Direct air-to-outdoor conductance (window plus ventilation).
    pub fn air_out(&self) -> f64 {
        self.window + self.vent
    }

    /// Series combination of the two wall halves.
    pub fn wall_series(&self) -> f64 {
        let sum = self.env_out + self.air_env;
        if sum == 0.0 {
            0.0
        } else {
            self.env_out * self.air_env / sum
        }
    }
}

/// Split the opaque wall transmittance equally on both sides of the
/// envelope node and add the direct window and ventilation paths.
pub fn derive_conductances(p: &BuildingParams) -> Conductances {
    let wall = p.u_ext * (p.envelope_area - p.window_area);
    Conductances {
        env_out: 2.0 * wall,
        air_env: 2.0 * wall,
        window: p.u_window * p.window_area,
        vent: AIR_HEAT_FACTOR * p.ach * p.volume,
    }
}

/// Heat flow into the air node from heater, gains, and solar, W.
pub fn air_heat_input(p: &BuildingParams, b: &BoundarySample, u: f64) -> f64 {
    u * p.q_nominal + b.internal_gain + p.solar_aperture * p.window_area * b.solar
}

type Mat2 = [[f64; 2]; 2];

/// Continuous-time system `dx/dt = A x + f` with `x = (t_air, t_env)`.
struct LinearSystem {
    a: Mat2,
}

impl LinearSystem {
    fn new(p: &BuildingParams, g: &Conductances) -> Self {
        Self {
            a: [
                [-(g.air_env + g.air_out()) / p.c_air, g.air_env / p.c_air],
                [g.air_env / p.c_env, -(g.air_env + g.env_out) / p.c_env],
            ],
        }
    }

    /// Real eigenvalues `(hi, lo)`; the off-diagonal product is non-negative.
    fn eigenvalues(&self) -> (f64, f64) {
        let a = &self.a;
        let mean = 0.5 * (a[0][0] + a[1][1]);
        let half_diff = 0.5 * (a[0][0] - a[1][1]);
        let r = (half_diff * half_diff + a[0][1] * a[1][0]).sqrt();
        (mean + r, mean - r)
    }

    /// Evaluates `f(A) = f(lo) I + dd (A - lo I)` (Sylvester form for 2x2) given
    /// `f(lo)` and the divided difference `dd`.
    fn apply(&self, f_lo: f64, dd: f64, lo: f64) -> Mat2 {
        let a = &self.a;
        [
            [f_lo + dd * (a[0][0] - lo), dd * a[0][1]],
            [dd * a[1][0], f_lo + dd * (a[1][1] - lo)],
        ]
    }
}

/// `expm1(x) / x`, continuous at 0.
fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// Derivative of `lambda -> (exp(lambda t) - 1) / lambda`.
fn phi_derivative(lambda: f64, t: f64) -> f64 {
    let x = lambda * t;
    if x.abs() < 1e-4 {
        t * t * (0.5 + x / 3.0 + x * x / 8.0)
    } else {
        (t * (x).exp() - t * exprel(x)) / lambda
    }
}

/// Exact discrete-time operator for one step of length `dt`.
///
/// `x(t + dt) = transition · x(t) + input_gain · f` where `f` is the forcing
/// vector (heat inputs divided by capacitances).
#[derive(Debug, Clone)]
pub struct ThermalModel {
    params: BuildingParams,
    conductances: Conductances,
    dt: f64,
    transition: Mat2,
    input_gain: Mat2,
}

impl ThermalModel {
    pub fn new(params: &BuildingParams, dt: f64) -> Result<Self, ThermalError> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(ThermalError::TimeStep(dt));
        }
        let g = derive_conductances(params);
        let sys = LinearSystem::new(params, &g);
        let (hi, lo) = sys.eigenvalues();
        let gap = hi - lo;
        let close = gap * dt < 1e-6;

        let exp_lo = (lo * dt).exp();
        let exp_dd = if close {
            dt * exp_lo * (1.0 + 0.5 * gap * dt)
        } else {
            exp_lo * (gap * dt).exp_m1() / gap
        };
        let transition = sys.apply(exp_lo, exp_dd, lo);

        let phi = |l: f64| dt * exprel(l * dt);
        let phi_lo = phi(lo);
        let phi_dd = if close {
            phi_derivative(0.5 * (hi + lo), dt)
        } else {
            (phi(hi) - phi_lo) / gap
        };
        let input_gain = sys.apply(phi_lo, phi_dd, lo);

        Ok(Self {
            params: params.clone(),
            conductances: g,
            dt,
            transition,
            input_gain,
        })
    }

    pub fn params(&self) -> &BuildingParams {
        &self.params
    }

    pub fn conductances(&self) -> &Conductances {
        &self.conductances
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn forcing(&self, b: &BoundarySample, u: f64) -> [f64; 2] {
        let p = &self.params;
        let g = &self.conductances;
        [
            (g.air_out() * b.t_out + air_heat_input(p, b, u)) / p.c_air,
            g.env_out * b.t_out / p.c_env,
        ]
    }

    pub fn step(
        &self,
        s: &ThermalState,
        b: &BoundarySample,
        u: f64,
    ) -> Result<ThermalState, ThermalError> {
        check_inputs(s, b, u)?;
        let x = s.as_array();
        let f = self.forcing(b, u);
        let m = &self.transition;
        let k = &self.input_gain;
        Ok(ThermalState {
            t_air: m[0][0] * x[0] + m[0][1] * x[1] + k[0][0] * f[0] + k[0][1] * f[1],
            t_env: m[1][0] * x[0] + m[1][1] * x[1] + k[1][0] * f[0] + k[1][1] * f[1],
        })
    }
}

fn check_inputs(s: &ThermalState, b: &BoundarySample, u: f64) -> Result<(), ThermalError> {
    let values = [
        ("t_air", s.t_air),
        ("t_env", s.t_env),
        ("t_out", b.t_out),
        ("solar", b.solar),
        ("internal_gain", b.internal_gain),
        ("u", u),
    ];
    if let Some((name, v)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(ThermalError::InvalidInput(format!("{name} = {v}")));
    }
    if b.solar < 0.0 || b.internal_gain < 0.0 {
        return Err(ThermalError::InvalidInput(format!(
            "boundary heat inputs must be non-negative (solar {}, gains {})",
            b.solar, b.internal_gain
        )));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(ThermalError::ControlRange(u));
    }
    Ok(())
}

/// Advance one step of length `dt` with inputs held constant.
pub fn step(
    p: &BuildingParams,
    s: &ThermalState,
    b: &BoundarySample,
    u: f64,
    dt: f64,
) -> Result<ThermalState, ThermalError> {
    ThermalModel::new(p, dt)?.step(s, b, u)
}

/// Equilibrium of the network under constant inputs.
pub fn steady_state(
    p: &BuildingParams,
    b: &BoundarySample,
    u: f64,
) -> Result<ThermalState, ThermalError> {
    p.validate()?;
    check_inputs(&ThermalState::new(0.0, 0.0), b, u)?;
    let g = derive_conductances(p);
    let (ae, ao, eo) = (g.air_env, g.air_out(), g.env_out);
    let det = ae * ao + ao * eo + ae * eo;
    if det == 0.0 {
        return Err(ThermalError::Singular);
    }
    let q = air_heat_input(p, b, u);
    Ok(ThermalState {
        t_air: b.t_out + q * (ae + eo) / det,
        t_env: b.t_out + q * ae / det,
    })
}

/// Heating fraction whose equilibrium air temperature equals `target`,
/// clamped to `[0, 1]`.
pub fn equilibrium_control(
    p: &BuildingParams,
    b: &BoundarySample,
    target: f64,
) -> Result<f64, ThermalError> {
    let off = steady_state(p, b, 0.0)?;
    let on = steady_state(p, b, 1.0)?;
    let span = on.t_air - off.t_air;
    Ok(((target - off.t_air) / span).clamp(0.0, 1.0))
}
