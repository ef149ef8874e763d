//! PI and hysteresis heating controllers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid controller setting: {0}")]
    Config(String),
}

/// PI controller with a conditionally clamped integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiState {
    /// Proportional gain, fraction per K.
    pub kp: f64,
    /// Integral gain, fraction per K·s.
    pub ki: f64,
    /// Accumulated error, K·s.
    pub integral: f64,
    /// Air temperature setpoint, °C.
    pub setpoint: f64,
}

impl PiState {
    pub fn new(kp: f64, ki: f64, setpoint: f64) -> Result<Self, ControlError> {
        if !(kp >= 0.0 && ki >= 0.0 && kp.is_finite() && ki.is_finite()) {
            return Err(ControlError::Config(format!(
                "PI gains must be finite and non-negative (kp {kp}, ki {ki})"
            )));
        }
        if !setpoint.is_finite() {
            return Err(ControlError::Config(format!("setpoint {setpoint} is not finite")));
        }
        Ok(Self {
            kp,
            ki,
            integral: 0.0,
            setpoint,
        })
    }

    /// Upper clamp of the integrator; the integral term alone can saturate
    /// the output but never exceed it.
    pub fn integral_limit(&self) -> f64 {
        if self.ki > 0.0 {
            1.0 / self.ki
        } else {
            0.0
        }
    }

    /// Sets the integrator so that zero error yields `u`.
    pub fn primed(mut self, u: f64) -> Self {
        self.integral = if self.ki > 0.0 {
            (u / self.ki).clamp(0.0, self.integral_limit())
        } else {
            0.0
        };
        self
    }
}

impl Default for PiState {
    fn default() -> Self {
        Self::new(0.4, 1e-4, 22.0).expect("default PI gains")
    }
}

pub fn pi_step(st: PiState, t_air: f64, dt: f64) -> (f64, PiState) {
    let e = st.setpoint - t_air;
    let integral = (st.integral + e * dt).clamp(0.0, st.integral_limit());
    let u = (st.kp * e + st.ki * integral).clamp(0.0, 1.0);
    (u, PiState { integral, ..st })
}

/// Two-position thermostat with a symmetric dead band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HysteresisState {
    pub setpoint: f64,
    /// Half-width of the dead band, K.
    pub band: f64,
    pub on: bool,
}

impl HysteresisState {
    pub fn new(setpoint: f64, band: f64) -> Result<Self, ControlError> {
        if !(band > 0.0 && band.is_finite()) {
            return Err(ControlError::Config(format!("band {band} must be positive")));
        }
        if !setpoint.is_finite() {
            return Err(ControlError::Config(format!("setpoint {setpoint} is not finite")));
        }
        Ok(Self {
            setpoint,
            band,
            on: false,
        })
    }
}

impl Default for HysteresisState {
    fn default() -> Self {
        Self::new(22.0, 0.5).expect("default hysteresis")
    }
}

pub fn hysteresis_step(st: HysteresisState, t_air: f64) -> (f64, HysteresisState) {
    let on = if t_air < st.setpoint - st.band {
        true
    } else if t_air > st.setpoint + st.band {
        false
    } else {
        st.on
    };
    (if on { 1.0 } else { 0.0 }, HysteresisState { on, ..st })
}

/// Feedback controller reading the current air temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Controller {
    Pi(PiState),
    Hysteresis(HysteresisState),
}

impl Controller {
    pub fn kind(&self) -> &'static str {
        match self {
            Controller::Pi(_) => "pi",
            Controller::Hysteresis(_) => "hysteresis",
        }
    }

    pub fn setpoint(&self) -> f64 {
        match self {
            Controller::Pi(s) => s.setpoint,
            Controller::Hysteresis(s) => s.setpoint,
        }
    }

    pub fn step(&mut self, t_air: f64, dt: f64) -> f64 {
        match self {
            Controller::Pi(s) => {
                let (u, next) = pi_step(*s, t_air, dt);
                *s = next;
                u
            }
            Controller::Hysteresis(s) => {
                let (u, next) = hysteresis_step(*s, t_air);
                *s = next;
                u
            }
        }
    }

    /// Warm-start the controller as if it had been holding `u` at setpoint.
    pub fn prime(&mut self, u: f64) {
        match self {
            Controller::Pi(s) => *s = s.primed(u),
            Controller::Hysteresis(s) => s.on = u >= 0.5,
        }
    }
}
