//! Shared helpers for the integration tests.
#![allow(dead_code)]

pub mod oracles;
pub mod physics;
pub mod stats;

use thermex::signals::{IntDist, PoissonWalkConfig, RampWalkConfig, SinusoidWalkConfig, UnitDist, WalkerConfig};
use thermex::rng::RngStream;
use thermex::thermal::BuildingParams;
use thermex::weather::{Boundary, GainSchedule, SyntheticWeather, WeatherModel};

/// Time-invariant boundary: fixed outdoor temperature, no sun, no gains.
pub fn constant_boundary(t_out: f64) -> Boundary {
    Boundary::new(
        WeatherModel::Synthetic(SyntheticWeather {
            t_mean: t_out,
            t_annual_amp: 0.0,
            t_diurnal_amp: 0.0,
            solar_peak: 0.0,
            coldest_day: 32.0,
        }),
        GainSchedule::zero(),
    )
}

pub fn random_int_dist(rng: &mut RngStream, min: u64) -> IntDist {
    match rng.index(3) {
        0 => IntDist::Constant {
            value: rng.uniform_int(min, min + 20),
        },
        1 => {
            let lo = rng.uniform_int(min, min + 10);
            IntDist::UniformInt {
                lo,
                hi: lo + rng.uniform_int(0, 30),
            }
        }
        _ => IntDist::Poisson {
            lam: rng.uniform(0.5, 30.0),
        },
    }
}

/// Period distribution whose every draw is at least 2.
pub fn random_period_dist(rng: &mut RngStream) -> IntDist {
    loop {
        let d = random_int_dist(rng, 2);
        if d.min_value() >= 2 {
            return d;
        }
    }
}

pub fn random_walker(rng: &mut RngStream, kind: usize) -> WalkerConfig {
    match kind {
        0 => {
            let lo = rng.uniform(0.0, 0.5);
            let hi = rng.uniform(lo, 1.0);
            WalkerConfig::Poisson(PoissonWalkConfig::new(rng.uniform(0.2, 60.0), lo, hi).unwrap())
        }
        1 => {
            let amp = if rng.index(2) == 0 {
                UnitDist::Constant {
                    value: rng.next_f64(),
                }
            } else {
                let lo = rng.uniform(0.0, 0.6);
                UnitDist::Uniform {
                    lo,
                    hi: rng.uniform(lo, 1.0),
                }
            };
            let freq = random_period_dist(rng);
            let steady = random_int_dist(rng, 0);
            WalkerConfig::Sinusoid(SinusoidWalkConfig::new(freq, amp, steady).unwrap())
        }
        _ => {
            let freq = random_period_dist(rng);
            let steady = random_int_dist(rng, 0);
            WalkerConfig::Ramp(RampWalkConfig::new(freq, steady).unwrap())
        }
    }
}

/// Unsized default building with ±40% perturbations on every physical field.
pub fn random_building(rng: &mut RngStream) -> BuildingParams {
    let mut p = BuildingParams::default();
    let mut jitter = |x: f64| x * rng.uniform(0.6, 1.4);
    p.floor_area = jitter(p.floor_area);
    p.ceiling_height = jitter(p.ceiling_height);
    p.volume = p.floor_area * p.ceiling_height;
    p.u_ext = jitter(p.u_ext);
    p.envelope_area = jitter(p.envelope_area);
    p.window_area = jitter(p.window_area);
    p.u_window = jitter(p.u_window);
    p.c_air = jitter(p.c_air);
    p.c_env = jitter(p.c_env);
    p.ach = jitter(p.ach);
    p.solar_aperture = jitter(p.solar_aperture).min(1.0);
    p.q_nominal = jitter(p.q_nominal);
    p
}

pub const STRATEGIES: [&str; 6] = ["hysteresis", "pi", "poisson", "sinusoid", "ramp", "mixed"];

/// Control side of one of the named strategies with default settings.
pub fn strategy(name: &str) -> thermex::engine::ControlSpec {
    use thermex::control::{Controller, HysteresisState, PiState};
    use thermex::engine::ControlSpec;
    use thermex::signals::{MixedWalkConfig, WalkerSpec};
    let single = |w| ControlSpec::Walker(WalkerSpec::Single(w));
    match name {
        "hysteresis" => ControlSpec::Controller(Controller::Hysteresis(HysteresisState::default())),
        "pi" => ControlSpec::Controller(Controller::Pi(PiState::default())),
        "poisson" => single(WalkerConfig::Poisson(PoissonWalkConfig::default())),
        "sinusoid" => single(WalkerConfig::Sinusoid(SinusoidWalkConfig::default())),
        "ramp" => single(WalkerConfig::Ramp(RampWalkConfig::default())),
        "mixed" => ControlSpec::Walker(WalkerSpec::Mixed(
            MixedWalkConfig::new(
                vec![
                    WalkerConfig::Poisson(PoissonWalkConfig::default()),
                    WalkerConfig::Sinusoid(SinusoidWalkConfig::default()),
                    WalkerConfig::Ramp(RampWalkConfig::default()),
                ],
                IntDist::Poisson { lam: 96.0 },
            )
            .unwrap(),
        )),
        other => panic!("unknown strategy {other}"),
    }
}

/// One-year run of the default building under a named strategy.
pub fn year_trace(name: &str, seed: u64) -> thermex::engine::Trace {
    let template = thermex::engine::RunTemplate::year(strategy(name));
    thermex::engine::run(&template.instantiate(seed, None).unwrap()).unwrap()
}
