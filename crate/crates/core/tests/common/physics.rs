//! Random thermal cases and independent physics oracles.

use thermex::rng::RngStream;
use thermex::thermal::{derive_conductances, BoundarySample, BuildingParams, ThermalModel, ThermalState};

pub struct Case {
    pub p: BuildingParams,
    pub s: ThermalState,
    pub b: BoundarySample,
    pub u: f64,
}

pub fn case(seed: u64) -> Case {
    let mut rng = RngStream::new(seed);
    let p = super::random_building(&mut rng);
    let s = ThermalState::new(rng.uniform(5.0, 30.0), rng.uniform(0.0, 25.0));
    let b = BoundarySample::new(rng.uniform(-15.0, 20.0), rng.uniform(0.0, 800.0), rng.uniform(0.0, 1500.0));
    Case { p, s, b, u: rng.next_f64() }
}

/// Forward Euler on the two-node ODE with 1 s sub-steps.
pub fn euler(p: &BuildingParams, s: &ThermalState, b: &BoundarySample, u: f64, dt: f64) -> ThermalState {
    let g = derive_conductances(p);
    let (mut ta, mut te) = (s.t_air, s.t_env);
    let q = u * p.q_nominal + b.internal_gain + p.solar_aperture * p.window_area * b.solar;
    for _ in 0..dt as usize {
        let dta = (g.air_env * (te - ta) + (g.window + g.vent) * (b.t_out - ta) + q) / p.c_air;
        let dte = (g.air_env * (ta - te) + g.env_out * (b.t_out - te)) / p.c_env;
        ta += dta;
        te += dte;
    }
    ThermalState::new(ta, te)
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Relative mismatch between the stored energy change and the integrated net
/// heat flow over constant-boundary steps with heating fractions `u`, plus
/// the end state.
pub fn energy_audit(p: &BuildingParams, start: ThermalState, b: &BoundarySample, u: &[f64]) -> (f64, ThermalState) {
    let dt = 900.0;
    let g = derive_conductances(p);
    let full = ThermalModel::new(p, dt).unwrap();
    let nodes: Vec<(ThermalModel, f64)> = GL5
        .iter()
        .map(|&(x, w)| (ThermalModel::new(p, 0.5 * dt * (x + 1.0)).unwrap(), 0.5 * dt * w))
        .collect();
    let mut s = start;
    let mut heat = 0.0;
    for &uk in u {
        let gain = uk * p.q_nominal + b.internal_gain + p.solar_aperture * p.window_area * b.solar;
        heat += gain * dt;
        for (m, w) in &nodes {
            let x = m.step(&s, b, uk).unwrap();
            heat -= w * ((g.window + g.vent) * (x.t_air - b.t_out) + g.env_out * (x.t_env - b.t_out));
        }
        s = full.step(&s, b, uk).unwrap();
    }
    let stored = p.c_air * (s.t_air - start.t_air) + p.c_env * (s.t_env - start.t_env);
    ((stored - heat).abs() / stored.abs().max(heat.abs()), s)
}

pub fn energy_residual(p: &BuildingParams, start: ThermalState, b: &BoundarySample, u: &[f64]) -> f64 {
    energy_audit(p, start, b, u).0
}
