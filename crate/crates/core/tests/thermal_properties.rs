mod common;

use common::physics::{case, energy_residual, euler};
use proptest::prelude::*;
use thermex::rng::RngStream;
use thermex::thermal::{steady_state, step, BoundarySample, BuildingParams, ThermalModel, ThermalState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn p1_fixed_point(seed: u64) {
        let c = case(seed);
        let ss = steady_state(&c.p, &c.b, c.u).unwrap();
        let next = step(&c.p, &ss, &c.b, c.u, 900.0).unwrap();
        prop_assert!((next.t_air - ss.t_air).abs() < 1e-9);
        prop_assert!((next.t_env - ss.t_env).abs() < 1e-9);
    }

    #[test]
    fn p2_bounded_relaxation(seed: u64) {
        let c = case(seed);
        let ss = steady_state(&c.p, &c.b, c.u).unwrap();
        let y = [c.s.t_air - ss.t_air, c.s.t_env - ss.t_env];
        let lo = y[0].min(y[1]).min(0.0);
        let hi = y[0].max(y[1]).max(0.0);
        let next = step(&c.p, &c.s, &c.b, c.u, 900.0).unwrap();
        for d in [next.t_air - ss.t_air, next.t_env - ss.t_env] {
            prop_assert!(d >= lo - 1e-9 && d <= hi + 1e-9, "{} outside [{}, {}]", d, lo, hi);
        }
    }

    #[test]
    fn p3_exact_matches_fine_euler(seed: u64) {
        let c = case(seed);
        let exact = step(&c.p, &c.s, &c.b, c.u, 900.0).unwrap();
        let fine = euler(&c.p, &c.s, &c.b, c.u, 900.0);
        prop_assert!((exact.t_air - fine.t_air).abs() < 1e-3, "air {} vs {}", exact.t_air, fine.t_air);
        prop_assert!((exact.t_env - fine.t_env).abs() < 1e-3, "env {} vs {}", exact.t_env, fine.t_env);
    }

    #[test]
    fn p4_superposition(seed: u64, a in 0.0f64..0.5, b2 in 0.0f64..0.5) {
        let c = case(seed);
        let m = ThermalModel::new(&c.p, 900.0).unwrap();
        let ra = m.step(&c.s, &c.b, a).unwrap();
        let rb = m.step(&c.s, &c.b, b2).unwrap();
        let r0 = m.step(&c.s, &c.b, 0.0).unwrap();
        let rs = m.step(&c.s, &c.b, a + b2).unwrap();
        prop_assert!((ra.t_air + rb.t_air - r0.t_air - rs.t_air).abs() < 1e-9);
        prop_assert!((ra.t_env + rb.t_env - r0.t_env - rs.t_env).abs() < 1e-9);
    }

    #[test]
    fn p5_monotone_in_control(seed: u64, u1 in 0.0f64..1.0, u2 in 0.0f64..1.0) {
        prop_assume!((u1 - u2).abs() > 1e-6);
        let c = case(seed);
        let (lo, hi) = if u1 < u2 { (u1, u2) } else { (u2, u1) };
        let m = ThermalModel::new(&c.p, 900.0).unwrap();
        prop_assert!(m.step(&c.s, &c.b, lo).unwrap().t_air < m.step(&c.s, &c.b, hi).unwrap().t_air);
    }
}

#[test]
fn default_building_matches_fine_euler() {
    let p = BuildingParams::default();
    let s = ThermalState::new(18.0, 16.0);
    let b = BoundarySample::new(0.0, 0.0, 0.0);
    let exact = step(&p, &s, &b, 1.0, 900.0).unwrap();
    let fine = euler(&p, &s, &b, 1.0, 900.0);
    assert!((exact.t_air - fine.t_air).abs() < 1e-3);
    assert!((exact.t_env - fine.t_env).abs() < 1e-3);
}

#[test]
fn steady_state_is_long_run_limit() {
    let p = BuildingParams::default();
    let b = BoundarySample::new(0.0, 0.0, 0.0);
    let ss = steady_state(&p, &b, 0.5).unwrap();
    let m = ThermalModel::new(&p, 900.0).unwrap();
    for start in [ThermalState::new(-10.0, 40.0), ThermalState::new(35.0, 5.0), ThermalState::new(20.0, 20.0)] {
        let mut s = start;
        for _ in 0..10_000 {
            s = m.step(&s, &b, 0.5).unwrap();
        }
        assert!((s.t_air - ss.t_air).abs() < 1e-3 && (s.t_env - ss.t_env).abs() < 1e-3);
    }
}

#[test]
fn energy_audit_over_constant_boundary_windows() {
    for seed in 0..20 {
        let c = case(seed);
        let mut rng = RngStream::new(seed + 1000);
        let u: Vec<f64> = (0..96).map(|_| rng.next_f64()).collect();
        let r = energy_residual(&c.p, c.s, &c.b, &u);
        assert!(r < 1e-6, "seed {seed}: residual {r}");
    }
}
