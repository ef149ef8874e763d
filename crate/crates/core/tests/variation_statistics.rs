mod common;

use common::stats::{histogram_modes, mean_std};
use thermex::rng::RngStream;
use thermex::thermal::BuildingParams;
use thermex::variation::{grid_variations, sample_building, ConverterChain, Distribution, HeaterSizing, VariationSpec};

fn draws(d: &Distribution, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed);
    (0..n).map(|_| d.sample(&mut rng).unwrap()).collect()
}

#[test]
fn gauss_moments() {
    let x = draws(&Distribution::gauss(0.8, 0.5).unwrap(), 100_000, 1);
    let (m, s) = mean_std(&x);
    assert!((0.78..=0.82).contains(&m), "mean {m}");
    assert!((0.48..=0.52).contains(&s), "std {s}");
}

#[test]
fn bimodal_floor_area() {
    let d = Distribution::mixture(vec![
        (0.5, Distribution::gauss(100.0, 10.0).unwrap()),
        (0.5, Distribution::gauss(180.0, 10.0).unwrap()),
    ])
    .unwrap();
    let x = draws(&d, 100_000, 2);
    let modes = histogram_modes(&x, 0.0, 5.0, 60, 4, 0.1);
    assert_eq!(modes.len(), 2, "{modes:?}");
    assert!((modes[0] - 100.0).abs() <= 3.0 && (modes[1] - 180.0).abs() <= 3.0, "{modes:?}");
}

#[test]
fn piecewise_frequencies_within_three_standard_errors() {
    let breaks = vec![0.0, 1.0, 3.0, 4.0];
    let dens = vec![1.0, 0.25, 2.0];
    let d = Distribution::piecewise_pdf(breaks, dens.clone()).unwrap();
    let n = 100_000;
    let x = draws(&d, n, 3);
    let total = 1.0 + 0.25 * 2.0 + 2.0;
    // half-unit bins, so uniformity inside each segment is checked as well
    for k in 0..8 {
        let lo = 0.5 * k as f64;
        let seg = if lo < 1.0 { 0 } else if lo < 3.0 { 1 } else { 2 };
        let p = dens[seg] * 0.5 / total;
        let got = x.iter().filter(|v| **v >= lo && **v < lo + 0.5).count() as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((got - p).abs() <= 3.0 * se, "bin {k}: {got} vs {p} (se {se})");
    }
    assert!(x.iter().all(|v| (0.0..4.0).contains(v)));
}

#[test]
fn truncated_gauss_in_bounds() {
    let d = Distribution::gauss(0.8, 0.5).unwrap().truncated(0.1, 2.5).unwrap();
    assert!(draws(&d, 20_000, 4).iter().all(|v| (0.1..=2.5).contains(v)));
}

fn wall_spec() -> VariationSpec {
    let d = Distribution::gauss(0.8, 0.5).unwrap().truncated(0.1, 2.5).unwrap();
    VariationSpec::new().with("UExt", d).unwrap()
}

#[test]
fn forty_distinct_walls() {
    let chain = ConverterChain::standard(HeaterSizing::default());
    let base = BuildingParams::default();
    let mut rng = RngStream::new(1);
    let mut u: Vec<f64> = (0..40)
        .map(|_| sample_building(&wall_spec(), &base, &chain, &mut rng).unwrap().u_ext)
        .collect();
    assert!(u.iter().all(|v| (0.1..=2.5).contains(v)));
    u.sort_by(f64::total_cmp);
    u.dedup();
    assert_eq!(u.len(), 40);
}

#[test]
fn sample_building_reproducible() {
    let chain = ConverterChain::standard(HeaterSizing::default());
    let base = BuildingParams::default();
    let a = sample_building(&wall_spec(), &base, &chain, &mut RngStream::new(9)).unwrap();
    let b = sample_building(&wall_spec(), &base, &chain, &mut RngStream::new(9)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn grid_product_four_by_ten() {
    let walls = vec![0.3, 0.6, 0.9, 1.2];
    let areas: Vec<f64> = (0..10).map(|i| 100.0 + 10.0 * i as f64).collect();
    let spec = VariationSpec::new()
        .with("UExt", Distribution::grid(walls.clone()).unwrap())
        .unwrap()
        .with("floor_area", Distribution::grid(areas.clone()).unwrap())
        .unwrap();
    let chain = ConverterChain::standard(HeaterSizing::default());
    let out = grid_variations(&spec, &BuildingParams::default(), &chain, 10_000).unwrap();
    assert_eq!(out.len(), 40);
    for w in &walls {
        for a in &areas {
            assert_eq!(out.iter().filter(|p| p.u_ext == *w && p.floor_area == *a).count(), 1);
        }
    }
    assert_eq!(out, grid_variations(&spec, &BuildingParams::default(), &chain, 10_000).unwrap());
    assert!(grid_variations(&spec, &BuildingParams::default(), &chain, 39).is_err());
}
