//! Straight-line reference versions of the walker algorithms, kept
//! independent of the library's generators. Each `sample(..)` maps to one
//! draw on the shared stream in the documented order.

use std::f64::consts::PI;

use thermex::rng::RngStream;
use thermex::signals::{IntDist, UnitDist, WalkerConfig};

fn sample_int(d: &IntDist, rng: &mut RngStream) -> usize {
    match *d {
        IntDist::Constant { value } => value as usize,
        IntDist::UniformInt { lo, hi } => rng.uniform_int(lo, hi) as usize,
        IntDist::Poisson { lam } => rng.poisson(lam) as usize,
    }
}

fn sample_unit(d: &UnitDist, rng: &mut RngStream) -> f64 {
    match *d {
        UnitDist::Constant { value } => value,
        UnitDist::Uniform { lo, hi } => rng.uniform(lo, hi),
    }
}

fn clip(v: f64) -> f64 {
    if v < 0.0 {
        0.0
    } else if v > 1.0 {
        1.0
    } else {
        v
    }
}

pub fn poisson(lam: f64, low: f64, high: f64, num_steps: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut result: Vec<f64> = vec![];
    while result.len() < num_steps {
        let v = rng.uniform(low, high);
        let k = rng.poisson(lam) as usize;
        result.extend(std::iter::repeat_n(v, k));
    }
    result.truncate(num_steps);
    result
}

pub fn sinusoid(
    freq_dist: &IntDist,
    amp_dist: &UnitDist,
    steady_dist: &IntDist,
    num_steps: usize,
    rng: &mut RngStream,
) -> Vec<f64> {
    let (mut result, mut phase): (Vec<f64>, f64) = (vec![], 0.0);
    let mid = 0.5;
    while result.len() < num_steps {
        let freq = sample_int(freq_dist, rng);
        let amp = sample_unit(amp_dist, rng);
        let hold = sample_int(steady_dist, rng);
        let omega = 2.0 * PI / freq as f64;
        for _ in 0..freq {
            let v = clip(mid + 0.5 * amp * phase.sin());
            result.push(v);
            phase += omega;
        }
        let last = result[result.len() - 1];
        result.extend(std::iter::repeat_n(last, hold));
    }
    result.truncate(num_steps);
    result
}

pub fn ramp(freq_dist: &IntDist, steady_dist: &IntDist, num_steps: usize, rng: &mut RngStream) -> Vec<f64> {
    let min = 0.0;
    let mut result: Vec<f64> = vec![];
    while result.len() < num_steps {
        let freq = sample_int(freq_dist, rng);
        let step = 1.0 / (freq - 1) as f64;
        for i in 0..freq {
            result.push(min + step * i as f64);
        }
        let hold_high = sample_int(steady_dist, rng);
        result.extend(std::iter::repeat_n(1.0, hold_high));
        for i in 1..freq - 1 {
            result.push(1.0 - step * i as f64);
        }
        let hold_low = sample_int(steady_dist, rng);
        result.extend(std::iter::repeat_n(0.0, hold_low));
    }
    result.truncate(num_steps);
    result
}

pub fn walker(cfg: &WalkerConfig, num_steps: usize, rng: &mut RngStream) -> Vec<f64> {
    match cfg {
        WalkerConfig::Poisson(c) => {
            let (lo, hi) = c.levels();
            poisson(c.lam(), lo, hi, num_steps, rng)
        }
        WalkerConfig::Sinusoid(c) => sinusoid(c.freq(), c.amp(), c.steady(), num_steps, rng),
        WalkerConfig::Ramp(c) => ramp(c.freq(), c.steady(), num_steps, rng),
    }
}

/// Mixed schedule: pick a member uniformly, draw a segment length, run the
/// member from scratch for that segment.
pub fn mixed(members: &[WalkerConfig], segment: &IntDist, num_steps: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut result: Vec<f64> = vec![];
    while result.len() < num_steps {
        let pick = rng.uniform_int(0, members.len() as u64 - 1) as usize;
        let len = sample_int(segment, rng);
        let part = walker(&members[pick], len, rng);
        result.extend(part);
    }
    result.truncate(num_steps);
    result
}

/// Compares every walker against its oracle on `pairs` random (config,
/// seed, length) draws per walker kind. Returns one message per mismatch.
pub fn compare_random_pairs(pairs: usize, meta_seed: u64) -> Vec<String> {
    use thermex::signals::{MixedWalkConfig, WalkerSpec};
    let mut meta = RngStream::new(meta_seed);
    let mut failures = Vec::new();
    for kind in 0..4 {
        for _ in 0..pairs {
            let seed = meta.next_u64();
            let n = meta.uniform_int(0, 3000) as usize;
            let (spec, expected) = if kind < 3 {
                let cfg = super::random_walker(&mut meta, kind);
                let expected = walker(&cfg, n, &mut RngStream::new(seed));
                (WalkerSpec::Single(cfg), expected)
            } else {
                let members: Vec<_> = (0..meta.uniform_int(1, 3))
                    .map(|_| {
                        let k = meta.index(3);
                        super::random_walker(&mut meta, k)
                    })
                    .collect();
                let segment = IntDist::UniformInt {
                    lo: meta.uniform_int(0, 5),
                    hi: meta.uniform_int(6, 200),
                };
                let expected = mixed(&members, &segment, n, &mut RngStream::new(seed));
                (WalkerSpec::Mixed(MixedWalkConfig::new(members, segment).unwrap()), expected)
            };
            let got = spec.generate(n, &mut RngStream::new(seed)).values;
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            if bits(&got) != bits(&expected) {
                failures.push(format!("{} seed {seed} n {n}: differs from oracle", spec.kind()));
            } else if got.len() != n || got.iter().any(|v| !(0.0..=1.0).contains(v)) {
                failures.push(format!("{} seed {seed} n {n}: length or range violated", spec.kind()));
            }
        }
    }
    failures
}
