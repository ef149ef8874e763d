//! Seeded random stream shared by every stochastic component.
//!
//! The generator is ChaCha8 (`rand_chacha`), seeded through
//! `SeedableRng::seed_from_u64`. All derived draws (uniform reals, bounded
//! integers, Poisson counts, normals) are implemented here on top of
//! `next_u64` so that their exact bit patterns do not depend on the version of
//! any distribution crate.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifier of the generator algorithm, recorded in trace metadata.
pub const ALGORITHM: &str = "chacha8/seed_from_u64";

/// Independent sub-streams derived from the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Substream {
    Main = 0,
    Variation = 1,
    Walker = 2,
    Presets = 3,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_substream(seed, Substream::Main)
    }

    pub fn with_substream(seed: u64, sub: Substream) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(sub as u64);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`; returns `lo` exactly when `lo == hi`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer on the inclusive range `lo..=hi`.
    pub fn uniform_int(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        let n = hi - lo + 1;
        let k = (self.next_f64() * n as f64) as u64;
        lo + k.min(n - 1)
    }

    /// Uniform index into a collection of length `n > 0`.
    pub fn index(&mut self, n: usize) -> usize {
        self.uniform_int(0, n as u64 - 1) as usize
    }

    /// Poisson draw by Knuth's multiplication method.
    ///
    /// Multiplies uniforms until the running product drops to `exp(-lam)` or
    /// below. Exact for moderate means; callers keep `lam` well below the
    /// underflow point of `exp(-lam)`.
    pub fn poisson(&mut self, lam: f64) -> u64 {
        let limit = (-lam).exp();
        let mut k = 0u64;
        let mut p = 1.0;
        loop {
            p *= self.next_f64();
            if p <= limit {
                return k;
            }
            k += 1;
        }
    }

    /// Standard normal by the Box-Muller cosine branch, one pair of uniforms
    /// per draw.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
