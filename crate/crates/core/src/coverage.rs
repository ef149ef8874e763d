//! Occupancy histograms over (indoor temperature, heating signal).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Trace;

pub const DEFAULT_TEMP_RANGE: (f64, f64) = (10.0, 30.0);
pub const DEFAULT_TEMP_BINS: usize = 80;
pub const DEFAULT_SIGNAL_BINS: usize = 21;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("invalid binning: {0}")]
    Binning(String),
    #[error("coverage maps have different bin edges ({a} vs {b})")]
    EdgeMismatch { a: String, b: String },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

/// Uniform bin edges over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self, CoverageError> {
        if bins == 0 {
            return Err(CoverageError::Binning("bin count must be at least 1".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CoverageError::Binning(format!("range [{lo}, {hi}] is degenerate")));
        }
        Ok(Self { lo, hi, bins })
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.bins as f64;
        (0..=self.bins)
            .map(|i| if i == self.bins { self.hi } else { self.lo + i as f64 * w })
            .collect()
    }

    /// Bin index of `x`, left-closed with the last bin closed on the right.
    pub fn bin(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let edges = self.edges();
        // first edge strictly greater than x, minus one
        let i = edges.partition_point(|e| *e <= x);
        Some(i.saturating_sub(1).min(self.bins - 1))
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} bins over [{}, {}]", self.bins, self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageMap {
    pub temp: Axis,
    pub signal: Axis,
    /// Row-major, `counts[i * signal.bins + j]` for temperature bin `i`.
    pub counts: Vec<u64>,
    /// Rows whose temperature fell outside the temperature axis.
    pub overflow: u64,
}

impl CoverageMap {
    pub fn empty(temp: Axis, signal: Axis) -> Self {
        Self {
            temp,
            signal,
            counts: vec![0; temp.bins * signal.bins],
            overflow: 0,
        }
    }

    /// Default grid: 0.25 K over [10, 30] °C by 21 signal bins over [0, 1].
    pub fn default_grid() -> Self {
        let (lo, hi) = DEFAULT_TEMP_RANGE;
        Self::empty(
            Axis::new(lo, hi, DEFAULT_TEMP_BINS).expect("default temperature axis"),
            Axis::new(0.0, 1.0, DEFAULT_SIGNAL_BINS).expect("default signal axis"),
        )
    }

    pub fn get(&self, temp_bin: usize, signal_bin: usize) -> u64 {
        self.counts[temp_bin * self.signal.bins + signal_bin]
    }

    pub fn add(&mut self, t_air: f64, signal: f64) {
        match (self.temp.bin(t_air), self.signal.bin(signal)) {
            (Some(i), Some(j)) => self.counts[i * self.signal.bins + j] += 1,
            _ => self.overflow += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn occupied(&self) -> impl Iterator<Item = bool> + '_ {
        self.counts.iter().map(|&c| c > 0)
    }

    /// Number of signal bins hit at any temperature.
    pub fn occupied_signal_bins(&self) -> usize {
        (0..self.signal.bins)
            .filter(|&j| (0..self.temp.bins).any(|i| self.get(i, j) > 0))
            .count()
    }

    pub fn signal_fraction(&self) -> f64 {
        self.occupied_signal_bins() as f64 / self.signal.bins as f64
    }

    fn check_edges(&self, other: &Self) -> Result<(), CoverageError> {
        if self.temp != other.temp || self.signal != other.signal {
            return Err(CoverageError::EdgeMismatch {
                a: format!("{} x {}", self.temp, self.signal),
                b: format!("{} x {}", other.temp, other.signal),
            });
        }
        Ok(())
    }

    /// Elementwise sum of two maps on the same grid.
    pub fn merge(&self, other: &Self) -> Result<Self, CoverageError> {
        self.check_edges(other)?;
        Ok(Self {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
            overflow: self.overflow + other.overflow,
            ..self.clone()
        })
    }

    /// Matrix CSV, one row per temperature bin (ascending), one column per signal bin.
    pub fn to_csv(&self) -> String {
        let t = self.temp.edges();
        let s = self.signal.edges();
        let mut out = String::from("t_lo_c,t_hi_c");
        for j in 0..self.signal.bins {
            let _ = write!(out, ",u_{}_{}", s[j], s[j + 1]);
        }
        out.push('\n');
        for i in 0..self.temp.bins {
            let _ = write!(out, "{},{}", t[i], t[i + 1]);
            for j in 0..self.signal.bins {
                let _ = write!(out, ",{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    /// Writes the matrix CSV and a `.meta.json` sidecar with edges and overflow.
    pub fn write(&self, path: &Path) -> Result<(), CoverageError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CoverageError::Io { path, source }
        };
        std::fs::write(path, self.to_csv()).map_err(io(path))?;
        let meta = serde_json::json!({
            "temp_edges": self.temp.edges(),
            "signal_edges": self.signal.edges(),
            "overflow": self.overflow,
            "total": self.total(),
            "occupied_fraction": occupied_fraction(self),
            "signal_fraction": self.signal_fraction(),
        });
        let mp = crate::engine::meta_path(path);
        std::fs::write(&mp, serde_json::to_string_pretty(&meta).expect("json") + "\n").map_err(io(&mp))
    }
}

pub fn bin_trace(
    trace: &Trace,
    temp_range: (f64, f64),
    n_temp_bins: usize,
    n_signal_bins: usize,
) -> Result<CoverageMap, CoverageError> {
    let mut m = CoverageMap::empty(
        Axis::new(temp_range.0, temp_range.1, n_temp_bins)?,
        Axis::new(0.0, 1.0, n_signal_bins)?,
    );
    for r in &trace.rows {
        m.add(r.t_air_c, r.control_signal);
    }
    Ok(m)
}

pub fn occupied_fraction(m: &CoverageMap) -> f64 {
    m.occupied().filter(|&o| o).count() as f64 / m.counts.len() as f64
}

/// Jaccard index of the occupied-bin sets; 0 when both are empty.
pub fn overlap(a: &CoverageMap, b: &CoverageMap) -> Result<f64, CoverageError> {
    a.check_edges(b)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (x, y) in a.occupied().zip(b.occupied()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// Histogram intersection of the normalized count distributions, in [0, 1].
pub fn histogram_intersection(a: &CoverageMap, b: &CoverageMap) -> Result<f64, CoverageError> {
    a.check_edges(b)?;
    let (ta, tb) = (a.total(), b.total());
    if ta == 0 || tb == 0 {
        return Ok(0.0);
    }
    Ok(a.counts
        .iter()
        .zip(&b.counts)
        .map(|(&x, &y)| (x as f64 / ta as f64).min(y as f64 / tb as f64))
        .sum())
}
