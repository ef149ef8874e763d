//! Plain sample statistics used by the distribution checks.

pub fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Centers of histogram bins that dominate their `±reach` neighbourhood and
/// hold at least `floor` of the tallest bin.
pub fn histogram_modes(x: &[f64], lo: f64, width: f64, bins: usize, reach: usize, floor: f64) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    for v in x {
        let i = ((v - lo) / width).floor();
        if i >= 0.0 && (i as usize) < bins {
            counts[i as usize] += 1;
        }
    }
    let tallest = *counts.iter().max().unwrap_or(&0) as f64;
    (0..bins)
        .filter(|&i| {
            let a = i.saturating_sub(reach);
            let b = (i + reach).min(bins - 1);
            (a..=b).all(|j| j == i || counts[j] < counts[i]) && counts[i] as f64 >= floor * tallest
        })
        .map(|i| lo + (i as f64 + 0.5) * width)
        .collect()
}
