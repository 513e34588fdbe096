/// `4^-k` for k = 0..24, in that order (decreasing).
pub fn u_small() -> Vec<f64> {
    (0..=24).map(|k| 4f64.powi(-k)).collect()
}

/// `4^k` for k = 0..24 (increasing).
pub fn u_large() -> Vec<f64> {
    (0..=24).map(|k| 4f64.powi(k)).collect()
}

/// 129 uniform points on [0, 16].
pub fn u_mid() -> Vec<f64> {
    (0..=128).map(|i| i as f64 / 8.0).collect()
}

/// [0, 16] refined `factor` times beyond [`u_mid`].
pub fn refined_mid_grid(factor: usize) -> Vec<f64> {
    let n = 128 * factor.max(1);
    (0..=n).map(|i| 16.0 * i as f64 / n as f64).collect()
}

/// Sorted union of 0 and the three canonical lattices.
pub fn merged_lattice() -> Vec<f64> {
    let mut all: Vec<f64> = std::iter::once(0.0)
        .chain(u_small())
        .chain(u_mid())
        .chain(u_large())
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}
