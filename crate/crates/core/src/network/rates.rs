//! Rate expressions in bits per channel use.

/// MAC cut-set bound `½·log2(1 + P_d)`.
pub fn mac_cutset(p_d: f64) -> f64 {
    0.5 * (1.0 + p_d).log2()
}

/// Rate achieved by lattice-coded multihop AF in the high-SNR regime:
/// `½·log2(1 + P_d / ((1+δ)^{L−1}·(1 + L·δ·P_d)))`.
pub fn rate_laf(p_d: f64, delta: f64, num_layers: usize) -> f64 {
    let l = num_layers as f64;
    let att = (1.0 + delta).powf(l - 1.0);
    0.5 * (1.0 + p_d / (att * (1.0 + l * delta * p_d))).log2()
}
