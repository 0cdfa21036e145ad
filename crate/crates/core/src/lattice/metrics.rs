//! Monte Carlo second-moment and goodness estimates.

use std::f64::consts::{E, PI};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::Lattice;
use crate::error::{Error, Result};

/// Second-moment figures of a lattice, estimated by Monte Carlo over its
/// Voronoi region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeMetrics {
    /// `σ²_Λ`, mean squared norm per dimension of a uniform Voronoi point.
    pub second_moment: f64,
    /// `G(Λ) = σ²_Λ / Vol(V)^{2/n}`.
    pub normalized_second_moment: f64,
    pub mc_samples: usize,
    /// Standard error of `second_moment`.
    pub mc_std_error: f64,
    /// Standard error of `normalized_second_moment`.
    pub nsm_std_error: f64,
}

impl LatticeMetrics {
    /// `ln(2πe·G(Λ))` in nats: the gap of the lattice quantizer to the
    /// sphere bound, zero only in the limit of large dimension.
    pub fn source_coding_figure(&self) -> f64 {
        (2.0 * PI * E * self.normalized_second_moment).ln()
    }
}

/// Estimates `σ²_Λ` and `G(Λ)` from `num_samples ≥ 1000` uniform Voronoi draws.
pub fn estimate_metrics<R: Rng + ?Sized>(
    lat: &Lattice,
    num_samples: usize,
    rng: &mut R,
) -> Result<LatticeMetrics> {
    if num_samples < 1000 {
        return Err(Error::InputDomain(format!(
            "at least 1000 samples required, got {num_samples}"
        )));
    }
    let n = lat.dim() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..num_samples {
        let u = lat.sample_uniform_voronoi(rng);
        let q = u.iter().map(|v| v * v).sum::<f64>() / n;
        sum += q;
        sum_sq += q * q;
    }
    let m = num_samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    let se = (var / m).sqrt();
    let unit = lat.unit_sq();
    Ok(LatticeMetrics {
        second_moment: mean,
        normalized_second_moment: mean / unit,
        mc_samples: num_samples,
        mc_std_error: se,
        nsm_std_error: se / unit,
    })
}

/// Estimated probability that i.i.d. Gaussian noise leaves the Voronoi region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGoodness {
    pub error_probability: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte Carlo estimate of `Pr[Z ∉ V]` for `Z ~ N(0, noise_variance·I)`.
pub fn measure_channel_goodness<R: Rng + ?Sized>(
    lat: &Lattice,
    noise_variance: f64,
    num_trials: usize,
    rng: &mut R,
) -> Result<ChannelGoodness> {
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(Error::InputDomain(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    if num_trials == 0 {
        return Err(Error::InputDomain("at least one trial required".into()));
    }
    let normal = Normal::new(0.0, noise_variance.sqrt()).expect("valid std dev");
    let mut z = vec![0.0; lat.dim()];
    let mut outside = 0usize;
    for _ in 0..num_trials {
        for v in z.iter_mut() {
            *v = normal.sample(rng);
        }
        if lat.quantize_nearest(&z)?.iter().any(|c| *c != 0.0) {
            outside += 1;
        }
    }
    let p = outside as f64 / num_trials as f64;
    Ok(ChannelGoodness {
        error_probability: p,
        std_error: (p * (1.0 - p) / num_trials as f64).sqrt(),
        trials: num_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn too_few_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let lat = Lattice::integer(2).unwrap();
        assert!(estimate_metrics(&lat, 999, &mut rng).is_err());
    }

    #[test]
    fn vanishing_noise_stays_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lat = Lattice::gosset();
        let g = measure_channel_goodness(&lat, 1e-6, 2000, &mut rng).unwrap();
        assert_eq!(g.error_probability, 0.0);
        assert!(measure_channel_goodness(&lat, 0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn integer_source_coding_figure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = estimate_metrics(&Lattice::integer(1).unwrap(), 200_000, &mut rng).unwrap();
        // ln(2πe/12) = 0.352970...
        let exact = (2.0 * PI * E / 12.0).ln();
        assert!((exact - 0.352_970).abs() < 1e-6);
        let slack = 4.0 * m.nsm_std_error / m.normalized_second_moment;
        assert!((m.source_coding_figure() - exact).abs() < slack);
    }
}
