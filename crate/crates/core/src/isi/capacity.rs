//! ISI capacity and the finite-length MMSE-DFE.
//!
//! `C = (1/4π)∫ log2(1 + P_s|H(e^{−iω})|²/S_z(ω)) dω` over `[−π, π]`. The
//! integrand is even for real taps, so the adaptive Gauss–Kronrod rule only
//! covers `[0, π]`. An ideal MMSE-DFE reaches `SNR = 2^{2C} − 1`.
//!
//! The FIR design estimates `x(t)` from `K` samples starting `lookback`
//! symbols before the cursor `d0` (the first non-zero tap). Past symbols are
//! treated as known, future ones as noise. The unbiased output is
//! `x(t) + Σ_l ĥ_l·x(t−l) + e(t)` with `E[e²] = P_s / SNR_fir`.

use nalgebra::{DMatrix, DVector};

use super::IsiChannel;
use crate::error::{Error, Result};

/// FIR front-end parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfeOptions {
    /// Number of feedforward taps `K`.
    pub ff_len: usize,
    /// Feedforward samples taken before the cursor. Non-zero values help with
    /// colored noise at the price of `lookback` extra post-cursor taps.
    pub lookback: usize,
    /// Absolute tolerance of the adaptive quadrature, in bits.
    pub tolerance: f64,
}

impl Default for DfeOptions {
    fn default() -> Self {
        Self {
            ff_len: 64,
            lookback: 0,
            tolerance: 1e-12,
        }
    }
}

/// Unbiased finite-length DFE.
#[derive(Debug, Clone, PartialEq)]
pub struct FirDfe {
    /// `f[m]` multiplies `y(t + cursor − lookback + m)`.
    pub feedforward: Vec<f64>,
    /// `ĥ_1..ĥ_{L'}`: residual post-cursor interference at the filter output.
    pub postcursor: Vec<f64>,
    pub cursor: usize,
    pub lookback: usize,
    /// Unbiased output SNR, infinite for zero forcing.
    pub snr: f64,
}

impl FirDfe {
    /// Number of post-cursor taps.
    pub fn memory(&self) -> usize {
        self.postcursor.len()
    }

    /// `r(t) = Σ_m f[m]·y(t + cursor − lookback + m)`, with `y` indexed from
    /// `offset` (so `y[k]` is the sample at time `k − offset`) and zero
    /// outside the slice. Produces outputs for `t = 0..len`.
    pub fn filter(&self, y: &[f64], offset: usize, len: usize) -> Vec<f64> {
        (0..len)
            .map(|t| {
                let start =
                    t as isize + self.cursor as isize - self.lookback as isize + offset as isize;
                self.feedforward
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| **f != 0.0)
                    .map(|(m, f)| {
                        let k = start + m as isize;
                        if k >= 0 && (k as usize) < y.len() {
                            f * y[k as usize]
                        } else {
                            0.0
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

/// Capacity of one channel along with its DFE designs.
#[derive(Debug, Clone, PartialEq)]
pub struct DfeReport {
    /// Bits per real channel use.
    pub c_isi: f64,
    pub snr_mmse_dfe: f64,
    /// Error estimate of the quadrature, in bits.
    pub quadrature_error: f64,
    /// `None` when no tap is non-zero.
    pub fir: Option<FirDfe>,
}

impl DfeReport {
    /// Gap between the ideal and the FIR SNR in dB (zero without a FIR).
    pub fn fir_loss_db(&self) -> f64 {
        match &self.fir {
            Some(f) if self.snr_mmse_dfe > 0.0 => 10.0 * (self.snr_mmse_dfe / f.snr).log10(),
            _ => 0.0,
        }
    }
}

/// [`isi_capacity_with`] using default options.
pub fn isi_capacity(ch: &IsiChannel) -> Result<DfeReport> {
    isi_capacity_with(ch, &DfeOptions::default())
}

pub fn isi_capacity_with(ch: &IsiChannel, opts: &DfeOptions) -> Result<DfeReport> {
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(Error::InputDomain(
            "quadrature tolerance must be positive".into(),
        ));
    }
    let f = |w: f64| (1.0 + ch.snr_density(w)).log2();
    let (integral, err) = adaptive_gauss_kronrod(&f, 0.0, std::f64::consts::PI, opts.tolerance);
    let c_isi = (integral / (2.0 * std::f64::consts::PI)).max(0.0);
    let fir = match ch.cursor() {
        Some(_) => Some(design_mmse_dfe(ch, opts)?),
        None => None,
    };
    Ok(DfeReport {
        c_isi,
        snr_mmse_dfe: (2.0 * c_isi).exp2() - 1.0,
        quadrature_error: err / (2.0 * std::f64::consts::PI),
        fir,
    })
}

/// Periodic trapezoid rule with `panels` points on `[−π, π)`; converges
/// geometrically for these analytic integrands.
pub fn capacity_trapezoid(ch: &IsiChannel, panels: usize) -> f64 {
    assert!(panels > 0, "at least one panel");
    let h = 2.0 * std::f64::consts::PI / panels as f64;
    let sum: f64 = (0..panels)
        .map(|k| (1.0 + ch.snr_density(-std::f64::consts::PI + h * k as f64)).log2())
        .sum();
    sum / (2.0 * panels as f64)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive 15-point Gauss–Kronrod; returns the integral and the
/// summed error estimate.
pub(crate) fn adaptive_gauss_kronrod(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tolerance: f64,
) -> (f64, f64) {
    let mut intervals = vec![(a, b, gk15(f, a, b))];
    for _ in 0..2000 {
        let total_err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if total_err <= tolerance {
            break;
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("non-empty");
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, gk15(f, lo, mid)));
        intervals.push((mid, hi, gk15(f, mid, hi)));
    }
    intervals
        .iter()
        .fold((0.0, 0.0), |(s, e), iv| (s + iv.2 .0, e + iv.2 .1))
}

/// Column of symbol `x(t+i)` in the feedforward window.
fn column(g: &[f64], k: usize, lookback: usize, i: isize) -> DVector<f64> {
    DVector::from_fn(k, |m, _| {
        let j = m as isize - lookback as isize - i;
        if j >= 0 && (j as usize) < g.len() {
            g[j as usize]
        } else {
            0.0
        }
    })
}

fn check_options(ch: &IsiChannel, opts: &DfeOptions) -> Result<(usize, Vec<f64>)> {
    if opts.ff_len == 0 {
        return Err(Error::InputDomain(
            "feedforward length must be positive".into(),
        ));
    }
    if opts.lookback >= opts.ff_len {
        return Err(Error::InputDomain(format!(
            "lookback {} must be below the feedforward length {}",
            opts.lookback, opts.ff_len
        )));
    }
    let d0 = ch
        .cursor()
        .ok_or_else(|| Error::InputDomain("channel has no non-zero tap".into()))?;
    Ok((d0, ch.taps()[d0..].to_vec()))
}

fn postcursor_of(f: &DVector<f64>, g: &[f64], k: usize, lookback: usize) -> Vec<f64> {
    let memory = g.len() - 1 + lookback;
    (1..=memory)
        .map(|l| f.dot(&column(g, k, lookback, -(l as isize))))
        .collect()
}

/// Unbiased finite-length MMSE-DFE.
pub fn design_mmse_dfe(ch: &IsiChannel, opts: &DfeOptions) -> Result<FirDfe> {
    let (d0, g) = check_options(ch, opts)?;
    let (k, p) = (opts.ff_len, opts.lookback);
    let ps = ch.source_power();
    let rz = ch.noise_autocovariance(k - 1);
    let mut r = DMatrix::from_fn(k, k, |a, b| rz[a.abs_diff(b)]);
    for i in 0..(k - p) as isize {
        let c = column(&g, k, p, i);
        r.ger(ps, &c, &c, 1.0);
    }
    let c0 = column(&g, k, p, 0);
    let chol = r.cholesky().ok_or_else(|| {
        Error::InputDomain("observation covariance is not positive definite".into())
    })?;
    let w = chol.solve(&c0) * ps;
    let rho = w.dot(&c0);
    let f = &w / rho;
    Ok(FirDfe {
        postcursor: postcursor_of(&f, &g, k, p),
        feedforward: f.iter().copied().collect(),
        cursor: d0,
        lookback: p,
        snr: rho / (1.0 - rho),
    })
}

/// Zero-forcing front end `f = e/g_0`: removes the noise-free channel exactly.
pub fn design_zero_forcing(ch: &IsiChannel, opts: &DfeOptions) -> Result<FirDfe> {
    let (d0, g) = check_options(ch, opts)?;
    let (k, p) = (opts.ff_len, opts.lookback);
    let mut f = DVector::zeros(k);
    f[p] = 1.0 / g[0];
    Ok(FirDfe {
        postcursor: postcursor_of(&f, &g, k, p),
        feedforward: f.iter().copied().collect(),
        cursor: d0,
        lookback: p,
        snr: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        for deg in [0, 5, 13, 22] {
            let (v, _) = adaptive_gauss_kronrod(&|x: f64| x.powi(deg), 0.0, 1.0, 1e-14);
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
        // A single 15-point panel integrates degree 22 exactly.
        let (v, _) = gk15(&|x: f64| x.powi(22), -1.0, 2.0);
        assert!((v - (2f64.powi(23) + 1.0) / 23.0).abs() < 1e-8 * v);
    }

    #[test]
    fn flat_channel_capacity() {
        let ch = IsiChannel::new(vec![2.0], vec![], 3.0).unwrap();
        let r = isi_capacity(&ch).unwrap();
        assert!((r.c_isi - 0.5 * 13f64.log2()).abs() < 1e-12);
        assert!((r.snr_mmse_dfe - 12.0).abs() < 1e-9);
        let fir = r.fir.unwrap();
        assert!((fir.snr - 12.0).abs() < 1e-9);
        assert!((fir.feedforward[0] - 0.5).abs() < 1e-12);
        assert!(fir.postcursor.is_empty());
    }

    #[test]
    fn two_tap_capacity() {
        // log2(3 + 2cos ω) averages to log2((3 + √5)/2).
        let ch = IsiChannel::new(vec![1.0, 1.0], vec![], 1.0).unwrap();
        let r = isi_capacity(&ch).unwrap();
        let expected = 0.5 * ((3.0 + 5f64.sqrt()) / 2.0).log2();
        assert!((r.c_isi - expected).abs() < 1e-12);
        let fir = r.fir.unwrap();
        assert!(fir.snr <= r.snr_mmse_dfe * (1.0 + 1e-9));
        assert!(fir.snr > 0.99 * r.snr_mmse_dfe);
        assert!((capacity_trapezoid(&ch, 64) - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_forcing_inverts_cursor() {
        let ch = IsiChannel::new(vec![0.0, 2.0, 1.0, -0.5], vec![], 1.0).unwrap();
        let zf = design_zero_forcing(&ch, &DfeOptions::default()).unwrap();
        assert_eq!(zf.cursor, 1);
        assert_eq!(zf.postcursor, vec![0.5, -0.25]);
    }

    #[test]
    fn silent_channel() {
        let ch = IsiChannel::new(vec![0.0, 0.0], vec![], 1.0).unwrap();
        let r = isi_capacity(&ch).unwrap();
        assert_eq!(r.c_isi, 0.0);
        assert!(r.fir.is_none());
    }
}
