//! Non-layered networks as Gaussian ISI channels.
//!
//! Under amplify-and-forward every relay delays what it forwards by one
//! symbol, so a source–destination path through `k` relays contributes its
//! gain product at delay `k` (the direct link sits at delay 0). Carrying a
//! polynomial in the unit delay `D` through the DAG in topological order
//! gives the channel taps `h_0..h_L` at the destination, and one noise
//! transfer polynomial per relay for the colored noise `z_e(t)`.
//!
//! [`capacity`] turns the taps and noise spectrum into the ISI capacity and
//! a finite-length MMSE-DFE front end; [`precode`] and [`interleave`] replace
//! the decision feedback by lattice precoding of the post-cursor
//! interference; [`link`] simulates the whole chain.

pub mod capacity;
pub mod interleave;
pub mod link;
pub mod precode;

pub use capacity::{
    capacity_trapezoid, design_mmse_dfe, design_zero_forcing, isi_capacity, isi_capacity_with,
    DfeOptions, DfeReport, FirDfe,
};
pub use interleave::BlockInterleaver;
pub use link::{simulate_isi_link, LinkConfig, LinkStats};
pub use precode::{precode_dirty_paper, precode_with_dither};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::af::nominal_received_powers;
use crate::network::{amplification_gains, network_delta, AfGains, RelayNetwork};

/// Noise of one relay as seen at the destination.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTransfer {
    /// Node index of the relay in the originating network (`usize::MAX` for
    /// channels built by hand).
    pub node: usize,
    /// `g[m]`: amplitude of the relay's unit-variance noise at delay `m`.
    pub coefficients: Vec<f64>,
}

/// `y(t) = Σ_l h_l·x_s(t−l) + z_e(t)` with
/// `z_e(t) = z_d(t) + Σ_j (g_j ∗ z_j)(t)` and all `z` unit-variance white.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiChannel {
    taps: Vec<f64>,
    noise: Vec<NoiseTransfer>,
    source_power: f64,
}

impl IsiChannel {
    /// Channel from explicit taps and relay-noise polynomials.
    pub fn new(taps: Vec<f64>, noise: Vec<Vec<f64>>, source_power: f64) -> Result<Self> {
        if taps.is_empty() || taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InputDomain(
                "taps must be finite and non-empty".into(),
            ));
        }
        if !(source_power > 0.0 && source_power.is_finite()) {
            return Err(Error::InputDomain(format!(
                "source power must be positive, got {source_power}"
            )));
        }
        if noise.iter().flatten().any(|g| !g.is_finite()) {
            return Err(Error::InputDomain("noise transfer must be finite".into()));
        }
        Ok(Self {
            taps,
            noise: noise
                .into_iter()
                .map(|coefficients| NoiseTransfer {
                    node: usize::MAX,
                    coefficients,
                })
                .collect(),
            source_power,
        })
    }

    /// `h_0..h_L`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn noise_transfer(&self) -> &[NoiseTransfer] {
        &self.noise
    }

    pub fn source_power(&self) -> f64 {
        self.source_power
    }

    /// Largest delay `L` (index of the last tap).
    pub fn max_delay(&self) -> usize {
        self.taps.len() - 1
    }

    /// Index of the first non-zero tap, `None` if all taps vanish.
    pub fn cursor(&self) -> Option<usize> {
        self.taps.iter().position(|&h| h != 0.0)
    }

    /// Same taps and noise at another input power.
    pub fn with_source_power(&self, source_power: f64) -> Result<Self> {
        if !(source_power > 0.0 && source_power.is_finite()) {
            return Err(Error::InputDomain(format!(
                "source power must be positive, got {source_power}"
            )));
        }
        Ok(Self {
            source_power,
            ..self.clone()
        })
    }

    /// Longest noise transfer polynomial minus one.
    pub fn noise_memory(&self) -> usize {
        self.noise
            .iter()
            .map(|g| g.coefficients.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// `|H(e^{−iω})|²`.
    pub fn gain_response(&self, omega: f64) -> f64 {
        poly_at(&self.taps, omega).norm_sqr()
    }

    /// `S_z(ω) = 1 + Σ_j |g_j(e^{−iω})|²`.
    pub fn noise_psd_at(&self, omega: f64) -> f64 {
        1.0 + self
            .noise
            .iter()
            .map(|g| poly_at(&g.coefficients, omega).norm_sqr())
            .sum::<f64>()
    }

    /// `S_z` on a grid of frequencies in `[−π, π]`.
    pub fn noise_psd(&self, omegas: &[f64]) -> Vec<f64> {
        omegas.iter().map(|&w| self.noise_psd_at(w)).collect()
    }

    /// `P_s·|H(e^{−iω})|² / S_z(ω)`.
    pub fn snr_density(&self, omega: f64) -> f64 {
        self.source_power * self.gain_response(omega) / self.noise_psd_at(omega)
    }

    /// `E[z_e(t)·z_e(t+k)]` for `k = 0..=max_lag`.
    pub fn noise_autocovariance(&self, max_lag: usize) -> Vec<f64> {
        let mut r = vec![0.0; max_lag + 1];
        r[0] = 1.0;
        for g in &self.noise {
            let c = &g.coefficients;
            for (k, rk) in r.iter_mut().enumerate() {
                *rk += c
                    .iter()
                    .zip(c.iter().skip(k))
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            }
        }
        r
    }
}

/// `Σ_m c[m]·e^{−iωm}`.
fn poly_at(c: &[f64], omega: f64) -> Complex64 {
    c.iter()
        .enumerate()
        .map(|(m, &v)| Complex64::from_polar(v, -omega * m as f64))
        .sum()
}

fn add_shifted(acc: &mut Vec<f64>, p: &[f64], scale: f64, shift: usize) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0.0);
    }
    for (m, &v) in p.iter().enumerate() {
        acc[m + shift] += scale * v;
    }
}

/// Propagates a delay polynomial injected at `start` (received there as
/// `seed`) to every later node; relays multiply by `β·D`.
fn propagate(net: &RelayNetwork, gains: &AfGains, start: usize, seed: Vec<f64>) -> Vec<Vec<f64>> {
    let n = net.num_nodes();
    let mut received: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut transmitted: Vec<Vec<f64>> = vec![Vec::new(); n];
    let topo = net.topological_order();
    let pos = topo
        .iter()
        .position(|&v| v == start)
        .expect("start node in network");
    for &v in &topo[pos..] {
        if v == start {
            received[v] = seed.clone();
        } else {
            let mut acc = Vec::new();
            for e in net.incoming(v) {
                if !transmitted[e.from].is_empty() {
                    add_shifted(&mut acc, &transmitted[e.from], e.gain, 0);
                }
            }
            received[v] = acc;
        }
        if v == net.source() {
            transmitted[v] = received[v].clone();
        } else if v != net.destination() && !received[v].is_empty() {
            let mut t = Vec::new();
            add_shifted(&mut t, &received[v], gains.beta[v], 1);
            transmitted[v] = t;
        }
    }
    received
}

/// Reduces a network with the tightest `δ` (see [`reduce_to_isi_with_delta`]).
pub fn reduce_to_isi(net: &RelayNetwork) -> Result<IsiChannel> {
    let powers = nominal_received_powers(net);
    let delta = network_delta(net, &powers);
    reduce_to_isi_with_gains(net, &amplification_gains(net, &powers, delta)?)
}

/// Reduces a network whose relays use `β_j = √P_j / √((1+δ)·P_{R,j})` with
/// the coherent received powers `P_{R,j} = (Σ_i h_ij √P_i)²`.
pub fn reduce_to_isi_with_delta(net: &RelayNetwork, delta: f64) -> Result<IsiChannel> {
    let powers = nominal_received_powers(net);
    reduce_to_isi_with_gains(net, &amplification_gains(net, &powers, delta)?)
}

/// Reduces a network with explicit relay gains.
pub fn reduce_to_isi_with_gains(net: &RelayNetwork, gains: &AfGains) -> Result<IsiChannel> {
    if gains.beta.len() != net.num_nodes() {
        return Err(Error::InputDomain(format!(
            "expected {} gains, got {}",
            net.num_nodes(),
            gains.beta.len()
        )));
    }
    let d = net.destination();
    let mut taps = propagate(net, gains, net.source(), vec![1.0]).swap_remove(d);
    if taps.is_empty() {
        taps.push(0.0);
    }
    let noise = net
        .relays()
        .map(|j| NoiseTransfer {
            node: j,
            coefficients: propagate(net, gains, j, vec![1.0]).swap_remove(d),
        })
        .collect();
    Ok(IsiChannel {
        taps,
        noise,
        source_power: net.source_power(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkDescription;
    use std::f64::consts::PI;

    #[test]
    fn diamond_taps() {
        // s→d gain 1; s→r→d with h_sr = 2, β_r = 0.5, h_rd = 3.
        let net = NetworkDescription::new("s", "d")
            .node("s", 1.0)
            .node("r", 1.0)
            .edge("s", "d", 1.0)
            .edge("s", "r", 2.0)
            .edge("r", "d", 3.0)
            .build()
            .unwrap();
        let r = net.node_index("r").unwrap();
        let mut beta = vec![0.0; net.num_nodes()];
        beta[net.source()] = 1.0;
        beta[r] = 0.5;
        let ch = reduce_to_isi_with_gains(&net, &AfGains { delta: 0.0, beta }).unwrap();
        assert_eq!(ch.taps(), &[1.0, 3.0]);
        // The relay's noise reaches d one symbol later with gain β·h_rd.
        assert_eq!(ch.noise_transfer()[0].coefficients, vec![0.0, 1.5]);
    }

    #[test]
    fn parallel_paths_sum() {
        // Path products 1.5 and 0.5 at delay 1.
        let net = NetworkDescription::new("s", "d")
            .node("s", 1.0)
            .node("a", 1.0)
            .node("b", 1.0)
            .edge("s", "a", 1.5)
            .edge("s", "b", 1.0)
            .edge("a", "d", 1.0)
            .edge("b", "d", 0.5)
            .build()
            .unwrap();
        let mut beta = vec![1.0; net.num_nodes()];
        beta[net.destination()] = 0.0;
        let ch = reduce_to_isi_with_gains(&net, &AfGains { delta: 0.0, beta }).unwrap();
        assert_eq!(ch.taps(), &[0.0, 2.0]);
        assert_eq!(ch.cursor(), Some(1));
    }

    #[test]
    fn psd_cases() {
        let grid: Vec<f64> = (0..33).map(|k| -PI + 2.0 * PI * k as f64 / 32.0).collect();
        let white = IsiChannel::new(vec![1.0], vec![], 1.0).unwrap();
        assert!(white.noise_psd(&grid).iter().all(|&s| s == 1.0));
        let one = IsiChannel::new(vec![1.0], vec![vec![0.0, 0.7]], 1.0).unwrap();
        for s in one.noise_psd(&grid) {
            assert!((s - 1.49).abs() < 1e-12);
        }
        let two = IsiChannel::new(vec![1.0], vec![vec![0.5, 0.5]], 1.0).unwrap();
        let r = two.noise_autocovariance(3);
        assert_eq!(r, vec![1.5, 0.25, 0.0, 0.0]);
    }

    #[test]
    fn bad_channels_rejected() {
        assert!(IsiChannel::new(vec![], vec![], 1.0).is_err());
        assert!(IsiChannel::new(vec![1.0], vec![], 0.0).is_err());
        assert!(IsiChannel::new(vec![f64::NAN], vec![], 1.0).is_err());
    }
}
