//! Amplify-and-forward over a layered network, reduced to the equivalent
//! point-to-point channel.
//!
//! Received powers are the coherent sums `P_{R,j} = (Σ_i h_ij √P_i)²` over the
//! in-neighbours of `j`. The tightest `δ` with `min_j P_{R,j} ≥ 1/δ` fixes the
//! relay gains `β_j = √P_j / √((1+δ)·P_{R,j})`. Each relay's own unit-variance
//! noise then reaches the destination through a linear transfer, which
//! [`exact_propagated_noise`] computes by a forward pass per noise source.

use crate::codec::{mmse_alpha, AlphaMode};
use crate::error::{Error, Result};

use super::rates::{mac_cutset, rate_laf};
use super::RelayNetwork;

/// Coherent received signal powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedPowers {
    /// `P_{R,j}` indexed by node; zero for the source.
    pub per_node: Vec<f64>,
    /// `P_d`.
    pub destination: f64,
}

impl ReceivedPowers {
    /// Smallest relay received power, `None` without relays.
    pub fn min_relay(&self, net: &RelayNetwork) -> Option<f64> {
        net.relays().map(|j| self.per_node[j]).reduce(f64::min)
    }
}

/// `(Σ_i h_ij √P_i)²` for every node of any DAG.
pub(crate) fn nominal_received_powers(net: &RelayNetwork) -> ReceivedPowers {
    let per_node: Vec<f64> = (0..net.num_nodes())
        .map(|j| {
            let amp: f64 = net
                .incoming(j)
                .map(|e| e.gain * net.power(e.from).sqrt())
                .sum();
            amp * amp
        })
        .collect();
    let destination = per_node[net.destination()];
    ReceivedPowers {
        per_node,
        destination,
    }
}

/// Received powers at the relays and the destination of a layered network.
pub fn received_powers(net: &RelayNetwork) -> Result<ReceivedPowers> {
    net.layers()?;
    Ok(nominal_received_powers(net))
}

/// Tightest `δ` with `min_j P_{R,j} ≥ 1/δ`; zero when there are no relays.
pub fn network_delta(net: &RelayNetwork, powers: &ReceivedPowers) -> f64 {
    powers.min_relay(net).map_or(0.0, |p| 1.0 / p)
}

/// Relay amplification gains for a given `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AfGains {
    pub delta: f64,
    /// `β_j` indexed by node; 1 for the source, which sends `x_s` itself, and 0
    /// for the destination.
    pub beta: Vec<f64>,
}

/// `β_j = √P_j / √((1+δ)·P_{R,j})` for every relay.
pub fn amplification_gains(
    net: &RelayNetwork,
    powers: &ReceivedPowers,
    delta: f64,
) -> Result<AfGains> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InputDomain(format!(
            "delta must be non-negative, got {delta}"
        )));
    }
    let mut beta = vec![0.0; net.num_nodes()];
    beta[net.source()] = 1.0;
    for j in net.relays() {
        beta[j] = (net.power(j) / ((1.0 + delta) * powers.per_node[j])).sqrt();
    }
    Ok(AfGains { delta, beta })
}

/// Noiseless end-to-end amplitude gain of a layered network.
pub fn end_to_end_gain(net: &RelayNetwork, gains: &AfGains) -> Result<f64> {
    net.layers()?;
    let mut amp = vec![0.0; net.num_nodes()];
    amp[net.source()] = 1.0;
    for &v in net.topological_order() {
        if v == net.source() {
            continue;
        }
        amp[v] = net
            .incoming(v)
            .map(|e| e.gain * gains.beta[e.from] * amp[e.from])
            .sum();
    }
    Ok(amp[net.destination()])
}

/// Noise power at one node that originated in one earlier layer, next to its
/// high-SNR bound `δ·P_{R,i}/(1+δ)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerNoiseTerm {
    pub node: usize,
    pub node_layer: usize,
    pub source_layer: usize,
    pub exact: f64,
    pub bound: f64,
}

/// Propagated noise at the destination, exact and bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePropagation {
    /// `P_{z,d}` from the exact linear transfer.
    pub total: f64,
    /// `per_layer[l]`: contribution of the relays in layer `l` (index 0 is the
    /// source layer and always zero).
    pub per_layer: Vec<f64>,
    /// Squared transfer gain from each relay's noise to the destination,
    /// indexed by node.
    pub transfer_sq: Vec<f64>,
    /// `δ·P_d·Σ_{k=1}^{L−1} (1+δ)^{−k}`.
    pub series_bound: f64,
    /// `L·δ·P_d`.
    pub linear_bound: f64,
    /// Per-node, per-source-layer exact values and bounds.
    pub layer_terms: Vec<LayerNoiseTerm>,
}

/// Exact propagated noise by a forward pass from each relay's noise injection.
pub fn exact_propagated_noise(
    net: &RelayNetwork,
    powers: &ReceivedPowers,
    gains: &AfGains,
) -> Result<NoisePropagation> {
    let layer_of = net.layer_of()?;
    let num_layers = net.num_layers()?;
    let n = net.num_nodes();
    let delta = gains.delta;
    // from_layer[v][l]: noise power at v injected by the relays of layer l.
    let mut from_layer = vec![vec![0.0; num_layers + 1]; n];
    let mut transfer_sq = vec![0.0; n];
    let topo = net.topological_order();
    let mut amp = vec![0.0; n];
    for (pos, &j) in topo.iter().enumerate() {
        if j == net.source() || j == net.destination() {
            continue;
        }
        amp.iter_mut().for_each(|a| *a = 0.0);
        amp[j] = 1.0;
        for &v in &topo[pos + 1..] {
            amp[v] = net
                .incoming(v)
                .map(|e| e.gain * gains.beta[e.from] * amp[e.from])
                .sum();
            from_layer[v][layer_of[j]] += amp[v] * amp[v];
        }
        transfer_sq[j] = amp[net.destination()].powi(2);
    }

    let d = net.destination();
    let p_d = powers.destination;
    let mut layer_terms = Vec::new();
    for &v in topo {
        let m = layer_of[v];
        let p_r = if v == d { p_d } else { powers.per_node[v] };
        for (l, &exact) in from_layer[v].iter().enumerate().take(m).skip(1) {
            let k = (m - l) as i32;
            layer_terms.push(LayerNoiseTerm {
                node: v,
                node_layer: m,
                source_layer: l,
                exact,
                bound: delta * p_r / (1.0 + delta).powi(k),
            });
        }
    }
    let per_layer = from_layer[d].clone();
    let series_bound = delta
        * p_d
        * (1..num_layers)
            .map(|k| (1.0 + delta).powi(-(k as i32)))
            .sum::<f64>();
    Ok(NoisePropagation {
        total: per_layer.iter().sum(),
        per_layer,
        transfer_sq,
        series_bound,
        linear_bound: num_layers as f64 * delta * p_d,
        layer_terms,
    })
}

/// The destination's view of a layered network as `y = ĥ_d·x_s + ẑ_d + z_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel {
    /// `ĥ_d = √P_d / √(P_s·(1+δ)^{L−1})`.
    pub gain: f64,
    /// Exact `P_{z,d}`.
    pub propagated_noise: f64,
    /// Variance of the destination's own noise `z_d`.
    pub destination_noise_variance: f64,
    /// `P_d`.
    pub received_power: f64,
    pub delta: f64,
    pub num_layers: usize,
    pub source_power: f64,
    /// `P_d / ((1+δ)^{L−1}·(1 + L·δ·P_d))`.
    pub snr_lower_bound: f64,
}

impl EquivalentChannel {
    /// `(1+δ)^{L−1}`.
    pub fn attenuation(&self) -> f64 {
        (1.0 + self.delta).powi(self.num_layers as i32 - 1)
    }

    /// `ĥ_d²·P_s / (1 + P_{z,d})`.
    pub fn snr(&self) -> f64 {
        self.gain * self.gain * self.source_power
            / (self.destination_noise_variance + self.propagated_noise)
    }

    /// SNR fed to the MMSE scaling factor. The propagated-noise-only form is
    /// infinite when no noise propagates.
    pub fn gamma(&self, mode: AlphaMode) -> f64 {
        match mode {
            AlphaMode::Paper => {
                if self.propagated_noise > 0.0 {
                    self.received_power / (self.attenuation() * self.propagated_noise)
                } else {
                    f64::INFINITY
                }
            }
            AlphaMode::FullMmse => self.snr(),
        }
    }

    pub fn alpha(&self, mode: AlphaMode) -> f64 {
        mmse_alpha(self.gamma(mode)).unwrap_or(0.0)
    }

    /// Divides the received block by `ĥ_d`.
    pub fn normalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|v| v / self.gain).collect()
    }

    /// `½·log2(1 + P_d)`.
    pub fn mac_cutset(&self) -> f64 {
        mac_cutset(self.received_power)
    }

    /// Achievable rate lower bound for this `(P_d, δ, L)`.
    pub fn rate_laf(&self) -> f64 {
        rate_laf(self.received_power, self.delta, self.num_layers)
    }
}

/// Equivalent channel at the tightest `δ`.
pub fn equivalent_channel(net: &RelayNetwork) -> Result<EquivalentChannel> {
    let powers = received_powers(net)?;
    let delta = network_delta(net, &powers);
    build_equivalent(net, &powers, delta)
}

/// Equivalent channel at a caller-chosen `δ`, which must satisfy
/// `min_j P_{R,j} ≥ 1/δ`.
pub fn equivalent_channel_with_delta(net: &RelayNetwork, delta: f64) -> Result<EquivalentChannel> {
    let powers = received_powers(net)?;
    let tight = network_delta(net, &powers);
    if !(delta.is_finite() && delta >= tight * (1.0 - 1e-12)) {
        return Err(Error::InputDomain(format!(
            "delta {delta} is below the tightest value {tight} allowed by the relay powers"
        )));
    }
    build_equivalent(net, &powers, delta)
}

fn build_equivalent(
    net: &RelayNetwork,
    powers: &ReceivedPowers,
    delta: f64,
) -> Result<EquivalentChannel> {
    let gains = amplification_gains(net, powers, delta)?;
    let noise = exact_propagated_noise(net, powers, &gains)?;
    let num_layers = net.num_layers()?;
    let p_d = powers.destination;
    let p_s = net.source_power();
    let att = (1.0 + delta).powi(num_layers as i32 - 1);
    Ok(EquivalentChannel {
        gain: (p_d / (p_s * att)).sqrt(),
        propagated_noise: noise.total,
        destination_noise_variance: 1.0,
        received_power: p_d,
        delta,
        num_layers,
        source_power: p_s,
        snr_lower_bound: p_d / (att * (1.0 + num_layers as f64 * delta * p_d)),
    })
}
