//! Symbol-by-symbol simulation of amplify-and-forward over a layered network.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{AfGains, RelayNetwork};
use crate::error::Result;

/// Output of [`simulate_af`].
#[derive(Debug, Clone, PartialEq)]
pub struct AfBlock {
    /// Destination samples `y_d`, one per input symbol.
    pub destination: Vec<f64>,
    /// Mean squared transmit amplitude of each node over the block (zero for
    /// the destination).
    pub transmit_power: Vec<f64>,
}

/// Sends `x_s` through the network: every node receives
/// `y_j = Σ_i h_ij·x_i + z_j` with `z_j ~ N(0, 1)` (omitted when `noise_on` is
/// false) and every relay forwards `β_j·y_j`. Layered networks deliver all
/// copies in the same symbol slot, so no delay is modelled.
pub fn simulate_af<R: Rng + ?Sized>(
    net: &RelayNetwork,
    gains: &AfGains,
    x_s: &[f64],
    rng: &mut R,
    noise_on: bool,
) -> Result<AfBlock> {
    net.layers()?;
    let n = net.num_nodes();
    let mut tx = vec![0.0; n];
    let mut energy = vec![0.0; n];
    let mut destination = Vec::with_capacity(x_s.len());
    for &x in x_s {
        for &v in net.topological_order() {
            if v == net.source() {
                tx[v] = x;
            } else {
                let mut y: f64 = net.incoming(v).map(|e| e.gain * tx[e.from]).sum();
                if noise_on {
                    y += rng.sample::<f64, _>(StandardNormal);
                }
                if v == net.destination() {
                    destination.push(y);
                    tx[v] = 0.0;
                } else {
                    tx[v] = gains.beta[v] * y;
                }
            }
            energy[v] += tx[v] * tx[v];
        }
    }
    let m = x_s.len().max(1) as f64;
    Ok(AfBlock {
        destination,
        transmit_power: energy.into_iter().map(|e| e / m).collect(),
    })
}
