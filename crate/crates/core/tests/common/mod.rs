//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use latticeaf::network::{AfGains, RelayNetwork};
use latticeaf::Lattice;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest point by exhaustive search over integer coefficients within
/// `radius` of the rounded real coefficients.
pub fn brute_force_nearest(lat: &Lattice, x: &[f64], radius: i64) -> (Vec<f64>, f64) {
    let n = lat.dim();
    let centre: Vec<i64> = lat
        .real_coefficients(x)
        .iter()
        .map(|c| c.round() as i64)
        .collect();
    let width = (2 * radius + 1) as usize;
    let mut best = (Vec::new(), f64::INFINITY);
    let mut k = vec![0i64; n];
    for idx in 0..width.pow(n as u32) {
        let mut r = idx;
        for i in 0..n {
            k[i] = centre[i] + (r % width) as i64 - radius;
            r /= width;
        }
        let p = lat.point(&k);
        let d = dist_sq(&p, x);
        if d < best.1 {
            best = (p, d);
        }
    }
    best
}

pub fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b)
}

/// Taps and per-relay noise polynomials by summing gain products over every
/// source–destination path (respectively relay–destination path).
pub fn enumerate_taps(net: &RelayNetwork, gains: &AfGains) -> (Vec<f64>, Vec<(usize, Vec<f64>)>) {
    let d = net.destination();
    let mut taps = Vec::new();
    for path in net.paths() {
        let delay = path.len() - 2;
        let mut amp = 1.0;
        for w in path.windows(2) {
            amp *= net.gain(w[0], w[1]).unwrap();
            if w[1] != d {
                amp *= gains.beta[w[1]];
            }
        }
        if taps.len() <= delay {
            taps.resize(delay + 1, 0.0);
        }
        taps[delay] += amp;
    }
    let noise = net
        .relays()
        .map(|j| {
            let mut poly = Vec::new();
            relay_paths(net, gains, j, 1.0, 1, &mut poly);
            (j, poly)
        })
        .collect();
    (taps, noise)
}

fn relay_paths(
    net: &RelayNetwork,
    gains: &AfGains,
    v: usize,
    amp: f64,
    delay: usize,
    poly: &mut Vec<f64>,
) {
    let amp = amp * gains.beta[v];
    for e in net.outgoing(v) {
        let a = amp * e.gain;
        if e.to == net.destination() {
            if poly.len() <= delay {
                poly.resize(delay + 1, 0.0);
            }
            poly[delay] += a;
        } else {
            relay_paths(net, gains, e.to, a, delay + 1, poly);
        }
    }
}

/// Pads with zeros and compares entrywise.
pub fn polys_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
    })
}

pub fn workspace_file(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}
