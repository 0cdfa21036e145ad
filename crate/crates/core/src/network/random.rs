//! Reproducible random network generators for property tests and examples.

use rand::Rng;

use super::{NetworkDescription, RelayNetwork};

/// Parameters of [`random_layered`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayeredParams {
    pub min_hops: usize,
    pub max_hops: usize,
    pub max_relays_per_layer: usize,
    pub gain_range: (f64, f64),
    pub power_range: (f64, f64),
    /// Probability of each edge between consecutive layers before repairs.
    pub edge_probability: f64,
}

impl Default for LayeredParams {
    fn default() -> Self {
        Self {
            min_hops: 2,
            max_hops: 4,
            max_relays_per_layer: 3,
            gain_range: (0.5, 2.0),
            power_range: (1.0, 10.0),
            edge_probability: 0.7,
        }
    }
}

fn draw(rng: &mut (impl Rng + ?Sized), range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.random_range(range.0..range.1)
    }
}

/// Random layered network. Every relay keeps at least one edge from the
/// previous layer and one into the next.
pub fn random_layered<R: Rng + ?Sized>(rng: &mut R, params: &LayeredParams) -> RelayNetwork {
    let hops = rng.random_range(params.min_hops..=params.max_hops);
    let mut layers: Vec<Vec<String>> = vec![vec!["s".to_string()]];
    for l in 1..hops {
        let k = rng.random_range(1..=params.max_relays_per_layer);
        layers.push((0..k).map(|i| format!("r{l}_{i}")).collect());
    }
    layers.push(vec!["d".to_string()]);

    let mut desc = NetworkDescription::new("s", "d").node("s", draw(rng, params.power_range));
    for layer in &layers[1..hops] {
        for name in layer {
            desc = desc.node(name, draw(rng, params.power_range));
        }
    }
    for l in 0..hops {
        let (prev, next) = (&layers[l], &layers[l + 1]);
        let mut keep = vec![vec![false; next.len()]; prev.len()];
        for row in keep.iter_mut() {
            for k in row.iter_mut() {
                *k = rng.random_bool(params.edge_probability);
            }
        }
        for row in keep.iter_mut() {
            if !row.iter().any(|&k| k) {
                let j = rng.random_range(0..next.len());
                row[j] = true;
            }
        }
        for j in 0..next.len() {
            if !keep.iter().any(|row| row[j]) {
                let i = rng.random_range(0..prev.len());
                keep[i][j] = true;
            }
        }
        for (i, row) in keep.iter().enumerate() {
            for (j, &k) in row.iter().enumerate() {
                if k {
                    desc = desc.edge(&prev[i], &next[j], draw(rng, params.gain_range));
                }
            }
        }
    }
    desc.build().expect("generated layered network is valid")
}

/// Chain `s → r1 → … → r_{L−1} → d` where every relay receives exactly
/// `1/δ`: all transmit powers equal `power`, inner gains are `1/√(δ·power)`,
/// and the last hop has gain `last_gain`.
pub fn uniform_chain(hops: usize, delta: f64, power: f64, last_gain: f64) -> RelayNetwork {
    assert!(hops >= 1 && delta > 0.0 && power > 0.0 && last_gain > 0.0);
    let inner = (1.0 / (delta * power)).sqrt();
    let names: Vec<String> = std::iter::once("s".to_string())
        .chain((1..hops).map(|i| format!("r{i}")))
        .chain(std::iter::once("d".to_string()))
        .collect();
    let mut desc = NetworkDescription::new("s", "d");
    for name in &names[..hops] {
        desc = desc.node(name, power);
    }
    for i in 0..hops {
        let g = if i + 1 == hops { last_gain } else { inner };
        desc = desc.edge(&names[i], &names[i + 1], g);
    }
    desc.build().expect("chain is valid")
}

/// Parameters of [`random_dag`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DagParams {
    pub min_relays: usize,
    pub max_relays: usize,
    pub edge_probability: f64,
    pub max_paths: u128,
    pub gain_range: (f64, f64),
    pub power_range: (f64, f64),
}

impl Default for DagParams {
    fn default() -> Self {
        Self {
            min_relays: 1,
            max_relays: 6,
            edge_probability: 0.4,
            max_paths: 20,
            gain_range: (0.5, 2.0),
            power_range: (1.0, 10.0),
        }
    }
}

/// Random DAG over `s, r1, …, rk, d` (edges only go forward in that order) with
/// at most `max_paths` source–destination paths.
pub fn random_dag<R: Rng + ?Sized>(rng: &mut R, params: &DagParams) -> RelayNetwork {
    loop {
        let k = rng.random_range(params.min_relays..=params.max_relays);
        let names: Vec<String> = std::iter::once("s".to_string())
            .chain((1..=k).map(|i| format!("r{i}")))
            .chain(std::iter::once("d".to_string()))
            .collect();
        let m = names.len();
        let mut adj = vec![vec![false; m]; m];
        for (i, row) in adj.iter_mut().enumerate() {
            for cell in row.iter_mut().skip(i + 1) {
                *cell = rng.random_bool(params.edge_probability);
            }
        }
        // Every relay reachable from an earlier node and reaching a later one.
        #[allow(clippy::needless_range_loop)]
        for v in 1..m - 1 {
            if !(0..v).any(|u| adj[u][v]) {
                let u = rng.random_range(0..v);
                adj[u][v] = true;
            }
            if !(v + 1..m).any(|w| adj[v][w]) {
                let w = rng.random_range(v + 1..m);
                adj[v][w] = true;
            }
        }
        let mut desc = NetworkDescription::new("s", "d");
        for name in &names[..m - 1] {
            desc = desc.node(name, draw(rng, params.power_range));
        }
        for (u, row) in adj.iter().enumerate() {
            for (v, &e) in row.iter().enumerate() {
                if e {
                    desc = desc.edge(&names[u], &names[v], draw(rng, params.gain_range));
                }
            }
        }
        if let Ok(net) = desc.build() {
            if net.count_paths() <= params.max_paths {
                return net;
            }
        }
    }
}
