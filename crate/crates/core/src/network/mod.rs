//! Gaussian relay networks under amplify-and-forward.
//!
//! A [`RelayNetwork`] is a validated DAG of positive channel gains with a
//! power budget per transmitting node. Construction classifies it as layered
//! (all source–destination paths share one hop count) or non-layered; the
//! layered analytics live in [`af`], the non-layered reduction in
//! [`crate::isi`].

pub mod af;
pub mod random;
mod rates;
mod sim;

pub use af::{
    amplification_gains, end_to_end_gain, equivalent_channel, equivalent_channel_with_delta,
    exact_propagated_noise, network_delta, received_powers, AfGains, EquivalentChannel, LayerNoiseTerm,
    NoisePropagation, ReceivedPowers,
};
pub use rates::{mac_cutset, rate_laf};
pub use sim::{simulate_af, AfBlock};

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialized network description; also the schema of network files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDescription {
    pub nodes: Vec<String>,
    pub source: String,
    pub destination: String,
    pub edges: Vec<EdgeDescription>,
    pub powers: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDescription {
    pub from: String,
    pub to: String,
    pub gain: f64,
}

impl NetworkDescription {
    /// Empty description with the two terminals declared.
    pub fn new(source: &str, destination: &str) -> Self {
        Self {
            nodes: vec![source.to_string(), destination.to_string()],
            source: source.to_string(),
            destination: destination.to_string(),
            edges: Vec::new(),
            powers: BTreeMap::new(),
        }
    }

    /// Declares a node (if new) and sets its power budget.
    pub fn node(mut self, id: &str, power: f64) -> Self {
        if !self.nodes.iter().any(|n| n == id) {
            self.nodes.push(id.to_string());
        }
        self.powers.insert(id.to_string(), power);
        self
    }

    pub fn edge(mut self, from: &str, to: &str, gain: f64) -> Self {
        self.edges.push(EdgeDescription {
            from: from.to_string(),
            to: to.to_string(),
            gain,
        });
        self
    }

    pub fn build(self) -> Result<RelayNetwork> {
        RelayNetwork::new(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub gain: f64,
}

/// Layer structure of a validated network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    /// `layers[l]` holds the nodes `l` hops from the source; the last layer is
    /// the destination alone.
    Layered { layers: Vec<Vec<usize>> },
    /// Source–destination hop counts span `min_hops..=max_hops`.
    NonLayered { min_hops: usize, max_hops: usize },
}

/// A validated relay network.
#[derive(Debug, Clone)]
pub struct RelayNetwork {
    names: Vec<String>,
    source: usize,
    destination: usize,
    edges: Vec<Edge>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    powers: Vec<f64>,
    topo: Vec<usize>,
    structure: Structure,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Network {
        field: field.into(),
        message: message.into(),
        line: None,
    }
}

impl RelayNetwork {
    /// Validates a description. Rejected:
    ///
    /// - undeclared or duplicate ids
    /// - non-positive gains or powers
    /// - edges into the source or out of the destination
    /// - cycles
    /// - nodes on no source–destination path
    pub fn new(desc: NetworkDescription) -> Result<Self> {
        if desc.nodes.is_empty() {
            return Err(invalid("nodes", "no nodes declared"));
        }
        let mut index = HashMap::new();
        for (i, name) in desc.nodes.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(invalid(
                    format!("nodes[{i}]"),
                    format!("duplicate node `{name}`"),
                ));
            }
        }
        let lookup = |field: String, id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| invalid(field, format!("unknown node `{id}`")))
        };
        let source = lookup("source".into(), &desc.source)?;
        let destination = lookup("destination".into(), &desc.destination)?;
        if source == destination {
            return Err(invalid(
                "destination",
                "destination must differ from source",
            ));
        }
        let n = desc.nodes.len();
        let mut edges: Vec<Edge> = Vec::with_capacity(desc.edges.len());
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in desc.edges.iter().enumerate() {
            let from = lookup(format!("edges[{k}].from"), &e.from)?;
            let to = lookup(format!("edges[{k}].to"), &e.to)?;
            if !(e.gain.is_finite() && e.gain > 0.0) {
                return Err(invalid(
                    format!("edges[{k}].gain"),
                    format!(
                        "gain of edge {}->{} must be positive, got {}",
                        e.from, e.to, e.gain
                    ),
                ));
            }
            if from == to {
                return Err(Error::Cyclic {
                    node: e.from.clone(),
                });
            }
            if to == source {
                return Err(invalid(
                    format!("edges[{k}].to"),
                    format!("edge {}->{} enters the source", e.from, e.to),
                ));
            }
            if from == destination {
                return Err(invalid(
                    format!("edges[{k}].from"),
                    format!("edge {}->{} leaves the destination", e.from, e.to),
                ));
            }
            if outgoing[from].iter().any(|&j| edges[j].to == to) {
                return Err(invalid(
                    format!("edges[{k}]"),
                    format!("duplicate edge {}->{}", e.from, e.to),
                ));
            }
            incoming[to].push(edges.len());
            outgoing[from].push(edges.len());
            edges.push(Edge {
                from,
                to,
                gain: e.gain,
            });
        }

        let mut powers = vec![0.0; n];
        for (id, &p) in &desc.powers {
            let i = lookup(format!("powers.{id}"), id)?;
            if !(p.is_finite() && p > 0.0) {
                return Err(invalid(
                    format!("powers.{id}"),
                    format!("power must be positive, got {p}"),
                ));
            }
            powers[i] = p;
        }
        for (i, name) in desc.nodes.iter().enumerate() {
            if i != destination && powers[i] == 0.0 {
                return Err(invalid(format!("powers.{name}"), "missing power budget"));
            }
        }

        let topo =
            topological_order(n, &edges, &outgoing, &incoming).map_err(|i| Error::Cyclic {
                node: desc.nodes[i].clone(),
            })?;

        let from_source = reachable(source, &outgoing, |e| edges[e].to);
        let to_dest = reachable(destination, &incoming, |e| edges[e].from);
        for i in 0..n {
            if !(from_source[i] && to_dest[i]) {
                return Err(invalid(
                    format!("nodes[{i}]"),
                    format!(
                        "node `{}` is not on any source-destination path",
                        desc.nodes[i]
                    ),
                ));
            }
        }

        let structure = classify(&topo, source, destination, &edges, &incoming);
        Ok(Self {
            names: desc.nodes,
            source,
            destination,
            edges,
            incoming,
            outgoing,
            powers,
            topo,
            structure,
        })
    }

    /// Reverse of [`new`](Self::new).
    pub fn description(&self) -> NetworkDescription {
        NetworkDescription {
            nodes: self.names.clone(),
            source: self.names[self.source].clone(),
            destination: self.names[self.destination].clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDescription {
                    from: self.names[e.from].clone(),
                    to: self.names[e.to].clone(),
                    gain: e.gain,
                })
                .collect(),
            powers: self
                .powers
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != self.destination)
                .map(|(i, &p)| (self.names[i].clone(), p))
                .collect(),
        }
    }

    /// Same network with every power budget multiplied by `factor`.
    pub fn with_power_scale(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InputDomain(format!(
                "power scale must be positive, got {factor}"
            )));
        }
        let mut out = self.clone();
        out.powers.iter_mut().for_each(|p| *p *= factor);
        Ok(out)
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    /// Relays in topological order.
    pub fn relays(&self) -> impl Iterator<Item = usize> + '_ {
        self.topo
            .iter()
            .copied()
            .filter(move |&i| i != self.source && i != self.destination)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges entering `node`.
    pub fn incoming(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.incoming[node].iter().map(move |&e| &self.edges[e])
    }

    /// Edges leaving `node`.
    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.outgoing[node].iter().map(move |&e| &self.edges[e])
    }

    /// Power budget `P_i` (zero for the destination).
    pub fn power(&self, node: usize) -> f64 {
        self.powers[node]
    }

    /// Source power `P_s`.
    pub fn source_power(&self) -> f64 {
        self.powers[self.source]
    }

    /// All nodes in topological order, source first.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn is_layered(&self) -> bool {
        matches!(self.structure, Structure::Layered { .. })
    }

    /// Layers `L_0 .. L_L` of a layered network.
    pub fn layers(&self) -> Result<&[Vec<usize>]> {
        match &self.structure {
            Structure::Layered { layers } => Ok(layers),
            Structure::NonLayered { min_hops, max_hops } => Err(Error::NotLayered {
                min_hops: *min_hops,
                max_hops: *max_hops,
            }),
        }
    }

    /// Number of hops `L` from source to destination (layered networks).
    pub fn num_layers(&self) -> Result<usize> {
        Ok(self.layers()?.len() - 1)
    }

    /// Layer index of each node (layered networks).
    pub fn layer_of(&self) -> Result<Vec<usize>> {
        let mut out = vec![0; self.num_nodes()];
        for (l, layer) in self.layers()?.iter().enumerate() {
            for &i in layer {
                out[i] = l;
            }
        }
        Ok(out)
    }

    /// Every source–destination path as a node sequence, in DFS order.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![self.source];
        self.collect_paths(&mut stack, &mut out);
        out
    }

    fn collect_paths(&self, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *stack.last().expect("non-empty path");
        if v == self.destination {
            out.push(stack.clone());
            return;
        }
        for e in self.outgoing(v) {
            stack.push(e.to);
            self.collect_paths(stack, out);
            stack.pop();
        }
    }

    /// Number of source–destination paths, by dynamic programming.
    pub fn count_paths(&self) -> u128 {
        let mut count = vec![0u128; self.num_nodes()];
        count[self.source] = 1;
        for &v in &self.topo {
            let c = count[v];
            for &e in &self.outgoing[v] {
                count[self.edges[e].to] += c;
            }
        }
        count[self.destination]
    }

    /// Gain of the edge `from -> to`, if present.
    pub fn gain(&self, from: usize, to: usize) -> Option<f64> {
        self.outgoing(from).find(|e| e.to == to).map(|e| e.gain)
    }
}

/// Kahn's algorithm, ties by node index; `Err` carries a node on a cycle.
fn topological_order(
    n: usize,
    edges: &[Edge],
    outgoing: &[Vec<usize>],
    incoming: &[Vec<usize>],
) -> std::result::Result<Vec<usize>, usize> {
    let mut indeg: Vec<usize> = incoming.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &e in &outgoing[v] {
            let w = edges[e].to;
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indeg[i] > 0).expect("some node left");
        return Err(stuck);
    }
    Ok(order)
}

fn reachable(start: usize, adj: &[Vec<usize>], next: impl Fn(usize) -> usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &e in &adj[v] {
            let w = next(e);
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Layered iff every node has equal shortest and longest hop distance from the source.
fn classify(
    topo: &[usize],
    source: usize,
    destination: usize,
    edges: &[Edge],
    incoming: &[Vec<usize>],
) -> Structure {
    let n = incoming.len();
    let mut shortest = vec![usize::MAX; n];
    let mut longest = vec![0usize; n];
    shortest[source] = 0;
    for &v in topo {
        if v == source {
            continue;
        }
        for &e in &incoming[v] {
            let u = edges[e].from;
            shortest[v] = shortest[v].min(shortest[u].saturating_add(1));
            longest[v] = longest[v].max(longest[u] + 1);
        }
    }
    if (0..n).all(|i| shortest[i] == longest[i]) {
        let num_layers = longest[destination];
        let mut layers = vec![Vec::new(); num_layers + 1];
        for &v in topo {
            layers[longest[v]].push(v);
        }
        for layer in layers.iter_mut() {
            layer.sort_unstable();
        }
        Structure::Layered { layers }
    } else {
        Structure::NonLayered {
            min_hops: shortest[destination],
            max_hops: longest[destination],
        }
    }
}
