use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Fidelity, Probability};

pub type NodeId = u32;

/// Distribution an edge parameter is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeDistribution {
    /// Uniform on `[min, 1]`.
    Uniform { min: f64 },
    /// Every edge gets the same value.
    Fixed { value: f64 },
}

impl EdgeDistribution {
    pub fn uniform(min: f64) -> Self {
        EdgeDistribution::Uniform { min }
    }

    pub fn fixed(value: f64) -> Self {
        EdgeDistribution::Fixed { value }
    }

    fn validate(&self, what: &'static str, lowest: f64) -> Result<()> {
        let (value, ok) = match *self {
            EdgeDistribution::Uniform { min } => (min, min >= lowest && min < 1.0 && min > 0.0),
            EdgeDistribution::Fixed { value } => (value, value >= lowest && value <= 1.0 && value > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what,
                value,
                min: lowest,
                max: 1.0,
            })
        }
    }

    /// Edge fidelities must stay at or above the entanglement threshold.
    pub fn validate_fidelity(&self) -> Result<()> {
        self.validate("edge fidelity distribution", 0.5)
    }

    pub fn validate_probability(&self) -> Result<()> {
        self.validate("edge probability distribution", 0.0)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            EdgeDistribution::Uniform { min } => 0.5 * (min + 1.0),
            EdgeDistribution::Fixed { value } => value,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            EdgeDistribution::Uniform { min } => rng.gen_range(min..=1.0),
            EdgeDistribution::Fixed { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeParams {
    pub fidelity: Fidelity,
    pub probability: Probability,
}

impl EdgeParams {
    pub const PERFECT: EdgeParams = EdgeParams {
        fidelity: Fidelity::ONE,
        probability: Probability::ONE,
    };
}

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub params: EdgeParams,
}

/// Simple undirected graph whose edges carry entanglement parameters.
///
/// Immutable after construction. Adjacency is stored in CSR form with
/// neighbours in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumNetwork {
    node_count: u32,
    seed: u64,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    // (neighbour, edge index)
    adjacency: Vec<(NodeId, u32)>,
}

impl QuantumNetwork {
    /// Builds a network from explicit edges. Endpoints may be given in
    /// either order; self-loops and duplicates are rejected.
    pub fn new(node_count: u32, edges: impl IntoIterator<Item = Edge>, seed: u64) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|mut e| {
                if e.u > e.v {
                    std::mem::swap(&mut e.u, &mut e.v);
                }
                e
            })
            .collect();
        for e in &edges {
            for node in [e.u, e.v] {
                if node >= node_count {
                    return Err(Error::UnknownNode { node, node_count });
                }
            }
            if e.u == e.v {
                return Err(Error::InvalidParameter(format!("self-loop at node {}", e.u)));
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = edges.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", w[0].u, w[0].v)));
        }
        if edges.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many edges".into()));
        }

        let mut degree = vec![0usize; node_count as usize];
        for e in &edges {
            degree[e.u as usize] += 1;
            degree[e.v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count as usize + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count as usize].to_vec();
        let mut adjacency = vec![(0, 0); 2 * edges.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[fill[e.u as usize]] = (e.v, i as u32);
            fill[e.u as usize] += 1;
            adjacency[fill[e.v as usize]] = (e.u, i as u32);
            fill[e.v as usize] += 1;
        }
        for n in 0..node_count as usize {
            adjacency[offsets[n]..offsets[n + 1]].sort_unstable();
        }

        Ok(Self {
            node_count,
            seed,
            edges,
            offsets,
            adjacency,
        })
    }

    /// Network with perfect edges, mostly useful for topology-only work.
    pub fn from_pairs(node_count: u32, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::new(
            node_count,
            pairs.iter().map(|&(u, v)| Edge {
                u,
                v,
                params: EdgeParams::PERFECT,
            }),
            0,
        )
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.node_count {
            Ok(())
        } else {
            Err(Error::UnknownNode {
                node,
                node_count: self.node_count,
            })
        }
    }

    /// `(neighbour, edge index)` pairs of `node`, ascending by neighbour.
    pub fn neighbours(&self, node: NodeId) -> &[(NodeId, u32)] {
        let n = node as usize;
        &self.adjacency[self.offsets[n]..self.offsets[n + 1]]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.neighbours(node).len()
    }

    pub fn edge_index(&self, a: NodeId, b: NodeId) -> Option<usize> {
        if a >= self.node_count || b >= self.node_count {
            return None;
        }
        let adj = self.neighbours(a);
        adj.binary_search_by_key(&b, |&(n, _)| n).ok().map(|i| adj[i].1 as usize)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / f64::from(self.node_count)
        }
    }
}

/// Maps a linear index over the pairs `u < v` (row-major in `u`) back to
/// the pair.
pub(crate) fn decode_pair(k: u64, n: u64) -> (NodeId, NodeId) {
    // pairs with first node < u: u * (2n - u - 1) / 2
    let start = |u: u64| u * (2 * n - u - 1) / 2;
    let nf = n as f64;
    let guess = ((2.0 * nf - 1.0) - ((2.0 * nf - 1.0).powi(2) - 8.0 * k as f64).max(0.0).sqrt()) / 2.0;
    let mut u = (guess.floor().max(0.0) as u64).min(n.saturating_sub(2));
    while u > 0 && start(u) > k {
        u -= 1;
    }
    while u + 1 < n && start(u + 1) <= k {
        u += 1;
    }
    let v = u + 1 + (k - start(u));
    (u as NodeId, v as NodeId)
}

/// Uniform simple graph with exactly `num_edges` edges (the G(n, m) model),
/// with edge parameters drawn independently per edge. Deterministic in
/// `seed`.
pub fn generate_random_network(
    num_nodes: u32,
    num_edges: u64,
    seed: u64,
    fidelity_dist: EdgeDistribution,
    probability_dist: EdgeDistribution,
) -> Result<QuantumNetwork> {
    fidelity_dist.validate_fidelity()?;
    probability_dist.validate_probability()?;
    let n = u64::from(num_nodes);
    let max = n * n.saturating_sub(1) / 2;
    if num_edges > max {
        return Err(Error::InfeasibleEdgeCount {
            nodes: num_nodes,
            edges: num_edges,
            max,
        });
    }
    let total = usize::try_from(max).map_err(|_| Error::InvalidParameter("graph too large".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(NodeId, NodeId)> = index::sample(&mut rng, total, num_edges as usize)
        .into_iter()
        .map(|k| decode_pair(k as u64, n))
        .collect();
    pairs.sort_unstable();
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(u, v)| {
            let f = fidelity_dist.sample(&mut rng);
            let p = probability_dist.sample(&mut rng);
            Edge {
                u,
                v,
                params: EdgeParams {
                    fidelity: Fidelity::new(f).expect("validated distribution"),
                    probability: Probability::new(p).expect("validated distribution"),
                },
            }
        })
        .collect();
    QuantumNetwork::new(num_nodes, edges, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_decoding_is_a_bijection() {
        for n in [2u64, 3, 7, 50] {
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    assert_eq!(decode_pair(k, n), (u as u32, v as u32), "n = {n}, k = {k}");
                    k += 1;
                }
            }
        }
        let n = 10_000u64;
        let last = n * (n - 1) / 2 - 1;
        assert_eq!(decode_pair(last, n), (9998, 9999));
        assert_eq!(decode_pair(n - 1, n), (1, 2));
    }

    #[test]
    fn generation_is_deterministic() {
        let f = EdgeDistribution::uniform(0.9);
        let p = EdgeDistribution::uniform(0.7);
        let a = generate_random_network(200, 500, 7, f, p).unwrap();
        let b = generate_random_network(200, 500, 7, f, p).unwrap();
        let c = generate_random_network(200, 500, 8, f, p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.edges(), c.edges());
        assert_eq!(a.edge_count(), 500);
    }

    #[test]
    fn rejects_infeasible_edge_counts() {
        let d = EdgeDistribution::uniform(0.9);
        assert!(matches!(
            generate_random_network(4, 7, 0, d, d),
            Err(Error::InfeasibleEdgeCount { max: 6, .. })
        ));
        assert_eq!(generate_random_network(4, 6, 0, d, d).unwrap().edge_count(), 6);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(QuantumNetwork::from_pairs(3, &[(0, 0)]).is_err());
        assert!(QuantumNetwork::from_pairs(3, &[(0, 1), (1, 0)]).is_err());
        assert!(QuantumNetwork::from_pairs(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let net = QuantumNetwork::from_pairs(5, &[(3, 1), (0, 4), (1, 0), (2, 1)]).unwrap();
        assert_eq!(net.neighbours(1).iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(net.edge_index(1, 3), net.edge_index(3, 1));
        assert_eq!(net.edge_index(2, 3), None);
        assert_eq!(net.degree(4), 1);
        assert!((net.mean_degree() - 1.6).abs() < 1e-15);
    }

    #[test]
    fn parameters_follow_distributions() {
        let net = generate_random_network(100, 300, 1, EdgeDistribution::uniform(0.9), EdgeDistribution::fixed(0.8))
            .unwrap();
        for e in net.edges() {
            assert!((0.9..=1.0).contains(&e.params.fidelity.value()));
            assert_eq!(e.params.probability.value(), 0.8);
        }
        assert!(EdgeDistribution::uniform(0.4).validate_fidelity().is_err());
        assert!(EdgeDistribution::uniform(0.4).validate_probability().is_ok());
    }
}
