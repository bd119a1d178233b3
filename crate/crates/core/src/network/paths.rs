use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::graph::{NodeId, QuantumNetwork};
use crate::error::{Error, Result};
use crate::quantum::{path_probability, swap_chain, Fidelity, Probability};

/// Sequence of adjacent nodes together with the edges joining them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkPath {
    nodes: Vec<NodeId>,
    edges: Vec<usize>,
}

impl NetworkPath {
    /// Validates adjacency of consecutive nodes against `net`.
    pub fn from_nodes(net: &QuantumNetwork, nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter("a path needs at least two nodes".into()));
        }
        let edges = nodes
            .windows(2)
            .map(|w| {
                net.edge_index(w[0], w[1])
                    .ok_or_else(|| Error::InvalidParameter(format!("nodes {} and {} are not adjacent", w[0], w[1])))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes, edges })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Indices into [`QuantumNetwork::edges`].
    pub fn edge_indices(&self) -> &[usize] {
        &self.edges
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("non-empty path")
    }

    /// End-to-end fidelity from the parameters stored on the network.
    pub fn fidelity(&self, net: &QuantumNetwork) -> Result<Fidelity> {
        let links: Vec<Fidelity> = self.edges.iter().map(|&e| net.edge(e).params.fidelity).collect();
        swap_chain(&links)
    }

    pub fn probability(&self, net: &QuantumNetwork) -> Result<Probability> {
        let edges: Vec<Probability> = self.edges.iter().map(|&e| net.edge(e).params.probability).collect();
        path_probability(&edges)
    }

    pub fn shares_edge_with(&self, other: &NetworkPath) -> bool {
        self.edges.iter().any(|e| other.edges.contains(e))
    }
}

/// Pairwise edge-disjoint paths between one node pair; the first is the
/// shortest graph path.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MadPathSet {
    pub paths: Vec<NetworkPath>,
}

impl MadPathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.paths.iter().map(NetworkPath::len).collect()
    }

    pub fn is_edge_disjoint(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.paths.iter().flat_map(|p| p.edges.iter()).all(|e| seen.insert(*e))
    }
}

fn check_pair(net: &QuantumNetwork, s: NodeId, dst: NodeId) -> Result<()> {
    net.check_node(s)?;
    net.check_node(dst)?;
    if s == dst {
        return Err(Error::InvalidParameter(format!("source and destination are both {s}")));
    }
    Ok(())
}

/// Unit-weight Dijkstra over the edges not marked in `removed`.
///
/// Among equal-length routes the predecessor with the smallest id wins.
/// Stops as soon as `dst` is settled; at that point every node one hop
/// closer has already been settled, so its predecessor is final.
fn dijkstra(net: &QuantumNetwork, s: NodeId, dst: NodeId, removed: &[bool]) -> Option<NetworkPath> {
    const UNSEEN: u32 = u32::MAX;
    let n = net.node_count() as usize;
    let mut dist = vec![UNSEEN; n];
    let mut pred: Vec<(NodeId, u32)> = vec![(UNSEEN, UNSEEN); n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s as usize] = 0;
    heap.push(Reverse((0u32, s)));

    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u as usize] {
            continue;
        }
        settled[u as usize] = true;
        if u == dst {
            break;
        }
        for &(v, edge) in net.neighbours(u) {
            if removed[edge as usize] || settled[v as usize] {
                continue;
            }
            let candidate = d + 1;
            let slot = v as usize;
            if candidate < dist[slot] {
                dist[slot] = candidate;
                pred[slot] = (u, edge);
                heap.push(Reverse((candidate, v)));
            } else if candidate == dist[slot] && u < pred[slot].0 {
                pred[slot] = (u, edge);
            }
        }
    }
    if !settled[dst as usize] {
        return None;
    }

    let mut nodes = vec![dst];
    let mut edges = Vec::with_capacity(dist[dst as usize] as usize);
    let mut at = dst;
    while at != s {
        let (p, e) = pred[at as usize];
        nodes.push(p);
        edges.push(e as usize);
        at = p;
    }
    nodes.reverse();
    edges.reverse();
    Some(NetworkPath { nodes, edges })
}

/// Minimum-hop path from `s` to `dst`, or `None` when they are disconnected.
pub fn shortest_graph_path(net: &QuantumNetwork, s: NodeId, dst: NodeId) -> Result<Option<NetworkPath>> {
    check_pair(net, s, dst)?;
    Ok(dijkstra(net, s, dst, &vec![false; net.edge_count()]))
}

/// Up to `k` edge-disjoint paths, found greedily: take the shortest path on
/// the residual graph, delete its edges, repeat.
pub fn find_mad_paths(net: &QuantumNetwork, s: NodeId, dst: NodeId, k: usize) -> Result<MadPathSet> {
    check_pair(net, s, dst)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut removed = vec![false; net.edge_count()];
    let mut set = MadPathSet::default();
    while set.len() < k {
        let Some(path) = dijkstra(net, s, dst, &removed) else {
            break;
        };
        for &e in path.edge_indices() {
            removed[e] = true;
        }
        set.paths.push(path);
    }
    Ok(set)
}

/// `k (|E| + |V| log2 |V|)`, the cost of `k` heap-based Dijkstra runs.
pub fn mad_path_complexity_estimate(net: &QuantumNetwork, k: usize) -> f64 {
    let v = f64::from(net.node_count());
    let per_run = net.edge_count() as f64 + if v > 1.0 { v * v.log2() } else { v };
    k as f64 * per_run
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_nodes() {
        let net = QuantumNetwork::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let p = shortest_graph_path(&net, 1, 2).unwrap().unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.nodes(), &[1, 2]);
    }

    #[test]
    fn disconnected_pair_has_no_path() {
        let net = QuantumNetwork::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(shortest_graph_path(&net, 0, 3).unwrap(), None);
        assert!(find_mad_paths(&net, 0, 3, 2).unwrap().is_empty());
    }

    #[test]
    fn ties_prefer_smaller_predecessor() {
        // 0-3-5 and 0-2-5 and 0-4-5
        let net = QuantumNetwork::from_pairs(6, &[(0, 3), (3, 5), (0, 4), (4, 5), (0, 2), (2, 5)]).unwrap();
        let p = shortest_graph_path(&net, 0, 5).unwrap().unwrap();
        assert_eq!(p.nodes(), &[0, 2, 5]);
        let mad = find_mad_paths(&net, 0, 5, 5).unwrap();
        assert_eq!(mad.lengths(), vec![2, 2, 2]);
        assert_eq!(mad.paths[1].nodes(), &[0, 3, 5]);
    }

    #[test]
    fn rejects_bad_queries() {
        let net = QuantumNetwork::from_pairs(3, &[(0, 1)]).unwrap();
        assert!(shortest_graph_path(&net, 0, 0).is_err());
        assert!(matches!(shortest_graph_path(&net, 0, 9), Err(Error::UnknownNode { node: 9, .. })));
        assert!(find_mad_paths(&net, 0, 1, 0).is_err());
    }

    #[test]
    fn complexity_is_linear_in_k() {
        let net = QuantumNetwork::from_pairs(4, &[(0, 1), (1, 2)]).unwrap();
        let one = mad_path_complexity_estimate(&net, 1);
        assert!((one - (2.0 + 4.0 * 2.0)).abs() < 1e-12);
        assert_eq!(mad_path_complexity_estimate(&net, 2), 2.0 * one);
    }

    #[test]
    fn path_parameters_from_stored_edges() {
        let net = QuantumNetwork::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let p = NetworkPath::from_nodes(&net, vec![0, 1, 2]).unwrap();
        assert_eq!(p.fidelity(&net).unwrap(), Fidelity::ONE);
        assert_eq!(p.probability(&net).unwrap(), Probability::ONE);
        assert!(NetworkPath::from_nodes(&net, vec![0, 2]).is_err());
    }
}
