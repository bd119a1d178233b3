//! Random quantum networks, shortest paths and edge-disjoint path sets.

mod graph;
mod io;
mod paths;

pub use graph::{generate_random_network, Edge, EdgeDistribution, EdgeParams, NodeId, QuantumNetwork};
pub use io::{read_edge_list, write_edge_list};
pub use paths::{find_mad_paths, mad_path_complexity_estimate, shortest_graph_path, MadPathSet, NetworkPath};
