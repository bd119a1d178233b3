//! Plain-text edge lists.
//!
//! ```text
//! nodes=<n> edges=<m> seed=<s>
//! u v f p
//! ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so reading back a
//! written file reproduces every parameter bit for bit.

use std::io::{BufRead, Write};

use super::graph::{Edge, EdgeParams, QuantumNetwork};
use crate::error::{Error, Result};
use crate::quantum::{Fidelity, Probability};

pub fn write_edge_list<W: Write>(net: &QuantumNetwork, mut out: W) -> Result<()> {
    writeln!(out, "nodes={} edges={} seed={}", net.node_count(), net.edge_count(), net.seed())?;
    for e in net.edges() {
        writeln!(out, "{} {} {} {}", e.u, e.v, e.params.fidelity.value(), e.params.probability.value())?;
    }
    out.flush()?;
    Ok(())
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_field<T: std::str::FromStr>(token: Option<&str>, key: &str) -> Result<T> {
    let token = token.ok_or_else(|| parse_error(1, format!("missing `{key}=` in header")))?;
    let value = token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| parse_error(1, format!("expected `{key}=...`, found `{token}`")))?;
    value
        .parse()
        .map_err(|_| parse_error(1, format!("bad value for `{key}`: `{value}`")))
}

fn field<T: std::str::FromStr>(token: Option<&str>, line: usize, name: &str) -> Result<T> {
    let token = token.ok_or_else(|| parse_error(line, format!("missing {name}")))?;
    token
        .parse()
        .map_err(|_| parse_error(line, format!("bad {name} `{token}`")))
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<QuantumNetwork> {
    let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });

    let (_, header) = lines.next().ok_or_else(|| parse_error(1, "empty input"))?;
    let header = header?;
    let mut tokens = header.split_whitespace();
    let nodes: u32 = header_field(tokens.next(), "nodes")?;
    let edge_count: usize = header_field(tokens.next(), "edges")?;
    let seed: u64 = header_field(tokens.next(), "seed")?;

    let mut edges = Vec::with_capacity(edge_count);
    for (number, line) in lines {
        let line = line?;
        let mut t = line.split_whitespace();
        let u = field(t.next(), number, "source node")?;
        let v = field(t.next(), number, "target node")?;
        let f: f64 = field(t.next(), number, "fidelity")?;
        let p: f64 = field(t.next(), number, "probability")?;
        if t.next().is_some() {
            return Err(parse_error(number, "trailing fields"));
        }
        let params = EdgeParams {
            fidelity: Fidelity::new(f).map_err(|e| parse_error(number, e.to_string()))?,
            probability: Probability::new(p).map_err(|e| parse_error(number, e.to_string()))?,
        };
        edges.push(Edge { u, v, params });
    }
    if edges.len() != edge_count {
        return Err(parse_error(
            1,
            format!("header announces {edge_count} edges but {} were listed", edges.len()),
        ));
    }
    QuantumNetwork::new(nodes, edges, seed)
}
