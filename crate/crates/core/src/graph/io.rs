//! JSON graph files.
//!
//! ```json
//! {"directed": false,
//!  "vertices": ["0", "b"],
//!  "edges": [{"u": "0", "v": "b", "p": "1/2"}],
//!  "terminals": {"zero": "0", "b": "b", "A": ["b"]}}
//! ```
//!
//! Probabilities are `"num/den"` strings (exact) or decimal literals (float).
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use super::{Edge, TerminalSpec, WeightedGraph};
use crate::error::{Error, Result};
use crate::num::Prob;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub directed: bool,
    pub vertices: Vec<String>,
    pub edges: Vec<FileEdge>,
    pub terminals: TerminalSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEdge {
    pub u: String,
    pub v: String,
    pub p: Prob,
}

impl GraphFile {
    pub fn from_parts(g: &WeightedGraph, t: &TerminalSpec) -> Self {
        GraphFile {
            directed: g.directed,
            vertices: g.vertices.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| FileEdge { u: e.u.clone(), v: e.v.clone(), p: e.p.clone() })
                .collect(),
            terminals: t.clone(),
        }
    }

    pub fn into_parts(self) -> (WeightedGraph, TerminalSpec) {
        let g = WeightedGraph {
            directed: self.directed,
            vertices: self.vertices,
            edges: self.edges.into_iter().map(|e| Edge { u: e.u, v: e.v, p: e.p }).collect(),
        };
        (g, self.terminals)
    }
}

pub fn parse_graph(text: &[u8]) -> Result<(WeightedGraph, TerminalSpec)> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Parse(format!("graph file is not UTF-8: {e}")))?;
    let file: GraphFile = serde_json::from_str(text)?;
    Ok(file.into_parts())
}

/// Serializes the canonical form of `(g, t)`.
pub fn serialize_graph(g: &WeightedGraph, t: &TerminalSpec) -> String {
    let (g, t) = canonical(g, t);
    serde_json::to_string_pretty(&GraphFile::from_parts(&g, &t)).expect("graph file serializes")
}

/// Sorted vertices, sorted edges (undirected endpoints ordered `u <= v`),
/// sorted `A`.
pub fn canonical(g: &WeightedGraph, t: &TerminalSpec) -> (WeightedGraph, TerminalSpec) {
    let mut vertices = g.vertices.clone();
    vertices.sort();
    let mut edges: Vec<Edge> = g
        .edges
        .iter()
        .map(|e| {
            if !g.directed && e.v < e.u {
                Edge { u: e.v.clone(), v: e.u.clone(), p: e.p.clone() }
            } else {
                e.clone()
            }
        })
        .collect();
    edges.sort_by(|x, y| (&x.u, &x.v).cmp(&(&y.u, &y.v)).then_with(|| x.p.cmp_num(&y.p)));
    let mut a = t.a.clone();
    a.sort();
    (
        WeightedGraph { directed: g.directed, vertices, edges },
        TerminalSpec { zero: t.zero.clone(), b: t.b.clone(), a },
    )
}
