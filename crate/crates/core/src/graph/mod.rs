//! Graph data model: weighted (di)graphs, terminal specifications and
//! edge configurations.

mod io;
mod reduce;
mod transform;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Prob;

pub use io::{canonical, parse_graph, serialize_graph, GraphFile};
pub use reduce::{degree3_reduce, gadget_size_bound, half_edge_gadget, Gadget};
pub use transform::{delete_edge, glue, glue_with_survivor, pendant_inflate, remove_vertices, with_probability};

pub type VertexId = String;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub p: Prob,
}

impl Edge {
    pub fn new(u: impl Into<String>, v: impl Into<String>, p: Prob) -> Self {
        Edge { u: u.into(), v: v.into(), p }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// Whether the edge joins `x` and `y` (in that direction when `directed`).
    pub fn joins(&self, x: &str, y: &str, directed: bool) -> bool {
        (self.u == x && self.v == y) || (!directed && self.u == y && self.v == x)
    }
}

/// Finite multigraph with an open probability on every edge. A graph is wholly
/// directed or wholly undirected.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedGraph {
    pub directed: bool,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(directed: bool) -> Self {
        WeightedGraph { directed, ..Default::default() }
    }

    pub fn undirected<V: AsRef<str>>(vertices: &[V], edges: Vec<Edge>) -> Self {
        WeightedGraph {
            directed: false,
            vertices: vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            edges,
        }
    }

    pub fn directed<V: AsRef<str>>(vertices: &[V], edges: Vec<Edge>) -> Self {
        WeightedGraph { directed: true, ..Self::undirected(vertices, edges) }
    }

    /// Adds a vertex unless it is already present.
    pub fn add_vertex(&mut self, id: impl Into<String>) -> &mut Self {
        let id = id.into();
        if !self.has_vertex(&id) {
            self.vertices.push(id);
        }
        self
    }

    pub fn add_edge(&mut self, u: impl Into<String>, v: impl Into<String>, p: Prob) -> usize {
        self.edges.push(Edge::new(u, v, p));
        self.edges.len() - 1
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertices.iter().any(|v| v == id)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self) -> HashMap<&str, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect()
    }

    pub fn require_vertex(&self, id: &str) -> Result<()> {
        if self.has_vertex(id) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(id.to_string()))
        }
    }

    pub fn require_edge(&self, e: usize) -> Result<&Edge> {
        self.edges.get(e).ok_or(Error::EdgeIndex { index: e, len: self.edges.len() })
    }

    /// Degree counting each edge endpoint; a self-loop counts twice.
    pub fn degree(&self, id: &str) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.u == id) + usize::from(e.v == id))
            .sum()
    }

    /// Neighbours through edges of positive probability, ignoring direction.
    pub fn neighbours(&self, id: &str) -> BTreeSet<VertexId> {
        self.edges
            .iter()
            .filter(|e| !e.p.is_zero() && !e.is_loop())
            .filter_map(|e| {
                if e.u == id {
                    Some(e.v.clone())
                } else if e.v == id {
                    Some(e.u.clone())
                } else {
                    None
                }
            })
            .collect()
    }

    /// Indices of edges whose probability is strictly between 0 and 1.
    pub fn random_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].p.is_proper()).collect()
    }

    /// A vertex id derived from `base` that is not yet in use.
    pub fn fresh_vertex(&self, base: &str) -> VertexId {
        let taken: HashSet<&str> = self.vertices.iter().map(String::as_str).collect();
        (0..)
            .map(|i| format!("{base}#{i}"))
            .find(|c| !taken.contains(c.as_str()))
            .expect("unbounded counter")
    }

    pub fn all_exact(&self) -> bool {
        self.edges.iter().all(|e| e.p.is_exact())
    }
}

/// Named terminals: the origin `zero`, the target `b` and the set `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSpec {
    pub zero: VertexId,
    pub b: VertexId,
    #[serde(rename = "A")]
    pub a: Vec<VertexId>,
}

impl TerminalSpec {
    pub fn new(zero: impl Into<String>, b: impl Into<String>, a: &[&str]) -> Self {
        TerminalSpec {
            zero: zero.into(),
            b: b.into(),
            a: a.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Renames `from` to `to` everywhere; used after vertex identification.
    pub fn renamed(&self, from: &str, to: &str) -> TerminalSpec {
        let f = |v: &String| if v == from { to.to_string() } else { v.clone() };
        let mut a: Vec<VertexId> = Vec::new();
        for v in self.a.iter().map(f) {
            if !a.contains(&v) {
                a.push(v);
            }
        }
        TerminalSpec { zero: f(&self.zero), b: f(&self.b), a }
    }
}

/// One outcome of the percolation measure: bit `e` set iff edge `e` is open.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    pub fn closed(len: usize) -> Self {
        Configuration { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_open(&self, e: usize) -> bool {
        self.words[e >> 6] >> (e & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, e: usize, open: bool) {
        let bit = 1u64 << (e & 63);
        if open {
            self.words[e >> 6] |= bit;
        } else {
            self.words[e >> 6] &= !bit;
        }
    }

    pub fn open_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&e| self.is_open(e))
    }
}

/// Reports every violated invariant of `g` and `t`; empty iff well-formed.
pub fn validate(g: &WeightedGraph, t: &TerminalSpec) -> Vec<String> {
    let mut out = validate_graph(g);
    let known: HashSet<&str> = g.vertices.iter().map(String::as_str).collect();
    if !known.contains(t.zero.as_str()) {
        out.push(format!("terminal zero: unknown vertex `{}`", t.zero));
    }
    if !known.contains(t.b.as_str()) {
        out.push(format!("terminal b: unknown vertex `{}`", t.b));
    }
    if t.a.is_empty() {
        out.push("A empty".to_string());
    }
    let mut seen = HashSet::new();
    for a in &t.a {
        if !known.contains(a.as_str()) {
            out.push(format!("A: unknown vertex `{a}`"));
        }
        if !seen.insert(a.as_str()) {
            out.push(format!("A: duplicate vertex `{a}`"));
        }
    }
    out
}

/// Graph-only part of [`validate`].
pub fn validate_graph(g: &WeightedGraph) -> Vec<String> {
    let mut out = Vec::new();
    let mut known = HashSet::new();
    for v in &g.vertices {
        if !known.insert(v.as_str()) {
            out.push(format!("vertex `{v}`: duplicate id"));
        }
    }
    for (i, e) in g.edges.iter().enumerate() {
        if !e.p.in_unit_interval() {
            out.push(format!("edge {i}: probability out of range"));
        }
        for end in [&e.u, &e.v] {
            if !known.contains(end.as_str()) {
                out.push(format!("edge {i}: unknown endpoint `{end}`"));
            }
        }
    }
    out
}

pub fn ensure_valid(g: &WeightedGraph, t: &TerminalSpec) -> Result<()> {
    let v = validate(g, t);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidGraph(v))
    }
}
