use std::collections::HashSet;

use super::{Edge, VertexId, WeightedGraph};
use crate::error::{Error, Result};
use crate::num::{Num, Prob};

/// Identifies the two vertices of `pair` into one. The lexicographically
/// smaller id survives; edges are re-attached and the resulting self-loops are
/// kept so that edge indices do not move.
pub fn glue(g: &WeightedGraph, pair: (&str, &str)) -> Result<WeightedGraph> {
    glue_with_survivor(g, pair).map(|(h, _)| h)
}

/// Like [`glue`], also returning the id that survived.
pub fn glue_with_survivor(g: &WeightedGraph, pair: (&str, &str)) -> Result<(WeightedGraph, VertexId)> {
    let (x, y) = pair;
    g.require_vertex(x)?;
    g.require_vertex(y)?;
    if x == y {
        return Ok((g.clone(), x.to_string()));
    }
    let (keep, drop) = if x <= y { (x, y) } else { (y, x) };
    let rename = |v: &str| if v == drop { keep.to_string() } else { v.to_string() };
    let out = WeightedGraph {
        directed: g.directed,
        vertices: g.vertices.iter().filter(|v| *v != drop).cloned().collect(),
        edges: g
            .edges
            .iter()
            .map(|e| Edge { u: rename(&e.u), v: rename(&e.v), p: e.p.clone() })
            .collect(),
    };
    Ok((out, keep.to_string()))
}

pub fn delete_edge(g: &WeightedGraph, e: usize) -> Result<WeightedGraph> {
    g.require_edge(e)?;
    let mut out = g.clone();
    out.edges.remove(e);
    Ok(out)
}

/// `G \ W`: drops the vertices in `removed` and every edge touching them.
pub fn remove_vertices(g: &WeightedGraph, removed: &[&str]) -> Result<WeightedGraph> {
    for v in removed {
        g.require_vertex(v)?;
    }
    let gone: HashSet<&str> = removed.iter().copied().collect();
    Ok(WeightedGraph {
        directed: g.directed,
        vertices: g.vertices.iter().filter(|v| !gone.contains(v.as_str())).cloned().collect(),
        edges: g
            .edges
            .iter()
            .filter(|e| !gone.contains(e.u.as_str()) && !gone.contains(e.v.as_str()))
            .cloned()
            .collect(),
    })
}

/// Copy of `g` with the open probability of edge `e` replaced by `p`.
pub fn with_probability(g: &WeightedGraph, e: usize, p: Prob) -> Result<WeightedGraph> {
    g.require_edge(e)?;
    let mut out = g.clone();
    out.edges[e].p = p;
    Ok(out)
}

/// Attaches `k` new vertices to `b`, each by a single probability-1 edge.
pub fn pendant_inflate(g: &WeightedGraph, b: &str, k: usize) -> Result<WeightedGraph> {
    if g.directed {
        return Err(Error::DirectedInput("pendant inflation"));
    }
    g.require_vertex(b)?;
    let mut out = g.clone();
    for _ in 0..k {
        let v = out.fresh_vertex(&format!("{b}.pendant"));
        out.add_vertex(v.clone());
        out.add_edge(b, v, Num::one());
    }
    Ok(out)
}
