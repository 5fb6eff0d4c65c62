//! Exact probabilities and expectations under the product (percolation)
//! measure.
//!
//! Enumeration runs over the edges with `0 < p < 1` only; edges with `p = 0`
//! or `p = 1` are fixed and cost nothing. The number of such random edges is
//! capped by [`Engine::max_edges`].

mod compiled;
mod dc;
mod enumerate;

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

pub(crate) use compiled::{CEvent, Compiled, Snapshot};

use crate::error::{Error, Result};
use crate::event::{EventExpr, NumExpr};
use crate::graph::{with_probability, TerminalSpec, VertexId, WeightedGraph};
use crate::num::{Mode, Num, Prob};

/// Default cap on the number of random edges enumerated exactly.
pub const DEFAULT_MAX_EDGES: usize = 26;
/// Largest cap accepted; the half tables would not fit in memory beyond it.
pub const HARD_MAX_EDGES: usize = 44;
pub const DEFAULT_MEMO_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct Engine {
    pub max_edges: usize,
    pub mode: Mode,
    /// Entry limit for the deletion–contraction memo.
    pub memo_budget: usize,
}

impl Default for Engine {
    /// Exact mode; the edge cap comes from `PERC_MAX_EDGES` when set.
    fn default() -> Self {
        let max_edges = std::env::var("PERC_MAX_EDGES")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_EDGES);
        Engine { max_edges: max_edges.min(HARD_MAX_EDGES), mode: Mode::Exact, memo_budget: DEFAULT_MEMO_BUDGET }
    }
}

/// `q ↦ c0 + c1·q`, the probability of an event as a function of one edge's
/// probability `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgePolynomial {
    pub edge: usize,
    pub c0: Num,
    pub c1: Num,
}

impl EdgePolynomial {
    pub fn eval(&self, q: &Num) -> Num {
        &self.c0 + &self.c1 * q
    }

    /// Value with the edge open.
    pub fn at_one(&self) -> Num {
        &self.c0 + &self.c1
    }
}

/// `m_S` for every `S ⊆ A`: the probability that `b` is connected to exactly
/// the elements `A(S)` of `A`. Index bit `i` refers to `a[i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternTable {
    pub a: Vec<VertexId>,
    pub m: Vec<Prob>,
}

impl PatternTable {
    pub fn get(&self, subset: &[&str]) -> Option<&Prob> {
        subset_mask(&self.a, subset).map(|k| &self.m[k])
    }
}

/// `φ(X) = P(0 ↔ A(X) | A(X) ↮ A(Xᶜ))` for every nonempty `X ⊆ A`, indexed
/// like [`PatternTable`]. `None` where the condition has probability zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiTable {
    pub a: Vec<VertexId>,
    pub phi: Vec<Option<Prob>>,
    /// `P(A(X) ↮ A(Xᶜ))`, the conditioning probability.
    pub separated: Vec<Prob>,
}

impl PhiTable {
    pub fn get(&self, subset: &[&str]) -> Option<&Prob> {
        subset_mask(&self.a, subset).and_then(|k| self.phi[k].as_ref())
    }
}

fn subset_mask(a: &[VertexId], subset: &[&str]) -> Option<usize> {
    let mut k = 0;
    for s in subset {
        k |= 1 << a.iter().position(|x| x == s)?;
    }
    Some(k)
}

impl Engine {
    pub fn exact() -> Self {
        Engine { mode: Mode::Exact, ..Default::default() }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_edges(mut self, max_edges: usize) -> Self {
        self.max_edges = max_edges.min(HARD_MAX_EDGES);
        self
    }

    pub fn with_memo_budget(mut self, budget: usize) -> Self {
        self.memo_budget = budget;
        self
    }

    pub(crate) fn compile(&self, g: &WeightedGraph) -> Result<Compiled> {
        let c = Compiled::new(g)?;
        if c.random.len() > self.max_edges {
            return Err(Error::EdgeLimit { edges: c.random.len(), limit: self.max_edges });
        }
        Ok(c)
    }

    /// Whether `g` is small enough to enumerate.
    pub fn fits(&self, g: &WeightedGraph) -> bool {
        g.random_edges().len() <= self.max_edges
    }

    /// Probabilities of several events in one pass over the configurations.
    pub fn probabilities(&self, g: &WeightedGraph, events: &[EventExpr]) -> Result<Vec<Prob>> {
        let c = self.compile(g)?;
        let evs: Vec<CEvent> = events.iter().map(|e| c.compile(e)).collect::<Result<_>>()?;
        Ok(enumerate::accumulate(&c, self.mode, evs.len(), 1, |snap, out| {
            for (i, ev) in evs.iter().enumerate() {
                if snap.eval(ev) {
                    out.push((i, 1));
                }
            }
        }))
    }

    pub fn event_probability(&self, g: &WeightedGraph, ev: &EventExpr) -> Result<Prob> {
        Ok(self.probabilities(g, std::slice::from_ref(ev))?.remove(0))
    }

    pub fn expectations(&self, g: &WeightedGraph, fs: &[NumExpr]) -> Result<Vec<Num>> {
        let c = self.compile(g)?;
        let compiled: Vec<(Option<u32>, Vec<CEvent>)> = fs
            .iter()
            .map(|f| {
                let v = f.cluster_size.as_deref().map(|v| c.vertex(v)).transpose()?;
                let evs = f.indicators.iter().map(|e| c.compile(e)).collect::<Result<_>>()?;
                Ok((v, evs))
            })
            .collect::<Result<_>>()?;
        Ok(enumerate::accumulate(&c, self.mode, fs.len(), c.n as u64, |snap, out| {
            for (i, (v, evs)) in compiled.iter().enumerate() {
                if evs.iter().all(|e| snap.eval(e)) {
                    let k = v.map_or(1, |v| snap.cluster_size(v) as u64);
                    out.push((i, k));
                }
            }
        }))
    }

    pub fn expectation(&self, g: &WeightedGraph, f: &NumExpr) -> Result<Num> {
        Ok(self.expectations(g, std::slice::from_ref(f))?.remove(0))
    }

    pub fn conditional_probability(&self, g: &WeightedGraph, ev: &EventExpr, given: &EventExpr) -> Result<Prob> {
        let joint = ev.clone().and(given.clone());
        let ps = self.probabilities(g, &[joint, given.clone()])?;
        ps[0].checked_div(&ps[1]).ok_or(Error::ZeroProbabilityCondition)
    }

    pub fn pattern_table(&self, g: &WeightedGraph, t: &TerminalSpec) -> Result<PatternTable> {
        let (c, b, a) = self.undirected_terminals(g, t, "pattern table")?;
        let m = enumerate::accumulate(&c, self.mode, 1 << a.len(), 1, |snap, out| {
            let mut s = 0;
            for (i, &x) in a.iter().enumerate() {
                if snap.connected(b, x) {
                    s |= 1 << i;
                }
            }
            out.push((s, 1));
        });
        Ok(PatternTable { a: t.a.clone(), m })
    }

    pub fn phi_table(&self, g: &WeightedGraph, t: &TerminalSpec) -> Result<PhiTable> {
        let (c, zero, a) = {
            let (c, _, a) = self.undirected_terminals(g, t, "phi table")?;
            let z = c.vertex(&t.zero)?;
            (c, z, a)
        };
        let k = a.len();
        let full = (1usize << k) - 1;
        // slot 2X: separated; slot 2X+1: separated and 0 ↔ A(X)
        let sums = enumerate::accumulate(&c, self.mode, 2 << k, 1, |snap, out| {
            let mut classes: Vec<usize> = Vec::new();
            let mut zero_hits = 0usize;
            let mut done = 0usize;
            for i in 0..k {
                if done >> i & 1 == 1 {
                    continue;
                }
                let mut class = 0;
                for j in i..k {
                    if done >> j & 1 == 0 && snap.connected(a[i], a[j]) {
                        class |= 1 << j;
                    }
                }
                done |= class;
                if snap.connected(zero, a[i]) {
                    zero_hits |= class;
                }
                classes.push(class);
            }
            for pick in 1usize..(1 << classes.len()) {
                let x: usize = (0..classes.len()).filter(|i| pick >> i & 1 == 1).map(|i| classes[i]).sum();
                out.push((2 * x, 1));
                if x & zero_hits != 0 {
                    out.push((2 * x + 1, 1));
                }
            }
        });
        let mut phi = vec![None; full + 1];
        let mut separated = vec![Num::zero().in_mode(self.mode); full + 1];
        for x in 1..=full {
            separated[x] = sums[2 * x].clone();
            phi[x] = sums[2 * x + 1].checked_div(&sums[2 * x]);
        }
        Ok(PhiTable { a: t.a.clone(), phi, separated })
    }

    fn undirected_terminals(&self, g: &WeightedGraph, t: &TerminalSpec, what: &'static str) -> Result<(Compiled, u32, Vec<u32>)> {
        if g.directed {
            return Err(Error::DirectedInput(what));
        }
        if t.a.is_empty() {
            return Err(Error::InvalidGraph(vec!["A empty".into()]));
        }
        if t.a.len() > 16 {
            return Err(Error::Precondition(format!("|A| = {} is too large for subset tables", t.a.len())));
        }
        let c = self.compile(g)?;
        let b = c.vertex(&t.b)?;
        let a = t.a.iter().map(|x| c.vertex(x)).collect::<Result<_>>()?;
        Ok((c, b, a))
    }

    /// Probability that an open edge on `pair` changes the truth of `inner`.
    pub fn pivotal_probability(&self, g: &WeightedGraph, pair: (&str, &str), inner: &EventExpr) -> Result<Prob> {
        self.event_probability(g, &EventExpr::pivotal(pair.0, pair.1, inner.clone()))
    }

    pub fn edge_polynomials(&self, g: &WeightedGraph, e: usize, events: &[EventExpr]) -> Result<Vec<EdgePolynomial>> {
        g.require_edge(e)?;
        let closed = self.probabilities(&with_probability(g, e, Num::zero())?, events)?;
        let open = self.probabilities(&with_probability(g, e, Num::one())?, events)?;
        Ok(closed
            .into_iter()
            .zip(open)
            .map(|(c0, c_one)| {
                let c1 = &c_one - &c0;
                EdgePolynomial { edge: e, c0, c1 }
            })
            .collect())
    }

    pub fn edge_polynomial(&self, g: &WeightedGraph, e: usize, ev: &EventExpr) -> Result<EdgePolynomial> {
        Ok(self.edge_polynomials(g, e, std::slice::from_ref(ev))?.remove(0))
    }

    /// Law of the cluster (out-reachable set when directed) of `v`, keyed by
    /// the sorted vertex ids of the cluster.
    pub fn cluster_distribution(&self, g: &WeightedGraph, v: &str) -> Result<BTreeMap<Vec<VertexId>, Prob>> {
        let c = self.compile(g)?;
        let x = c.vertex(v)?;
        let keyed = enumerate::accumulate_keyed(&c, self.mode, |snap, out| {
            out.push((snap.cluster(x), 1));
        });
        Ok(keyed
            .into_iter()
            .map(|(k, p)| (k.into_iter().map(|i| g.vertices[i as usize].clone()).collect(), p))
            .collect())
    }

    /// `P(S ↔ T)` by deletion–contraction; not bound by the edge cap.
    pub fn connection_probability_dc(&self, g: &WeightedGraph, s: &[&str], t: &[&str]) -> Result<Prob> {
        if g.directed {
            return Err(Error::DirectedInput("deletion-contraction"));
        }
        let problems = crate::graph::validate_graph(g);
        if !problems.is_empty() {
            return Err(Error::InvalidGraph(problems));
        }
        let index = g.vertex_index();
        let mut flags = vec![0u8; g.num_vertices()];
        for (set, bit) in [(s, 1u8), (t, 2u8)] {
            for v in set {
                let i = *index.get(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
                flags[i] |= bit;
            }
        }
        let edges = g
            .edges
            .iter()
            .map(|e| (index[e.u.as_str()] as u32, index[e.v.as_str()] as u32, e.p.to_rational()))
            .collect();
        let value: BigRational = dc::Solver::new(self.memo_budget).solve(dc::Net { flags, edges })?;
        let exact = self.mode == Mode::Exact && g.all_exact();
        Ok(if exact { Num::Exact(value) } else { Num::Exact(value).to_float() })
    }
}
