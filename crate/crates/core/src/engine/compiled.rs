//! Index-based view of a graph and per-configuration event evaluation.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::event::EventExpr;
use crate::graph::{validate_graph, Configuration, WeightedGraph};
use crate::num::Prob;

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn reset_from(&mut self, other: &UnionFind) {
        self.parent.clone_from(&other.parent);
        self.size.clone_from(&other.size);
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.iter_mut().for_each(|s| *s = 1);
    }

    #[inline]
    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    #[inline]
    pub fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }

    pub fn component_size(&mut self, x: u32) -> usize {
        let r = self.find(x);
        self.size[r as usize] as usize
    }
}

/// Event with vertices resolved to indices.
#[derive(Clone, Debug)]
pub(crate) enum CEvent {
    Conn(Vec<u32>, Vec<u32>),
    Reach(Vec<u32>, Vec<u32>),
    ClusterAtLeast(u32, usize),
    EdgeOpen(usize),
    Pivotal { pair: (u32, u32), pair_edges: Vec<usize>, inner: Box<CEvent> },
    Not(Box<CEvent>),
    And(Vec<CEvent>),
    Or(Vec<CEvent>),
}

pub(crate) struct Compiled {
    pub n: usize,
    pub directed: bool,
    pub ends: Vec<(u32, u32)>,
    pub probs: Vec<Prob>,
    /// Edges with `0 < p < 1`, in edge order.
    pub random: Vec<usize>,
    pub fixed_open: Vec<usize>,
    index: HashMap<String, u32>,
    base: UnionFind,
}

impl Compiled {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        let problems = validate_graph(g);
        if !problems.is_empty() {
            return Err(Error::InvalidGraph(problems));
        }
        let index: HashMap<String, u32> =
            g.vertices.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let ends: Vec<(u32, u32)> = g.edges.iter().map(|e| (index[&e.u], index[&e.v])).collect();
        let probs: Vec<Prob> = g.edges.iter().map(|e| e.p.clone()).collect();
        let random: Vec<usize> = (0..probs.len()).filter(|&e| probs[e].is_proper()).collect();
        let fixed_open: Vec<usize> = (0..probs.len()).filter(|&e| probs[e].is_one()).collect();
        let mut base = UnionFind::new(g.vertices.len());
        if !g.directed {
            for &e in &fixed_open {
                base.union(ends[e].0, ends[e].1);
            }
        }
        Ok(Compiled { n: g.vertices.len(), directed: g.directed, ends, probs, random, fixed_open, index, base })
    }

    pub fn vertex(&self, id: &str) -> Result<u32> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    fn vertices(&self, ids: &[String]) -> Result<Vec<u32>> {
        ids.iter().map(|v| self.vertex(v)).collect()
    }

    pub fn compile(&self, ev: &EventExpr) -> Result<CEvent> {
        Ok(match ev {
            EventExpr::Conn(s, t) => {
                if self.directed {
                    return Err(Error::DirectionMismatch("conn atom on a directed graph (use reach)".into()));
                }
                CEvent::Conn(self.vertices(s)?, self.vertices(t)?)
            }
            EventExpr::Reach(s, t) => {
                if !self.directed {
                    return Err(Error::DirectionMismatch("reach atom on an undirected graph (use conn)".into()));
                }
                CEvent::Reach(self.vertices(s)?, self.vertices(t)?)
            }
            EventExpr::ClusterAtLeast(v, k) => CEvent::ClusterAtLeast(self.vertex(v)?, *k),
            EventExpr::EdgeOpen(e) => {
                if *e >= self.ends.len() {
                    return Err(Error::EdgeIndex { index: *e, len: self.ends.len() });
                }
                CEvent::EdgeOpen(*e)
            }
            EventExpr::Pivotal((u, v), inner) => {
                let pair = (self.vertex(u)?, self.vertex(v)?);
                let pair_edges = (0..self.ends.len())
                    .filter(|&e| {
                        let (a, b) = self.ends[e];
                        (a, b) == pair || (!self.directed && (b, a) == pair)
                    })
                    .collect();
                CEvent::Pivotal { pair, pair_edges, inner: Box::new(self.compile(inner)?) }
            }
            EventExpr::Not(x) => CEvent::Not(Box::new(self.compile(x)?)),
            EventExpr::And(xs) => CEvent::And(xs.iter().map(|x| self.compile(x)).collect::<Result<_>>()?),
            EventExpr::Or(xs) => CEvent::Or(xs.iter().map(|x| self.compile(x)).collect::<Result<_>>()?),
        })
    }
}

/// One configuration of a compiled graph, with lazily built connectivity.
pub(crate) struct Snapshot<'a> {
    g: &'a Compiled,
    pub open: Configuration,
    /// Extra always-open edge (the virtual pair edge of a pivotality test).
    extra: Option<(u32, u32)>,
    /// Some fixed-open edge may be closed, so the base union-find is unusable.
    masked: bool,
    uf: UnionFind,
    adj: Vec<Vec<u32>>,
    built: bool,
    seen: Vec<bool>,
    stack: Vec<u32>,
}

impl<'a> Snapshot<'a> {
    pub fn new(g: &'a Compiled) -> Self {
        let mut open = Configuration::closed(g.ends.len());
        for &e in &g.fixed_open {
            open.set(e, true);
        }
        Snapshot {
            g,
            open,
            extra: None,
            masked: false,
            uf: g.base.clone(),
            adj: if g.directed { vec![Vec::new(); g.n] } else { Vec::new() },
            built: false,
            seen: vec![false; g.n],
            stack: Vec::new(),
        }
    }

    /// Loads the configuration whose random edges are given by `mask`
    /// (bit `i` = `g.random[i]`).
    #[inline]
    pub fn load_mask(&mut self, mask: u64) {
        for (i, &e) in self.g.random.iter().enumerate() {
            self.open.set(e, mask >> i & 1 == 1);
        }
        self.built = false;
    }

    /// Loads an arbitrary configuration, e.g. a sampled one.
    pub fn load(&mut self, cfg: &Configuration) {
        self.open.clone_from(cfg);
        self.masked = self.g.fixed_open.iter().any(|&e| !cfg.is_open(e));
        self.built = false;
    }

    fn build(&mut self) {
        if self.built {
            return;
        }
        let g = self.g;
        if g.directed {
            for a in self.adj.iter_mut() {
                a.clear();
            }
            for (e, &(u, v)) in g.ends.iter().enumerate() {
                if self.open.is_open(e) {
                    self.adj[u as usize].push(v);
                }
            }
            if let Some((u, v)) = self.extra {
                self.adj[u as usize].push(v);
            }
        } else {
            if self.masked {
                self.uf.reset();
                for (e, &(u, v)) in g.ends.iter().enumerate() {
                    if self.open.is_open(e) {
                        self.uf.union(u, v);
                    }
                }
            } else {
                self.uf.reset_from(&g.base);
                for &e in &g.random {
                    if self.open.is_open(e) {
                        let (u, v) = g.ends[e];
                        self.uf.union(u, v);
                    }
                }
            }
            if let Some((u, v)) = self.extra {
                self.uf.union(u, v);
            }
        }
        self.built = true;
    }

    /// Marks every vertex reachable from `from` (directed graphs).
    fn flood(&mut self, from: &[u32]) -> usize {
        self.seen.iter_mut().for_each(|s| *s = false);
        self.stack.clear();
        let mut count = 0;
        for &s in from {
            if !self.seen[s as usize] {
                self.seen[s as usize] = true;
                self.stack.push(s);
                count += 1;
            }
        }
        while let Some(x) = self.stack.pop() {
            for i in 0..self.adj[x as usize].len() {
                let y = self.adj[x as usize][i];
                if !self.seen[y as usize] {
                    self.seen[y as usize] = true;
                    self.stack.push(y);
                    count += 1;
                }
            }
        }
        count
    }

    pub fn cluster_size(&mut self, v: u32) -> usize {
        self.build();
        if self.g.directed {
            self.flood(&[v])
        } else {
            self.uf.component_size(v)
        }
    }

    /// Vertices of the cluster of `v`, sorted.
    pub fn cluster(&mut self, v: u32) -> Vec<u32> {
        self.build();
        if self.g.directed {
            self.flood(&[v]);
            (0..self.g.n as u32).filter(|&w| self.seen[w as usize]).collect()
        } else {
            let r = self.uf.find(v);
            (0..self.g.n as u32).filter(|&w| self.uf.find(w) == r).collect()
        }
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.build();
        if self.g.directed {
            self.flood(&[a]);
            self.seen[b as usize]
        } else {
            self.uf.find(a) == self.uf.find(b)
        }
    }

    pub fn eval(&mut self, ev: &CEvent) -> bool {
        match ev {
            CEvent::Conn(s, t) => {
                self.build();
                s.iter().any(|&x| {
                    let rx = self.uf.find(x);
                    t.iter().any(|&y| self.uf.find(y) == rx)
                })
            }
            CEvent::Reach(s, t) => {
                if s.is_empty() || t.is_empty() {
                    return false;
                }
                self.build();
                self.flood(s);
                t.iter().any(|&y| self.seen[y as usize])
            }
            CEvent::ClusterAtLeast(v, k) => self.cluster_size(*v) >= *k,
            CEvent::EdgeOpen(e) => self.open.is_open(*e),
            CEvent::Pivotal { pair, pair_edges, inner } => {
                let mut open = self.open.clone();
                for &e in pair_edges {
                    open.set(e, false);
                }
                let masked = self.masked || pair_edges.iter().any(|e| self.g.fixed_open.contains(e));
                let mut without = Snapshot::new(self.g);
                without.open = open;
                without.masked = masked;
                let before = without.eval(inner);
                let mut with = Snapshot::new(self.g);
                with.open = without.open.clone();
                with.masked = masked;
                with.extra = Some(*pair);
                let after = with.eval(inner);
                before != after
            }
            CEvent::Not(x) => !self.eval(x),
            CEvent::And(xs) => xs.iter().all(|x| self.eval(x)),
            CEvent::Or(xs) => xs.iter().any(|x| self.eval(x)),
        }
    }
}
