//! Random instances, per-edge coordinate ascent of margins and campaigns.

mod ascent;
mod campaign;

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use ascent::{ascend, check_target, Ascent, GRID};
pub use campaign::{campaign, campaign_to_path, frontier_input, CampaignParams, CampaignSummary, SearchRecord, RECORD_VERSION};

use crate::error::{Error, Result};
use crate::graph::{Edge, TerminalSpec, VertexId, WeightedGraph};
use crate::num::Num;

/// Distribution of the edge probabilities of generated graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbLaw {
    /// Every edge at `1/2`.
    Half,
    /// Uniform over `{1/2^k, ..., (2^k - 1)/2^k}`.
    Dyadic(u32),
    /// Uniform over `{1/k, ..., (k - 1)/k}`.
    UniformGrid(u32),
}

impl ProbLaw {
    pub fn sample<R: Rng>(self, rng: &mut R) -> Num {
        match self {
            ProbLaw::Half => Num::ratio(1, 2),
            ProbLaw::Dyadic(k) => {
                let d = 1i64 << k;
                Num::ratio(rng.gen_range(1..d), d)
            }
            ProbLaw::UniformGrid(k) => {
                let k = i64::from(k);
                Num::ratio(rng.gen_range(1..k), k)
            }
        }
    }
}

impl fmt::Display for ProbLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbLaw::Half => f.write_str("half"),
            ProbLaw::Dyadic(k) => write!(f, "dyadic-{k}"),
            ProbLaw::UniformGrid(k) => write!(f, "uniform-grid-{k}"),
        }
    }
}

impl FromStr for ProbLaw {
    type Err = Error;
    /// `half`, `dyadic-K` (`1 <= K <= 16`) or `uniform-grid[-K]` (`K >= 2`,
    /// default 10).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown probability law `{s}`"));
        if s == "half" {
            return Ok(ProbLaw::Half);
        }
        if s == "uniform-grid" {
            return Ok(ProbLaw::UniformGrid(10));
        }
        if let Some(k) = s.strip_prefix("dyadic-") {
            let k: u32 = k.parse().map_err(|_| bad())?;
            return if (1..=16).contains(&k) { Ok(ProbLaw::Dyadic(k)) } else { Err(bad()) };
        }
        if let Some(k) = s.strip_prefix("uniform-grid-") {
            let k: u32 = k.parse().map_err(|_| bad())?;
            return if k >= 2 { Ok(ProbLaw::UniformGrid(k)) } else { Err(bad()) };
        }
        Err(bad())
    }
}

/// Settings of [`random_instance_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub directed: bool,
    pub law: ProbLaw,
    /// Fixed `|A|`; uniform when `None`.
    pub a_size: Option<usize>,
}

fn names(n: usize) -> Vec<VertexId> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Uniform simple graph on vertices `"0"..` with `m` edges, terminals drawn
/// as described on [`random_instance_with`].
pub fn random_instance(n: usize, m: usize, seed: u64, directed: bool, law: ProbLaw) -> Result<(WeightedGraph, TerminalSpec)> {
    random_instance_with(&GeneratorParams { n, m, directed, law, a_size: None }, seed)
}

/// `zero` and `b` are distinct and uniform. `A` is a uniform nonempty subset
/// of the other vertices, joined by `b` with probability 1/2. With a fixed
/// `|A|`, `b` joins with probability 1/2 when enough other vertices remain.
pub fn random_instance_with(p: &GeneratorParams, seed: u64) -> Result<(WeightedGraph, TerminalSpec)> {
    let n = p.n;
    if n < 2 {
        return Err(Error::Precondition("instances need at least two vertices".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| if p.directed { u != v } else { u < v })
        .collect();
    if p.m > pairs.len() {
        return Err(Error::Precondition(format!("{} edges exceed the {} available vertex pairs", p.m, pairs.len())));
    }
    if let Some(k) = p.a_size {
        if k == 0 || k > n - 1 {
            return Err(Error::Precondition(format!("|A| = {k} is impossible with {n} vertices")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = names(n);
    let mut chosen = index::sample(&mut rng, pairs.len(), p.m).into_vec();
    chosen.sort_unstable();
    let edges = chosen
        .into_iter()
        .map(|i| {
            let (x, y) = pairs[i];
            Edge::new(v[x].clone(), v[y].clone(), p.law.sample(&mut rng))
        })
        .collect();
    let g = WeightedGraph { directed: p.directed, vertices: v.clone(), edges };

    let ends = index::sample(&mut rng, n, 2);
    let (zero, b) = (ends.index(0), ends.index(1));
    let rest: Vec<usize> = (0..n).filter(|&i| i != zero && i != b).collect();
    let mut a: Vec<usize> = match p.a_size {
        Some(k) => {
            let with_b = k > rest.len() || rng.gen_bool(0.5);
            let mut a: Vec<usize> = rest.choose_multiple(&mut rng, k - usize::from(with_b)).copied().collect();
            if with_b {
                a.push(b);
            }
            a
        }
        None => {
            let mut a: Vec<usize> = Vec::new();
            if !rest.is_empty() {
                while a.is_empty() {
                    a = rest.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                }
            }
            if a.is_empty() || rng.gen_bool(0.5) {
                a.push(b);
            }
            a
        }
    };
    a.sort_unstable();
    let t = TerminalSpec { zero: v[zero].clone(), b: v[b].clone(), a: a.into_iter().map(|i| v[i].clone()).collect() };
    Ok((g, t))
}

/// Builds a graph from vertex names and random edges kept with probability
/// `density`.
struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    law: ProbLaw,
    g: WeightedGraph,
}

impl Builder<'_> {
    fn edge(&mut self, u: &str, v: &str) {
        let p = self.law.sample(self.rng);
        self.g.add_edge(u, v, p);
    }

    fn maybe(&mut self, u: &str, v: &str, density: f64) {
        if self.rng.gen_bool(density) {
            self.edge(u, v);
        }
    }

    /// Random edges inside `set`.
    fn clique(&mut self, set: &[String], density: f64) {
        for (i, u) in set.iter().enumerate() {
            for v in &set[i + 1..] {
                self.maybe(u, v, density);
            }
        }
    }
}

fn builder<'r>(rng: &'r mut ChaCha8Rng, law: ProbLaw, vertices: &[String]) -> Builder<'r> {
    Builder { rng, law, g: WeightedGraph::undirected(vertices, Vec::new()) }
}

/// `|A| = 3` and every path from `0` to `b` meets `A`: one side holds `0`
/// and up to two extra vertices, the other `b` and up to two extra vertices,
/// and the sides share only `A`.
pub fn separating_instance(seed: u64, law: ProbLaw) -> (WeightedGraph, TerminalSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left: Vec<String> = ["0"].iter().map(|s| s.to_string()).chain((0..rng.gen_range(0..=2)).map(|i| format!("x{i}"))).collect();
    let right: Vec<String> = ["b"].iter().map(|s| s.to_string()).chain((0..rng.gen_range(0..=2)).map(|i| format!("y{i}"))).collect();
    let a: Vec<String> = ["a1", "a2", "a3"].iter().map(|s| s.to_string()).collect();
    let vertices: Vec<String> = left.iter().chain(&a).chain(&right).cloned().collect();
    let mut bd = builder(&mut rng, law, &vertices);
    let l: Vec<String> = left.iter().chain(&a).cloned().collect();
    let r: Vec<String> = a.iter().chain(&right).cloned().collect();
    bd.clique(&l, 0.6);
    // A-A edges were already offered on the left
    for u in &right {
        for v in &r {
            if u != v && (a.contains(v) || u < v) {
                bd.maybe(u, v, 0.6);
            }
        }
    }
    (bd.g, TerminalSpec::new("0", "b", &["a1", "a2", "a3"]))
}

/// `0` is adjacent only to `A` (`|A|` in `2..=4`); the remaining graph on
/// `A`, `b` and up to two extra vertices is random.
pub fn diamond_instance(seed: u64, law: ProbLaw) -> (WeightedGraph, TerminalSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=4);
    let extra = rng.gen_range(0..=2);
    let a: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let body: Vec<String> = a.iter().cloned().chain(["b".to_string()]).chain((0..extra).map(|i| format!("y{i}"))).collect();
    let vertices: Vec<String> = ["0".to_string()].into_iter().chain(body.iter().cloned()).collect();
    let mut bd = builder(&mut rng, law, &vertices);
    for x in &a {
        bd.maybe("0", x, 0.8);
    }
    bd.clique(&body, 0.5);
    let refs: Vec<&str> = a.iter().map(String::as_str).collect();
    (bd.g, TerminalSpec::new("0", "b", &refs))
}

/// `0` is adjacent to `A` and to `x`, while `x` is adjacent only to `A` and
/// `0`; the rest is random as in [`diamond_instance`].
pub fn antenna_instance(seed: u64, law: ProbLaw) -> (WeightedGraph, TerminalSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=3);
    let extra = rng.gen_range(0..=1);
    let a: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let body: Vec<String> = a.iter().cloned().chain(["b".to_string()]).chain((0..extra).map(|i| format!("y{i}"))).collect();
    let vertices: Vec<String> = ["0".to_string(), "x".to_string()].into_iter().chain(body.iter().cloned()).collect();
    let mut bd = builder(&mut rng, law, &vertices);
    bd.edge("0", "x");
    for v in &a {
        bd.maybe("0", v, 0.7);
        bd.maybe("x", v, 0.7);
    }
    bd.clique(&body, 0.5);
    let refs: Vec<&str> = a.iter().map(String::as_str).collect();
    (bd.g, TerminalSpec::new("0", "b", &refs))
}
