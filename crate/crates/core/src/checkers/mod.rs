//! Evaluation of the correlation inequalities on concrete instances.
//!
//! Every check returns a [`CheckReport`] holding `lhs`, `rhs` and
//! `margin = lhs - rhs`; a negative margin is a violation.

mod coefficients;
mod frontier;
mod gluing;
mod lemmas;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use coefficients::{gram_psd_check, solve_coefficients, CoefficientSolution, PsdDiagnostic};
pub use frontier::{epsdel_frontier, frontier_tsv, FrontierInput, FrontierRow};
pub use gluing::{check_gluing_step, concavity_probe, influence_bound_check, ConcavityReport, GluingReports};
pub use lemmas::{lemma_suite, LemmaSuite};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::event::{EventExpr, NumExpr};
use crate::graph::{ensure_valid, remove_vertices, TerminalSpec, VertexId, WeightedGraph};
use crate::num::Num;

/// Identifier of a checked inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjectureId {
    Postfkg,
    Prefkg,
    Prefkga,
    Mcp,
    GoodQuadruple,
    GluingStep,
    /// Conclusion of the gluing step for every `a` meeting the premise at `v`.
    GluingNaive,
    InfluenceBound,
    LemmaClusterI,
    LemmaClusterIi,
    LemmaPhiSuperadditive,
    LemmaCompareI,
    LemmaCompareIi,
    LemmaPivotal,
    LemmaPivotalGlued,
    LemmaSigma,
    EpsdelFrontier,
}

impl ConjectureId {
    pub const ALL: [ConjectureId; 17] = [
        ConjectureId::Postfkg,
        ConjectureId::Prefkg,
        ConjectureId::Prefkga,
        ConjectureId::Mcp,
        ConjectureId::GoodQuadruple,
        ConjectureId::GluingStep,
        ConjectureId::GluingNaive,
        ConjectureId::InfluenceBound,
        ConjectureId::LemmaClusterI,
        ConjectureId::LemmaClusterIi,
        ConjectureId::LemmaPhiSuperadditive,
        ConjectureId::LemmaCompareI,
        ConjectureId::LemmaCompareIi,
        ConjectureId::LemmaPivotal,
        ConjectureId::LemmaPivotalGlued,
        ConjectureId::LemmaSigma,
        ConjectureId::EpsdelFrontier,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConjectureId::Postfkg => "postfkg",
            ConjectureId::Prefkg => "prefkg",
            ConjectureId::Prefkga => "prefkga",
            ConjectureId::Mcp => "mcp",
            ConjectureId::GoodQuadruple => "good-quadruple",
            ConjectureId::GluingStep => "gluing-step",
            ConjectureId::GluingNaive => "gluing-naive",
            ConjectureId::InfluenceBound => "influence-bound",
            ConjectureId::LemmaClusterI => "lemma-cluster-i",
            ConjectureId::LemmaClusterIi => "lemma-cluster-ii",
            ConjectureId::LemmaPhiSuperadditive => "lemma-phi-superadditive",
            ConjectureId::LemmaCompareI => "lemma-compare-i",
            ConjectureId::LemmaCompareIi => "lemma-compare-ii",
            ConjectureId::LemmaPivotal => "lemma-pivotal",
            ConjectureId::LemmaPivotalGlued => "lemma-pivotal-glued",
            ConjectureId::LemmaSigma => "lemma-sigma",
            ConjectureId::EpsdelFrontier => "epsdel-frontier",
        }
    }
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConjectureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ConjectureId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown conjecture id `{s}`")))
    }
}

/// One evaluation of an inequality `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub conjecture: ConjectureId,
    pub lhs: Num,
    pub rhs: Num,
    pub margin: Num,
    pub minimizers: Vec<VertexId>,
    pub exact: bool,
    /// For conditional statements: whether the hypothesis held. A report
    /// with an unmet premise is never a violation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub premise_met: Option<bool>,
    pub auxiliary: BTreeMap<String, Value>,
}

impl CheckReport {
    pub fn new(conjecture: ConjectureId, lhs: Num, rhs: Num, minimizers: Vec<VertexId>) -> Self {
        let margin = &lhs - &rhs;
        let exact = lhs.is_exact() && rhs.is_exact();
        CheckReport { conjecture, lhs, rhs, margin, minimizers, exact, premise_met: None, auxiliary: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.auxiliary.insert(key.to_string(), json!(value));
        self
    }

    pub fn violated(&self) -> bool {
        self.margin.is_negative() && self.premise_met != Some(false)
    }
}

/// The smallest of `values` (one per element of `a`) and every element
/// attaining it.
pub(crate) fn minimum(a: &[VertexId], values: &[Num]) -> (Num, Vec<VertexId>) {
    let min = Num::min_of(values).expect("A is nonempty");
    let who = a.iter().zip(values).filter(|(_, v)| v.cmp_num(&min).is_eq()).map(|(x, _)| x.clone()).collect();
    (min, who)
}

pub(crate) fn per_a(a: &[VertexId], values: &[Num]) -> BTreeMap<String, String> {
    a.iter().zip(values).map(|(x, v)| (x.clone(), v.render())).collect()
}

fn strs(v: &[VertexId]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn directed_label(mut r: CheckReport, directed: bool) -> CheckReport {
    if directed {
        r = r.with("variant", "directed");
    }
    r
}

/// `P(0 ↔ b) >= P(0 ↔ A) · min_a P(a ↔ b)`. Directed graphs use reachability.
pub fn check_postfkg(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CheckReport> {
    ensure_valid(g, t)?;
    let d = g.directed;
    let a = strs(&t.a);
    let mut evs = vec![EventExpr::link(d, &[&t.zero], &[&t.b]), EventExpr::link(d, &[&t.zero], &a)];
    evs.extend(a.iter().map(|x| EventExpr::link(d, &[x], &[&t.b])));
    let ps = engine.probabilities(g, &evs)?;
    let (min, who) = minimum(&t.a, &ps[2..]);
    let rhs = &ps[1] * &min;
    let r = CheckReport::new(ConjectureId::Postfkg, ps[0].clone(), rhs, who)
        .with("p_0b", &ps[0])
        .with("p_0A", &ps[1])
        .with("p_ab", per_a(&t.a, &ps[2..]));
    Ok(directed_label(r, d))
}

pub fn check_prefkg(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CheckReport> {
    pre_fkg(engine, g, t, false, false)
}

/// The strengthened form with `lhs = P(0 ↔ b, 0 ↔ A)`.
pub fn check_prefkga(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CheckReport> {
    pre_fkg(engine, g, t, true, false)
}

/// [`check_prefkga`] plus, for three alternative choices of `a`, whether
/// `P(0 ↔ b, 0 ↔ A) >= P(0 ↔ A, a ↔ b)` holds for every chosen `a`:
/// `min_p_ab` minimizes `P(a ↔ b)`, `min_p_ab_avoiding` minimizes
/// `P(a ↔ b, 0 ↮ A)` and `min_p_ab_without_zero_edges` minimizes `P(a ↔ b)`
/// once every edge at `0` is removed.
pub fn check_prefkga_candidates(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CheckReport> {
    pre_fkg(engine, g, t, true, true)
}

fn pre_fkg(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, strong: bool, candidates: bool) -> Result<CheckReport> {
    ensure_valid(g, t)?;
    let d = g.directed;
    let a = strs(&t.a);
    let zero_a = EventExpr::link(d, &[&t.zero], &a);
    let zero_b = EventExpr::link(d, &[&t.zero], &[&t.b]);
    let mut evs = vec![if strong { zero_b.and(zero_a.clone()) } else { zero_b }];
    evs.extend(a.iter().map(|x| zero_a.clone().and(EventExpr::link(d, &[x], &[&t.b]))));
    if candidates {
        evs.extend(a.iter().map(|x| EventExpr::link(d, &[x], &[&t.b])));
        evs.extend(a.iter().map(|x| EventExpr::link(d, &[x], &[&t.b]).and(zero_a.clone().not())));
    }
    let ps = engine.probabilities(g, &evs)?;
    let k = a.len();
    let joint = &ps[1..1 + k];
    let (min, who) = minimum(&t.a, joint);
    let id = if strong { ConjectureId::Prefkga } else { ConjectureId::Prefkg };
    let mut r = CheckReport::new(id, ps[0].clone(), min, who).with("p_0A_ab", per_a(&t.a, joint));
    if candidates {
        let plain = &ps[1 + k..1 + 2 * k];
        let avoiding = &ps[1 + 2 * k..1 + 3 * k];
        let mut h = g.clone();
        h.edges.retain(|e| !(e.u == t.zero || e.v == t.zero));
        let without: Vec<Num> = engine.probabilities(&h, &a.iter().map(|x| EventExpr::link(d, &[x], &[&t.b])).collect::<Vec<_>>())?;
        for (name, values) in [("min_p_ab", plain), ("min_p_ab_avoiding", avoiding), ("min_p_ab_without_zero_edges", &without[..])] {
            let (_, chosen) = minimum(&t.a, values);
            let holds = chosen.iter().all(|c| {
                let i = t.a.iter().position(|x| x == c).expect("chosen from A");
                !(&ps[0] - &joint[i]).is_negative()
            });
            r = r.with(&format!("candidate_{name}"), json!({"a": chosen, "holds": holds}));
        }
    }
    Ok(directed_label(r, d))
}

/// Monotone cluster property `f` in `E(f(0) 1{0 ↔ A}) >= min_a E(f(a) 1{0 ↔ A})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McpFamily {
    /// `f(v) = |C(v)|`.
    ClusterSize,
    /// `f(v) = 1{|C(v)| >= k}`.
    Threshold(usize),
    /// `f(v) = 1{v ↔ b}`.
    IndicatorOfB,
}

impl McpFamily {
    fn at(self, v: &str, b: &str) -> NumExpr {
        match self {
            McpFamily::ClusterSize => NumExpr::cluster_size(v),
            McpFamily::Threshold(k) => NumExpr::indicator(EventExpr::ClusterAtLeast(v.to_string(), k)),
            McpFamily::IndicatorOfB => NumExpr::indicator(EventExpr::conn(&[v], &[b])),
        }
    }
}

pub fn check_mcp(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, f: McpFamily) -> Result<CheckReport> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("monotone cluster property check"));
    }
    let zero_a = EventExpr::conn(&[&t.zero], &strs(&t.a));
    let mut fs = vec![f.at(&t.zero, &t.b).times(zero_a.clone())];
    fs.extend(t.a.iter().map(|x| f.at(x, &t.b).times(zero_a.clone())));
    let es = engine.expectations(g, &fs)?;
    let (min, who) = minimum(&t.a, &es[1..]);
    Ok(CheckReport::new(ConjectureId::Mcp, es[0].clone(), min, who)
        .with("family", f)
        .with("per_a", per_a(&t.a, &es[1..])))
}

/// `P(0 ↔ b) >= min_a P(a ↔ b) - Σ_{W ∩ A = ∅} P(C(0) = W) · min_a P_{G∖W}(a ↔ b)`
/// for `0` and `b` outside `A` and in different components of `G ∖ A`.
pub fn check_good_quadruple(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CheckReport> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("good-quadruple check"));
    }
    separated_by_a(g, t)?;
    let a = strs(&t.a);
    let mut evs = vec![EventExpr::conn(&[&t.zero], &[&t.b])];
    evs.extend(a.iter().map(|x| EventExpr::conn(&[x], &[&t.b])));
    let ps = engine.probabilities(g, &evs)?;
    let (min, who) = minimum(&t.a, &ps[1..]);
    let clusters = engine.cluster_distribution(g, &t.zero)?;
    let mut correction = Num::zero().in_mode(engine.mode);
    let mut terms = 0usize;
    for (w, p) in clusters {
        if w.iter().any(|v| t.a.contains(v)) || p.is_zero() {
            continue;
        }
        let rest = remove_vertices(g, &strs(&w))?;
        let qs = engine.probabilities(&rest, &a.iter().map(|x| EventExpr::conn(&[x], &[&t.b])).collect::<Vec<_>>())?;
        let m = Num::min_of(&qs).expect("A is nonempty");
        correction = correction + &p * &m;
        terms += 1;
    }
    let rhs = &min - &correction;
    Ok(CheckReport::new(ConjectureId::GoodQuadruple, ps[0].clone(), rhs, who)
        .with("min_p_ab", &min)
        .with("correction", &correction)
        .with("clusters_avoiding_A", terms))
}

/// Errors unless `0, b ∉ A` and no path of positive-probability edges joins
/// them in `G ∖ A`.
fn separated_by_a(g: &WeightedGraph, t: &TerminalSpec) -> Result<()> {
    if t.a.contains(&t.zero) || t.a.contains(&t.b) {
        return Err(Error::Precondition("0 and b must lie outside A".into()));
    }
    let rest = remove_vertices(g, &strs(&t.a))?;
    let mut seen = vec![t.zero.clone()];
    let mut stack = vec![t.zero.clone()];
    while let Some(x) = stack.pop() {
        for y in rest.neighbours(&x) {
            if !seen.contains(&y) {
                seen.push(y.clone());
                stack.push(y);
            }
        }
    }
    if seen.contains(&t.b) {
        return Err(Error::Precondition("0 and b are connected in G \\ A".into()));
    }
    Ok(())
}

/// Edges incident to `v` other than self-loops.
pub(crate) fn edges_at(g: &WeightedGraph, v: &str) -> Vec<usize> {
    (0..g.edges.len()).filter(|&i| !g.edges[i].is_loop() && (g.edges[i].u == v || g.edges[i].v == v)).collect()
}
