//! Single-edge gluing: the gluing step, its naive strengthening, the
//! concavity of the one-edge restriction and the influence bound.

use serde::Serialize;

use super::{check_postfkg, minimum, per_a, strs, CheckReport, ConjectureId};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::event::EventExpr;
use crate::graph::{ensure_valid, glue_with_survivor, with_probability, TerminalSpec, VertexId, WeightedGraph};
use crate::num::Num;

/// Float tolerance for the influence bound, whose subtrahend is irrational.
pub const INFLUENCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluingReports {
    /// Premise at both endpoints with `a` minimizing `P(a ↔ b)`.
    pub step: CheckReport,
    /// Premise at the first endpoint only, for every `a` satisfying it.
    pub naive: CheckReport,
}

/// Evaluates the gluing step on the pair `(v, w)`, which need not be an edge.
///
/// With several minimizers of `P(a ↔ b)` the conclusion is tested for the
/// one giving the smallest margin.
pub fn check_gluing_step(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, pair: (&str, &str)) -> Result<GluingReports> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("gluing step"));
    }
    let (v, w) = pair;
    g.require_vertex(v)?;
    g.require_vertex(w)?;
    let a = strs(&t.a);
    let k = a.len();

    // before gluing: P(a ↔ b) per a, then P(x ↔ b), P(x ↔ A) for x = v, w
    let mut evs: Vec<EventExpr> = a.iter().map(|x| EventExpr::conn(&[x], &[&t.b])).collect();
    for x in [v, w] {
        evs.push(EventExpr::conn(&[x], &[&t.b]));
        evs.push(EventExpr::conn(&[x], &a));
    }
    let before = engine.probabilities(g, &evs)?;
    let p_ab = &before[..k];
    let (min, minimizers) = minimum(&t.a, p_ab);
    let holds_at = |i: usize, z: &Num| !(&before[k + 2 * i] - &(&before[k + 2 * i + 1] * z)).is_negative();
    let premise_both = holds_at(0, &min) && holds_at(1, &min);
    let qualifying: Vec<usize> = (0..k).filter(|&i| holds_at(0, &p_ab[i])).collect();

    // after gluing
    let (h, keep) = glue_with_survivor(g, pair)?;
    let drop = if keep == v { w } else { v };
    let rename = |x: &str| if x == drop { keep.clone() } else { x.to_string() };
    let b = rename(&t.b);
    let a_after: Vec<String> = a.iter().map(|x| rename(x)).collect();
    let mut evs: Vec<EventExpr> = a_after.iter().map(|x| EventExpr::conn(&[x], &[&b])).collect();
    evs.push(EventExpr::conn(&[&keep], &[&b]));
    evs.push(EventExpr::Conn(vec![keep.clone()], a_after.clone()));
    let after = engine.probabilities(&h, &evs)?;
    let q_ab = &after[..k];
    let (q_vb, q_va) = (&after[k], &after[k + 1]);

    // worst case over a set of candidate indices
    let worst = |idx: &[usize]| -> (Num, Vec<VertexId>) {
        let z = idx.iter().map(|&i| &q_ab[i]).max_by(|x, y| x.cmp_num(y)).cloned().unwrap_or_else(Num::zero);
        let who = idx.iter().filter(|&&i| q_ab[i].cmp_num(&z).is_eq()).map(|&i| t.a[i].clone()).collect();
        (z, who)
    };

    let tied: Vec<usize> = (0..k).filter(|&i| minimizers.contains(&t.a[i])).collect();
    let (z, who) = worst(&tied);
    let mut step = CheckReport::new(ConjectureId::GluingStep, q_vb.clone(), q_va * &z, who)
        .with("pair", [v, w])
        .with("survivor", &keep)
        .with("min_p_ab", &min)
        .with("p_ab", per_a(&t.a, p_ab))
        .with("glued_p_ab", per_a(&t.a, q_ab));
    step.premise_met = Some(premise_both);

    let (z, who) = if qualifying.is_empty() { worst(&(0..k).collect::<Vec<_>>()) } else { worst(&qualifying) };
    let mut naive = CheckReport::new(ConjectureId::GluingNaive, q_vb.clone(), q_va * &z, who)
        .with("pair", [v, w])
        .with("survivor", &keep)
        .with("qualifying", qualifying.iter().map(|&i| t.a[i].clone()).collect::<Vec<_>>())
        .with("p_vb", &before[k])
        .with("p_vA", &before[k + 1])
        .with("p_ab", per_a(&t.a, p_ab))
        .with("glued_p_ab", per_a(&t.a, q_ab));
    naive.premise_met = Some(!qualifying.is_empty());
    Ok(GluingReports { step, naive })
}

/// `f(q) = P(v ↔ b) - P(v ↔ A) · P(a ↔ b)` as a function of the probability
/// `q` of one edge, with `a` minimizing `P(a ↔ b)` at `q = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub edge: usize,
    pub v: VertexId,
    pub a: VertexId,
    /// `f(q) = constant + linear·q + quadratic·q²`.
    pub constant: Num,
    pub linear: Num,
    pub quadratic: Num,
    pub concave: bool,
    pub f0: Num,
    pub f1: Num,
    /// Maximizer of `f` when it lies strictly inside `(0, 1)`.
    pub vertex: Option<Num>,
    /// `f` at `q = 0, 1/10, ..., 1`.
    pub grid: Vec<Num>,
    /// When `f(0), f(1) >= 0`: whether `f >= 0` on the whole grid.
    pub grid_nonnegative: Option<bool>,
}

/// Probes the one-edge restriction of `f` for edge `e`. `v` defaults to the
/// origin `0` of `t`.
pub fn concavity_probe(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, e: usize, v: Option<&str>) -> Result<ConcavityReport> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("concavity probe"));
    }
    g.require_edge(e)?;
    let v = v.unwrap_or(&t.zero);
    g.require_vertex(v)?;
    let a = strs(&t.a);
    let mut evs = vec![EventExpr::conn(&[v], &[&t.b]), EventExpr::conn(&[v], &a)];
    evs.extend(a.iter().map(|x| EventExpr::conn(&[x], &[&t.b])));
    let polys = engine.edge_polynomials(g, e, &evs)?;
    let at_zero: Vec<Num> = polys[2..].iter().map(|p| p.c0.clone()).collect();
    let (_, who) = minimum(&t.a, &at_zero);
    let ai = t.a.iter().position(|x| *x == who[0]).expect("minimizer in A");
    let (x, y, z) = (&polys[0], &polys[1], &polys[2 + ai]);
    let constant = &x.c0 - &(&y.c0 * &z.c0);
    let linear = &(&x.c1 - &(&y.c0 * &z.c1)) - &(&y.c1 * &z.c0);
    let quadratic = -(&y.c1 * &z.c1);
    let f = |q: &Num| &(&constant + &(&linear * q)) + &(&(&quadratic * q) * q);
    let f0 = f(&Num::zero());
    let f1 = f(&Num::one());
    let vertex = if quadratic.is_negative() {
        let q = (-&linear).checked_div(&(&quadratic * &Num::int(2))).expect("nonzero");
        (q.sign() > 0 && q.cmp_num(&Num::one()).is_lt()).then_some(q)
    } else {
        None
    };
    let grid: Vec<Num> = (0..=10).map(|i| f(&Num::ratio(i, 10))).collect();
    let grid_nonnegative =
        (!f0.is_negative() && !f1.is_negative()).then(|| grid.iter().all(|x| !x.is_negative()));
    Ok(ConcavityReport {
        edge: e,
        v: v.to_string(),
        a: who[0].clone(),
        concave: !quadratic.sign().is_positive(),
        constant,
        linear,
        quadratic,
        f0,
        f1,
        vertex,
        grid,
        grid_nonnegative,
    })
}

/// `P(0 ↔ b) >= P(0 ↔ A) min_a P(a ↔ b) - (Σ_{e ∈ E} p_e / (1 - p_e))^{-1/2}`,
/// where `E` holds the edges whose gluing satisfies the post-FKG inequality.
///
/// Membership in `E` is decided exactly; the bound itself is evaluated in
/// floating point and shortfalls within [`INFLUENCE_TOLERANCE`] count as zero.
/// With `E` contributing nothing the bound is vacuous and reported with an
/// unmet premise.
pub fn influence_bound_check(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CheckReport> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("influence bound"));
    }
    let base = check_postfkg(engine, g, t)?;
    let mut members = Vec::new();
    let mut weight = 0.0f64;
    for (i, e) in g.edges.iter().enumerate() {
        if !e.p.is_proper() || e.is_loop() {
            continue;
        }
        let glued = with_probability(g, i, Num::one())?;
        if !check_postfkg(engine, &glued, t)?.margin.is_negative() {
            members.push(i);
            let p = e.p.to_f64();
            weight += p / (1.0 - p);
        }
    }
    let lhs = base.lhs.to_float();
    let vacuous = weight == 0.0;
    let subtrahend = if vacuous { 0.0 } else { weight.powf(-0.5) };
    let rhs = Num::Float(base.rhs.to_f64() - subtrahend);
    let mut r = CheckReport::new(ConjectureId::InfluenceBound, lhs, rhs, base.minimizers.clone());
    let within = r.margin.is_negative() && r.margin.to_f64() >= -INFLUENCE_TOLERANCE;
    if within {
        r.margin = Num::Float(0.0);
    }
    r.exact = false;
    if vacuous {
        r.premise_met = Some(false);
    }
    Ok(r.with("base_margin", &base.margin)
        .with("edges", members)
        .with("weight", weight)
        .with("subtrahend", subtrahend)
        .with("vacuous", vacuous)
        .with("within_tolerance", within))
}
