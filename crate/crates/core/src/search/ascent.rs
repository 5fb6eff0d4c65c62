//! Coordinate ascent towards negative margins.
//!
//! Every constituent probability is affine in a single `p_e`, so the margin
//! restricted to one edge is the maximum of a few quadratics (or lines) in
//! `p_e`. Its minimum over `[0, 1]` lies at an endpoint, where two branches
//! cross, or at the vertex of one branch; all of these are tried.

use crate::checkers::{check_gluing_step, check_postfkg, check_prefkg, check_prefkga, CheckReport, ConjectureId};
use crate::engine::{EdgePolynomial, Engine};
use crate::error::{Error, Result};
use crate::event::EventExpr;
use crate::graph::{TerminalSpec, WeightedGraph};
use crate::num::Num;

/// Interior candidates are rounded to multiples of `1/GRID`, which keeps
/// the probabilities exact with bounded denominators.
pub const GRID: i64 = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct Ascent {
    pub graph: WeightedGraph,
    pub report: CheckReport,
    /// Margin before the first step and after every accepted step.
    pub trace: Vec<Num>,
    pub passes: usize,
}

/// Evaluates `id` on `(g, t)`. The gluing conjectures are evaluated on every
/// edge with either endpoint as `v`; the report with the smallest margin
/// among those whose premise holds is returned.
pub fn check_target(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, id: ConjectureId) -> Result<CheckReport> {
    match id {
        ConjectureId::Postfkg => check_postfkg(engine, g, t),
        ConjectureId::Prefkg => check_prefkg(engine, g, t),
        ConjectureId::Prefkga => check_prefkga(engine, g, t),
        ConjectureId::GluingStep | ConjectureId::GluingNaive => {
            let mut best: Option<CheckReport> = None;
            for e in g.edges.iter().filter(|e| !e.is_loop()) {
                for pair in [(e.u.as_str(), e.v.as_str()), (e.v.as_str(), e.u.as_str())] {
                    let r = check_gluing_step(engine, g, t, pair)?;
                    let r = if id == ConjectureId::GluingStep { r.step } else { r.naive };
                    let better = match &best {
                        None => true,
                        Some(b) => match (b.premise_met, r.premise_met) {
                            (Some(false), Some(true)) => true,
                            (Some(true), Some(false)) => false,
                            _ => r.margin.cmp_num(&b.margin).is_lt(),
                        },
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            best.ok_or_else(|| Error::Precondition("the graph has no edge to glue".into()))
        }
        other => Err(Error::Precondition(format!("`{other}` is not a search target"))),
    }
}

/// Constituent events `[X, Y?, Z_a...]` and whether `Y` is present.
fn constituents(id: ConjectureId, g: &WeightedGraph, t: &TerminalSpec) -> Result<(Vec<EventExpr>, bool)> {
    let d = g.directed;
    let a: Vec<&str> = t.a.iter().map(String::as_str).collect();
    let zero_a = EventExpr::link(d, &[&t.zero], &a);
    let zero_b = EventExpr::link(d, &[&t.zero], &[&t.b]);
    let to_b = |x: &&str| EventExpr::link(d, &[x], &[&t.b]);
    Ok(match id {
        ConjectureId::Postfkg => {
            let mut v = vec![zero_b, zero_a];
            v.extend(a.iter().map(to_b));
            (v, true)
        }
        ConjectureId::Prefkg | ConjectureId::Prefkga => {
            let x = if id == ConjectureId::Prefkga { zero_b.and(zero_a.clone()) } else { zero_b };
            let mut v = vec![x];
            v.extend(a.iter().map(|x| zero_a.clone().and(to_b(x))));
            (v, false)
        }
        other => return Err(Error::Precondition(format!("no coordinate ascent for `{other}`"))),
    })
}

fn margin_of(values: &[Num], has_y: bool) -> Num {
    let z = if has_y { &values[2..] } else { &values[1..] };
    let min = Num::min_of(z).expect("A is nonempty");
    let rhs = if has_y { &values[1] * &min } else { min };
    &values[0] - &rhs
}

/// Grid points next to `x` when `x` lies strictly inside `(0, 1)`.
fn snap(x: Option<Num>, out: &mut Vec<Num>) {
    let Some(x) = x else { return };
    let f = x.to_f64();
    if !(f > 0.0 && f < 1.0) {
        return;
    }
    let s = f * GRID as f64;
    for k in [s.floor() as i64, s.ceil() as i64] {
        out.push(Num::ratio(k.clamp(0, GRID), GRID));
    }
}

/// Candidate values of `p_e` for one-edge restriction with polynomials
/// `polys` (laid out as in [`constituents`]).
fn candidates(polys: &[EdgePolynomial], has_y: bool) -> Vec<Num> {
    let mut out = vec![Num::zero(), Num::one()];
    let zs = if has_y { &polys[2..] } else { &polys[1..] };
    for (i, zi) in zs.iter().enumerate() {
        for zj in &zs[i + 1..] {
            // zi.c0 + zi.c1 q = zj.c0 + zj.c1 q
            snap((&zj.c0 - &zi.c0).checked_div(&(&zi.c1 - &zj.c1)), &mut out);
        }
    }
    if has_y {
        let (x, y) = (&polys[0], &polys[1]);
        snap((-&y.c0).checked_div(&y.c1), &mut out);
        for z in zs {
            // d/dq [x - y z] = x1 - y0 z1 - y1 z0 - 2 y1 z1 q
            let lin = &(&x.c1 - &(&y.c0 * &z.c1)) - &(&y.c1 * &z.c0);
            let two_quad = &(&y.c1 * &z.c1) * &Num::int(2);
            snap(lin.checked_div(&two_quad), &mut out);
        }
    }
    out
}

/// Lowers the margin of `id` by repeated single-edge moves. Stops after
/// `iterations` passes over the edges or after a pass without improvement.
/// The gluing targets are only checked: their margin is a minimum over
/// pairs, each with its own constituent events.
pub fn ascend(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, id: ConjectureId, iterations: usize) -> Result<Ascent> {
    let mut cur = g.clone();
    let mut passes = 0;
    let mut trace = Vec::new();
    let gluing = matches!(id, ConjectureId::GluingStep | ConjectureId::GluingNaive);
    if iterations > 0 && !gluing {
        let (evs, has_y) = constituents(id, g, t)?;
        let mut margin = margin_of(&engine.probabilities(&cur, &evs)?, has_y);
        trace.push(margin.clone());
        while passes < iterations {
            passes += 1;
            let mut improved = false;
            for e in 0..cur.edges.len() {
                if cur.edges[e].is_loop() {
                    continue;
                }
                let polys = engine.edge_polynomials(&cur, e, &evs)?;
                let at = |q: &Num| margin_of(&polys.iter().map(|p| p.eval(q)).collect::<Vec<_>>(), has_y);
                let mut best: Option<(Num, Num)> = None;
                for q in candidates(&polys, has_y) {
                    let m = at(&q);
                    if m.cmp_num(&margin).is_lt() && best.as_ref().is_none_or(|(bm, _)| m.cmp_num(bm).is_lt()) {
                        best = Some((m, q));
                    }
                }
                if let Some((m, q)) = best {
                    cur.edges[e].p = q;
                    margin = m;
                    trace.push(margin.clone());
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
    let report = check_target(engine, &cur, t, id)?;
    if trace.is_empty() {
        trace.push(report.margin.clone());
    }
    Ok(Ascent { graph: cur, report, trace, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::num::Mode;

    fn h() -> Num {
        Num::ratio(1, 2)
    }

    #[test]
    fn trace_is_nonincreasing_and_final_margin_matches() {
        let g = WeightedGraph::undirected(
            &["0", "1", "2", "3"],
            vec![Edge::new("0", "1", h()), Edge::new("1", "2", h()), Edge::new("2", "3", h()), Edge::new("0", "3", h())],
        );
        let t = TerminalSpec::new("0", "2", &["1", "3"]);
        let e = Engine::exact();
        let r = ascend(&e, &g, &t, ConjectureId::Postfkg, 5).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].cmp_num(&w[0]).is_lt()));
        assert_eq!(r.trace.last().unwrap(), &r.report.margin);
        assert_eq!(check_postfkg(&e, &r.graph, &t).unwrap().margin, r.report.margin);
    }

    #[test]
    fn tight_deterministic_instance_is_a_fixed_point() {
        let g = WeightedGraph::undirected(&["0", "a", "b"], vec![Edge::new("0", "a", Num::one()), Edge::new("a", "b", Num::one())]);
        let t = TerminalSpec::new("0", "b", &["a"]);
        let r = ascend(&Engine::exact(), &g, &t, ConjectureId::Postfkg, 10).unwrap();
        assert_eq!(r.passes, 1);
        assert_eq!(r.graph, g);
        assert!(r.report.margin.is_zero());
    }

    #[test]
    fn directed_counterexample_is_not_worsened() {
        let (g, t) = crate::checkers::tests::directed_counterexample();
        let r = ascend(&Engine::exact(), &g, &t, ConjectureId::Postfkg, 3).unwrap();
        assert!(r.report.margin.cmp_num(&Num::ratio(-1, 32)).is_le());
    }

    #[test]
    fn float_mode_ascent_runs() {
        let g = WeightedGraph::undirected(&["0", "a", "b"], vec![Edge::new("0", "a", h()), Edge::new("a", "b", h())]);
        let t = TerminalSpec::new("0", "b", &["a", "b"]);
        let r = ascend(&Engine::exact().with_mode(Mode::Float), &g, &t, ConjectureId::Prefkga, 3).unwrap();
        assert!(!r.report.margin.is_negative());
    }

    #[test]
    fn gluing_target_takes_worst_edge() {
        // gluing 0 into 2 pulls 0 into A: 1/4 >= 7/16 · 1/2 before, 1/4 < 1 · 1/2 after
        let q = Num::ratio(1, 4);
        let g = WeightedGraph::undirected(
            &["0", "1", "2", "3", "4"],
            vec![Edge::new("0", "1", q.clone()), Edge::new("0", "2", q), Edge::new("1", "3", h()), Edge::new("1", "4", h())],
        );
        let t = TerminalSpec::new("4", "1", &["1", "2", "3"]);
        let e = Engine::exact();
        let r = check_target(&e, &g, &t, ConjectureId::GluingNaive).unwrap();
        assert!(r.violated());
        assert!(r.margin.cmp_num(&Num::ratio(-1, 4)).is_le());
        assert!(!check_target(&e, &g, &t, ConjectureId::GluingStep).unwrap().violated());
        let a = ascend(&e, &g, &t, ConjectureId::GluingNaive, 5).unwrap();
        assert_eq!((a.passes, a.graph, a.report), (0, g.clone(), r));
        let bare = WeightedGraph::undirected(&["0", "1"], vec![]);
        assert!(check_target(&e, &bare, &TerminalSpec::new("0", "1", &["1"]), ConjectureId::GluingNaive).is_err());
    }
}
