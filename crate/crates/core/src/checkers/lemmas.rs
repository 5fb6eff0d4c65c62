//! Randomized instances of the proved auxiliary inequalities.
//!
//! The events `Q` are drawn from connection indicators `C(x) ∩ T ≠ ∅` for a
//! random vertex set `T`, and their complements: increasing and decreasing
//! events defined on the cluster of `x`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{edges_at, CheckReport, ConjectureId};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::event::EventExpr;
use crate::graph::{ensure_valid, glue_with_survivor, remove_vertices, TerminalSpec, VertexId, WeightedGraph};
use crate::num::Num;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaSuite {
    pub reports: Vec<CheckReport>,
    /// Lemma instances drawn, including skipped ones.
    pub attempted: usize,
    /// Instances dropped because a conditioning event had probability zero.
    pub skipped: usize,
}

struct Ctx<'a> {
    engine: &'a Engine,
    g: &'a WeightedGraph,
    t: &'a TerminalSpec,
    rng: ChaCha8Rng,
    out: LemmaSuite,
}

/// Draws one instance of each lemma on `(g, t)`; all margins are nonnegative
/// when the lemmas hold.
pub fn lemma_suite(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec, seed: u64) -> Result<LemmaSuite> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("lemma suite"));
    }
    let mut cx = Ctx {
        engine,
        g,
        t,
        rng: ChaCha8Rng::seed_from_u64(seed),
        out: LemmaSuite { reports: Vec::new(), attempted: 0, skipped: 0 },
    };
    cx.cluster(true)?;
    cx.cluster(false)?;
    cx.superadditive()?;
    cx.compare(true)?;
    cx.compare(false)?;
    cx.pivotal()?;
    cx.sigma()?;
    Ok(cx.out)
}

fn set(xs: &[&String]) -> Vec<VertexId> {
    xs.iter().map(|x| x.to_string()).collect()
}

impl Ctx<'_> {
    fn prob(&self, evs: &[EventExpr]) -> Result<Vec<Num>> {
        self.engine.probabilities(self.g, evs)
    }

    fn target(&mut self) -> Vec<VertexId> {
        loop {
            let t: Vec<VertexId> = self.g.vertices.iter().filter(|_| self.rng.gen_bool(0.5)).cloned().collect();
            if !t.is_empty() {
                return t;
            }
        }
    }

    fn emit(&mut self, r: CheckReport) {
        self.out.attempted += 1;
        self.out.reports.push(r);
    }

    fn skip(&mut self) {
        self.out.attempted += 1;
        self.out.skipped += 1;
    }

    /// `φ(X) <= P(0 ↔ A(X) | sep, Q)` for `Q` increasing on `C(A(X))` or
    /// decreasing on `C(A(Xᶜ))` (part i); reversed for the opposite kinds
    /// (part ii).
    fn cluster(&mut self, part_one: bool) -> Result<()> {
        let k = self.t.a.len();
        let mask: usize = if k == 1 { 1 } else { self.rng.gen_range(1..(1 << k) - 1) };
        let x: Vec<&String> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &self.t.a[i]).collect();
        let xc: Vec<&String> = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| &self.t.a[i]).collect();
        let target = self.target();
        let on_x = EventExpr::Conn(set(&x), target.clone());
        let on_xc = EventExpr::Conn(set(&xc), target);
        let pick_first = xc.is_empty() || self.rng.gen_bool(0.5);
        let q = match (part_one, pick_first) {
            (true, true) => on_x,
            (true, false) => on_xc.not(),
            (false, true) => on_x.not(),
            (false, false) => on_xc,
        };
        let sep = EventExpr::Conn(set(&x), set(&xc)).not();
        let hit = EventExpr::Conn(vec![self.t.zero.clone()], set(&x));
        let ps = self.prob(&[
            hit.clone().and(sep.clone()),
            sep.clone(),
            hit.and(sep.clone()).and(q.clone()),
            sep.and(q.clone()),
        ])?;
        let (Some(phi), Some(cond)) = (ps[0].checked_div(&ps[1]), ps[2].checked_div(&ps[3])) else {
            self.skip();
            return Ok(());
        };
        let (id, lhs, rhs) =
            if part_one { (ConjectureId::LemmaClusterI, cond, phi) } else { (ConjectureId::LemmaClusterIi, phi, cond) };
        self.emit(CheckReport::new(id, lhs, rhs, Vec::new()).with("X", set(&x)).with("Q", q));
        Ok(())
    }

    /// `Σ_k φ(X_k) <= φ(X)` for a partition of `X`.
    fn superadditive(&mut self) -> Result<()> {
        let k = self.t.a.len();
        if k < 2 {
            return Ok(());
        }
        let table = self.engine.phi_table(self.g, self.t)?;
        let mut members: Vec<usize> = (0..k).collect();
        members.shuffle(&mut self.rng);
        members.truncate(self.rng.gen_range(2..=k));
        let blocks = if self.rng.gen_bool(0.5) { members.len() } else { self.rng.gen_range(2..=members.len()) };
        let mut parts = vec![0usize; blocks];
        for (i, &m) in members.iter().enumerate() {
            // the first `blocks` members seed distinct blocks
            let b = if i < blocks { i } else { self.rng.gen_range(0..blocks) };
            parts[b] |= 1 << m;
        }
        let whole: usize = parts.iter().sum();
        let values: Option<Vec<Num>> = std::iter::once(whole).chain(parts.iter().copied()).map(|s| table.phi[s].clone()).collect();
        let Some(values) = values else {
            self.skip();
            return Ok(());
        };
        let sum: Num = values[1..].iter().cloned().sum();
        let names = |s: usize| (0..k).filter(|i| s >> i & 1 == 1).map(|i| self.t.a[i].clone()).collect::<Vec<_>>();
        let r = CheckReport::new(ConjectureId::LemmaPhiSuperadditive, values[0].clone(), sum, Vec::new())
            .with("X", names(whole))
            .with("partition", parts.iter().map(|&p| names(p)).collect::<Vec<_>>());
        self.emit(r);
        Ok(())
    }

    /// Two distinct points, from `A` when possible.
    fn two_points(&mut self) -> Option<(VertexId, VertexId)> {
        let mut pool: Vec<VertexId> = if self.t.a.len() >= 2 { self.t.a.clone() } else { self.g.vertices.clone() };
        if pool.len() < 2 {
            return None;
        }
        pool.shuffle(&mut self.rng);
        Some((pool[0].clone(), pool[1].clone()))
    }

    /// With `δ* = P(a1 ↔ b) - P(a2 ↔ b)` the lemma, read for every admissible
    /// `δ > 0`, says `P(a1 ↔ b | Q) <= P(a2 ↔ b | Q) + max(δ*, 0)` for `Q`
    /// increasing on `C(a2)` (part i), and the same with joint probabilities
    /// for `Q` decreasing on `C(a1)` (part ii).
    fn compare(&mut self, part_one: bool) -> Result<()> {
        let Some((a1, a2)) = self.two_points() else { return Ok(()) };
        let b = self.t.b.clone();
        let target = self.target();
        let q = if part_one {
            EventExpr::Conn(vec![a2.clone()], target)
        } else {
            EventExpr::Conn(vec![a1.clone()], target).not()
        };
        let l1 = EventExpr::conn(&[&a1], &[&b]);
        let l2 = EventExpr::conn(&[&a2], &[&b]);
        let ps = self.prob(&[l1.clone().and(q.clone()), l2.clone().and(q.clone()), q.clone(), l1, l2])?;
        let delta = &ps[3] - &ps[4];
        let slack = if delta.is_negative() { Num::zero() } else { delta.clone() };
        let (id, x, y) = if part_one {
            let (Some(x), Some(y)) = (ps[0].checked_div(&ps[2]), ps[1].checked_div(&ps[2])) else {
                self.skip();
                return Ok(());
            };
            (ConjectureId::LemmaCompareI, x, y)
        } else {
            (ConjectureId::LemmaCompareIi, ps[0].clone(), ps[1].clone())
        };
        let r = CheckReport::new(id, &y + &slack, x, Vec::new())
            .with("a1", &a1)
            .with("a2", &a2)
            .with("delta", &delta)
            .with("Q", q);
        self.emit(r);
        Ok(())
    }

    /// `max_{j=1,2} P({a1,a2} pivotal for a_j ↔ b) >= P({a1,a2} pivotal for
    /// a3 ↔ b)`, and its glued form.
    fn pivotal(&mut self) -> Result<()> {
        let b = self.t.b.clone();
        let mut from_a: Vec<VertexId> = self.t.a.iter().filter(|x| **x != b).cloned().collect();
        from_a.shuffle(&mut self.rng);
        let mut rest: Vec<VertexId> =
            self.g.vertices.iter().filter(|x| **x != b && !from_a.contains(x)).cloned().collect();
        rest.shuffle(&mut self.rng);
        let pts: Vec<VertexId> = from_a.into_iter().chain(rest).take(3).collect();
        if pts.len() < 3 {
            return Ok(());
        }
        let (a1, a2, a3) = (&pts[0], &pts[1], &pts[2]);
        let piv = |x: &str| EventExpr::pivotal(a1, a2, EventExpr::conn(&[x], &[&b]));
        let mut evs = vec![piv(a1), piv(a2), piv(a3)];
        evs.extend([a1, a2, a3].iter().map(|x| EventExpr::conn(&[x], &[&b])));
        let ps = self.prob(&evs)?;
        let best = if ps[0].cmp_num(&ps[1]).is_ge() { ps[0].clone() } else { ps[1].clone() };
        let r = CheckReport::new(ConjectureId::LemmaPivotal, best, ps[2].clone(), Vec::new()).with("a", &pts);
        self.emit(r);

        let (h, keep) = glue_with_survivor(self.g, (a1, a2))?;
        let qs = self.engine.probabilities(
            &h,
            &[EventExpr::conn(&[&keep], &[&b]), EventExpr::conn(&[a3], &[&b])],
        )?;
        let min12 = Num::min_of(&ps[3..5]).expect("two values");
        let r = CheckReport::new(ConjectureId::LemmaPivotalGlued, &qs[0] - &qs[1], &min12 - &ps[5], Vec::new())
            .with("a", &pts);
        self.emit(r);
        Ok(())
    }

    /// For neighbours `a, v` of `0` with `P_{G∖0}(a ↔ b) <= P_{G∖0}(v ↔ b)`
    /// and `v ∈ B`: `P(a ↔ b, σ_B) <= P(0 ↔ b, σ_B)`.
    fn sigma(&mut self) -> Result<()> {
        let (zero, b) = (self.t.zero.clone(), self.t.b.clone());
        if zero == b {
            return Ok(());
        }
        let at_zero = edges_at(self.g, &zero);
        let mut nbrs: Vec<VertexId> = Vec::new();
        for &e in &at_zero {
            let e = &self.g.edges[e];
            let other = if e.u == zero { &e.v } else { &e.u };
            if !nbrs.contains(other) {
                nbrs.push(other.clone());
            }
        }
        if nbrs.is_empty() {
            return Ok(());
        }
        let mut a = nbrs[self.rng.gen_range(0..nbrs.len())].clone();
        let mut v = nbrs[self.rng.gen_range(0..nbrs.len())].clone();
        let rest = remove_vertices(self.g, &[&zero])?;
        let ps = self.engine.probabilities(&rest, &[EventExpr::conn(&[&a], &[&b]), EventExpr::conn(&[&v], &[&b])])?;
        if ps[0].cmp_num(&ps[1]).is_gt() {
            std::mem::swap(&mut a, &mut v);
        }
        let mut bset = vec![v.clone()];
        for x in &nbrs {
            if *x != v && self.rng.gen_bool(0.5) {
                bset.push(x.clone());
            }
        }
        let sigma = EventExpr::And(
            at_zero
                .iter()
                .map(|&e| {
                    let ed = &self.g.edges[e];
                    let other = if ed.u == zero { &ed.v } else { &ed.u };
                    if bset.contains(other) {
                        EventExpr::EdgeOpen(e)
                    } else {
                        EventExpr::EdgeOpen(e).not()
                    }
                })
                .collect(),
        );
        let ps = self.prob(&[
            EventExpr::conn(&[&zero], &[&b]).and(sigma.clone()),
            EventExpr::conn(&[&a], &[&b]).and(sigma),
        ])?;
        let r = CheckReport::new(ConjectureId::LemmaSigma, ps[0].clone(), ps[1].clone(), Vec::new())
            .with("a", &a)
            .with("v", &v)
            .with("B", json!(bset));
        self.emit(r);
        Ok(())
    }
}
