//! Sampling estimates for graphs too large to enumerate.
//!
//! Sample `i` of stream `s` draws from a ChaCha8 generator seeded with the
//! user seed, on stream `s`, positioned at word `i << 20`. Results therefore
//! depend only on `(seed, samples)` and never on how rayon splits the work.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checkers::{CheckReport, ConjectureId};
use crate::engine::{CEvent, Compiled, Snapshot};
use crate::error::{Error, Result};
use crate::event::EventExpr;
use crate::graph::{ensure_valid, TerminalSpec, WeightedGraph};
use crate::num::Num;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489;

const BLOCK: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    /// 99% interval.
    pub lower: f64,
    pub upper: f64,
    /// `"normal"` or `"wilson"`.
    pub interval: &'static str,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let p = hits as f64 / n;
        let var = p * (1.0 - p) / n;
        let std_error = var.sqrt();
        let near_edge = p.min(1.0 - p) < 5.0 / n.sqrt();
        let (lower, upper, interval) = if near_edge {
            let z2 = Z99 * Z99;
            let d = 1.0 + z2 / n;
            let centre = (p + z2 / (2.0 * n)) / d;
            let half = Z99 / d * (var + z2 / (4.0 * n * n)).sqrt();
            (centre - half, centre + half, "wilson")
        } else {
            (p - Z99 * std_error, p + Z99 * std_error, "normal")
        };
        // keep the point estimate inside the interval despite rounding
        let lower = lower.clamp(0.0, 1.0).min(p);
        let upper = upper.clamp(0.0, 1.0).max(p);
        McEstimate { estimate: p, std_error, samples, hits, lower, upper, interval, seed }
    }

    pub fn covers(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Per-edge Bernoulli sampler; exact rationals with small denominators are
/// sampled without rounding.
#[derive(Clone, Copy)]
enum Coin {
    Ratio(u64, u64),
    Float(f64),
}

impl Coin {
    fn new(p: &Num) -> Coin {
        if let Some(r) = p.as_exact() {
            if let (Some(n), Some(d)) = (r.numer().to_u64(), r.denom().to_u64()) {
                return Coin::Ratio(n, d);
            }
        }
        Coin::Float(p.to_f64())
    }

    fn flip(self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            Coin::Ratio(n, d) => rng.gen_range(0..d) < n,
            Coin::Float(p) => rng.gen::<f64>() < p,
        }
    }
}

struct Sampler {
    c: Compiled,
    coins: Vec<Coin>,
}

impl Sampler {
    fn new(g: &WeightedGraph) -> Result<Self> {
        let c = Compiled::new(g)?;
        let coins = c.random.iter().map(|&e| Coin::new(&c.probs[e])).collect();
        Ok(Sampler { c, coins })
    }

    /// Number of samples in `0..samples` on which `ev` holds.
    fn count(&self, ev: &CEvent, samples: u64, seed: u64, stream: u64) -> u64 {
        let blocks = samples.div_ceil(BLOCK);
        (0..blocks)
            .into_par_iter()
            .map(|blk| {
                let mut snap = Snapshot::new(&self.c);
                let mut cfg = snap.open.clone();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                let mut hits = 0;
                for i in blk * BLOCK..((blk + 1) * BLOCK).min(samples) {
                    rng.set_word_pos(u128::from(i) << 20);
                    for (&e, coin) in self.c.random.iter().zip(&self.coins) {
                        cfg.set(e, coin.flip(&mut rng));
                    }
                    snap.load(&cfg);
                    hits += u64::from(snap.eval(ev));
                }
                hits
            })
            .sum()
    }
}

/// Fraction of `samples` independent configurations in which `ev` holds.
pub fn estimate_event(g: &WeightedGraph, ev: &EventExpr, samples: u64, seed: u64) -> Result<McEstimate> {
    estimate_events(g, std::slice::from_ref(ev), samples, seed).map(|mut v| v.remove(0))
}

/// Event `i` is estimated on its own stream `i`.
pub fn estimate_events(g: &WeightedGraph, evs: &[EventExpr], samples: u64, seed: u64) -> Result<Vec<McEstimate>> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    let s = Sampler::new(g)?;
    let compiled: Vec<CEvent> = evs.iter().map(|e| s.c.compile(e)).collect::<Result<_>>()?;
    Ok(compiled
        .iter()
        .enumerate()
        .map(|(i, ev)| McEstimate::from_hits(s.count(ev, samples, seed, i as u64), samples, seed))
        .collect())
}

/// Sampled `postfkg`, `prefkg` or `prefkga`. The margin carries the standard
/// error propagated to first order through the product and the minimum.
pub fn estimate_check(
    g: &WeightedGraph,
    t: &TerminalSpec,
    id: ConjectureId,
    samples: u64,
    seed: u64,
) -> Result<CheckReport> {
    ensure_valid(g, t)?;
    let d = g.directed;
    let a: Vec<&str> = t.a.iter().map(String::as_str).collect();
    let zero_a = EventExpr::link(d, &[&t.zero], &a);
    let zero_b = EventExpr::link(d, &[&t.zero], &[&t.b]);
    let to_b = |x: &str| EventExpr::link(d, &[x], &[&t.b]);
    let mut evs = match id {
        ConjectureId::Postfkg => vec![zero_b, zero_a.clone()],
        ConjectureId::Prefkg => vec![zero_b],
        ConjectureId::Prefkga => vec![zero_b.and(zero_a.clone())],
        other => return Err(Error::Precondition(format!("no sampled form of `{other}`"))),
    };
    let first = evs.len();
    evs.extend(a.iter().map(|x| match id {
        ConjectureId::Postfkg => to_b(x),
        _ => zero_a.clone().and(to_b(x)),
    }));
    let est = estimate_events(g, &evs, samples, seed)?;
    let per = &est[first..];
    let min = per.iter().map(|e| e.estimate).fold(f64::INFINITY, f64::min);
    let who: Vec<usize> = (0..per.len()).filter(|&i| per[i].estimate == min).collect();
    let z = &per[who[0]];
    let x = &est[0];
    let (rhs, se) = if id == ConjectureId::Postfkg {
        let y = &est[1];
        let se = (x.std_error.powi(2) + (z.estimate * y.std_error).powi(2) + (y.estimate * z.std_error).powi(2)).sqrt();
        (y.estimate * z.estimate, se)
    } else {
        (z.estimate, (x.std_error.powi(2) + z.std_error.powi(2)).sqrt())
    };
    let mut r = CheckReport::new(id, Num::Float(x.estimate), Num::Float(rhs), who.iter().map(|&i| t.a[i].clone()).collect())
        .with("std_error", se)
        .with("samples", samples)
        .with("seed", seed)
        .with("estimates", &est);
    r.exact = false;
    if d {
        r = r.with("variant", "directed");
    }
    Ok(r)
}
