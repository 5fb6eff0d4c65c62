//! Exhaustive enumeration over the random edges of a compiled graph.
//!
//! The weight of a configuration is split as `low(mask) * high(mask)` over two
//! halves of the random edges, both tabulated up front. In exact mode every
//! probability is written over its denominator and weights are integers, so
//! sums are exact and independent of how the work is partitioned.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::compiled::{Compiled, Snapshot};
use crate::num::{Mode, Num};

/// Below this many configurations enumeration stays on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

pub(crate) trait Weight: Clone + Send + Sync {
    fn zero() -> Self;
    fn times(&self, other: &Self) -> Self;
    fn add_scaled(&mut self, w: &Self, k: u64);
    fn add(&mut self, other: &Self);
}

impl Weight for u128 {
    fn zero() -> Self {
        0
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn add_scaled(&mut self, w: &Self, k: u64) {
        *self += w * k as u128;
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn add_scaled(&mut self, w: &Self, k: u64) {
        *self += w * k;
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn add_scaled(&mut self, w: &Self, k: u64) {
        *self += w * k as f64;
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
}

/// Accumulator keyed by output slot.
pub(crate) trait Sink<W: Weight>: Send {
    type Key: Send;
    fn add(&mut self, key: Self::Key, w: &W, k: u64);
    fn merge(&mut self, other: Self);
}

pub(crate) struct Slots<W>(pub Vec<W>);

impl<W: Weight> Sink<W> for Slots<W> {
    type Key = usize;
    fn add(&mut self, key: usize, w: &W, k: u64) {
        self.0[key].add_scaled(w, k);
    }
    fn merge(&mut self, other: Self) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            a.add(b);
        }
    }
}

pub(crate) struct Keyed<K: Ord, W>(pub BTreeMap<K, W>);

impl<K: Ord + Send, W: Weight> Sink<W> for Keyed<K, W> {
    type Key = K;
    fn add(&mut self, key: K, w: &W, k: u64) {
        self.0.entry(key).or_insert_with(W::zero).add_scaled(w, k);
    }
    fn merge(&mut self, other: Self) {
        for (k, v) in other.0 {
            self.0.entry(k).or_insert_with(W::zero).add(&v);
        }
    }
}

/// Tabulated half-weights.
struct Tables<W> {
    low: Vec<W>,
    high: Vec<W>,
    low_bits: usize,
}

fn tabulate<W: Weight + From<u8>>(factors: &[(W, W)]) -> Vec<W> {
    let mut table = vec![W::from(1u8)];
    for (closed, open) in factors {
        let mut next = Vec::with_capacity(table.len() * 2);
        next.extend(table.iter().map(|w| w.times(closed)));
        next.extend(table.iter().map(|w| w.times(open)));
        table = next;
    }
    table
}

fn split<W: Weight + From<u8>>(factors: Vec<(W, W)>) -> Tables<W> {
    let low_bits = factors.len() / 2;
    let (lo, hi) = factors.split_at(low_bits);
    Tables { low: tabulate(lo), high: tabulate(hi), low_bits }
}

fn run<W, S, F>(c: &Compiled, tables: &Tables<W>, make: &(dyn Fn() -> S + Sync), visit: &F) -> S
where
    W: Weight,
    S: Sink<W>,
    F: Fn(&mut Snapshot, &mut Vec<(S::Key, u64)>) + Sync,
{
    let work = |h: usize| -> S {
        let mut snap = Snapshot::new(c);
        let mut emits = Vec::new();
        let mut sink = make();
        let hw = &tables.high[h];
        for (l, lw) in tables.low.iter().enumerate() {
            let mask = ((h as u64) << tables.low_bits) | l as u64;
            snap.load_mask(mask);
            visit(&mut snap, &mut emits);
            if emits.is_empty() {
                continue;
            }
            let w = hw.times(lw);
            for (key, k) in emits.drain(..) {
                sink.add(key, &w, k);
            }
        }
        sink
    };
    let total = tables.high.len() * tables.low.len();
    let parts: Vec<S> = if total < PARALLEL_THRESHOLD {
        (0..tables.high.len()).map(work).collect()
    } else {
        (0..tables.high.len()).into_par_iter().map(work).collect()
    };
    let mut out = make();
    for p in parts {
        out.merge(p);
    }
    out
}

/// Numeric representation chosen for one enumeration.
enum Plan {
    Int { factors: Vec<(u128, u128)>, denom: u128 },
    Big { factors: Vec<(BigUint, BigUint)>, denom: BigUint },
    Float { factors: Vec<(f64, f64)> },
}

fn plan(c: &Compiled, mode: Mode, max_multiplier: u64) -> Plan {
    let exact = mode == Mode::Exact && c.random.iter().all(|&e| c.probs[e].is_exact());
    if !exact {
        let factors = c
            .random
            .iter()
            .map(|&e| {
                let p = c.probs[e].to_f64();
                (1.0 - p, p)
            })
            .collect();
        return Plan::Float { factors };
    }
    let parts: Vec<(BigUint, BigUint)> = c
        .random
        .iter()
        .map(|&e| {
            let r = c.probs[e].as_exact().expect("exact plan");
            let n = r.numer().to_biguint().expect("p > 0");
            let d = r.denom().to_biguint().expect("denominator > 0");
            (n, d)
        })
        .collect();
    let denom: BigUint = parts.iter().map(|(_, d)| d.clone()).product();
    let bound = &denom * BigUint::from(max_multiplier.max(1));
    if bound.bits() < 127 {
        let factors = parts
            .iter()
            .map(|(n, d)| ((d - n).to_u128().unwrap(), n.to_u128().unwrap()))
            .collect();
        Plan::Int { factors, denom: denom.to_u128().unwrap() }
    } else {
        let factors = parts.iter().map(|(n, d)| (d - n, n.clone())).collect();
        Plan::Big { factors, denom }
    }
}

fn to_num_int(x: u128, denom: u128) -> Num {
    Num::Exact(BigRational::new(BigInt::from(x), BigInt::from(denom)))
}

fn to_num_big(x: &BigUint, denom: &BigUint) -> Num {
    Num::Exact(BigRational::new(BigInt::from(x.clone()), BigInt::from(denom.clone())))
}

/// Sums `weight * k` into `slots` output slots for every `(slot, k)` emitted by
/// `visit` on each configuration.
pub(crate) fn accumulate<F>(c: &Compiled, mode: Mode, slots: usize, max_multiplier: u64, visit: F) -> Vec<Num>
where
    F: Fn(&mut Snapshot, &mut Vec<(usize, u64)>) + Sync,
{
    match plan(c, mode, max_multiplier) {
        Plan::Int { factors, denom } => {
            let t = split(factors);
            let s = run(c, &t, &|| Slots(vec![0u128; slots]), &visit);
            s.0.into_iter().map(|x| to_num_int(x, denom)).collect()
        }
        Plan::Big { factors, denom } => {
            let t = split(factors);
            let s = run(c, &t, &|| Slots(vec![<BigUint as Zero>::zero(); slots]), &visit);
            s.0.iter().map(|x| to_num_big(x, &denom)).collect()
        }
        Plan::Float { factors } => {
            let t = split(factors);
            let s = run(c, &t, &|| Slots(vec![0f64; slots]), &visit);
            s.0.into_iter().map(Num::Float).collect()
        }
    }
}

/// Like [`accumulate`], with outputs keyed by arbitrary ordered values.
pub(crate) fn accumulate_keyed<K, F>(c: &Compiled, mode: Mode, visit: F) -> BTreeMap<K, Num>
where
    K: Ord + Send + Clone,
    F: Fn(&mut Snapshot, &mut Vec<(K, u64)>) + Sync,
{
    match plan(c, mode, 1) {
        Plan::Int { factors, denom } => {
            let t = split(factors);
            let s = run(c, &t, &|| Keyed(BTreeMap::new()), &visit);
            s.0.into_iter().map(|(k, x)| (k, to_num_int(x, denom))).collect()
        }
        Plan::Big { factors, denom } => {
            let t = split(factors);
            let s = run(c, &t, &|| Keyed(BTreeMap::new()), &visit);
            s.0.into_iter().map(|(k, x)| (k, to_num_big(&x, &denom))).collect()
        }
        Plan::Float { factors } => {
            let t = split(factors);
            let s = run(c, &t, &|| Keyed(BTreeMap::<K, f64>::new()), &visit);
            s.0.into_iter().map(|(k, x)| (k, Num::Float(x))).collect()
        }
    }
}
