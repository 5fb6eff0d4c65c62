//! Brute-force oracle shared by the integration tests. It walks every
//! configuration of every edge and searches the open subgraph directly, with
//! no code in common with the engine.

#![allow(dead_code)]

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use perc_core::{Edge, Num, TerminalSpec, WeightedGraph};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Num {
    Num::ratio(n, d)
}

pub fn rat(x: &Num) -> BigRational {
    x.as_exact().expect("exact value").clone()
}

fn index(g: &WeightedGraph, id: &str) -> usize {
    g.vertices.iter().position(|v| v == id).unwrap_or_else(|| panic!("no vertex {id}"))
}

/// Vertices reachable from `from` through open edges.
pub fn reached(g: &WeightedGraph, open: &[bool], from: &[&str]) -> Vec<bool> {
    let n = g.vertices.len();
    let ids: Vec<(usize, usize)> = g.edges.iter().map(|e| (index(g, &e.u), index(g, &e.v))).collect();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for s in from {
        let i = index(g, s);
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(x) = queue.pop_front() {
        for (k, &(u, v)) in ids.iter().enumerate() {
            if !open[k] {
                continue;
            }
            let mut step = |y: usize| {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            };
            if u == x {
                step(v);
            }
            if v == x && !g.directed {
                step(u);
            }
        }
    }
    seen
}

pub fn links(g: &WeightedGraph, open: &[bool], s: &[&str], t: &[&str]) -> bool {
    let r = reached(g, open, s);
    t.iter().any(|x| r[index(g, x)])
}

pub fn cluster_size(g: &WeightedGraph, open: &[bool], v: &str) -> usize {
    reached(g, open, &[v]).into_iter().filter(|&b| b).count()
}

/// `E f` over all `2^m` configurations.
pub fn expect(g: &WeightedGraph, f: impl Fn(&[bool]) -> BigRational) -> BigRational {
    let m = g.edges.len();
    assert!(m <= 16, "oracle is for small graphs");
    let ps: Vec<BigRational> = g.edges.iter().map(|e| rat(&e.p)).collect();
    let mut total = BigRational::zero();
    let mut open = vec![false; m];
    for mask in 0u32..(1 << m) {
        let mut w = BigRational::one();
        for (k, p) in ps.iter().enumerate() {
            open[k] = mask >> k & 1 == 1;
            w *= if open[k] { p.clone() } else { BigRational::one() - p };
        }
        if !w.is_zero() {
            total += w * f(&open);
        }
    }
    total
}

pub fn prob(g: &WeightedGraph, f: impl Fn(&[bool]) -> bool) -> BigRational {
    expect(g, |o| if f(o) { BigRational::one() } else { BigRational::zero() })
}

pub fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Probabilities used by the generated multigraphs, with the deterministic
/// values included.
pub fn arb_prob() -> impl Strategy<Value = Num> {
    prop_oneof![
        Just(q(0, 1)),
        Just(q(1, 1)),
        Just(q(1, 2)),
        Just(q(1, 3)),
        Just(q(2, 3)),
        Just(q(1, 4)),
        Just(q(3, 4)),
        Just(q(1, 8)),
    ]
}

/// Multigraphs on vertices `"0".."n-1"` with up to `max_m` edges, loops and
/// parallel edges included.
pub fn arb_graph(max_n: usize, max_m: usize, directed: bool) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, arb_prob()), 0..=max_m).prop_map(move |es| {
            let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let edges = es.into_iter().map(|(u, v, p)| Edge::new(names[u].clone(), names[v].clone(), p)).collect();
            WeightedGraph { directed, vertices: names, edges }
        })
    })
}

/// A graph with terminals: `0` and `b` distinct, `A` nonempty.
pub fn arb_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = (WeightedGraph, TerminalSpec)> {
    (3..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec((0..n, 0..n, arb_prob()), 0..=max_m),
            prop::sample::subsequence((2..n).collect::<Vec<_>>(), 1..=(n - 2).min(4)),
        )
            .prop_map(move |(es, a)| {
                let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
                let edges = es.into_iter().map(|(u, v, p)| Edge::new(names[u].clone(), names[v].clone(), p)).collect();
                let a: Vec<&str> = a.iter().map(|&i| names[i].as_str()).collect();
                let t = TerminalSpec::new("0", "1", &a);
                (WeightedGraph { directed: false, vertices: names.clone(), edges }, t)
            })
    })
}

/// The directed four-vertex counterexample: `0 → a_i` and `a_i → b` open
/// with probability 1/2, and certain back edges `a_i → 0`.
pub fn directed_counterexample() -> (WeightedGraph, TerminalSpec) {
    let text = include_str!("../../../cli/tests/fixtures/directed_cx.json");
    perc_core::graph::parse_graph(text.as_bytes()).expect("fixture parses")
}
