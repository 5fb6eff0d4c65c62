//! Reductions to graphs with all probabilities 1/2 or all degrees 3.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Edge, WeightedGraph};
use crate::error::{Error, Result};
use crate::num::{Num, Prob};

/// A two-terminal gadget graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Gadget {
    pub graph: WeightedGraph,
    pub source: String,
    pub sink: String,
    /// The exact two-terminal connection probability of the gadget.
    pub value: BigRational,
}

/// Series-parallel graph of probability-1/2 edges whose terminal-to-terminal
/// connection probability is within `eps` of `p`.
///
/// `p` is approximated by the nearest dyadic `k / 2^n` with the fewest bits.
/// Reading the binary digits of that dyadic from the last one backwards, a
/// single 1/2 edge realizes the final `1`, and each earlier digit is
/// prepended by `q -> q/2` (a 1/2 edge in series, digit 0) or
/// `q -> (1+q)/2` (a 1/2 edge in parallel, digit 1). The gadget therefore has
/// exactly `n` edges.
pub fn half_edge_gadget(p: &Prob, eps: &Prob) -> Result<Gadget> {
    if !p.is_proper() {
        return Err(Error::Degenerate(format!(
            "p = {p} has no proper 1/2-edge gadget; delete (p = 0) or glue (p = 1) the edge instead"
        )));
    }
    if eps.is_negative() {
        return Err(Error::Degenerate(format!("eps = {eps} must be nonnegative")));
    }
    let target = p.to_rational();
    let eps = eps.to_rational();
    let (k, bits) = nearest_dyadic(&target, &eps)?;

    // digits b_1..b_n of k / 2^n, most significant first; b_n = 1.
    let digits: Vec<bool> = (0..bits).rev().map(|i| (&k >> i) & BigInt::one() == BigInt::one()).collect();
    debug_assert_eq!(digits.last(), Some(&true));

    let half = Num::ratio(1, 2);
    let mut g = WeightedGraph::new(false);
    g.add_vertex("s0").add_vertex("t");
    g.add_edge("s0", "t", half.clone());
    let mut source = "s0".to_string();
    for (i, &digit) in digits[..digits.len() - 1].iter().rev().enumerate() {
        if digit {
            g.add_edge(source.clone(), "t", half.clone());
        } else {
            let s = format!("s{}", i + 1);
            g.add_vertex(s.clone());
            g.add_edge(s.clone(), source, half.clone());
            source = s;
        }
    }
    let value = BigRational::new(k, BigInt::one() << bits);
    Ok(Gadget { graph: g, source, sink: "t".to_string(), value })
}

/// Smallest `n` (and matching odd `k`) with `|k/2^n - p| <= eps`, `0 < k < 2^n`.
fn nearest_dyadic(p: &BigRational, eps: &BigRational) -> Result<(BigInt, u32)> {
    let max_bits = if eps.is_zero() {
        // Only an exactly dyadic p can be realized.
        let den = p.denom();
        let bits = den.bits() - 1;
        if (BigInt::one() << bits) != *den {
            return Err(Error::Degenerate(format!("p = {p} is not dyadic; eps = 0 is unattainable")));
        }
        bits as u32
    } else {
        // 2^-n <= eps guarantees success at n.
        let mut n = 0u32;
        while BigRational::new(BigInt::one(), BigInt::one() << n) > *eps {
            n += 1;
        }
        n.max(1)
    };
    for n in 1..=max_bits {
        let scale = BigInt::one() << n;
        let scaled = p * BigRational::from_integer(scale.clone());
        let mut k = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
        if k < BigInt::one() {
            k = BigInt::one();
        }
        if k >= scale {
            k = &scale - 1;
        }
        if &k % 2 == BigInt::zero() {
            // an even numerator means a shorter expansion already worked or will at n-1
            continue;
        }
        let approx = BigRational::new(k.clone(), scale);
        if (approx - p).abs() <= *eps {
            return Ok((k, n));
        }
    }
    Err(Error::Degenerate(format!("no dyadic within {eps} of {p} using at most {max_bits} bits")))
}

/// Upper bound on the gadget size for a given `eps`: `ceil(log2(1/eps)) + 1`.
pub fn gadget_size_bound(eps: &Prob) -> usize {
    let eps = eps.to_rational();
    if eps.is_zero() || !eps.is_positive() {
        return usize::MAX;
    }
    let inv = BigRational::one() / eps;
    let mut n = 0usize;
    while BigRational::from_integer(BigInt::one() << n) < inv {
        n += 1;
    }
    n + 1
}

/// Rewrites `g` so that every vertex has degree exactly 3 while preserving the
/// connection probability between every pair of original vertices.
///
/// A vertex of degree `d > 3` becomes a path ("spine") of `d - 2` vertices
/// joined by probability-1 edges, with the original id kept on the first one;
/// the first and last spine vertices take two original edge ends each and the
/// inner ones one each. A vertex of degree `d < 3` gets `3 - d` decorations: a
/// probability-1 edge to a five-vertex cubic pendant (K4 with one edge
/// subdivided, the subdivision vertex being the attachment point). Every
/// added edge has probability 1 and every pendant hangs off a bridge, so no
/// connection event between original vertices changes.
pub fn degree3_reduce(g: &WeightedGraph) -> Result<WeightedGraph> {
    if g.directed {
        return Err(Error::DirectedInput("degree-3 reduction"));
    }
    let mut out = WeightedGraph::new(false);
    out.vertices = g.vertices.clone();
    out.edges = g.edges.clone();
    let one = Num::one();

    for v in g.vertices.clone() {
        let d = out.degree(&v);
        if d > 3 {
            let spine_len = d - 2;
            let mut spine = vec![v.clone()];
            for _ in 1..spine_len {
                let s = out.fresh_vertex(&format!("{v}.spine"));
                out.add_vertex(s.clone());
                spine.push(s);
            }
            // ports: edge endpoints at v in edge order, two per end vertex, one per inner
            let mut slots: Vec<usize> = Vec::with_capacity(d);
            for (i, _) in spine.iter().enumerate() {
                let take = if i == 0 || i == spine_len - 1 { 2 } else { 1 };
                slots.extend(std::iter::repeat_n(i, take));
            }
            let mut next = 0;
            for e in out.edges.iter_mut() {
                if e.u == v {
                    e.u = spine[slots[next]].clone();
                    next += 1;
                }
                if e.v == v {
                    e.v = spine[slots[next]].clone();
                    next += 1;
                }
            }
            debug_assert_eq!(next, d);
            for w in spine.windows(2) {
                out.edges.push(Edge::new(w[0].clone(), w[1].clone(), one.clone()));
            }
        } else {
            for _ in d..3 {
                attach_pendant(&mut out, &v);
            }
        }
    }
    Ok(out)
}

fn attach_pendant(g: &mut WeightedGraph, at: &str) {
    let one = Num::one();
    let ids: Vec<String> = (0..5)
        .map(|_| {
            let id = g.fresh_vertex(&format!("{at}.deco"));
            g.add_vertex(id.clone());
            id
        })
        .collect();
    let (x, p, q, r, s) = (&ids[0], &ids[1], &ids[2], &ids[3], &ids[4]);
    g.add_edge(at, x.clone(), one.clone());
    for (u, v) in [(x, p), (x, s), (p, q), (q, r), (r, s), (p, r), (q, s)] {
        g.add_edge(u.clone(), v.clone(), one.clone());
    }
}
