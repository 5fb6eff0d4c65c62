//! Deletion–contraction for two-set connection probabilities on undirected
//! graphs, with series, parallel and dangling-edge simplification and a memo
//! keyed by a relabelled edge list.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::compiled::UnionFind;
use crate::error::{Error, Result};

const S: u8 = 1;
const T: u8 = 2;

#[derive(Clone, Debug)]
pub(crate) struct Net {
    pub flags: Vec<u8>,
    pub edges: Vec<(u32, u32, BigRational)>,
}

type Key = (Vec<u8>, Vec<(u32, u32, BigRational)>);

pub(crate) struct Solver {
    memo: HashMap<Key, BigRational>,
    budget: usize,
}

impl Solver {
    pub fn new(budget: usize) -> Self {
        Solver { memo: HashMap::new(), budget }
    }

    pub fn solve(&mut self, net: Net) -> Result<BigRational> {
        let net = match simplify(net) {
            Reduced::Certain => return Ok(BigRational::one()),
            Reduced::Net(n) => n,
        };
        let comps = relevant_components(&net);
        match comps.len() {
            0 => return Ok(BigRational::zero()),
            1 => {}
            _ => {
                let mut miss = BigRational::one();
                for c in comps {
                    miss *= BigRational::one() - self.solve(c)?;
                }
                return Ok(BigRational::one() - miss);
            }
        }
        let net = comps.into_iter().next().expect("one component");
        let key = encode(&net);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        // branch on an edge at a source vertex; the component has one
        let e = net
            .edges
            .iter()
            .position(|&(u, v, _)| net.flags[u as usize] & S != 0 || net.flags[v as usize] & S != 0)
            .unwrap_or(0);
        let (u, v, p) = net.edges[e].clone();
        let mut deleted = net.clone();
        deleted.edges.swap_remove(e);
        let mut contracted = net;
        contracted.edges.swap_remove(e);
        contracted.edges.push((u, v, BigRational::one()));
        let value = &p * self.solve(contracted)? + (BigRational::one() - &p) * self.solve(deleted)?;
        if self.memo.len() >= self.budget {
            return Err(Error::MemoBudget { limit: self.budget });
        }
        self.memo.insert(key, value.clone());
        Ok(value)
    }
}

enum Reduced {
    Certain,
    Net(Net),
}

/// Applies the probability-preserving rewrites until none applies.
fn simplify(mut net: Net) -> Reduced {
    loop {
        // contract certain edges, drop impossible ones and loops
        let n = net.flags.len();
        let mut uf = UnionFind::new(n);
        for (u, v, p) in &net.edges {
            if p.is_one() {
                uf.union(*u, *v);
            }
        }
        let edges: Vec<_> = net
            .edges
            .into_iter()
            .filter(|(_, _, p)| !p.is_zero() && !p.is_one())
            .map(|(u, v, p)| (uf.find(u), uf.find(v), p))
            .filter(|(u, v, _)| u != v)
            .collect();
        let mut flags = vec![0u8; n];
        for x in 0..n as u32 {
            flags[uf.find(x) as usize] |= net.flags[x as usize];
        }
        if flags.contains(&(S | T)) {
            return Reduced::Certain;
        }

        // merge parallel edges
        let mut merged: Vec<(u32, u32, BigRational)> = Vec::with_capacity(edges.len());
        let mut at: HashMap<(u32, u32), usize> = HashMap::new();
        for (u, v, p) in edges {
            let k = (u.min(v), u.max(v));
            match at.get(&k) {
                Some(&i) => {
                    let q = &merged[i].2;
                    merged[i].2 = BigRational::one() - (BigRational::one() - q) * (BigRational::one() - p);
                }
                None => {
                    at.insert(k, merged.len());
                    merged.push((k.0, k.1, p));
                }
            }
        }

        // dangling and series vertices
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, (u, v, _)) in merged.iter().enumerate() {
            incident[*u as usize].push(i);
            incident[*v as usize].push(i);
        }
        let mut changed = false;
        let mut removed = vec![false; merged.len()];
        let mut extra = Vec::new();
        let mut used = vec![false; n];
        for x in 0..n {
            if flags[x] != 0 || used[x] || uf.find(x as u32) as usize != x {
                continue;
            }
            let live: Vec<usize> = incident[x].iter().copied().filter(|&i| !removed[i]).collect();
            // do not touch edges whose other endpoint was already rewritten this round
            let other = |i: usize| {
                let (u, v, _) = &merged[i];
                if *u as usize == x { *v } else { *u }
            };
            if live.iter().any(|&i| used[other(i) as usize]) {
                continue;
            }
            match live.len() {
                1 => {
                    removed[live[0]] = true;
                    used[x] = true;
                    changed = true;
                }
                2 => {
                    let (a, b) = (other(live[0]), other(live[1]));
                    let p = &merged[live[0]].2 * &merged[live[1]].2;
                    removed[live[0]] = true;
                    removed[live[1]] = true;
                    extra.push((a.min(b), a.max(b), p));
                    used[x] = true;
                    used[a as usize] = true;
                    used[b as usize] = true;
                    changed = true;
                }
                _ => {}
            }
        }
        let mut edges: Vec<_> = merged
            .into_iter()
            .zip(removed)
            .filter(|(_, r)| !r)
            .map(|(e, _)| e)
            .collect();
        edges.extend(extra);
        net = compact(flags, edges);
        if !changed {
            return Reduced::Net(net);
        }
    }
}

/// Renumbers to the vertices that carry a flag or an edge.
fn compact(flags: Vec<u8>, edges: Vec<(u32, u32, BigRational)>) -> Net {
    let mut keep = flags.iter().map(|&f| f != 0).collect::<Vec<_>>();
    for (u, v, _) in &edges {
        keep[*u as usize] = true;
        keep[*v as usize] = true;
    }
    let mut map = vec![u32::MAX; flags.len()];
    let mut out_flags = Vec::new();
    for (x, k) in keep.iter().enumerate() {
        if *k {
            map[x] = out_flags.len() as u32;
            out_flags.push(flags[x]);
        }
    }
    let edges = edges.into_iter().map(|(u, v, p)| (map[u as usize], map[v as usize], p)).collect();
    Net { flags: out_flags, edges }
}

/// Connected pieces that contain both a source and a target vertex.
fn relevant_components(net: &Net) -> Vec<Net> {
    let n = net.flags.len();
    let mut uf = UnionFind::new(n);
    for (u, v, _) in &net.edges {
        uf.union(*u, *v);
    }
    let mut seen: HashMap<u32, u8> = HashMap::new();
    for x in 0..n as u32 {
        *seen.entry(uf.find(x)).or_insert(0) |= net.flags[x as usize];
    }
    let mut roots: Vec<u32> = seen.iter().filter(|(_, &f)| f == S | T).map(|(&r, _)| r).collect();
    roots.sort_unstable();
    if roots.len() == 1 && seen.len() == 1 {
        return vec![net.clone()];
    }
    roots
        .into_iter()
        .map(|r| {
            let flags = (0..n as u32).map(|x| if uf.find(x) == r { net.flags[x as usize] } else { 0 }).collect();
            let edges = net.edges.iter().filter(|(u, _, _)| uf.find(*u) == r).cloned().collect();
            compact(flags, edges)
        })
        .collect()
}

/// Relabels vertices by first occurrence along flagged vertices then edges.
fn encode(net: &Net) -> Key {
    let n = net.flags.len();
    let mut label = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut visit = |x: u32, label: &mut Vec<u32>| {
        if label[x as usize] == u32::MAX {
            label[x as usize] = next;
            next += 1;
        }
    };
    for (u, v, _) in &net.edges {
        visit(*u, &mut label);
        visit(*v, &mut label);
    }
    for x in 0..n as u32 {
        visit(x, &mut label);
    }
    let mut flags = vec![0u8; n];
    for x in 0..n {
        flags[label[x] as usize] = net.flags[x];
    }
    let mut edges: Vec<_> = net
        .edges
        .iter()
        .map(|(u, v, p)| {
            let (a, b) = (label[*u as usize], label[*v as usize]);
            (a.min(b), a.max(b), p.clone())
        })
        .collect();
    edges.sort();
    (flags, edges)
}
