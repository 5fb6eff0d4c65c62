//! The linear system `Σ_a c_a P(0 ↔ A, a ↔ a') = P(0 ↔ a')` and positivity of
//! its matrix.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::event::EventExpr;
use crate::graph::{ensure_valid, TerminalSpec, VertexId, WeightedGraph};
use crate::num::Num;

/// Pivots below this magnitude count as zero in float mode.
const FLOAT_PIVOT: f64 = 1e-12;
/// Smallest eigenvalue still accepted as nonnegative in float mode.
const EIGEN_FLOOR: f64 = -1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsdDiagnostic {
    pub nonnegative: bool,
    pub rank: usize,
    /// `"exact-ldl"` or `"eigen"`.
    pub method: &'static str,
    /// Smallest pivot (exact) or eigenvalue (float) encountered.
    pub smallest: Option<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientSolution {
    pub a: Vec<VertexId>,
    /// `gram[i][j] = P(0 ↔ A, a_i ↔ a_j)`.
    pub gram: Vec<Vec<Num>>,
    /// `P(0 ↔ a_j)`.
    pub rhs: Vec<Num>,
    pub coefficients: Option<Vec<Num>>,
    pub solvable: bool,
    /// Whether every `c_a >= 0`; `None` when unsolvable.
    pub nonnegative: Option<bool>,
    /// Whether `Σ c_a >= 1`; `None` when unsolvable.
    pub sum_at_least_one: Option<bool>,
    pub psd_certificate: PsdDiagnostic,
}

impl CoefficientSolution {
    pub fn sum(&self) -> Option<Num> {
        self.coefficients.as_ref().map(|c| c.iter().cloned().sum())
    }

    /// Coefficients scaled to sum to one.
    pub fn normalized(&self) -> Option<Vec<Num>> {
        let c = self.coefficients.as_ref()?;
        let s = self.sum()?;
        c.iter().map(|x| x.checked_div(&s)).collect()
    }
}

#[allow(clippy::needless_range_loop)]
pub fn solve_coefficients(engine: &Engine, g: &WeightedGraph, t: &TerminalSpec) -> Result<CoefficientSolution> {
    ensure_valid(g, t)?;
    if g.directed {
        return Err(Error::DirectedInput("coefficient system"));
    }
    if t.a.len() < 2 {
        return Err(Error::Precondition("the coefficient system needs |A| >= 2".into()));
    }
    let k = t.a.len();
    let a: Vec<&str> = t.a.iter().map(String::as_str).collect();
    let zero_a = EventExpr::conn(&[&t.zero], &a);
    let mut evs = Vec::new();
    for i in 0..k {
        for j in i..k {
            evs.push(zero_a.clone().and(EventExpr::conn(&[a[i]], &[a[j]])));
        }
    }
    evs.extend(a.iter().map(|x| EventExpr::conn(&[&t.zero], &[x])));
    let ps = engine.probabilities(g, &evs)?;
    let mut gram = vec![vec![Num::zero(); k]; k];
    let mut it = ps.iter();
    for i in 0..k {
        for j in i..k {
            let v = it.next().expect("one value per pair").clone();
            gram[i][j] = v.clone();
            gram[j][i] = v;
        }
    }
    let rhs: Vec<Num> = it.cloned().collect();
    // gram is symmetric, so Σ_a c_a gram[a][a'] = rhs[a'] is gram · c = rhs
    let coefficients = solve(&gram, &rhs);
    let psd_certificate = gram_psd_check(&gram);
    let (nonnegative, sum_at_least_one) = match &coefficients {
        Some(c) => {
            let s: Num = c.iter().cloned().sum();
            (Some(c.iter().all(|x| !x.is_negative())), Some(!(&s - &Num::one()).is_negative()))
        }
        None => (None, None),
    };
    Ok(CoefficientSolution {
        a: t.a.clone(),
        gram,
        rhs,
        solvable: coefficients.is_some(),
        coefficients,
        nonnegative,
        sum_at_least_one,
        psd_certificate,
    })
}

fn is_zero_pivot(x: &Num) -> bool {
    match x {
        Num::Exact(_) => x.is_zero(),
        Num::Float(f) => f.abs() < FLOAT_PIVOT,
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
#[allow(clippy::needless_range_loop)]
fn solve(m: &[Vec<Num>], rhs: &[Num]) -> Option<Vec<Num>> {
    let n = rhs.len();
    let mut aug: Vec<Vec<Num>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !is_zero_pivot(&aug[r][col]))
            .max_by(|&x, &y| aug[x][col].abs().cmp_num(&aug[y][col].abs()))?;
        aug.swap(col, pivot);
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].checked_div(&aug[col][col])?;
            for c in col..=n {
                let d = &f * &aug[col][c];
                aug[r][c] = &aug[r][c] - &d;
            }
        }
    }
    (0..n).map(|i| aug[i][n].checked_div(&aug[i][i])).collect()
}

/// Nonnegative-definiteness of a symmetric matrix: exact symmetric pivoted
/// elimination when every entry is exact, eigenvalues otherwise.
pub fn gram_psd_check(gram: &[Vec<Num>]) -> PsdDiagnostic {
    if gram.iter().flatten().all(Num::is_exact) {
        exact_ldl(gram)
    } else {
        eigen(gram)
    }
}

fn exact_ldl(gram: &[Vec<Num>]) -> PsdDiagnostic {
    let mut m: Vec<Vec<Num>> = gram.to_vec();
    let mut live: Vec<usize> = (0..m.len()).collect();
    let mut rank = 0;
    let mut smallest: Option<Num> = None;
    while !live.is_empty() {
        if live.iter().any(|&i| m[i][i].is_negative()) {
            return PsdDiagnostic { nonnegative: false, rank, method: "exact-ldl", smallest };
        }
        let Some(&k) = live.iter().max_by(|&&x, &&y| m[x][x].cmp_num(&m[y][y])) else { break };
        if m[k][k].is_zero() {
            // every remaining diagonal is zero, so the rest must vanish
            let ok = live.iter().all(|&i| live.iter().all(|&j| m[i][j].is_zero()));
            return PsdDiagnostic { nonnegative: ok, rank, method: "exact-ldl", smallest };
        }
        let pivot = m[k][k].clone();
        smallest = Some(match smallest {
            Some(s) if s.cmp_num(&pivot).is_le() => s,
            _ => pivot.clone(),
        });
        live.retain(|&i| i != k);
        for &i in &live {
            for &j in &live {
                let d = (&m[i][k] * &m[k][j]).checked_div(&pivot).expect("nonzero pivot");
                m[i][j] = &m[i][j] - &d;
            }
        }
        rank += 1;
    }
    PsdDiagnostic { nonnegative: true, rank, method: "exact-ldl", smallest }
}

fn eigen(gram: &[Vec<Num>]) -> PsdDiagnostic {
    let n = gram.len();
    if n == 0 {
        return PsdDiagnostic { nonnegative: true, rank: 0, method: "eigen", smallest: None };
    }
    let m = DMatrix::from_fn(n, n, |i, j| gram[i][j].to_f64());
    let values = m.symmetric_eigen().eigenvalues;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let rank = values.iter().filter(|v| v.abs() > FLOAT_PIVOT).count();
    PsdDiagnostic { nonnegative: min >= EIGEN_FLOOR, rank, method: "eigen", smallest: Some(Num::Float(min)) }
}
