//! The achievable `(δ, ε)` region: premise deficit against conclusion deficit.

use serde::{Deserialize, Serialize};

use crate::num::Num;

/// Connection probabilities of one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierInput {
    /// `P(0 ↔ A)`.
    pub p_0a: Num,
    /// `min_a P(a ↔ b)`.
    pub min_ab: Num,
    /// `P(0 ↔ b)`.
    pub p_0b: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontierRow {
    /// `1 - min(P(0 ↔ A), min_a P(a ↔ b))`.
    pub delta: Num,
    /// `1 - P(0 ↔ b)`.
    pub epsilon: Num,
    /// Largest `ε` seen at any `δ' <= δ`.
    pub envelope: Num,
}

/// Rows sorted by `δ` with a running maximum of `ε`.
pub fn epsdel_frontier(inputs: &[FrontierInput]) -> Vec<FrontierRow> {
    let mut rows: Vec<(Num, Num)> = inputs
        .iter()
        .map(|i| {
            let m = if i.p_0a.cmp_num(&i.min_ab).is_le() { &i.p_0a } else { &i.min_ab };
            (m.complement(), i.p_0b.complement())
        })
        .collect();
    rows.sort_by(|x, y| x.0.cmp_num(&y.0).then_with(|| x.1.cmp_num(&y.1)));
    let mut best: Option<Num> = None;
    rows.into_iter()
        .map(|(delta, epsilon)| {
            let envelope = match best.take() {
                Some(b) if b.cmp_num(&epsilon).is_ge() => b,
                _ => epsilon.clone(),
            };
            best = Some(envelope.clone());
            FrontierRow { delta, epsilon, envelope }
        })
        .collect()
}

pub fn frontier_tsv(rows: &[FrontierRow]) -> String {
    let mut out = String::from("delta\tepsilon\tenvelope\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\t{}\n", r.delta.to_f64(), r.epsilon.to_f64(), r.envelope.to_f64()));
    }
    out
}
