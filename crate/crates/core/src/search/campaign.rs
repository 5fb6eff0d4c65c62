//! Campaigns: many generated instances, each ascended and checked, streamed
//! to JSONL.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ascend, check_target, random_instance_with, GeneratorParams};
use crate::checkers::{CheckReport, ConjectureId, FrontierInput};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::graph::GraphFile;
use crate::num::{Mode, Num};

pub const RECORD_VERSION: u32 = 1;

/// Instances processed in parallel before their records are written.
const CHUNK: u64 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignParams {
    pub generator: GeneratorParams,
    pub conjecture: ConjectureId,
    /// Number of instances.
    pub budget: u64,
    /// Instance `i` is generated from seed `seed + i`, so a campaign resumes
    /// by raising `seed`.
    pub seed: u64,
    /// Ascent passes per instance; 0 checks the generated instance as is.
    pub iterations: usize,
    /// Adds a wall-clock `timestamp` to each record.
    pub timestamps: bool,
}

/// One line of a campaign file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchRecord {
    pub v: u32,
    pub index: u64,
    pub seed: u64,
    pub conjecture: ConjectureId,
    /// The instance after ascent.
    pub instance: GraphFile,
    pub report: CheckReport,
    pub trace_len: usize,
    /// Negative margin with the premise met, confirmed in exact arithmetic.
    pub violation: bool,
    /// Margin recomputed exactly when a float run found it negative.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_margin: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub instances: u64,
    pub records: u64,
    /// Instances the target does not apply to, such as gluing on a graph
    /// without edges.
    pub skipped: u64,
    pub violations: u64,
    pub min_margin: Option<Num>,
    /// Indices of the violating records.
    pub violating: Vec<u64>,
    /// Inputs for the `(δ, ε)` frontier; `postfkg` campaigns only.
    pub frontier: Vec<FrontierInput>,
}

fn run_one(engine: &Engine, p: &CampaignParams, index: u64) -> Result<Option<SearchRecord>> {
    let seed = p.seed.wrapping_add(index);
    let (g, t) = random_instance_with(&p.generator, seed)?;
    let ascent = match ascend(engine, &g, &t, p.conjecture, p.iterations) {
        Ok(a) => a,
        Err(Error::Precondition(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let report = ascent.report;
    let mut exact_margin = None;
    let mut violation = report.violated();
    if violation && !report.exact {
        let exact = engine.clone().with_mode(Mode::Exact);
        let r = check_target(&exact, &ascent.graph, &t, p.conjecture)?;
        violation = r.violated();
        exact_margin = Some(r.margin);
    }
    let timestamp = p
        .timestamps
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    Ok(Some(SearchRecord {
        v: RECORD_VERSION,
        index,
        seed,
        conjecture: p.conjecture,
        instance: GraphFile::from_parts(&ascent.graph, &t),
        report,
        trace_len: ascent.trace.len(),
        violation,
        exact_margin,
        timestamp,
    }))
}

/// Frontier coordinates of a `postfkg` report.
pub fn frontier_input(r: &CheckReport) -> Option<FrontierInput> {
    let p_0b: Num = serde_json::from_value(r.auxiliary.get("p_0b")?.clone()).ok()?;
    let p_0a: Num = serde_json::from_value(r.auxiliary.get("p_0A")?.clone()).ok()?;
    let per: BTreeMap<String, String> = serde_json::from_value(r.auxiliary.get("p_ab")?.clone()).ok()?;
    let values: Vec<Num> = per.values().map(|s| s.parse().ok()).collect::<Option<_>>()?;
    let min_ab = Num::min_of(&values)?;
    Some(FrontierInput { p_0a, min_ab, p_0b })
}

/// Runs the campaign, writing one JSON record per line to `out`. Records
/// appear in instance order whatever the thread count.
pub fn campaign(engine: &Engine, p: &CampaignParams, out: &mut dyn Write) -> Result<CampaignSummary> {
    let mut s = CampaignSummary { instances: p.budget, ..Default::default() };
    let mut start = 0;
    while start < p.budget {
        let end = (start + CHUNK).min(p.budget);
        let recs: Vec<Result<Option<SearchRecord>>> = (start..end).into_par_iter().map(|i| run_one(engine, p, i)).collect();
        for rec in recs {
            let Some(rec) = rec? else {
                s.skipped += 1;
                continue;
            };
            serde_json::to_writer(&mut *out, &rec)?;
            out.write_all(b"\n")?;
            s.records += 1;
            if rec.violation {
                s.violations += 1;
                s.violating.push(rec.index);
            }
            let m = rec.exact_margin.as_ref().unwrap_or(&rec.report.margin);
            if s.min_margin.as_ref().is_none_or(|x| m.cmp_num(x).is_lt()) {
                s.min_margin = Some(m.clone());
            }
            if p.conjecture == ConjectureId::Postfkg {
                s.frontier.extend(frontier_input(&rec.report));
            }
        }
        start = end;
    }
    out.flush()?;
    Ok(s)
}

pub fn campaign_to_path(engine: &Engine, p: &CampaignParams, path: &Path) -> Result<CampaignSummary> {
    let mut w = BufWriter::new(File::create(path)?);
    campaign(engine, p, &mut w)
}
