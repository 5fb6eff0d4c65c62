//! `perc`: exact and sampled connection probabilities, inequality checks and
//! counterexample search.
//!
//! Exit codes: 0 completed without violation, 1 some checked inequality was
//! violated, 2 usage or input error, 3 resource limit.

mod lang;

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use perc_core::checkers::{
    check_gluing_step, check_good_quadruple, check_mcp, check_postfkg, check_prefkg, check_prefkga,
    check_prefkga_candidates, concavity_probe, epsdel_frontier, frontier_tsv, influence_bound_check, lemma_suite,
    solve_coefficients, CheckReport, ConjectureId, FrontierInput, McpFamily,
};
use perc_core::graph::{
    degree3_reduce, gadget_size_bound, half_edge_gadget, parse_graph, pendant_inflate, serialize_graph, validate,
    GraphFile,
};
use perc_core::montecarlo::{estimate_check, estimate_event};
use perc_core::search::{check_target, campaign, frontier_input, CampaignParams, GeneratorParams, ProbLaw};
use perc_core::{Engine, Error, EventExpr, Mode, Num, Result, TerminalSpec, WeightedGraph};

const EVENT_HELP: &str = "\
Events are whitespace-separated prefix terms:
  conn S T         a vertex of S is connected to a vertex of T
  reach S T        directed reachability from S to T
  cluster>= v k    the cluster of v has at least k vertices (or cluster≥)
  edge i           edge number i (0-based, file order) is open
  pivotal u v E    opening an extra u-v edge changes E
  not E, and E F, or E F
S and T are comma-separated vertex ids, e.g. `and conn 0 a1,a2 not edge 3`.";

#[derive(Parser)]
#[command(name = "perc", version, about = "Connection probabilities and correlation inequalities in percolation graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Arithmetic for the exact engine.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Largest number of random edges enumerated (overrides PERC_MAX_EDGES).
    #[arg(long, global = true)]
    max_edges: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Args)]
struct EventArgs {
    /// Event in the prefix language (see `perc prob --help`).
    #[arg(long, conflicts_with = "event_file")]
    event: Option<String>,
    /// JSON event tree.
    #[arg(long)]
    event_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    ClusterSize,
    Threshold,
    Indicator,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceOp {
    HalfEdge,
    Degree3,
    Pendant,
}

#[derive(Subcommand)]
enum Cmd {
    /// Probability of an event.
    #[command(after_help = EVENT_HELP)]
    Prob {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        event: EventArgs,
    },
    /// Evaluate one inequality on a graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        /// postfkg, prefkg, prefkga, mcp, good-quadruple, gluing-step,
        /// gluing-naive or influence-bound.
        #[arg(long)]
        conjecture: String,
        /// Monotone cluster property for mcp.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Threshold k for mcp (implies --family threshold).
        #[arg(long)]
        k: Option<usize>,
        /// Vertex pair `v,w` for the gluing checks; every edge when omitted.
        #[arg(long)]
        pair: Option<String>,
        /// Edge for the gluing checks; adds the concavity probe.
        #[arg(long, conflicts_with = "pair")]
        edge: Option<usize>,
        /// Also test alternative choices of `a` (prefkga).
        #[arg(long)]
        candidates: bool,
    },
    /// Random instances of the auxiliary lemmas.
    Lemmas {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 1)]
        draws: u64,
    },
    /// Solve the coefficient system and test its matrix for positivity.
    Coeffs {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Campaign of random instances with coordinate ascent.
    Search {
        #[arg(long)]
        conjecture: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// half, dyadic-K or uniform-grid[-K].
        #[arg(long, default_value = "dyadic-3")]
        law: String,
        #[arg(long)]
        a_size: Option<usize>,
        #[arg(long)]
        directed: bool,
        /// Number of instances.
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ascent passes per instance.
        #[arg(long, default_value_t = 10)]
        iters: usize,
        /// Add wall-clock timestamps to the records.
        #[arg(long)]
        timestamps: bool,
    },
    /// Monte Carlo estimate of an event or of postfkg/prefkg/prefkga.
    #[command(after_help = EVENT_HELP)]
    Mc {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        event: EventArgs,
        #[arg(long, conflicts_with_all = ["event", "event_file"])]
        conjecture: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Graph reductions: half-edge gadgets, degree-3 form, pendant inflation.
    Reduce {
        #[arg(long, value_enum)]
        op: ReduceOp,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Target probability for half-edge.
        #[arg(long)]
        p: Option<String>,
        /// Accuracy for half-edge.
        #[arg(long)]
        eps: Option<String>,
        /// Number of pendant vertices attached to b.
        #[arg(long)]
        k: Option<usize>,
    },
    /// (δ, ε) frontier TSV from a postfkg campaign file.
    Frontier {
        /// Campaign JSONL.
        #[arg(long)]
        input: PathBuf,
    },
}

struct Ctx {
    engine: Engine,
    mode: Mode,
    out: Option<PathBuf>,
}

impl Ctx {
    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text)?,
            None => {
                let mut s = io::stdout().lock();
                s.write_all(text.as_bytes())?;
                s.flush()?;
            }
        }
        Ok(())
    }

    /// Pretty JSON with `"mode": "float"` added in float mode.
    fn emit(&self, v: impl Serialize) -> Result<()> {
        let mut v = serde_json::to_value(v)?;
        if self.mode == Mode::Float {
            if let Value::Object(m) = &mut v {
                m.insert("mode".into(), json!("float"));
            }
        }
        self.write(&(serde_json::to_string_pretty(&v)? + "\n"))
    }
}

fn load(path: &Path) -> Result<(WeightedGraph, TerminalSpec)> {
    let bytes = fs::read(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let (g, t) = parse_graph(&bytes)?;
    let problems = validate(&g, &t);
    if !problems.is_empty() {
        return Err(Error::InvalidGraph(problems));
    }
    Ok((g, t))
}

fn event(a: &EventArgs) -> Result<EventExpr> {
    match (&a.event, &a.event_file) {
        (Some(s), None) => lang::parse_event(s),
        (None, Some(p)) => Ok(serde_json::from_slice(&fs::read(p)?)?),
        _ => Err(Error::Parse("give exactly one of --event and --event-file".into())),
    }
}

fn conjecture(s: &str) -> Result<ConjectureId> {
    s.parse()
}

fn num(s: &Option<String>, flag: &str) -> Result<Num> {
    let s = s.as_deref().ok_or_else(|| Error::Parse(format!("{flag} is required")))?;
    s.parse().map_err(|_| Error::Parse(format!("{flag}: `{s}` is not a number")))
}

fn pair(s: &str) -> Result<(String, String)> {
    s.split_once(',')
        .map(|(v, w)| (v.trim().to_string(), w.trim().to_string()))
        .ok_or_else(|| Error::Parse(format!("--pair expects `v,w`, got `{s}`")))
}

/// Runs one command; `Ok(true)` when an inequality was violated.
fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Precondition(format!("cannot configure {n} threads: {e}")))?;
    }
    let mode = match cli.common.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    let mut engine = Engine::default().with_mode(mode);
    if let Some(m) = cli.common.max_edges {
        engine = engine.with_max_edges(m);
    }
    let cx = Ctx { engine, mode, out: cli.common.out };
    let e = &cx.engine;

    match cli.cmd {
        Cmd::Prob { graph, event: ev } => {
            let ev = event(&ev)?;
            let (g, _) = load(&graph)?;
            let p = e.event_probability(&g, &ev)?;
            cx.emit(json!({ "event": ev, "probability": p }))?;
            Ok(false)
        }
        Cmd::Check { graph, conjecture: c, family, k, pair: pr, edge, candidates } => {
            let id = conjecture(&c)?;
            let pr = pr.as_deref().map(pair).transpose()?;
            let (g, t) = load(&graph)?;
            check(&cx, &g, &t, id, family, k, pr, edge, candidates)
        }
        Cmd::Lemmas { graph, seed, draws } => {
            let (g, t) = load(&graph)?;
            let mut suites = Vec::new();
            for s in seed..seed.saturating_add(draws.max(1)) {
                suites.push(lemma_suite(e, &g, &t, s)?);
            }
            let reports: Vec<&CheckReport> = suites.iter().flat_map(|s| &s.reports).collect();
            let violations = reports.iter().filter(|r| r.violated()).count();
            cx.emit(json!({
                "attempted": suites.iter().map(|s| s.attempted).sum::<usize>(),
                "skipped": suites.iter().map(|s| s.skipped).sum::<usize>(),
                "violations": violations,
                "reports": reports,
            }))?;
            Ok(violations > 0)
        }
        Cmd::Coeffs { graph } => {
            let (g, t) = load(&graph)?;
            let s = solve_coefficients(e, &g, &t)?;
            let bad = !s.psd_certificate.nonnegative || s.nonnegative == Some(false) || s.sum_at_least_one == Some(false);
            let normalized = s.normalized();
            let mut v = serde_json::to_value(&s)?;
            v["normalized"] = json!(normalized);
            cx.emit(v)?;
            Ok(bad)
        }
        Cmd::Search { conjecture: c, n, m, law, a_size, directed, budget, seed, iters, timestamps } => {
            let id = conjecture(&c)?;
            let law: ProbLaw = law.parse()?;
            let p = CampaignParams {
                generator: GeneratorParams { n, m, directed, law, a_size },
                conjecture: id,
                budget,
                seed,
                iterations: iters,
                timestamps,
            };
            // records go to --out when given, with the summary on stdout;
            // otherwise records on stdout and the summary on stderr
            let summary = match &cx.out {
                Some(path) => perc_core::search::campaign_to_path(e, &p, path)?,
                None => campaign(e, &p, &mut io::BufWriter::new(io::stdout().lock()))?,
            };
            // the frontier inputs stay in the record file
            let mut shown = serde_json::to_value(&summary)?;
            if let Value::Object(m) = &mut shown {
                m.remove("frontier");
            }
            let text = serde_json::to_string_pretty(&shown)? + "\n";
            if cx.out.is_some() {
                io::stdout().lock().write_all(text.as_bytes())?;
            } else {
                io::stderr().lock().write_all(text.as_bytes())?;
            }
            if summary.violations > 0 {
                eprintln!("perc: {} violation(s) at instance index {:?}", summary.violations, summary.violating);
            }
            Ok(summary.violations > 0)
        }
        Cmd::Mc { graph, event: ev, conjecture: c, samples, seed } => {
            let id = c.as_deref().map(conjecture).transpose()?;
            let ev = if id.is_none() { Some(event(&ev)?) } else { None };
            let (g, t) = load(&graph)?;
            match (id, ev) {
                (Some(id), _) => {
                    let r = estimate_check(&g, &t, id, samples, seed)?;
                    cx.emit(&r)?;
                    Ok(r.margin.is_negative())
                }
                (None, Some(ev)) => {
                    cx.emit(estimate_event(&g, &ev, samples, seed)?)?;
                    Ok(false)
                }
                (None, None) => unreachable!("an event is parsed whenever no conjecture is given"),
            }
        }
        Cmd::Reduce { op, graph, p, eps, k } => {
            match op {
                ReduceOp::HalfEdge => {
                    let (p, eps) = (num(&p, "--p")?, num(&eps, "--eps")?);
                    let gd = half_edge_gadget(&p, &eps)?;
                    let t = TerminalSpec { zero: gd.source.clone(), b: gd.sink.clone(), a: vec![gd.sink.clone()] };
                    cx.emit(json!({
                        "graph": GraphFile::from_parts(&gd.graph, &t),
                        "value": Num::Exact(gd.value),
                        "edges": gd.graph.edges.len(),
                        "edge_bound": gadget_size_bound(&eps),
                    }))?;
                }
                ReduceOp::Degree3 | ReduceOp::Pendant => {
                    let path = graph.ok_or_else(|| Error::Parse("--graph is required".into()))?;
                    let (g, t) = load(&path)?;
                    let h = if matches!(op, ReduceOp::Degree3) {
                        degree3_reduce(&g)?
                    } else {
                        let k = k.ok_or_else(|| Error::Parse("--k is required".into()))?;
                        pendant_inflate(&g, &t.b, k)?
                    };
                    cx.write(&(serialize_graph(&h, &t) + "\n"))?;
                }
            }
            Ok(false)
        }
        Cmd::Frontier { input } => {
            let f = fs::File::open(&input).map_err(|e| Error::Parse(format!("cannot read {}: {e}", input.display())))?;
            let mut inputs: Vec<FrontierInput> = Vec::new();
            for line in BufReader::new(f).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let v: Value = serde_json::from_str(&line)?;
                let r: CheckReport = serde_json::from_value(v["report"].clone())
                    .map_err(|e| Error::Parse(format!("not a campaign record: {e}")))?;
                inputs.extend(frontier_input(&r));
            }
            cx.write(&frontier_tsv(&epsdel_frontier(&inputs)))?;
            Ok(false)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check(
    cx: &Ctx,
    g: &WeightedGraph,
    t: &TerminalSpec,
    id: ConjectureId,
    family: Option<FamilyArg>,
    k: Option<usize>,
    pr: Option<(String, String)>,
    edge: Option<usize>,
    candidates: bool,
) -> Result<bool> {
    let e = &cx.engine;
    let report = match id {
        ConjectureId::Postfkg => check_postfkg(e, g, t)?,
        ConjectureId::Prefkg => check_prefkg(e, g, t)?,
        ConjectureId::Prefkga if candidates => check_prefkga_candidates(e, g, t)?,
        ConjectureId::Prefkga => check_prefkga(e, g, t)?,
        ConjectureId::Mcp => {
            let f = match (family, k) {
                (Some(FamilyArg::Threshold), None) => return Err(Error::Parse("--family threshold needs --k".into())),
                (Some(FamilyArg::Threshold) | None, Some(k)) => McpFamily::Threshold(k),
                (Some(FamilyArg::ClusterSize) | None, None) => McpFamily::ClusterSize,
                (Some(FamilyArg::Indicator), None) => McpFamily::IndicatorOfB,
                (Some(_), Some(_)) => return Err(Error::Parse("--k only applies to --family threshold".into())),
            };
            check_mcp(e, g, t, f)?
        }
        ConjectureId::GoodQuadruple => check_good_quadruple(e, g, t)?,
        ConjectureId::InfluenceBound => influence_bound_check(e, g, t)?,
        ConjectureId::GluingStep | ConjectureId::GluingNaive => {
            let pr = match (pr, edge) {
                (Some(p), _) => Some(p),
                (None, Some(i)) => {
                    let ed = g.require_edge(i)?;
                    Some((ed.u.clone(), ed.v.clone()))
                }
                (None, None) => None,
            };
            let Some((v, w)) = pr else {
                let r = check_target(e, g, t, id)?;
                cx.emit(&r)?;
                return Ok(r.violated());
            };
            let both = check_gluing_step(e, g, t, (&v, &w))?;
            let violated = both.step.violated() || both.naive.violated();
            let mut out = serde_json::to_value(&both)?;
            if let Some(i) = edge {
                out["concavity"] = serde_json::to_value(concavity_probe(e, g, t, i, Some(&v))?)?;
            }
            cx.emit(out)?;
            return Ok(violated);
        }
        other => {
            let hint = match other {
                ConjectureId::EpsdelFrontier => "use `perc frontier`",
                _ => "use `perc lemmas`",
            };
            return Err(Error::Parse(format!("`{other}` is not checked by `perc check`; {hint}")));
        }
    };
    cx.emit(&report)?;
    Ok(report.violated())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("perc: {e}");
            ExitCode::from(if e.is_resource_limit() { 3 } else { 2 })
        }
    }
}
