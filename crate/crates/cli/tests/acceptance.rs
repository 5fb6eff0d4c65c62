//! Acceptance suite: every criterion runs at its stated scale and prints one
//! PASS or FAIL line. The process exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::io;
use std::process::Command;
use std::time::{Duration, Instant};

use perc_core::checkers::{
    check_good_quadruple, check_mcp, check_postfkg, check_prefkga, influence_bound_check, lemma_suite, solve_coefficients, ConjectureId,
    McpFamily,
};
use perc_core::graph::{degree3_reduce, gadget_size_bound, half_edge_gadget, parse_graph, pendant_inflate};
use perc_core::montecarlo::estimate_event;
use perc_core::search::{
    antenna_instance, campaign, diamond_instance, random_instance, random_instance_with, separating_instance, CampaignParams,
    GeneratorParams, ProbLaw,
};
use perc_core::{Edge, Engine, EventExpr, Num, NumExpr, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn exact() -> Engine {
    Engine::exact()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:.2?}, limit {limit:?}");
    Ok(())
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn directed_counterexample() -> Outcome {
    let start = Instant::now();
    let text = std::fs::read(fixture("directed_cx.json")).map_err(err)?;
    let (g, t) = parse_graph(&text).map_err(err)?;
    let e = exact();
    let reach = e.event_probability(&g, &EventExpr::reach(&["0"], &["b"])).map_err(err)?;
    ensure!(reach == Num::ratio(7, 16), "P(0 -> b) = {reach}");
    let r = check_postfkg(&e, &g, &t).map_err(err)?;
    ensure!(r.rhs == Num::ratio(15, 32), "rhs = {}", r.rhs);
    ensure!(r.margin == Num::ratio(-1, 32), "margin = {}", r.margin);

    let out = Command::new(env!("CARGO_BIN_EXE_perc"))
        .args(["check", "--conjecture", "postfkg", "--graph", &fixture("directed_cx.json")])
        .output()
        .map_err(err)?;
    ensure!(out.status.code() == Some(1), "exit code {:?}", out.status.code());
    let v: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    ensure!(v["margin"] == "-1/32" && v["lhs"] == "7/16" && v["rhs"] == "15/32", "cli printed {v}");
    within(start, Duration::from_secs(1), "directed counterexample")?;
    Ok(format!("P(0->b) = 7/16, rhs = 15/32, margin = -1/32, exit 1 in {:.0?}", start.elapsed()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let e = exact();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let count = 500;
    for seed in 0..count {
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(1..=12.min(n * (n - 1) / 2));
        let (g, t) = random_instance(n, m, seed, false, ProbLaw::Dyadic(3)).map_err(err)?;
        let s: Vec<&str> = std::iter::once(t.zero.as_str()).collect();
        let a: Vec<&str> = t.a.iter().map(String::as_str).collect();
        for target in [vec![t.b.as_str()], a] {
            let by_enum = e.event_probability(&g, &EventExpr::conn(&s, &target)).map_err(err)?;
            let by_dc = e.connection_probability_dc(&g, &s, &target).map_err(err)?;
            ensure!(by_enum == by_dc, "seed {seed}: enumeration {by_enum} vs deletion-contraction {by_dc}");
        }
    }
    within(start, Duration::from_secs(60), "oracle equivalence")?;
    Ok(format!("{count} graphs x 2 queries agree exactly in {:.1?}", start.elapsed()))
}

fn two_point_prefkga() -> Outcome {
    let e = exact();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut min: Option<Num> = None;
    let count = 500;
    for seed in 0..count {
        let n = rng.gen_range(4..=7);
        let m = rng.gen_range(2..=12.min(n * (n - 1) / 2));
        let p = GeneratorParams { n, m, directed: false, law: ProbLaw::Dyadic(3), a_size: Some(2) };
        let (g, t) = random_instance_with(&p, seed).map_err(err)?;
        let r = check_prefkga(&e, &g, &t).map_err(err)?;
        ensure!(!r.margin.is_negative(), "seed {seed}: margin {}", r.margin);
        if min.as_ref().is_none_or(|x| r.margin.cmp_num(x).is_lt()) {
            min = Some(r.margin);
        }
    }
    Ok(format!("{count} instances, 0 violations, min margin {}", min.unwrap()))
}

fn separating_prefkga() -> Outcome {
    let e = exact();
    let count = 200;
    for seed in 0..count {
        let (g, t) = separating_instance(seed, ProbLaw::Dyadic(3));
        let r = check_prefkga(&e, &g, &t).map_err(err)?;
        ensure!(!r.margin.is_negative(), "seed {seed}: margin {}", r.margin);
    }
    Ok(format!("{count} separating |A|=3 instances, 0 violations"))
}

fn good_quadruples() -> Outcome {
    let e = exact();
    let count = 100;
    for seed in 0..count {
        for (name, (g, t)) in [("diamond", diamond_instance(seed, ProbLaw::Dyadic(3))), ("antenna", antenna_instance(seed, ProbLaw::Dyadic(3)))] {
            let r = check_good_quadruple(&e, &g, &t).map_err(err)?;
            ensure!(!r.margin.is_negative(), "{name} seed {seed}: margin {}", r.margin);
        }
    }
    Ok(format!("{count} diamond + {count} antenna instances, 0 violations"))
}

fn three_point_coefficients() -> Outcome {
    let e = exact();
    let (mut solved, mut tried) = (0, 0u64);
    while solved < 200 {
        ensure!(tried < 5000, "only {solved} nonsingular instances in {tried} draws");
        let p = GeneratorParams { n: 6, m: 8, directed: false, law: ProbLaw::Dyadic(3), a_size: Some(3) };
        let (g, t) = random_instance_with(&p, tried).map_err(err)?;
        let s = solve_coefficients(&e, &g, &t).map_err(err)?;
        ensure!(s.psd_certificate.nonnegative && s.psd_certificate.method == "exact-ldl", "seed {tried}: gram not nonnegative definite");
        tried += 1;
        if !s.solvable {
            continue;
        }
        ensure!(s.nonnegative == Some(true), "seed {}: negative coefficient {:?}", tried - 1, s.coefficients);
        ensure!(s.sum_at_least_one == Some(true), "seed {}: coefficient sum {:?}", tried - 1, s.sum());
        solved += 1;
    }
    Ok(format!("{solved} nonsingular instances (of {tried} drawn, all PSD): c_a >= 0, sum >= 1"))
}

fn two_point_coefficients() -> Outcome {
    let e = exact();
    let (mut matched, mut tried) = (0, 0u64);
    while matched < 100 {
        ensure!(tried < 5000, "only {matched} usable instances in {tried} draws");
        let p = GeneratorParams { n: 5, m: 6, directed: false, law: ProbLaw::Dyadic(3), a_size: Some(2) };
        let (g, t) = random_instance_with(&p, 10_000 + tried).map_err(err)?;
        tried += 1;
        let phi = e.phi_table(&g, &t).map_err(err)?;
        let (Some(p1), Some(p2)) = (phi.get(&[&t.a[0]]), phi.get(&[&t.a[1]])) else { continue };
        let total = p1 + p2;
        let s = solve_coefficients(&e, &g, &t).map_err(err)?;
        let (Some(alpha), Some(c)) = (p1.checked_div(&total), s.normalized()) else { continue };
        let beta = p2.checked_div(&total).expect("nonzero total");
        ensure!(c[0] == alpha && c[1] == beta, "seed {}: normalized {:?} vs ({alpha}, {beta})", tried - 1, c);
        matched += 1;
    }
    Ok(format!("{matched} instances match alpha = phi(1)/(phi(1)+phi(2)) exactly"))
}

fn influence_bound() -> Outcome {
    let e = exact();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (count, mut vacuous) = (200, 0);
    for seed in 0..count {
        let n = rng.gen_range(4..=6);
        let m = rng.gen_range(2..=10.min(n * (n - 1) / 2));
        let (g, t) = random_instance(n, m, 20_000 + seed, false, ProbLaw::Dyadic(3)).map_err(err)?;
        let r = influence_bound_check(&e, &g, &t).map_err(err)?;
        ensure!(!r.violated(), "seed {seed}: margin {}", r.margin);
        if r.premise_met == Some(false) {
            vacuous += 1;
        }
    }
    Ok(format!("{count} instances hold within 1e-9 ({vacuous} with an empty edge set)"))
}

fn lemmas() -> Outcome {
    let e = exact();
    let (mut attempted, mut skipped) = (0, 0);
    let mut per: BTreeMap<ConjectureId, usize> = BTreeMap::new();
    let count = 200;
    for seed in 0..count {
        let p = GeneratorParams { n: 6, m: 9, directed: false, law: ProbLaw::Dyadic(2), a_size: Some(3) };
        let (g, t) = random_instance_with(&p, 30_000 + seed).map_err(err)?;
        let s = lemma_suite(&e, &g, &t, seed).map_err(err)?;
        for r in &s.reports {
            ensure!(!r.violated(), "seed {seed}: {} margin {}", r.conjecture, r.margin);
            *per.entry(r.conjecture).or_default() += 1;
        }
        attempted += s.attempted;
        skipped += s.skipped;
    }
    let kinds = [
        ConjectureId::LemmaClusterI,
        ConjectureId::LemmaClusterIi,
        ConjectureId::LemmaPhiSuperadditive,
        ConjectureId::LemmaCompareI,
        ConjectureId::LemmaCompareIi,
        ConjectureId::LemmaPivotal,
        ConjectureId::LemmaPivotalGlued,
        ConjectureId::LemmaSigma,
    ];
    for k in kinds {
        ensure!(per.get(&k).copied().unwrap_or(0) > 0, "no instance of {k}");
    }
    ensure!(skipped * 5 < attempted, "{skipped} of {attempted} draws skipped");
    let counts: Vec<String> = per.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Ok(format!("{count} graphs, {attempted} draws, {skipped} skipped; {}", counts.join(" ")))
}

fn cluster_properties() -> Outcome {
    let e = exact();
    let count = 200;
    for seed in 0..count {
        let two = GeneratorParams { n: 6, m: 8, directed: false, law: ProbLaw::Dyadic(3), a_size: Some(2) };
        let (g, t) = random_instance_with(&two, 40_000 + seed).map_err(err)?;
        let r = check_mcp(&e, &g, &t, McpFamily::ClusterSize).map_err(err)?;
        ensure!(!r.margin.is_negative(), "cluster-size seed {seed}: margin {}", r.margin);
        let size = 1 + seed as usize % 4;
        let small = GeneratorParams { n: 6, m: 8, directed: false, law: ProbLaw::Dyadic(3), a_size: Some(size) };
        let (g, t) = random_instance_with(&small, 50_000 + seed).map_err(err)?;
        for k in 1..=4 {
            let r = check_mcp(&e, &g, &t, McpFamily::Threshold(k)).map_err(err)?;
            ensure!(!r.margin.is_negative(), "threshold {k} seed {seed}: margin {}", r.margin);
        }
    }
    Ok(format!("{count} cluster-size (|A|=2) and {count} x 4 threshold (|A|<=4) instances, 0 violations"))
}

fn pendant_inflation() -> Outcome {
    let e = exact();
    let count = 50;
    for seed in 0..count {
        let (g, t) = random_instance(5, 6, 60_000 + seed, false, ProbLaw::Dyadic(3)).map_err(err)?;
        for v in &g.vertices {
            let base = e.expectation(&g, &NumExpr::cluster_size(v)).map_err(err)?;
            let reach = e.event_probability(&g, &EventExpr::conn(&[v], &[&t.b])).map_err(err)?;
            for k in [0usize, 1, 3, 10] {
                let h = pendant_inflate(&g, &t.b, k).map_err(err)?;
                let got = e.expectation(&h, &NumExpr::cluster_size(v)).map_err(err)?;
                let want = &base + &(&Num::int(k as i64) * &reach);
                ensure!(got == want, "seed {seed} v {v} k {k}: {got} vs {want}");
            }
        }
    }
    Ok(format!("{count} instances, every vertex, k in {{0,1,3,10}}"))
}

fn reductions() -> Outcome {
    let e = exact();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..100 {
        let d: i64 = if i % 2 == 0 { 1 << rng.gen_range(2..=12) } else { rng.gen_range(3..=997) };
        let p = Num::ratio(rng.gen_range(1..d), d);
        for eps in [Num::ratio(1, 16), Num::ratio(1, 256)] {
            let gadget = half_edge_gadget(&p, &eps).map_err(err)?;
            let value = e.connection_probability_dc(&gadget.graph, &[&gadget.source], &[&gadget.sink]).map_err(err)?;
            ensure!((&value - &p).abs().cmp_num(&eps).is_le(), "p {p} eps {eps}: gadget value {value}");
            ensure!(gadget.graph.num_edges() <= gadget_size_bound(&eps), "p {p} eps {eps}: {} edges", gadget.graph.num_edges());
        }
    }
    let count = 50;
    for seed in 0..count {
        let n = rng.gen_range(4..=6);
        let m = rng.gen_range(3..=10.min(n * (n - 1) / 2));
        let (g, _) = random_instance(n, m, 70_000 + seed, false, ProbLaw::Dyadic(3)).map_err(err)?;
        let h = degree3_reduce(&g).map_err(err)?;
        ensure!(h.vertices.iter().all(|v| h.degree(v) == 3), "seed {seed}: not cubic");
        let pairs: Vec<EventExpr> = g
            .vertices
            .iter()
            .enumerate()
            .flat_map(|(i, u)| g.vertices[i + 1..].iter().map(move |v| EventExpr::conn(&[u], &[v])))
            .collect();
        ensure!(
            e.probabilities(&g, &pairs).map_err(err)? == e.probabilities(&h, &pairs).map_err(err)?,
            "seed {seed}: pair probabilities changed"
        );
    }
    Ok(format!("100 p x 2 eps gadgets within bounds; {count} degree-3 reductions exact"))
}

fn gluing_counterexample() -> Outcome {
    let start = Instant::now();
    let p = CampaignParams {
        generator: GeneratorParams { n: 5, m: 5, directed: false, law: ProbLaw::Dyadic(2), a_size: Some(3) },
        conjecture: ConjectureId::GluingNaive,
        budget: 10_000,
        seed: 0,
        iterations: 0,
        timestamps: false,
    };
    let s = campaign(&exact(), &p, &mut io::sink()).map_err(err)?;
    ensure!(s.violations > 0, "no violation in {} instances", s.instances);
    Ok(format!(
        "{} exact violations in {} instances, first at index {}, min margin {} ({:.1?})",
        s.violations,
        s.instances,
        s.violating[0],
        s.min_margin.unwrap(),
        start.elapsed()
    ))
}

fn calibration() -> Outcome {
    let h = Num::ratio(1, 2);
    let g = WeightedGraph::undirected(&["a", "b", "c"], vec![Edge::new("a", "b", h.clone()), Edge::new("b", "c", h.clone()), Edge::new("a", "c", h)]);
    let ev = EventExpr::conn(&["a"], &["b"]);
    let mut covered = 0;
    for seed in 0..200 {
        if estimate_event(&g, &ev, 10_000, seed).map_err(err)?.covers(0.625) {
            covered += 1;
        }
    }
    ensure!(covered >= 193, "{covered}/200 intervals cover 5/8");
    let run = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        pool.install(|| estimate_event(&g, &ev, 100_000, 99)).map(|x| serde_json::to_string(&x).expect("serializes")).map_err(err)
    };
    let (one, again, four) = (run(1)?, run(1)?, run(4)?);
    ensure!(one == again && one == four, "same seed gave different output");
    Ok(format!("{covered}/200 intervals cover 5/8; same-seed output byte-identical across 1 and 4 workers"))
}

fn performance() -> Outcome {
    let (g, _) = random_instance(9, 20, 1, false, ProbLaw::Dyadic(3)).map_err(err)?;
    ensure!(g.random_edges().len() == 20, "{} random edges", g.random_edges().len());
    let ev = EventExpr::conn(&["0"], &["8"]).and(EventExpr::ClusterAtLeast("0".into(), 6));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(err)?;
    let start = Instant::now();
    pool.install(|| exact().event_probability(&g, &ev)).map_err(err)?;
    let single = start.elapsed();
    within(start, Duration::from_secs(10), "20-edge enumeration")?;

    let start = Instant::now();
    let p = CampaignParams {
        generator: GeneratorParams { n: 6, m: 10, directed: false, law: ProbLaw::Dyadic(3), a_size: None },
        conjecture: ConjectureId::Postfkg,
        budget: 1000,
        seed: 0,
        iterations: 10,
        timestamps: false,
    };
    let s = campaign(&exact(), &p, &mut io::sink()).map_err(err)?;
    within(start, Duration::from_secs(300), "postfkg campaign")?;
    Ok(format!(
        "20-edge event {single:.2?} on one worker; 10^3-instance postfkg campaign {:.1?} (min margin {})",
        start.elapsed(),
        s.min_margin.unwrap()
    ))
}

fn main() {
    let criteria: [Criterion; 15] = [
        ("directed counterexample reproduction", directed_counterexample),
        ("enumeration vs deletion-contraction", oracle_equivalence),
        ("prefkga with |A|=2", two_point_prefkga),
        ("prefkga with separating |A|=3", separating_prefkga),
        ("good quadruples (diamond, antenna)", good_quadruples),
        ("coefficient system with |A|=3", three_point_coefficients),
        ("coefficient cross-check with |A|=2", two_point_coefficients),
        ("influence bound", influence_bound),
        ("lemma suite", lemmas),
        ("monotone cluster properties", cluster_properties),
        ("pendant inflation identity", pendant_inflation),
        ("reductions", reductions),
        ("naive gluing counterexample", gluing_counterexample),
        ("Monte Carlo calibration and determinism", calibration),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 15 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
