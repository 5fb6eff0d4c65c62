use perc_core::checkers::{CheckReport, ConjectureId};
use perc_core::graph::GraphFile;
use perc_core::search::{ascend, campaign, check_target, random_instance, CampaignParams, GeneratorParams, ProbLaw};
use perc_core::{Engine, Mode, Num};

fn records(out: &[u8]) -> Vec<serde_json::Value> {
    out.split(|&c| c == b'\n').filter(|l| !l.is_empty()).map(|l| serde_json::from_slice(l).unwrap()).collect()
}

#[test]
fn ascent_traces_never_increase() {
    let e = Engine::exact();
    for seed in 0..40 {
        let directed = seed % 2 == 1;
        let (g, t) = random_instance(4, 5, seed, directed, ProbLaw::Dyadic(2)).unwrap();
        for id in [ConjectureId::Postfkg, ConjectureId::Prefkga] {
            let a = ascend(&e, &g, &t, id, 4).unwrap();
            assert!(a.trace.windows(2).all(|w| w[1].cmp_num(&w[0]).is_lt()), "seed {seed}");
            assert_eq!(a.trace.last().unwrap(), &a.report.margin);
            assert!(a.report.margin.cmp_num(&check_target(&e, &g, &t, id).unwrap().margin).is_le());
        }
    }
}

#[test]
fn persisted_margins_are_reproduced_by_a_fresh_check() {
    for (conjecture, directed) in [(ConjectureId::Postfkg, true), (ConjectureId::GluingNaive, false)] {
        let p = CampaignParams {
            generator: GeneratorParams { n: 5, m: 5, directed, law: ProbLaw::Dyadic(2), a_size: None },
            conjecture,
            budget: 40,
            seed: 100,
            iterations: 3,
            timestamps: false,
        };
        let mut out = Vec::new();
        campaign(&Engine::exact(), &p, &mut out).unwrap();
        for rec in records(&out) {
            let file: GraphFile = serde_json::from_value(rec["instance"].clone()).unwrap();
            let (g, t) = file.into_parts();
            let stored: CheckReport = serde_json::from_value(rec["report"].clone()).unwrap();
            let fresh = check_target(&Engine::exact(), &g, &t, conjecture).unwrap();
            assert_eq!(fresh.margin, stored.margin);
            assert_eq!(rec["violation"].as_bool().unwrap(), fresh.violated());
        }
    }
}

#[test]
fn float_campaign_rechecks_violations_exactly() {
    let p = CampaignParams {
        generator: GeneratorParams { n: 5, m: 5, directed: false, law: ProbLaw::Dyadic(2), a_size: Some(3) },
        conjecture: ConjectureId::GluingNaive,
        budget: 200,
        seed: 0,
        iterations: 0,
        timestamps: false,
    };
    let mut out = Vec::new();
    let s = campaign(&Engine::exact().with_mode(Mode::Float), &p, &mut out).unwrap();
    assert!(s.violations > 0);
    for rec in records(&out).into_iter().filter(|r| r["violation"] == true) {
        let m: Num = serde_json::from_value(rec["exact_margin"].clone()).unwrap();
        assert!(m.is_exact() && m.is_negative());
    }
}

#[test]
fn timestamps_are_outside_the_deterministic_part() {
    let base = CampaignParams {
        generator: GeneratorParams { n: 4, m: 4, directed: false, law: ProbLaw::Half, a_size: None },
        conjecture: ConjectureId::Prefkg,
        budget: 10,
        seed: 9,
        iterations: 2,
        timestamps: true,
    };
    let (mut a, mut b) = (Vec::new(), Vec::new());
    campaign(&Engine::exact(), &base, &mut a).unwrap();
    campaign(&Engine::exact(), &base, &mut b).unwrap();
    let strip = |v: Vec<serde_json::Value>| {
        v.into_iter()
            .map(|mut r| {
                assert!(r["timestamp"].is_u64());
                r.as_object_mut().unwrap().remove("timestamp");
                r
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(records(&a)), strip(records(&b)));
}

/// Directed four-vertex instances with eight edges and `|A| = 2`: coordinate
/// ascent from seed 0 reaches a post-FKG margin of at most -1/32 inside a
/// budget of 10^4 instances.
#[test]
fn directed_campaign_reaches_the_known_violation() {
    let p = CampaignParams {
        generator: GeneratorParams { n: 4, m: 8, directed: true, law: ProbLaw::Dyadic(3), a_size: Some(2) },
        conjecture: ConjectureId::Postfkg,
        budget: 10_000,
        seed: 0,
        iterations: 20,
        timestamps: false,
    };
    let mut out = Vec::new();
    let s = campaign(&Engine::exact(), &p, &mut out).unwrap();
    let min = s.min_margin.unwrap();
    assert!(min.cmp_num(&Num::ratio(-1, 32)).is_le(), "min margin {min}");
    assert!(s.violations > 0);
}
