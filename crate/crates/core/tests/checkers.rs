mod common;

use common::*;
use num_rational::BigRational;
use num_traits::{One, Zero};
use perc_core::checkers::{
    check_good_quadruple, check_mcp, check_postfkg, check_prefkg, check_prefkga, concavity_probe, epsdel_frontier, gram_psd_check,
    influence_bound_check, lemma_suite, solve_coefficients, McpFamily,
};
use perc_core::search::{frontier_input, random_instance, random_instance_with, GeneratorParams, ProbLaw};
use perc_core::{Edge, Engine, EventExpr, TerminalSpec, WeightedGraph};
use proptest::prelude::*;

fn engine() -> Engine {
    Engine::exact()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_reports_are_consistent_and_reproducible((g, t) in arb_instance(6, 9)) {
        let e = engine();
        for r in [check_postfkg(&e, &g, &t).unwrap(), check_prefkg(&e, &g, &t).unwrap(), check_prefkga(&e, &g, &t).unwrap()] {
            prop_assert!(r.exact);
            prop_assert_eq!(rat(&r.margin), rat(&r.lhs) - rat(&r.rhs));
            prop_assert!(!r.minimizers.is_empty());
        }
        prop_assert_eq!(check_postfkg(&e, &g, &t).unwrap(), check_postfkg(&e, &g, &t).unwrap());
    }

    #[test]
    fn strengthened_prefkg_margin_is_smaller((g, t) in arb_instance(6, 9)) {
        let weak = check_prefkg(&engine(), &g, &t).unwrap();
        let strong = check_prefkga(&engine(), &g, &t).unwrap();
        prop_assert!(strong.margin.cmp_num(&weak.margin).is_le());
    }

    #[test]
    fn postfkg_matches_oracle((g, t) in arb_instance(5, 8)) {
        let r = check_postfkg(&engine(), &g, &t).unwrap();
        let a: Vec<&str> = t.a.iter().map(String::as_str).collect();
        let lhs = prob(&g, |o| links(&g, o, &[&t.zero], &[&t.b]));
        let p0a = prob(&g, |o| links(&g, o, &[&t.zero], &a));
        let min = a.iter().map(|x| prob(&g, |o| links(&g, o, &[x], &[&t.b]))).min().unwrap();
        prop_assert_eq!(rat(&r.lhs), lhs);
        prop_assert_eq!(rat(&r.rhs), p0a * min);
    }

    #[test]
    fn prefkga_holds_for_two_point_targets(seed in any::<u64>(), n in 4usize..=7, m in 3usize..=10) {
        let m = m.min(n * (n - 1) / 2);
        let p = GeneratorParams { n, m, directed: false, law: ProbLaw::Dyadic(3), a_size: Some(2) };
        let (g, t) = random_instance_with(&p, seed).unwrap();
        prop_assert!(!check_prefkga(&engine(), &g, &t).unwrap().margin.is_negative());
    }

    #[test]
    fn cluster_property_suites(seed in any::<u64>(), n in 4usize..=6, m in 3usize..=9, k in 1usize..=4) {
        let m = m.min(n * (n - 1) / 2);
        let two = GeneratorParams { n, m, directed: false, law: ProbLaw::Dyadic(2), a_size: Some(2) };
        let (g, t) = random_instance_with(&two, seed).unwrap();
        prop_assert!(!check_mcp(&engine(), &g, &t, McpFamily::ClusterSize).unwrap().margin.is_negative());
        let (g, t) = random_instance(n, m, seed, false, ProbLaw::Dyadic(2)).unwrap();
        prop_assume!(t.a.len() <= 4);
        prop_assert!(!check_mcp(&engine(), &g, &t, McpFamily::Threshold(k)).unwrap().margin.is_negative());
    }

    #[test]
    fn indicator_family_reduces_to_prefkga((g, t) in arb_instance(5, 8)) {
        let mcp = check_mcp(&engine(), &g, &t, McpFamily::IndicatorOfB).unwrap();
        let pre = check_prefkga(&engine(), &g, &t).unwrap();
        prop_assert_eq!((mcp.lhs, mcp.rhs), (pre.lhs, pre.rhs));
    }

    #[test]
    fn concavity_probe_is_concave_with_product_coefficient((g, t) in arb_instance(5, 8), e in 0usize..8) {
        prop_assume!(!g.edges.is_empty());
        let e = e % g.edges.len();
        let r = concavity_probe(&engine(), &g, &t, e, None).unwrap();
        prop_assert!(r.concave);
        let a: Vec<&str> = t.a.iter().map(String::as_str).collect();
        let y = engine().edge_polynomial(&g, e, &EventExpr::conn(&[&t.zero], &a)).unwrap();
        let z = engine().edge_polynomial(&g, e, &EventExpr::conn(&[&r.a], &[&t.b])).unwrap();
        prop_assert_eq!(rat(&r.quadratic), -(rat(&y.c1) * rat(&z.c1)));
        if let Some(ok) = r.grid_nonnegative {
            prop_assert!(ok);
        }
    }

    #[test]
    fn coefficient_gram_is_psd((g, t) in arb_instance(6, 9)) {
        prop_assume!(t.a.len() >= 2);
        let s = solve_coefficients(&engine(), &g, &t).unwrap();
        prop_assert!(s.psd_certificate.nonnegative);
        prop_assert!(gram_psd_check(&s.gram).nonnegative);
        if let Some(c) = &s.coefficients {
            // the solution satisfies the system
            for j in 0..c.len() {
                let lhs: BigRational = (0..c.len()).map(|i| rat(&c[i]) * rat(&s.gram[i][j])).sum();
                prop_assert_eq!(lhs, rat(&s.rhs[j]));
            }
        }
    }
}

#[test]
fn degenerate_target_member_zeroes_the_product() {
    let g = WeightedGraph::undirected(
        &["0", "a", "b", "z"],
        vec![Edge::new("0", "a", q(1, 2)), Edge::new("a", "b", q(1, 3))],
    );
    let t = TerminalSpec::new("0", "b", &["a", "z"]);
    let r = check_postfkg(&engine(), &g, &t).unwrap();
    assert!(r.rhs.is_zero());
    assert!(!r.margin.is_negative());
    assert_eq!(r.minimizers, vec!["z".to_string()]);
}

#[test]
fn ties_report_every_minimizer() {
    let g = WeightedGraph::undirected(
        &["0", "a1", "a2", "b"],
        vec![Edge::new("0", "a1", q(1, 2)), Edge::new("0", "a2", q(1, 2)), Edge::new("a1", "b", q(1, 2)), Edge::new("a2", "b", q(1, 2))],
    );
    let r = check_postfkg(&engine(), &g, &TerminalSpec::new("0", "b", &["a1", "a2"])).unwrap();
    assert_eq!(r.minimizers, vec!["a1".to_string(), "a2".to_string()]);
}

#[test]
fn diamond_with_half_edges_is_good() {
    let g = WeightedGraph::undirected(
        &["0", "a1", "a2", "b"],
        vec![Edge::new("0", "a1", q(1, 2)), Edge::new("0", "a2", q(1, 2)), Edge::new("a1", "b", q(1, 2)), Edge::new("a2", "b", q(1, 2))],
    );
    let r = check_good_quadruple(&engine(), &g, &TerminalSpec::new("0", "b", &["a1", "a2"])).unwrap();
    assert!(!r.margin.is_negative());
}

#[test]
fn influence_bound_on_random_instances() {
    for seed in 0..60 {
        let (g, t) = random_instance(5, 6, seed, false, ProbLaw::Dyadic(2)).unwrap();
        let r = influence_bound_check(&engine(), &g, &t).unwrap();
        assert!(!r.violated(), "seed {seed}: {r:?}");
    }
}

#[test]
fn lemma_suites_hold() {
    let mut reports = 0;
    for seed in 0..60 {
        let (g, t) = random_instance(6, 8, seed, false, ProbLaw::Dyadic(2)).unwrap();
        let s = lemma_suite(&engine(), &g, &t, seed).unwrap();
        for r in &s.reports {
            assert!(!r.violated(), "seed {seed}: {r:?}");
        }
        reports += s.reports.len();
    }
    assert!(reports > 300);
}

#[test]
fn frontier_of_satisfying_corpus_stays_under_the_parabola() {
    let inputs: Vec<_> = (0..200)
        .map(|seed| {
            let (g, t) = random_instance(5, 6, seed, false, ProbLaw::Dyadic(2)).unwrap();
            frontier_input(&check_postfkg(&engine(), &g, &t).unwrap()).unwrap()
        })
        .collect();
    let rows = epsdel_frontier(&inputs);
    assert_eq!(rows.len(), 200);
    for r in &rows {
        let keep = BigRational::one() - rat(&r.delta);
        assert!(rat(&r.envelope) <= BigRational::one() - &keep * &keep);
    }
    assert!(rows.windows(2).all(|w| w[0].envelope.cmp_num(&w[1].envelope).is_le()));
    assert!(epsdel_frontier(&[]).is_empty());
}

#[test]
fn two_point_coefficients_follow_phi() {
    let mut checked = 0;
    for seed in 0..80 {
        let p = GeneratorParams { n: 5, m: 6, directed: false, law: ProbLaw::Dyadic(2), a_size: Some(2) };
        let (g, t) = random_instance_with(&p, seed).unwrap();
        let phi = engine().phi_table(&g, &t).unwrap();
        let (Some(p1), Some(p2)) = (phi.get(&[&t.a[0]]), phi.get(&[&t.a[1]])) else { continue };
        let s = solve_coefficients(&engine(), &g, &t).unwrap();
        let Some(c) = s.normalized() else { continue };
        let total = rat(p1) + rat(p2);
        if total.is_zero() {
            continue;
        }
        assert_eq!(rat(&c[0]), rat(p1) / &total, "seed {seed}");
        checked += 1;
    }
    assert!(checked > 20, "{checked}");
}
