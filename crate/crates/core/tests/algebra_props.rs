mod common;

use branch_lab_core::algebra::{
    branching_demo, delta_square_demo, embed_distribution, gf_derive, gf_equal, gf_mul, smooth_mult_consistency,
    AlgebraConfig, DistributionTag, Equality, GeneralizedFunction,
};
use branch_lab_core::expr::{parse, parse_outer};
use branch_lab_core::pairing::{pair, Panel};
use branch_lab_core::weaklimit::{Classification, Schedule};
use branch_lab_core::{DomainInterval, SmoothSequence};
use common::{random_expr, random_sequence, rng};
use rand::Rng;
use std::f64::consts::PI;

fn sym() -> DomainInterval {
    DomainInterval::new(-PI, PI).unwrap()
}

fn seq(t: &str) -> SmoothSequence {
    SmoothSequence::new(parse(t).unwrap())
}

#[test]
fn quotient_operations_are_well_defined() {
    let algebra = AlgebraConfig::eventually_zero(sym());
    let mut r = rng(31);
    for _ in 0..100 {
        let base = random_sequence(&mut r);
        let mut perturbed = base.clone();
        for _ in 0..r.random_range(1..=3) {
            perturbed = perturbed.with_exception(r.random_range(1..=12), random_expr(&mut r, 2, false)).unwrap();
        }
        let f = GeneralizedFunction::new(base, &algebra).unwrap();
        let g = GeneralizedFunction::new(perturbed, &algebra).unwrap();
        let h = GeneralizedFunction::new(random_sequence(&mut r), &algebra).unwrap();
        assert_eq!(gf_equal(&f, &g).unwrap(), Equality::Equal);
        assert_eq!(gf_equal(&gf_mul(&f, &h).unwrap(), &gf_mul(&g, &h).unwrap()).unwrap(), Equality::Equal);
        assert_eq!(gf_equal(&gf_derive(&f, 1).unwrap(), &gf_derive(&g, 1).unwrap()).unwrap(), Equality::Equal);
    }
}

#[test]
fn heaviside_derivative_pairs_like_delta() {
    let dom = sym();
    let algebra = AlgebraConfig::eventually_zero(dom);
    let h = embed_distribution(&DistributionTag::Heaviside, &algebra).unwrap();
    let dh = gf_derive(&h, 1).unwrap();
    let delta = embed_distribution(&DistributionTag::Delta, &algebra).unwrap();
    assert_eq!(dh.representative(), delta.representative());
    let panel = Panel::equally_spaced(&dom, 8, false).unwrap();
    for phi in panel.members() {
        for &nu in Schedule::default().indices() {
            let a = pair(dh.representative(), nu, phi).unwrap().value;
            let b = pair(delta.representative(), nu, phi).unwrap().value;
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn consistency_corpus() {
    let mut r = rng(41);
    let dom = sym();
    for _ in 0..50 {
        let (psi, chi) = (random_expr(&mut r, 3, false), random_expr(&mut r, 3, false));
        let report = smooth_mult_consistency(&psi, &chi, &dom).unwrap();
        assert!(report.passed, "{psi} * {chi}: {report:?}");
    }
}

fn square() -> branch_lab_core::Expr {
    parse_outer("u^2").unwrap()
}

#[test]
fn branching_pairs() {
    let dom = sym();
    let panel = Panel::equally_spaced(&dom, 8, false).unwrap();
    let schedule = Schedule::default();
    let run = |reps: &[&str]| {
        let reps: Vec<SmoothSequence> = reps.iter().map(|t| seq(t)).collect();
        branching_demo(&reps, &square(), &dom, &panel, &schedule, 1e-4).unwrap()
    };
    let zero = run(&["cos(nu*x)", "0"]);
    assert!(zero.all_null && zero.branching_witnessed, "{}", zero.conclusion);
    for (phi, lim) in panel.members().iter().zip(zero.entries[0].image_verdict.limits()) {
        assert!((lim.unwrap().0 - 0.5 * phi.integral()).abs() < 1e-3);
    }
    let same = run(&["cos(nu*x)", "sin(nu*x)"]);
    assert!(same.all_null && !same.branching_witnessed, "{:?}", same.distinct_pairs);
    let doubled = run(&["cos(nu*x)", "2*cos(nu*x)"]);
    assert!(doubled.branching_witnessed);
    for (phi, lim) in panel.members().iter().zip(doubled.entries[1].image_verdict.limits()) {
        assert!((lim.unwrap().0 - 2.0 * phi.integral()).abs() < 1e-3);
    }
    assert!(branching_demo(&[seq("cos(nu*x)")], &square(), &dom, &panel, &schedule, 1e-4).is_err());
}

#[test]
fn branching_survives_panel_and_schedule_changes() {
    let dom = sym();
    let reps = [seq("cos(nu*x)"), SmoothSequence::zero()];
    for (panel, schedule) in [
        (Panel::equally_spaced(&dom, 5, true).unwrap(), Schedule::default()),
        (Panel::equally_spaced(&dom, 8, false).unwrap(), Schedule::powers_of_two(8192).unwrap()),
        (Panel::equally_spaced(&dom, 12, false).unwrap(), Schedule::new((10..=16).map(|k| 3 * (1 << k)).collect()).unwrap()),
    ] {
        let report = branching_demo(&reps, &square(), &dom, &panel, &schedule, 1e-4).unwrap();
        assert!(report.branching_witnessed, "{}", report.conclusion);
        assert_eq!(report.entries[1].image_verdict.classification, Classification::EvidenceV);
    }
}

#[test]
fn delta_square_grows_linearly() {
    let dom = sym();
    let panel = Panel::equally_spaced(&dom, 8, false).unwrap();
    let report = delta_square_demo(&dom, &panel, &Schedule::default(), 1e-4).unwrap();
    assert!(report.passed, "{report:?}");
    assert_eq!(report.verdict.classification, Classification::EvidenceDivergent);
    assert_eq!(report.checks.len(), 2);
}

#[test]
fn delta_derivatives_pair_with_signed_test_derivatives() {
    // <δ^(k)_ν, φ> → (-1)^k φ^(k)(0); checked for k = 1 with the analytic φ'
    let dom = sym();
    let algebra = AlgebraConfig::eventually_zero(dom);
    let d1 = embed_distribution(&DistributionTag::DeltaDerivative { order: 1 }, &algebra).unwrap();
    let phi = branch_lab_core::pairing::bump(0.3, 0.6, false, &dom).unwrap();
    let value = pair(d1.representative(), 1024, &phi).unwrap().value;
    assert!((value + phi.derivative(0.0)).abs() < 1e-3, "{value} vs {}", -phi.derivative(0.0));
}
