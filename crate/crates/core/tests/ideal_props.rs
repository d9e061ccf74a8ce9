mod common;

use branch_lab_core::expr::parse;
use branch_lab_core::ideals::{
    membership, no_largest_ideal_demo, off_diagonality, unit_detection, zero_density_certificate, IdealSpec,
    MembershipScan, MembershipVerdict, OffDiagCertificate, OffDiagParams, OffDiagVerdict, UnitSearch,
};
use branch_lab_core::{DomainInterval, SmoothSequence};
use common::{random_expr, random_sequence, rng, scaled_gap};
use rand::seq::IndexedRandom;
use rand::Rng;
use std::f64::consts::PI;

const CATALOG: [&str; 6] = ["1+sin(nu*x)", "1+cos(nu*x)", "cos(nu*x)", "x", "x*sin(nu*x)", "1+sin(nu*x+1)"];

fn seq(t: &str) -> SmoothSequence {
    SmoothSequence::new(parse(t).unwrap())
}

fn sym() -> DomainInterval {
    DomainInterval::new(-PI, PI).unwrap()
}

fn two_pi() -> DomainInterval {
    DomainInterval::new(0.0, 2.0 * PI).unwrap()
}

/// Re-checks a verdict against independent evaluation; returns whether
/// it was definite.
fn verify(s: &SmoothSequence, ideal: &IdealSpec, verdict: &MembershipVerdict, r: &mut impl Rng) -> bool {
    match verdict {
        MembershipVerdict::InIdeal { factorization } => {
            let Some(generators) = ideal.generators() else {
                assert!(s.is_eventually_zero());
                return true;
            };
            let back = factorization.recombine(generators).unwrap();
            let start = back.start().max(s.start());
            for _ in 0..100 {
                let (nu, x) = (r.random_range(start..start + 8), r.random_range(-PI..PI));
                let (a, b) = (back.eval(nu, x).unwrap(), s.eval(nu, x).unwrap());
                assert!(scaled_gap(a, b) < 1e-10, "{s}: {a} vs {b}");
            }
            true
        }
        MembershipVerdict::NotInIdeal { witness } => {
            for g in ideal.generators().unwrap_or(&[]) {
                assert!(g.eval(witness.nu, witness.x).unwrap().abs() < 1e-10);
            }
            assert!(s.eval(witness.nu, witness.x).unwrap().abs() > 1e-6);
            true
        }
        MembershipVerdict::Unknown => false,
    }
}

#[test]
fn membership_verdicts_are_sound() {
    let mut r = rng(21);
    let scan = MembershipScan::new(sym());
    let (mut inside, mut outside) = (0, 0);
    for case in 0..120 {
        let n = r.random_range(1..=2);
        let gens: Vec<SmoothSequence> = CATALOG.choose_multiple(&mut r, n).map(|t| seq(t)).collect();
        let ideal = IdealSpec::generated(gens.clone());
        let s = match case % 3 {
            // an explicit combination
            0 => gens.iter().fold(SmoothSequence::zero(), |acc, g| &acc + &(g * &random_sequence(&mut r))),
            1 => SmoothSequence::diagonal(&random_expr(&mut r, 2, false)).unwrap(),
            _ => random_sequence(&mut r),
        };
        let v = membership(&s, &ideal, &scan);
        if case % 3 == 0 && !s.is_zero() {
            assert!(matches!(v, MembershipVerdict::InIdeal { .. }), "{s} in {ideal:?}: {v:?}");
        }
        if verify(&s, &ideal, &v, &mut r) {
            match v {
                MembershipVerdict::InIdeal { .. } => inside += 1,
                _ => outside += 1,
            }
        }
    }
    assert!(inside >= 40 && outside >= 10, "{inside} {outside}");
}

#[test]
fn eventually_zero_membership_is_decided() {
    let mut r = rng(22);
    let scan = MembershipScan::new(sym());
    for case in 0..100 {
        let mut s = if case % 2 == 0 { SmoothSequence::zero() } else { random_sequence(&mut r) };
        for _ in 0..r.random_range(0..=3) {
            s = s.with_exception(r.random_range(1..=9), random_expr(&mut r, 2, false)).unwrap();
        }
        let v = membership(&s, &IdealSpec::EventuallyZero, &scan);
        assert!(verify(&s, &IdealSpec::EventuallyZero, &v, &mut r), "{s}");
        assert_eq!(matches!(v, MembershipVerdict::InIdeal { .. }), s.is_eventually_zero());
    }
}

#[test]
fn certificate_roots_re_evaluate() {
    for g in ["1+sin(nu*x)", "1+cos(nu*x)", "cos(nu*x)", "1+sin(nu*x+1)"] {
        let ideal = IdealSpec::principal(seq(g));
        let cert = zero_density_certificate(&ideal, &two_pi(), 0.05, 200).unwrap().expect(g);
        let mut expected_lo = 0.0;
        for c in &cert.cells {
            assert!((c.lower - expected_lo).abs() < 1e-12);
            expected_lo = c.upper;
            assert!(c.lower <= c.root && c.root <= c.upper && c.nu <= 200);
            assert!(seq(g).eval(c.nu, c.root).unwrap().abs() < 1e-8);
        }
        assert!((expected_lo - 2.0 * PI).abs() < 1e-12);
    }
}

#[test]
fn sine_roots_match_the_analytic_family() {
    let cert = zero_density_certificate(&IdealSpec::principal(seq("1+sin(nu*x)")), &two_pi(), 0.05, 200)
        .unwrap()
        .unwrap();
    for c in &cert.cells {
        let phase = c.root * f64::from(c.nu) - 1.5 * PI;
        let k = (phase / (2.0 * PI)).round();
        assert!((phase - 2.0 * PI * k).abs() < 1e-3, "{c:?}");
    }
}

#[test]
fn unit_and_off_diagonal_are_exclusive() {
    let params = OffDiagParams::new(two_pi());
    let mut ideals = vec![IdealSpec::EventuallyZero];
    for a in CATALOG {
        ideals.push(IdealSpec::principal(seq(a)));
        for b in CATALOG {
            ideals.push(IdealSpec::generated(vec![seq(a), seq(b)]));
        }
    }
    ideals.push(IdealSpec::principal(seq("2+x^2")));
    for ideal in &ideals {
        let verdict = off_diagonality(ideal, &params).unwrap();
        let unit = ideal.generators().map(|_| unit_detection(ideal, &params.domain, &params.unit).unwrap());
        if verdict.is_off_diagonal() {
            assert!(unit.flatten().is_none(), "{ideal:?}");
        }
        if let OffDiagVerdict::ContainsUnit { lower_bound, .. } = verdict {
            assert!(lower_bound >= params.unit.margin);
        }
    }
}

#[test]
fn unit_bound_matches_the_analytic_minimum() {
    // 2 + sin t + cos t = 2 + √2 sin(t + π/4) has minimum 2 - √2
    let oracle = 2.0 - 2f64.sqrt();
    for (a, b) in [("1+sin(nu*x)", "1+cos(nu*x)"), ("1+sin(nu*x+1)", "1+cos(nu*x+1)")] {
        let ideal = IdealSpec::generated(vec![seq(a), seq(b)]);
        let u = unit_detection(&ideal, &two_pi(), &UnitSearch::default()).unwrap().unwrap();
        assert!((u.lower_bound - oracle).abs() < 1e-3, "{a}: {}", u.lower_bound);
        assert!(u.lower_bound >= oracle - 1e-12);
    }
}

#[test]
fn demo_shapes() {
    let params = OffDiagParams::new(two_pi());
    let r = no_largest_ideal_demo(&seq("1+sin(nu*x)"), &seq("1+cos(nu*x)"), &params).unwrap();
    assert!(r.applicable && r.stages.len() == 4 && r.stages.iter().all(|s| s.passed));
    assert!(matches!(
        r.first_verdict,
        OffDiagVerdict::OffDiagonal { certificate: OffDiagCertificate::ZeroDensity(ref c) } if c.cells.len() == 126
    ));
    let shifted = no_largest_ideal_demo(&seq("1+sin(nu*x+1)"), &seq("1+cos(nu*x+1)"), &params).unwrap();
    assert!(shifted.applicable);
    let same = no_largest_ideal_demo(&seq("1+sin(nu*x)"), &seq("1+sin(nu*x)"), &params).unwrap();
    assert!(!same.applicable && same.stages[3].name == "unit_detection(I)" && !same.stages[3].passed);
}
