//! Quotient algebras `(C∞(X))^N / I` and the operations on their elements.
//!
//! A [`GeneralizedFunction`] is a representative sequence tagged with the
//! algebra it lives in. Ring operations act on representatives; equality is
//! membership of the difference in the ideal. Differentiation is only
//! offered when the ideal is known to be closed under derivatives, since
//! otherwise it does not pass to the quotient.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{display_outer, parse, DomainInterval, Expr, SafetyLattice, SafetyVerdict};
use crate::ideals::{
    derivation_closure, membership, off_diagonality, ClosureVerdict, IdealError, IdealSpec, MembershipScan,
    MembershipVerdict, MembershipWitness, OffDiagParams, OffDiagVerdict,
};
use crate::pairing::Panel;
use crate::sequences::{SequenceError, SmoothSequence};
use crate::tolerances;
use crate::weaklimit::{classify_membership, Classification, FunctionalVerdict, LimitVerdict, Schedule, WeakLimitError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("ideal failed the off-diagonality gate: {0:?}")]
    NotOffDiagonal(OffDiagVerdict),
    #[error("operands live in different algebras")]
    MismatchedAlgebras,
    #[error("the ideal is not known to be closed under differentiation: {0:?}")]
    NotDerivationCapable(Box<ClosureVerdict>),
    #[error("representative is not denominator-safe: {0:?}")]
    UnsafeRepresentative(SafetyVerdict),
    #[error("branching needs at least 2 representatives, got {0}")]
    TooFewRepresentatives(usize),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    WeakLimit(#[from] WeakLimitError),
}

/// The algebra `(C∞(X))^N / ideal` over `domain`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraConfig {
    ideal: IdealSpec,
    derivation_capable: bool,
    closure: ClosureVerdict,
    domain: DomainInterval,
}

impl AlgebraConfig {
    /// Admits `ideal` only if it is certified off-diagonal; records whether
    /// it is closed under first derivatives (hence under all orders).
    pub fn new(ideal: IdealSpec, domain: DomainInterval, params: &OffDiagParams) -> Result<Self, AlgebraError> {
        ideal.validate(&domain, &SafetyLattice::default())?;
        let gate = off_diagonality(&ideal, params)?;
        if !gate.is_off_diagonal() {
            return Err(AlgebraError::NotOffDiagonal(gate));
        }
        let closure = derivation_closure(&ideal, 1, &MembershipScan::new(domain));
        Ok(Self { derivation_capable: closure == ClosureVerdict::Closed, closure, ideal, domain })
    }

    /// The quotient by the eventually-zero sequences.
    pub fn eventually_zero(domain: DomainInterval) -> Self {
        Self::new(IdealSpec::EventuallyZero, domain, &OffDiagParams::new(domain))
            .expect("the eventually-zero ideal is off-diagonal")
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.ideal
    }

    pub fn derivation_capable(&self) -> bool {
        self.derivation_capable
    }

    pub fn closure(&self) -> &ClosureVerdict {
        &self.closure
    }

    pub fn domain(&self) -> &DomainInterval {
        &self.domain
    }

    fn scan(&self) -> MembershipScan {
        MembershipScan::new(self.domain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedFunction {
    representative: SmoothSequence,
    algebra: AlgebraConfig,
}

impl GeneralizedFunction {
    pub fn new(representative: SmoothSequence, algebra: &AlgebraConfig) -> Result<Self, AlgebraError> {
        let verdict = representative.safety(&algebra.domain, &SafetyLattice::default());
        if !verdict.is_safe() {
            return Err(AlgebraError::UnsafeRepresentative(verdict));
        }
        Ok(Self { representative, algebra: algebra.clone() })
    }

    pub fn representative(&self) -> &SmoothSequence {
        &self.representative
    }

    pub fn algebra(&self) -> &AlgebraConfig {
        &self.algebra
    }

    fn same_algebra(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(AlgebraError::MismatchedAlgebras)
        }
    }

    fn with(&self, representative: SmoothSequence) -> Self {
        Self { representative, algebra: self.algebra.clone() }
    }
}

pub fn gf_add(f: &GeneralizedFunction, g: &GeneralizedFunction) -> Result<GeneralizedFunction, AlgebraError> {
    f.same_algebra(g)?;
    Ok(f.with(&f.representative + &g.representative))
}

pub fn gf_mul(f: &GeneralizedFunction, g: &GeneralizedFunction) -> Result<GeneralizedFunction, AlgebraError> {
    f.same_algebra(g)?;
    Ok(f.with(&f.representative * &g.representative))
}

/// Term-wise `outer ∘ f`; `outer` is a one-variable expression in the `x`
/// slot.
pub fn gf_apply_smooth(f: &GeneralizedFunction, outer: &Expr) -> Result<GeneralizedFunction, AlgebraError> {
    let rep = f.representative.apply_smooth(outer, &f.algebra.domain, &SafetyLattice::default())?;
    Ok(f.with(rep))
}

/// `D^order f`, available only on derivation-closed algebras.
pub fn gf_derive(f: &GeneralizedFunction, order: u32) -> Result<GeneralizedFunction, AlgebraError> {
    if order == 0 {
        return Ok(f.clone());
    }
    if !f.algebra.derivation_capable {
        return Err(AlgebraError::NotDerivationCapable(Box::new(f.algebra.closure.clone())));
    }
    Ok(f.with(f.representative.derive(order)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Equality {
    Equal,
    NotEqual { witness: MembershipWitness },
    Unknown,
}

/// Equality in the quotient: membership of `f - g` in the ideal.
pub fn gf_equal(f: &GeneralizedFunction, g: &GeneralizedFunction) -> Result<Equality, AlgebraError> {
    f.same_algebra(g)?;
    let diff = &f.representative - &g.representative;
    Ok(match membership(&diff, &f.algebra.ideal, &f.algebra.scan()) {
        MembershipVerdict::InIdeal { .. } => Equality::Equal,
        MembershipVerdict::NotInIdeal { witness } => Equality::NotEqual { witness },
        MembershipVerdict::Unknown => Equality::Unknown,
    })
}

/// Distributions with a catalog representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DistributionTag {
    Delta,
    Heaviside,
    DeltaDerivative { order: u32 },
    SmoothEmbed { psi: Expr },
}

/// `(1 + tanh(νx))/2`.
pub fn heaviside_representative() -> SmoothSequence {
    SmoothSequence::new(parse("(1 + tanh(nu*x))/2").expect("catalog literal"))
}

/// `ν/(2cosh²(νx))`, the derivative of the Heaviside representative.
pub fn delta_representative() -> SmoothSequence {
    SmoothSequence::new(parse("nu/(2*cosh(nu*x)^2)").expect("catalog literal"))
}

pub fn embed_distribution(tag: &DistributionTag, algebra: &AlgebraConfig) -> Result<GeneralizedFunction, AlgebraError> {
    let rep = match tag {
        DistributionTag::Delta => delta_representative(),
        DistributionTag::Heaviside => heaviside_representative(),
        DistributionTag::DeltaDerivative { order } => delta_representative().derive(*order),
        DistributionTag::SmoothEmbed { psi } => SmoothSequence::diagonal(psi)?,
    };
    GeneralizedFunction::new(rep, algebra)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub psi: Expr,
    pub chi: Expr,
    /// `u_ψ·u_χ - u_{ψχ}` simplifies to the zero sequence.
    pub structural_zero: bool,
    /// Largest `|ψ(x)χ(x) - (ψχ)(x)|` over the grid, each side evaluated
    /// from its own representative, relative to `max(|ψχ|, 1)`.
    pub max_residual: f64,
    pub grid_points: usize,
    pub passed: bool,
}

pub const CONSISTENCY_GRID: usize = 256;
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Checks that the diagonal embedding is multiplicative on `psi`, `chi`.
pub fn smooth_mult_consistency(psi: &Expr, chi: &Expr, dom: &DomainInterval) -> Result<ConsistencyReport, AlgebraError> {
    let a = SmoothSequence::diagonal(psi)?;
    let b = SmoothSequence::diagonal(chi)?;
    let product = &a * &b;
    let joint = SmoothSequence::diagonal(&Expr::mul2(psi.clone(), chi.clone()))?;
    let structural_zero = (&product - &joint).is_zero();
    let mut max_residual: f64 = 0.0;
    for x in dom.midpoints(CONSISTENCY_GRID) {
        let lhs = a.eval(1, x).map_err(SequenceError::from)? * b.eval(1, x).map_err(SequenceError::from)?;
        let rhs = joint.eval(1, x).map_err(SequenceError::from)?;
        max_residual = max_residual.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    Ok(ConsistencyReport {
        psi: psi.clone(),
        chi: chi.clone(),
        structural_zero,
        max_residual,
        grid_points: CONSISTENCY_GRID,
        passed: structural_zero || max_residual < CONSISTENCY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub representative: SmoothSequence,
    pub representative_verdict: FunctionalVerdict,
    pub image: SmoothSequence,
    pub image_verdict: FunctionalVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingReport {
    /// The operation in its variable `u`.
    pub operation: String,
    pub entries: Vec<BranchEntry>,
    /// Every representative looks weakly null.
    pub all_null: bool,
    /// Index pairs whose images have different distributional outcomes.
    pub distinct_pairs: Vec<(usize, usize)>,
    pub branching_witnessed: bool,
    pub conclusion: String,
}

/// Two limits count as different when they differ by more than `tol` and
/// by [`tolerances::SEPARATION_FACTOR`] times their combined uncertainty.
fn separated(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    let gap = (a.0 - b.0).abs();
    gap > tol && gap >= tolerances::SEPARATION_FACTOR * (a.1 + b.1)
}

fn outcomes_differ(a: &FunctionalVerdict, b: &FunctionalVerdict, tol: f64) -> bool {
    if a.classification != b.classification {
        return true;
    }
    a.per_test_function.iter().zip(&b.per_test_function).any(|(ta, tb)| match (&ta.verdict, &tb.verdict) {
        (LimitVerdict::ConvergesTo { value: va, uncertainty: ua }, LimitVerdict::ConvergesTo { value: vb, uncertainty: ub }) => {
            separated((*va, *ua), (*vb, *ub), tol)
        }
        (LimitVerdict::ConvergesTo { .. }, LimitVerdict::Diverges { .. })
        | (LimitVerdict::Diverges { .. }, LimitVerdict::ConvergesTo { .. }) => true,
        _ => false,
    })
}

/// Applies `operation` to several representatives of the zero
/// distribution and compares the weak limits of the results.
pub fn branching_demo(
    reps: &[SmoothSequence],
    operation: &Expr,
    dom: &DomainInterval,
    panel: &Panel,
    schedule: &Schedule,
    tol: f64,
) -> Result<BranchingReport, AlgebraError> {
    if reps.len() < 2 {
        return Err(AlgebraError::TooFewRepresentatives(reps.len()));
    }
    let lattice = SafetyLattice::default();
    let mut entries = Vec::with_capacity(reps.len());
    for rep in reps {
        let image = rep.apply_smooth(operation, dom, &lattice)?;
        entries.push(BranchEntry {
            representative: rep.clone(),
            representative_verdict: classify_membership(rep, panel, schedule, tol)?,
            image_verdict: classify_membership(&image, panel, schedule, tol)?,
            image,
        });
    }
    let all_null = entries.iter().all(|e| e.representative_verdict.classification == Classification::EvidenceV);
    let mut distinct_pairs = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if outcomes_differ(&entries[i].image_verdict, &entries[j].image_verdict, tol) {
                distinct_pairs.push((i, j));
            }
        }
    }
    let branching_witnessed = all_null && !distinct_pairs.is_empty();
    let op_text = display_outer(operation);
    let conclusion = if branching_witnessed {
        format!(
            "all {} representatives are weakly null, yet applying u -> {} gives different weak limits for {} pair(s): \
             the outcome depends on the representative, so on the ideal that decides which representatives are identified",
            entries.len(),
            op_text,
            distinct_pairs.len()
        )
    } else if !all_null {
        "not a branching witness: some representative is not weakly null".to_string()
    } else {
        format!("not a branching witness: u -> {op_text} gives the same weak limits for every representative")
    };
    Ok(BranchingReport { operation: op_text, entries, all_null, distinct_pairs, branching_witnessed, conclusion })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSquareCheck {
    pub center: f64,
    pub width: f64,
    pub phi_at_zero: f64,
    pub growth_exponent: Option<f64>,
    /// Largest `|p_ν / (νφ(0)/3) - 1|` over scheduled `ν ≥ 16`.
    pub max_relative_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSquareReport {
    pub delta: SmoothSequence,
    pub delta_squared: SmoothSequence,
    pub verdict: FunctionalVerdict,
    /// One entry per panel member whose support contains 0.
    pub checks: Vec<DeltaSquareCheck>,
    pub passed: bool,
    pub conclusion: String,
}

pub const DELTA_SQUARE_MIN_NU: u32 = 16;
pub const DELTA_SQUARE_REL_TOL: f64 = 0.05;
pub const DELTA_SQUARE_EXPONENT_TOL: f64 = 0.1;

/// Squares the delta representative in the eventually-zero algebra and
/// checks that its pairings grow like `νφ(0)/3` (`∫sech⁴ = 4/3`).
pub fn delta_square_demo(
    dom: &DomainInterval,
    panel: &Panel,
    schedule: &Schedule,
    tol: f64,
) -> Result<DeltaSquareReport, AlgebraError> {
    let algebra = AlgebraConfig::eventually_zero(*dom);
    let delta = embed_distribution(&DistributionTag::Delta, &algebra)?;
    let square = gf_mul(&delta, &delta)?;
    let verdict = classify_membership(square.representative(), panel, schedule, tol)?;
    let checks: Vec<DeltaSquareCheck> = verdict
        .per_test_function
        .iter()
        .filter(|t| {
            let (lo, hi) = t.test_function.support();
            lo < 0.0 && 0.0 < hi
        })
        .map(|t| {
            let phi_at_zero = t.test_function.value(0.0);
            let growth_exponent = match t.verdict {
                LimitVerdict::Diverges { growth_exponent, .. } => Some(growth_exponent),
                _ => None,
            };
            let max_relative_deviation = t
                .samples
                .iter()
                .filter(|s| s.nu >= DELTA_SQUARE_MIN_NU)
                .map(|s| (s.value / (f64::from(s.nu) * phi_at_zero / 3.0) - 1.0).abs())
                .fold(0.0, f64::max);
            DeltaSquareCheck {
                center: t.test_function.center,
                width: t.test_function.width,
                phi_at_zero,
                growth_exponent,
                max_relative_deviation,
                passed: growth_exponent.is_some_and(|g| (g - 1.0).abs() <= DELTA_SQUARE_EXPONENT_TOL)
                    && max_relative_deviation <= DELTA_SQUARE_REL_TOL,
            }
        })
        .collect();
    let passed = !checks.is_empty()
        && checks.iter().all(|c| c.passed)
        && verdict.classification == Classification::EvidenceDivergent;
    let conclusion = if passed {
        "the square of the delta representative is a well-defined algebra element whose pairings grow linearly, \
         like nu*phi(0)/3: it has no distributional limit"
            .to_string()
    } else {
        format!("delta square check failed: classification {:?}", verdict.classification)
    };
    Ok(DeltaSquareReport {
        delta: delta.representative().clone(),
        delta_squared: square.representative().clone(),
        verdict,
        checks,
        passed,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{bump, pair};
    use std::f64::consts::PI;

    fn seq(t: &str) -> SmoothSequence {
        SmoothSequence::new(parse(t).unwrap())
    }

    fn sym() -> DomainInterval {
        DomainInterval::new(-PI, PI).unwrap()
    }

    fn ez() -> AlgebraConfig {
        AlgebraConfig::eventually_zero(sym())
    }

    fn embed(tag: DistributionTag) -> GeneralizedFunction {
        embed_distribution(&tag, &ez()).unwrap()
    }

    fn smooth(t: &str) -> GeneralizedFunction {
        embed(DistributionTag::SmoothEmbed { psi: parse(t).unwrap() })
    }

    #[test]
    fn diagonal_morphism_on_x() {
        let sq = gf_mul(&smooth("x"), &smooth("x")).unwrap();
        assert_eq!(gf_equal(&sq, &smooth("x^2")).unwrap(), Equality::Equal);
        let zero = GeneralizedFunction::new(SmoothSequence::zero(), &ez()).unwrap();
        assert_eq!(gf_add(&smooth("x"), &zero).unwrap(), smooth("x"));
    }

    #[test]
    fn delta_square_representative() {
        let d = embed(DistributionTag::Delta);
        let sq = gf_mul(&d, &d).unwrap();
        assert_eq!(sq.representative(), &seq("nu^2/(4*cosh(nu*x)^4)"));
    }

    #[test]
    fn heaviside_derivative_is_delta() {
        let h = embed(DistributionTag::Heaviside);
        assert_eq!(gf_derive(&h, 1).unwrap(), embed(DistributionTag::Delta));
        assert_eq!(gf_derive(&h, 0).unwrap(), h);
    }

    #[test]
    fn derivation_is_gated() {
        let params = OffDiagParams::new(DomainInterval::new(0.0, 2.0 * PI).unwrap());
        let ideal = IdealSpec::principal(seq("1+sin(nu*x)"));
        let algebra = AlgebraConfig::new(ideal, params.domain, &params).unwrap();
        assert!(!algebra.derivation_capable());
        let f = GeneralizedFunction::new(seq("x"), &algebra).unwrap();
        assert!(matches!(gf_derive(&f, 1), Err(AlgebraError::NotDerivationCapable(_))));
        assert_eq!(gf_derive(&f, 0).unwrap(), f);
    }

    #[test]
    fn improper_ideal_is_rejected() {
        let params = OffDiagParams::new(DomainInterval::new(0.0, 2.0 * PI).unwrap());
        let ideal = IdealSpec::generated(vec![seq("1+sin(nu*x)"), seq("1+cos(nu*x)")]);
        assert!(matches!(
            AlgebraConfig::new(ideal, params.domain, &params),
            Err(AlgebraError::NotOffDiagonal(OffDiagVerdict::ContainsUnit { .. }))
        ));
    }

    #[test]
    fn equality_modulo_eventually_zero() {
        let base = seq("x*cos(nu*x)");
        let mut perturbed = base.clone();
        for (i, t) in [(1, "7"), (4, "x^3"), (9, "exp(x)")] {
            perturbed = perturbed.with_exception(i, parse(t).unwrap()).unwrap();
        }
        let f = GeneralizedFunction::new(base, &ez()).unwrap();
        let g = GeneralizedFunction::new(perturbed, &ez()).unwrap();
        assert_eq!(gf_equal(&f, &g).unwrap(), Equality::Equal);
        assert!(matches!(gf_equal(&smooth("1"), &smooth("0")).unwrap(), Equality::NotEqual { .. }));
        let c = GeneralizedFunction::new(seq("cos(nu*x)"), &ez()).unwrap();
        let z = GeneralizedFunction::new(SmoothSequence::zero(), &ez()).unwrap();
        assert!(matches!(gf_equal(&c, &z).unwrap(), Equality::NotEqual { .. }));
    }

    #[test]
    fn mismatched_algebras() {
        let other = AlgebraConfig::eventually_zero(DomainInterval::new(-1.0, 1.0).unwrap());
        let f = GeneralizedFunction::new(seq("x"), &other).unwrap();
        assert_eq!(gf_add(&f, &smooth("x")), Err(AlgebraError::MismatchedAlgebras));
    }

    #[test]
    fn delta_sifts() {
        let phi = bump(0.2, 0.5, false, &sym()).unwrap();
        let q = pair(embed(DistributionTag::Delta).representative(), 1024, &phi).unwrap();
        assert!((q.value - phi.value(0.0)).abs() < 1e-3);
    }

    #[test]
    fn smooth_products_are_consistent() {
        for (a, b) in [("x", "x"), ("sin(x)", "cos(x)"), ("1", "exp(x)*x^2")] {
            let r = smooth_mult_consistency(&parse(a).unwrap(), &parse(b).unwrap(), &sym()).unwrap();
            assert!(r.passed && r.structural_zero, "{a} {b}: {r:?}");
        }
    }

    #[test]
    fn smooth_embed_rejects_nu() {
        let tag = DistributionTag::SmoothEmbed { psi: parse("nu*x").unwrap() };
        assert!(matches!(embed_distribution(&tag, &ez()), Err(AlgebraError::Sequence(_))));
    }
}
