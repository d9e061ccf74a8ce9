//! Evidence-based weak-limit oracle.
//!
//! Weak convergence quantifies over every test function and every index,
//! so nothing here is a proof. Pairings are computed along an increasing
//! schedule of indices for each member of a [`Panel`]; a tail-Cauchy test
//! on the last three schedule entries gives `ConvergesTo`, a stable
//! log-log growth fit gives `Diverges`, and everything else is
//! `Inconclusive`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::DomainInterval;
use crate::pairing::{pair, Panel, PairingError, TestFunction};
use crate::sequences::SmoothSequence;
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeakLimitError {
    #[error("schedule must be strictly increasing, start at 1 or above and have at least 6 entries")]
    BadSchedule,
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

/// Increasing list of indices at which pairings are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Schedule(Vec<u32>);

impl Schedule {
    pub fn new(nus: Vec<u32>) -> Result<Self, WeakLimitError> {
        let increasing = nus.windows(2).all(|w| w[0] < w[1]);
        if nus.len() < 6 || !increasing || nus[0] == 0 {
            return Err(WeakLimitError::BadSchedule);
        }
        Ok(Self(nus))
    }

    /// `1, 2, 4, …` up to `nu_max`.
    pub fn powers_of_two(nu_max: u32) -> Result<Self, WeakLimitError> {
        let nus = (0..32).map(|k| 1u32 << k).take_while(|&n| n <= nu_max).collect();
        Self::new(nus)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self::powers_of_two(4096).expect("13 entries")
    }
}

impl TryFrom<Vec<u32>> for Schedule {
    type Error = WeakLimitError;

    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Schedule::new(v)
    }
}

impl From<Schedule> for Vec<u32> {
    fn from(s: Schedule) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum LimitVerdict {
    ConvergesTo { value: f64, uncertainty: f64 },
    Diverges { growth_exponent: f64, fit_residual: f64 },
    Inconclusive,
}

impl LimitVerdict {
    pub fn limit(&self) -> Option<(f64, f64)> {
        match *self {
            LimitVerdict::ConvergesTo { value, uncertainty } => Some((value, uncertainty)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingSample {
    pub nu: u32,
    pub value: f64,
    pub error_estimate: f64,
}

/// Pairings of one sequence against one test function along a schedule,
/// with the resulting verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTrace {
    pub test_function: TestFunction,
    pub verdict: LimitVerdict,
    pub samples: Vec<PairingSample>,
}

/// Verdict from pairing samples ordered by increasing index.
pub fn verdict_from_samples(samples: &[PairingSample], tol: f64) -> LimitVerdict {
    let n = samples.len();
    if n >= 3 {
        let last = &samples[n - 3..];
        let hi = last.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
        let lo = last.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
        let err = last.iter().map(|p| p.error_estimate).fold(0.0, f64::max);
        if hi - lo <= tol && err < tol {
            return LimitVerdict::ConvergesTo { value: samples[n - 1].value, uncertainty: (hi - lo).max(err) };
        }
    }
    let k = n.div_ceil(2);
    let k = k.max(4);
    if n >= k {
        let tail = &samples[n - k..];
        let mags: Vec<f64> = tail.iter().map(|p| p.value.abs()).collect();
        let growing = mags.iter().all(|&m| m > 0.0) && mags.windows(2).all(|w| w[1] > w[0]);
        if growing {
            let pts: Vec<(f64, f64)> = tail.iter().map(|p| (f64::from(p.nu).ln(), p.value.abs().ln())).collect();
            let (slope, residual) = log_log_fit(&pts);
            if residual < tolerances::GROWTH_FIT_RESIDUAL && slope >= tolerances::MIN_GROWTH_EXPONENT {
                return LimitVerdict::Diverges { growth_exponent: slope, fit_residual: residual };
            }
        }
    }
    LimitVerdict::Inconclusive
}

/// Least-squares slope and RMS residual.
fn log_log_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

fn sweep(s: &SmoothSequence, members: &[TestFunction], schedule: &Schedule) -> Result<Vec<Vec<PairingSample>>, PairingError> {
    let nus = schedule.indices();
    let jobs: Vec<(usize, u32)> = (0..members.len()).flat_map(|m| nus.iter().map(move |&nu| (m, nu))).collect();
    // each pairing is an independent sequential sum, so the parallel map is
    // bitwise reproducible; collect keeps the job order
    let results: Vec<PairingSample> = jobs
        .par_iter()
        .map(|&(m, nu)| {
            pair(s, nu, &members[m]).map(|q| PairingSample { nu, value: q.value, error_estimate: q.error_estimate })
        })
        .collect::<Result<_, _>>()?;
    Ok(results.chunks(nus.len()).map(<[PairingSample]>::to_vec).collect())
}

pub fn weak_limit_trace(
    s: &SmoothSequence,
    phi: &TestFunction,
    schedule: &Schedule,
    tol: f64,
) -> Result<LimitTrace, WeakLimitError> {
    let samples = sweep(s, std::slice::from_ref(phi), schedule)?.pop().unwrap_or_default();
    Ok(LimitTrace { test_function: *phi, verdict: verdict_from_samples(&samples, tol), samples })
}

pub fn weak_limit(s: &SmoothSequence, phi: &TestFunction, schedule: &Schedule, tol: f64) -> Result<LimitVerdict, WeakLimitError> {
    weak_limit_trace(s, phi, schedule, tol).map(|t| t.verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Every panel member converges; not all limits vanish.
    #[serde(rename = "EvidenceS∞")]
    EvidenceS,
    /// Every panel member converges to zero (within uncertainty).
    #[serde(rename = "EvidenceV∞")]
    EvidenceV,
    EvidenceDivergent,
    Mixed,
}

impl Classification {
    /// V∞ evidence is also S∞ evidence.
    pub fn is_convergent(self) -> bool {
        matches!(self, Classification::EvidenceS | Classification::EvidenceV)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalVerdict {
    pub classification: Classification,
    pub per_test_function: Vec<LimitTrace>,
}

impl FunctionalVerdict {
    /// Limit per panel member, `None` where the member did not converge.
    pub fn limits(&self) -> Vec<Option<(f64, f64)>> {
        self.per_test_function.iter().map(|t| t.verdict.limit()).collect()
    }
}

pub fn classify_from_traces(traces: &[LimitTrace]) -> Classification {
    if traces.iter().any(|t| matches!(t.verdict, LimitVerdict::Diverges { .. })) {
        return Classification::EvidenceDivergent;
    }
    let limits: Option<Vec<(f64, f64)>> = traces.iter().map(|t| t.verdict.limit()).collect();
    match limits {
        Some(ls) if ls.iter().all(|&(v, u)| v.abs() <= u) => Classification::EvidenceV,
        Some(_) => Classification::EvidenceS,
        None => Classification::Mixed,
    }
}

pub fn classify_membership(
    s: &SmoothSequence,
    panel: &Panel,
    schedule: &Schedule,
    tol: f64,
) -> Result<FunctionalVerdict, WeakLimitError> {
    let rows = sweep(s, panel.members(), schedule)?;
    let per_test_function: Vec<LimitTrace> = panel
        .members()
        .iter()
        .zip(rows)
        .map(|(phi, samples)| LimitTrace { test_function: *phi, verdict: verdict_from_samples(&samples, tol), samples })
        .collect();
    Ok(FunctionalVerdict { classification: classify_from_traces(&per_test_function), per_test_function })
}

/// Per-member comparison of the limit of `v²` with half the mass of the
/// test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfMassCheck {
    pub center: f64,
    pub width: f64,
    pub expected: f64,
    pub observed: Option<f64>,
    pub deviation: Option<f64>,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSquareReport {
    pub domain: DomainInterval,
    pub v: SmoothSequence,
    pub v_verdict: FunctionalVerdict,
    pub v_squared: SmoothSequence,
    pub v_squared_verdict: FunctionalVerdict,
    pub half_mass_checks: Vec<HalfMassCheck>,
    /// `v` looks like a member of V∞ while `v²` looks like a member of
    /// S∞ \ V∞.
    pub counterexample_confirmed: bool,
    pub conclusion: String,
}

/// Tolerance for the comparison of `v²` limits with `½∫φ`.
pub const HALF_MASS_TOL: f64 = 1e-3;

/// Classifies `v` and `v²` over the panel. With `v = cos(νx)` this exhibits
/// a product of two null sequences converging weakly to `1/2`, so no ideal
/// that contains every weakly null sequence can meet the weakly convergent
/// sequences exactly in the null ones.
pub fn nosquare_demo(
    v: &SmoothSequence,
    dom: &DomainInterval,
    panel: &Panel,
    schedule: &Schedule,
    tol: f64,
) -> Result<NoSquareReport, WeakLimitError> {
    let v_squared = v * v;
    let v_verdict = classify_membership(v, panel, schedule, tol)?;
    let v_squared_verdict = classify_membership(&v_squared, panel, schedule, tol)?;
    let half_mass_checks: Vec<HalfMassCheck> = panel
        .members()
        .iter()
        .zip(v_squared_verdict.limits())
        .map(|(phi, lim)| {
            let expected = 0.5 * phi.integral();
            let observed = lim.map(|l| l.0);
            let deviation = observed.map(|o| (o - expected).abs());
            HalfMassCheck {
                center: phi.center,
                width: phi.width,
                expected,
                observed,
                deviation,
                within_tolerance: deviation.is_some_and(|d| d <= HALF_MASS_TOL),
            }
        })
        .collect();
    let counterexample_confirmed = v_verdict.classification == Classification::EvidenceV
        && v_squared_verdict.classification == Classification::EvidenceS;
    let conclusion = if counterexample_confirmed {
        format!(
            "v = {} is weakly null but v^2 converges weakly to a nonzero limit{}: \
             (V∞·V∞) ∩ S∞ ⊄ V∞, so no ideal I ⊇ V∞ satisfies I ∩ S∞ = V∞ and the \
             one-level inclusion diagram cannot be constructed",
            v.tail(),
            if half_mass_checks.iter().all(|c| c.within_tolerance) { " (1/2 against each test function)" } else { "" }
        )
    } else {
        format!(
            "no violation from this representative: v classified {:?}, v^2 classified {:?}",
            v_verdict.classification, v_squared_verdict.classification
        )
    };
    Ok(NoSquareReport {
        domain: *dom,
        v: v.clone(),
        v_verdict,
        v_squared,
        v_squared_verdict,
        half_mass_checks,
        counterexample_confirmed,
        conclusion,
    })
}
