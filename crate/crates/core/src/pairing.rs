//! Test functions and the distributional pairing `⟨ψ_ν, φ⟩ = ∫ ψ_ν φ dx`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::DomainInterval;
use crate::sequences::SmoothSequence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PairingError {
    #[error("bump width must be positive and finite, got {0}")]
    BadWidth(f64),
    #[error("bump support [{lo}, {hi}] escapes the domain {domain}")]
    SupportEscapes { lo: f64, hi: f64, domain: DomainInterval },
    #[error("a panel needs at least one test function")]
    EmptyPanel,
    #[error("panel supports cover {covered:.1}% of the domain, need at least 80%")]
    PoorCoverage { covered: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
}

/// The Cauchy bump `exp(-1/(1-u^2))`, `u = (x - center)/width`, optionally
/// scaled to unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
    pub normalized: bool,
}

/// `∫_{-1}^{1} exp(-1/(1-u^2)) du`.
pub fn raw_bump_integral() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        // the integrand is flat at ±1, so composite Simpson converges faster
        // than any power of the step; 20000 nodes reach round-off
        integrate_with_step(unit_bump, -1.0, 1.0, 1e-4).expect("finite").value
    })
}

fn unit_bump(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Builds a bump whose support `[center - width, center + width]` lies in
/// the closure of `dom`.
pub fn bump(center: f64, width: f64, normalized: bool, dom: &DomainInterval) -> Result<TestFunction, PairingError> {
    if !(width > 0.0 && width.is_finite() && center.is_finite()) {
        return Err(PairingError::BadWidth(width));
    }
    let (lo, hi) = (center - width, center + width);
    // allow round-off at the boundary of a panel that exactly tiles the domain
    let slack = 1e-12 * dom.width();
    if lo < dom.lower() - slack || hi > dom.upper() + slack {
        return Err(PairingError::SupportEscapes { lo, hi, domain: *dom });
    }
    Ok(TestFunction { center, width, normalized })
}

impl TestFunction {
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    fn scale(&self) -> f64 {
        if self.normalized {
            1.0 / (self.width * raw_bump_integral())
        } else {
            1.0
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        unit_bump((x - self.center) / self.width) * self.scale()
    }

    /// `φ'(x) = φ(x) · (-2u / (1-u^2)^2) / width`.
    pub fn derivative(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        let q = 1.0 - u * u;
        if q <= 0.0 {
            return 0.0;
        }
        self.value(x) * (-2.0 * u / (q * q)) / self.width
    }

    /// `∫ φ dx`.
    pub fn integral(&self) -> f64 {
        if self.normalized {
            1.0
        } else {
            self.width * raw_bump_integral()
        }
    }
}

/// Evidence basis for weak-limit verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    members: Vec<TestFunction>,
}

impl Panel {
    pub fn new(members: Vec<TestFunction>, dom: &DomainInterval) -> Result<Self, PairingError> {
        if members.is_empty() {
            return Err(PairingError::EmptyPanel);
        }
        let mut checked = Vec::with_capacity(members.len());
        for m in members {
            checked.push(bump(m.center, m.width, m.normalized, dom)?);
        }
        let covered = coverage(&checked, dom);
        if covered < 0.8 {
            return Err(PairingError::PoorCoverage { covered: 100.0 * covered });
        }
        Ok(Self { members: checked })
    }

    /// `count` bumps with equally spaced centers and width equal to the
    /// spacing, so neighbouring supports overlap and jointly tile the domain.
    pub fn equally_spaced(dom: &DomainInterval, count: usize, normalized: bool) -> Result<Self, PairingError> {
        if count == 0 {
            return Err(PairingError::EmptyPanel);
        }
        let spacing = dom.width() / (count as f64 + 1.0);
        let members = (1..=count)
            .map(|k| TestFunction { center: dom.lower() + k as f64 * spacing, width: spacing, normalized })
            .collect();
        Self::new(members, dom)
    }

    pub fn members(&self) -> &[TestFunction] {
        &self.members
    }
}

/// Fraction of the domain covered by the union of supports.
fn coverage(members: &[TestFunction], dom: &DomainInterval) -> f64 {
    let mut spans: Vec<(f64, f64)> = members
        .iter()
        .map(|m| {
            let (lo, hi) = m.support();
            (lo.max(dom.lower()), hi.min(dom.upper()))
        })
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in spans {
        cur = match cur {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total / dom.width()
}

/// Quadrature result; `error_estimate` is the step-halving difference plus
/// an accumulated round-off allowance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

/// Composite quadrature over `interval` with step at most
/// `min(width/50, period/16)`, `period = 2π/oscillation_hint`. The width
/// bound is tightened to `width/200`, which brings the mass of a bump to
/// round-off.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    interval: &DomainInterval,
    oscillation_hint: u32,
) -> Result<Quadrature, PairingError> {
    let period = 2.0 * PI / f64::from(oscillation_hint.max(1));
    let step = (interval.width() / 200.0).min(period / 16.0);
    integrate_with_step(f, interval.lower(), interval.upper(), step)
}

/// Composite Simpson on `[a, b]` with coarse step at most `max_step`.
/// The coarse rule uses every other node of the fine rule; the fine value
/// is returned and the difference is the error estimate.
pub fn integrate_with_step(f: impl Fn(f64) -> f64, a: f64, b: f64, max_step: f64) -> Result<Quadrature, PairingError> {
    let len = b - a;
    let mut n = (len / max_step).ceil().max(2.0) as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let fine = 2 * n;
    let h = len / fine as f64;
    let mut s_fine = 0.0;
    let mut s_coarse = 0.0;
    let mut abs_sum = 0.0;
    for i in 0..=fine {
        let x = if i == fine { b } else { a + i as f64 * h };
        let y = f(x);
        if !y.is_finite() {
            return Err(PairingError::NonFinite { x });
        }
        let wf = if i == 0 || i == fine {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s_fine += wf * y;
        abs_sum += y.abs();
        if i % 2 == 0 {
            let j = i / 2;
            let wc = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s_coarse += wc * y;
        }
    }
    let value = s_fine * h / 3.0;
    let coarse = s_coarse * 2.0 * h / 3.0;
    let roundoff = f64::EPSILON * fine as f64 * abs_sum * h;
    Ok(Quadrature { value, error_estimate: (value - coarse).abs() + roundoff })
}

fn support_interval(phi: &TestFunction) -> DomainInterval {
    let (lo, hi) = phi.support();
    DomainInterval::new(lo, hi).expect("positive width")
}

/// `⟨ψ_ν, φ⟩` with oscillation hint `ν`.
pub fn pair(s: &SmoothSequence, nu: u32, phi: &TestFunction) -> Result<Quadrature, PairingError> {
    integrate(
        |x| {
            let w = phi.value(x);
            if w == 0.0 {
                0.0
            } else {
                s.eval(nu, x).map(|v| v * w).unwrap_or(f64::NAN)
            }
        },
        &support_interval(phi),
        nu,
    )
}

/// `∫ ψ_ν φ' dx`, the right-hand side of integration by parts.
pub fn pair_with_derivative(s: &SmoothSequence, nu: u32, phi: &TestFunction) -> Result<Quadrature, PairingError> {
    integrate(
        |x| {
            let w = phi.derivative(x);
            if w == 0.0 {
                0.0
            } else {
                s.eval(nu, x).map(|v| v * w).unwrap_or(f64::NAN)
            }
        },
        &support_interval(phi),
        nu,
    )
}
