use serde::{Deserialize, Serialize};

use super::{DomainInterval, Expr};
use crate::roots::{bisect, golden_min};
use crate::tolerances;

/// Sample lattice for [`denominator_safety`]: `nu` runs over `1..=nu_count`,
/// `x` over `x_count` interior midpoints of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyLattice {
    pub nu_count: u32,
    pub x_count: usize,
    pub margin: f64,
}

impl Default for SafetyLattice {
    fn default() -> Self {
        Self { nu_count: 64, x_count: 512, margin: tolerances::SAFETY_MARGIN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum SafetyVerdict {
    Safe,
    UnsafeAt { denominator: String, nu: u32, x: f64, value: f64 },
    Inconclusive { reason: String },
}

impl SafetyVerdict {
    pub fn is_safe(&self) -> bool {
        matches!(self, SafetyVerdict::Safe)
    }
}

/// Checks that every denominator of `e` stays at least `margin` away from
/// zero on the lattice. Besides the samples themselves, sign changes between
/// neighbouring samples are bisected and sampled local minima of `|d|` are
/// refined, so zeros that fall between lattice points (including even-order
/// ones such as the zero of `x^2`) are still reported.
pub fn denominator_safety(e: &Expr, dom: &DomainInterval, lattice: &SafetyLattice) -> SafetyVerdict {
    let xs = dom.midpoints(lattice.x_count.max(2));
    let mut inconclusive = None;
    for den in e.denominators() {
        let nus = if den.contains_nu() { 1..=lattice.nu_count.max(1) } else { 1..=1 };
        for nu in nus {
            let f = |x: f64| den.eval(nu, x).unwrap_or(f64::NAN);
            let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let unsafe_at = |x: f64, value: f64| SafetyVerdict::UnsafeAt {
                denominator: den.to_string(),
                nu,
                x,
                value,
            };
            for j in 0..ys.len() {
                let y = ys[j];
                if !y.is_finite() {
                    inconclusive.get_or_insert_with(|| format!("denominator {den} not evaluable at nu = {nu}, x = {}", xs[j]));
                    continue;
                }
                if y.abs() < lattice.margin {
                    return unsafe_at(xs[j], y);
                }
                if j + 1 < ys.len() && ys[j + 1].is_finite() && y.signum() != ys[j + 1].signum() {
                    let (x, _) = bisect(f, xs[j], xs[j + 1], lattice.margin).unwrap_or((xs[j], y));
                    return unsafe_at(x, f(x));
                }
                if j > 0 && j + 1 < ys.len() && y.abs() <= ys[j - 1].abs() && y.abs() <= ys[j + 1].abs() {
                    let (x, m) = golden_min(|t| f(t).abs(), xs[j - 1], xs[j + 1]);
                    if m < lattice.margin {
                        return unsafe_at(x, f(x));
                    }
                }
            }
        }
    }
    match inconclusive {
        Some(reason) => SafetyVerdict::Inconclusive { reason },
        None => SafetyVerdict::Safe,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn check(t: &str, lo: f64, hi: f64) -> SafetyVerdict {
        denominator_safety(&parse(t).unwrap(), &DomainInterval::new(lo, hi).unwrap(), &SafetyLattice::default())
    }

    #[test]
    fn bounded_below_is_safe() {
        assert_eq!(check("1/(2 + sin(nu*x))", 0.0, 6.3), SafetyVerdict::Safe);
        assert_eq!(check("nu/(2*cosh(nu*x)^2)", -1.0, 1.0), SafetyVerdict::Safe);
    }

    #[test]
    fn sine_denominator_reports_witness() {
        match check("1/sin(nu*x)", -1.0, 1.0) {
            SafetyVerdict::UnsafeAt { nu, x, .. } => {
                assert_eq!(nu, 1);
                assert!(x.abs() < 1e-6, "{x}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn even_order_zero_between_samples() {
        assert!(matches!(check("1/x^2", -1.0, 1.0), SafetyVerdict::UnsafeAt { .. }));
        assert!(matches!(check("1/(1 + sin(nu*x))", 0.0, 6.3), SafetyVerdict::UnsafeAt { .. }));
    }

    #[test]
    fn no_division_is_vacuously_safe() {
        assert_eq!(check("x^3 + exp(nu*x)", 0.0, 1.0), SafetyVerdict::Safe);
    }
}
