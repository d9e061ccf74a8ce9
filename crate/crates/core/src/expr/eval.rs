use std::f64::consts::PI;

use thiserror::Error;

use super::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at nu = {nu}, x = {x}")]
    DivisionByZero { nu: f64, x: f64 },
    #[error("non-finite value at nu = {nu}, x = {x}")]
    NonFinite { nu: f64, x: f64 },
    #[error("index nu must be at least 1, got {nu}")]
    BadIndex { nu: f64 },
}

impl Expr {
    /// Evaluates at index `nu` (≥ 1) and point `x`. Intermediate overflow is
    /// tolerated as long as the final value is finite (`cosh(nu*x)^-2` at
    /// large `nu*x` evaluates to 0).
    pub fn eval(&self, nu: u32, x: f64) -> Result<f64, EvalError> {
        if nu == 0 {
            return Err(EvalError::BadIndex { nu: 0.0 });
        }
        self.eval_real(f64::from(nu), x)
    }

    /// Evaluation with a real-valued index; used by the outer-function
    /// machinery and the samplers.
    pub fn eval_real(&self, nu: f64, x: f64) -> Result<f64, EvalError> {
        let v = self.go(nu, x)?;
        if v.is_nan() || v.is_infinite() {
            return Err(EvalError::NonFinite { nu, x });
        }
        Ok(v)
    }

    fn go(&self, nu: f64, x: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => PI,
            Expr::X => x,
            Expr::Nu => nu,
            Expr::Neg(a) => -a.go(nu, x)?,
            Expr::Add(v) => {
                let mut s = 0.0;
                for e in v {
                    s += e.go(nu, x)?;
                }
                s
            }
            Expr::Sub(a, b) => a.go(nu, x)? - b.go(nu, x)?,
            Expr::Mul(v) => {
                let mut p = 1.0;
                for e in v {
                    p *= e.go(nu, x)?;
                }
                p
            }
            Expr::Div(a, b) => {
                let den = b.go(nu, x)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero { nu, x });
                }
                a.go(nu, x)? / den
            }
            Expr::Pow(b, k) => {
                let base = b.go(nu, x)?;
                if base == 0.0 && *k < 0 {
                    return Err(EvalError::DivisionByZero { nu, x });
                }
                base.powi(*k)
            }
            Expr::Call(f, a) => f.apply(a.go(nu, x)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn ev(t: &str, nu: u32, x: f64) -> f64 {
        parse(t).unwrap().eval(nu, x).unwrap()
    }

    #[test]
    fn analytic_values() {
        let v = ev("2 + sin(nu*x) + cos(nu*x)", 1, PI / 4.0);
        assert!((v - (2.0 + 2f64.sqrt())).abs() < 1e-14);
        assert_eq!(ev("cos(nu*x)", 2, 0.0), 1.0);
        assert!(ev("1 + sin(nu*x)", 2, 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = parse("1/x").unwrap();
        assert!(matches!(e.eval(1, 0.0), Err(EvalError::DivisionByZero { .. })));
        let e = parse("x^-2").unwrap();
        assert!(matches!(e.eval(1, 0.0), Err(EvalError::DivisionByZero { .. })));
    }

    #[test]
    fn overflow_to_zero_is_fine_but_nan_is_not() {
        assert_eq!(ev("cosh(nu*x)^-2", 4096, 3.0), 0.0);
        let e = parse("exp(x)*exp(-x)").unwrap();
        assert!(matches!(e.eval(1, 1000.0), Err(EvalError::NonFinite { .. })));
    }

    #[test]
    fn index_zero_rejected() {
        assert!(matches!(parse("nu").unwrap().eval(0, 0.0), Err(EvalError::BadIndex { .. })));
    }
}
