use std::collections::BTreeMap;

use super::Expr;

/// Rewrites to a normal form: differences and quotients become sums and
/// negative powers, sums and products are flattened and sorted, numeric
/// constants are folded, like terms and like factors are collected, and a
/// numeric coefficient multiplying a single sum is distributed over it.
///
/// No trigonometric or hyperbolic identities are applied, so
/// `sin(x)^2 + cos(x)^2` stays as written. The rewrite terminates and is
/// idempotent.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Num(v) => num(*v),
        Expr::Pi | Expr::X | Expr::Nu => e.clone(),
        Expr::Neg(a) => mul_of(vec![Expr::Num(-1.0), simplify(a)]),
        Expr::Add(v) => add_of(v.iter().map(simplify).collect()),
        Expr::Sub(a, b) => add_of(vec![simplify(a), mul_of(vec![Expr::Num(-1.0), simplify(b)])]),
        Expr::Mul(v) => mul_of(v.iter().map(simplify).collect()),
        Expr::Div(a, b) => mul_of(vec![simplify(a), pow_of(simplify(b), -1)]),
        Expr::Pow(b, k) => pow_of(simplify(b), *k),
        Expr::Call(f, a) => {
            let arg = simplify(a);
            if let Expr::Num(v) = arg {
                let r = f.apply(v);
                if r.is_finite() {
                    return num(r);
                }
            }
            Expr::call(*f, arg)
        }
    }
}

fn num(v: f64) -> Expr {
    // collapse -0.0 so that equal values compare equal structurally
    Expr::Num(if v == 0.0 { 0.0 } else { v })
}

pub(crate) fn pow_of(base: Expr, k: i32) -> Expr {
    if k == 0 {
        return Expr::one();
    }
    if k == 1 {
        return base;
    }
    match base {
        Expr::Num(c) => {
            let r = c.powi(k);
            if r.is_finite() && !(c == 0.0 && k < 0) {
                num(r)
            } else {
                Expr::pow(Expr::Num(c), k)
            }
        }
        Expr::Pow(b, j) => match j.checked_mul(k) {
            Some(jk) => pow_of(*b, jk),
            None => Expr::pow(Expr::Pow(b, j), k),
        },
        Expr::Mul(factors) => mul_of(factors.into_iter().map(|f| pow_of(f, k)).collect()),
        other => Expr::pow(other, k),
    }
}

/// Splits a product into its base and integer exponent.
fn base_exp(e: Expr) -> (Expr, i32) {
    match e {
        Expr::Pow(b, k) => (*b, k),
        other => (other, 1),
    }
}

pub(crate) fn mul_of(factors: Vec<Expr>) -> Expr {
    let mut coeff = 1.0;
    let mut powers: BTreeMap<Expr, i32> = BTreeMap::new();
    let mut stack = factors;
    while let Some(f) = stack.pop() {
        match f {
            Expr::Num(c) => coeff *= c,
            Expr::Mul(inner) => stack.extend(inner),
            other => {
                let (b, k) = base_exp(other);
                let slot = powers.entry(b).or_insert(0);
                *slot = slot.saturating_add(k);
            }
        }
    }
    if coeff == 0.0 {
        return Expr::zero();
    }
    let mut rest: Vec<Expr> = Vec::new();
    for (b, k) in powers {
        if k == 0 {
            continue;
        }
        match pow_of(b, k) {
            Expr::Num(c) => coeff *= c,
            Expr::Mul(inner) => {
                // (a*b)^k re-expanded; fold through a second pass
                let mut all = rest;
                all.extend(inner);
                all.push(Expr::Num(coeff));
                return mul_of(all);
            }
            p => rest.push(p),
        }
    }
    rest.sort();
    match rest.len() {
        0 => num(coeff),
        1 if coeff == 1.0 => rest.pop().unwrap(),
        1 if matches!(rest[0], Expr::Add(_)) => {
            let Some(Expr::Add(terms)) = rest.pop() else { unreachable!() };
            add_of(terms.into_iter().map(|t| mul_of(vec![Expr::Num(coeff), t])).collect())
        }
        _ => {
            if coeff != 1.0 {
                rest.insert(0, num(coeff));
            }
            Expr::Mul(rest)
        }
    }
}

/// Numeric coefficient and base-to-exponent map of a simplified product.
pub(crate) fn factor_map(e: &Expr) -> (f64, BTreeMap<Expr, i32>) {
    let mut coeff = 1.0;
    let mut map = BTreeMap::new();
    let factors: Vec<Expr> = match e {
        Expr::Mul(v) => v.clone(),
        other => vec![other.clone()],
    };
    for f in factors {
        match f {
            Expr::Num(c) => coeff *= c,
            other => {
                let (b, k) = base_exp(other);
                *map.entry(b).or_insert(0) += k;
            }
        }
    }
    (coeff, map)
}

/// Splits a normalized term into numeric coefficient and the remaining key.
pub(crate) fn split_coeff(t: Expr) -> (f64, Expr) {
    match t {
        Expr::Num(c) => (c, Expr::one()),
        Expr::Mul(mut v) => match v.first() {
            Some(Expr::Num(c)) => {
                let c = *c;
                v.remove(0);
                let key = if v.len() == 1 { v.pop().unwrap() } else { Expr::Mul(v) };
                (c, key)
            }
            _ => (1.0, Expr::Mul(v)),
        },
        other => (1.0, other),
    }
}

pub(crate) fn add_of(terms: Vec<Expr>) -> Expr {
    let mut constant = 0.0;
    let mut coeffs: BTreeMap<Expr, f64> = BTreeMap::new();
    let mut stack = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        match t {
            Expr::Num(c) => constant += c,
            Expr::Add(inner) => stack.extend(inner.into_iter().rev()),
            other => {
                let (c, key) = split_coeff(other);
                *coeffs.entry(key).or_insert(0.0) += c;
            }
        }
    }
    let mut out = Vec::new();
    if constant != 0.0 {
        out.push(num(constant));
    }
    for (key, c) in coeffs {
        if c == 0.0 {
            continue;
        }
        if c == 1.0 {
            out.push(key);
        } else {
            match key {
                Expr::Mul(mut v) => {
                    v.insert(0, num(c));
                    out.push(Expr::Mul(v));
                }
                k => out.push(Expr::Mul(vec![num(c), k])),
            }
        }
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn s(text: &str) -> Expr {
        simplify(&parse(text).unwrap())
    }

    #[test]
    fn annihilator_and_identity() {
        assert_eq!(s("0 * sin(nu*x)"), Expr::zero());
        assert_eq!(s("x + 0"), Expr::X);
        assert_eq!(s("1 * x"), Expr::X);
        assert_eq!(s("x^1"), Expr::X);
        assert_eq!(s("x^0"), Expr::one());
    }

    #[test]
    fn like_factors_and_terms_cancel() {
        assert_eq!(s("cos(nu*x)*cos(nu*x) - cos(nu*x)^2"), Expr::zero());
        assert_eq!(s("x - x"), Expr::zero());
        assert_eq!(s("x*x^-1"), Expr::one());
        assert_eq!(s("2*x + 3*x"), s("5*x"));
    }

    #[test]
    fn constants_fold() {
        assert_eq!(s("2*3 + 1"), Expr::Num(7.0));
        assert_eq!(s("exp(0)"), Expr::one());
        assert_eq!(s("cosh(0) + tanh(0)"), Expr::one());
        assert_eq!(s("1/4"), Expr::Num(0.25));
    }

    #[test]
    fn flattening_and_order() {
        assert_eq!(s("(x + nu) + (1 + x)"), s("1 + nu + 2*x"));
        assert_eq!(s("x*(nu*x)"), s("nu*x^2"));
        assert_eq!(s("x*nu"), s("nu*x"));
    }

    #[test]
    fn coefficient_distributes_over_a_single_sum() {
        assert_eq!(s("2*(x + 1)"), s("2*x + 2"));
        assert_eq!(s("-(1 + sin(nu*x))"), s("-1 - sin(nu*x)"));
        // a product of non-numeric factors is not expanded
        assert!(matches!(s("x*(x + 1)"), Expr::Mul(_)));
    }

    #[test]
    fn quotients_become_negative_powers() {
        assert_eq!(s("nu/(2*cosh(nu*x)^2)"), s("0.5*nu*cosh(nu*x)^-2"));
    }

    #[test]
    fn no_trig_identities() {
        assert_ne!(s("sin(x)^2 + cos(x)^2"), Expr::one());
    }

    #[test]
    fn idempotent_on_examples() {
        for t in ["2 + sin(nu*x) + cos(nu*x)", "x/(1+x^2)", "-(x-1)*(x+1)^2", "(nu*x^2)^-3*exp(x)"] {
            let once = s(t);
            assert_eq!(simplify(&once), once, "{t}");
        }
    }
}
