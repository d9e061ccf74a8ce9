use super::simplify::{add_of, mul_of, pow_of};
use super::{simplify, Expr, Func};

/// `order`-th derivative with respect to `x`, simplified after each step.
pub fn diff(e: &Expr, order: u32) -> Expr {
    let mut cur = simplify(e);
    for _ in 0..order {
        cur = simplify(&d(&cur));
    }
    cur
}

fn d(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Pi | Expr::Nu => Expr::zero(),
        Expr::X => Expr::one(),
        Expr::Neg(a) => Expr::neg(d(a)),
        Expr::Add(v) => add_of(v.iter().map(d).collect()),
        Expr::Sub(a, b) => Expr::sub(d(a), d(b)),
        Expr::Mul(v) => {
            // Leibniz over an n-ary product
            let terms = (0..v.len())
                .map(|i| {
                    let mut factors = v.clone();
                    factors[i] = d(&v[i]);
                    mul_of(factors)
                })
                .collect();
            add_of(terms)
        }
        Expr::Div(a, b) => {
            let num = Expr::sub(
                Expr::mul2(d(a), (**b).clone()),
                Expr::mul2((**a).clone(), d(b)),
            );
            Expr::div(num, Expr::pow((**b).clone(), 2))
        }
        Expr::Pow(b, k) => mul_of(vec![Expr::Num(f64::from(*k)), pow_of((**b).clone(), k - 1), d(b)]),
        Expr::Call(f, a) => {
            let inner = d(a);
            let u = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Tanh => Expr::pow(Expr::call(Func::Cosh, u), -2),
                // sinh(u) = tanh(u) cosh(u) keeps the result inside the language
                Func::Cosh => Expr::mul2(Expr::call(Func::Tanh, u.clone()), Expr::call(Func::Cosh, u)),
            };
            mul_of(vec![outer, inner])
        }
    }
}
