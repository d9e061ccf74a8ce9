use std::fmt;

use super::Expr;

// Printing is the inverse of the parser: every node is rendered so that
// parsing the text back yields a structurally equal tree. Parentheses are
// inserted wherever the parser would otherwise merge or re-associate nodes.

fn is_atomic(e: &Expr) -> bool {
    match e {
        Expr::Num(v) => *v >= 0.0 && !v.is_sign_negative(),
        Expr::Pi | Expr::X | Expr::Nu | Expr::Call(..) => true,
        _ => false,
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    // shortest representation that parses back to the same float
    write!(f, "{v}")
}

fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if v.is_sign_negative() && *v != 0.0 {
                    write!(f, "-")?;
                    write_num(f, -v)
                } else {
                    write_num(f, *v)
                }
            }
            Expr::Pi => write!(f, "pi"),
            Expr::X => write!(f, "x"),
            Expr::Nu => write!(f, "nu"),
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
            Expr::Pow(b, k) => {
                paren(f, b, !is_atomic(b))?;
                write!(f, "^{k}")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                let bare = match &**a {
                    Expr::Pow(b, _) => !matches!(**b, Expr::Num(v) if v.is_sign_negative()),
                    Expr::Num(_) => false,
                    other => is_atomic(other),
                };
                paren(f, a, !bare)
            }
            Expr::Mul(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    let wrap = matches!(c, Expr::Add(_) | Expr::Sub(..) | Expr::Mul(_) | Expr::Div(..));
                    paren(f, c, wrap)?;
                }
                Ok(())
            }
            Expr::Div(a, b) => {
                paren(f, a, matches!(**a, Expr::Add(_) | Expr::Sub(..)))?;
                write!(f, "/")?;
                paren(f, b, matches!(**b, Expr::Add(_) | Expr::Sub(..) | Expr::Mul(_) | Expr::Div(..)))
            }
            Expr::Add(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    let wrap = matches!(c, Expr::Add(_)) || (i > 0 && matches!(c, Expr::Sub(..)));
                    paren(f, c, wrap)?;
                }
                Ok(())
            }
            Expr::Sub(a, b) => {
                write!(f, "{a} - ")?;
                paren(f, b, matches!(**b, Expr::Add(_) | Expr::Sub(..)))
            }
        }
    }
}

/// Renders an outer function (parsed by [`super::parse_outer`]) in its own
/// variable `u`.
pub fn display_outer(e: &Expr) -> String {
    let text = e.to_string();
    let mut out = String::with_capacity(text.len());
    let mut ident = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_alphabetic() {
            ident.push(ch);
            continue;
        }
        if !ident.is_empty() {
            out.push_str(if ident == "x" { "u" } else { &ident });
            ident.clear();
        }
        out.push(ch);
    }
    out.pop();
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Func};
    use super::*;

    fn roundtrip(e: &Expr) {
        let text = e.to_string();
        let back = parse(&text).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert_eq!(&back, e, "text was {text}");
    }

    #[test]
    fn tricky_shapes_roundtrip() {
        let cases = vec![
            Expr::Num(-2.0),
            Expr::neg(Expr::Num(2.0)),
            Expr::neg(Expr::pow(Expr::Num(2.0), 2)),
            Expr::neg(Expr::pow(Expr::Num(-2.0), 2)),
            Expr::pow(Expr::Num(-2.0), 3),
            Expr::Add(vec![Expr::Add(vec![Expr::X, Expr::Nu]), Expr::Pi]),
            Expr::Add(vec![Expr::X, Expr::sub(Expr::Nu, Expr::Pi)]),
            Expr::Add(vec![Expr::sub(Expr::Nu, Expr::Pi), Expr::X]),
            Expr::sub(Expr::X, Expr::sub(Expr::Nu, Expr::Pi)),
            Expr::Mul(vec![Expr::Mul(vec![Expr::X, Expr::Nu]), Expr::Pi]),
            Expr::Mul(vec![Expr::div(Expr::X, Expr::Nu), Expr::Pi]),
            Expr::div(Expr::Mul(vec![Expr::X, Expr::Nu]), Expr::Pi),
            Expr::div(Expr::X, Expr::div(Expr::Nu, Expr::Pi)),
            Expr::Mul(vec![Expr::Num(-1.0), Expr::X]),
            Expr::Add(vec![Expr::X, Expr::Num(-1.5)]),
            Expr::pow(Expr::call(Func::Cos, Expr::Mul(vec![Expr::Nu, Expr::X])), -2),
            Expr::neg(Expr::neg(Expr::X)),
            Expr::Num(0.1),
            Expr::Num(1e-20),
            Expr::Num(123456789.25),
        ];
        for c in &cases {
            roundtrip(c);
        }
    }

    #[test]
    fn readable_output() {
        assert_eq!(parse("2 + sin(nu*x) + cos(nu*x)").unwrap().to_string(), "2 + sin(nu*x) + cos(nu*x)");
        assert_eq!(parse("x^-2").unwrap().to_string(), "x^-2");
    }

    #[test]
    fn outer_functions_print_in_u() {
        let e = super::super::parse_outer("u^2 + exp(u)*cosh(2*u)").unwrap();
        assert_eq!(display_outer(&e), "u^2 + exp(u)*cosh(2*u)");
    }
}
