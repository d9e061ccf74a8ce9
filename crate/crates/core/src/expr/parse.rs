use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at offset {offset} is not an integer")]
    NonIntegerExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonIntegerExponent { offset } => *offset,
        }
    }
}

/// Parses an expression in `x` and `nu`.
///
/// ```
/// use branch_lab_core::expr::{parse, Expr, Func};
/// let e = parse("1 + sin(nu*x)").unwrap();
/// assert_eq!(
///     e,
///     Expr::Add(vec![
///         Expr::Num(1.0),
///         Expr::call(Func::Sin, Expr::Mul(vec![Expr::Nu, Expr::X])),
///     ])
/// );
/// ```
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, "x", true)?.run()
}

/// Parses a one-variable outer function such as `u^2` or `exp(u)`. The
/// variable `u` is stored in the `x` slot so that composition is a plain
/// substitution; `x` and `nu` are rejected.
pub fn parse_outer(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, "u", false)?.run()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                let integral = !lit.contains(['.', 'e', 'E']);
                out.push((Tok::Num(value, integral), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    var: &'a str,
    allow_nu: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &str, var: &'a str, allow_nu: bool) -> Result<Self, ParseError> {
        Ok(Self { toks: lex(text)?, pos: 0, var, allow_nu })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn run(mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        match self.peek() {
            Tok::End => Ok(e),
            Tok::RParen => self.syntax("unbalanced `)`"),
            _ => self.syntax("expected operator or end of input"),
        }
    }

    // expr := term (('+'|'-') term)*
    //
    // A run of `+` grows one n-ary sum; `-` closes it into a binary
    // difference. Parenthesized sums stay nested.
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        let mut open_sum = false;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    match (&mut acc, open_sum) {
                        (Expr::Add(v), true) => v.push(rhs),
                        _ => acc = Expr::Add(vec![acc, rhs]),
                    }
                    open_sum = true;
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Expr::sub(acc, rhs);
                    open_sum = false;
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        let mut open_product = false;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    match (&mut acc, open_product) {
                        (Expr::Mul(v), true) => v.push(rhs),
                        _ => acc = Expr::Mul(vec![acc, rhs]),
                    }
                    open_product = true;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = Expr::div(acc, rhs);
                    open_product = false;
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := ['-'] atom ['^' integer]
    //
    // `-2` is the literal -2; `-2^2` is -(2^2); `-(2)` is a negation node.
    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negated = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let bare_number = matches!(self.peek(), Tok::Num(..));
        let mut base = self.atom()?;
        let powered = if *self.peek() == Tok::Caret {
            self.bump();
            let k = self.exponent()?;
            base = Expr::pow(base, k);
            true
        } else {
            false
        };
        Ok(match (negated, bare_number && !powered, base) {
            (false, _, b) => b,
            (true, true, Expr::Num(v)) => Expr::Num(-v),
            (true, _, b) => Expr::neg(b),
        })
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let offset = self.offset();
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        match self.bump() {
            Tok::Num(v, integral) => {
                let v = sign * v;
                if !integral || v.fract() != 0.0 || v.abs() > f64::from(i32::MAX) {
                    return Err(ParseError::NonIntegerExponent { offset });
                }
                Ok(v as i32)
            }
            Tok::Ident(_) | Tok::LParen => Err(ParseError::NonIntegerExponent { offset }),
            _ => Err(ParseError::Syntax { offset, message: "expected integer exponent".into() }),
        }
    }

    // atom := number | 'pi' | var | 'nu' | fn '(' expr ')' | '(' expr ')'
    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v, _) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                if name == self.var {
                    return Ok(Expr::X);
                }
                if name == "nu" && self.allow_nu {
                    return Ok(Expr::Nu);
                }
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.syntax(format!("expected `(` after `{name}`"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::call(f, arg));
                }
                Err(ParseError::UnknownIdentifier { offset, name })
            }
            Tok::End => Err(ParseError::Syntax { offset, message: "unexpected end of input".into() }),
            t => Err(ParseError::Syntax { offset, message: format!("unexpected token {t:?}") }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            self.syntax("expected `)`")
        }
    }
}
