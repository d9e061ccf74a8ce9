//! Closed-form smooth expressions in the space variable `x` and the sequence
//! index `nu`.
//!
//! The language is deliberately small: literals, `pi`, `x`, `nu`, the four
//! arithmetic operations, integer powers and the analytic primitives
//! `sin`, `cos`, `exp`, `tanh`, `cosh`. It is closed under differentiation
//! (`sinh` is written as `tanh * cosh`), so every derivative of an
//! expression is again an expression.

mod diff;
mod eval;
mod parse;
mod print;
mod safety;
mod simplify;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use diff::diff;
pub use eval::EvalError;
pub use parse::{parse, parse_outer, ParseError};
pub use print::display_outer;
pub use safety::{denominator_safety, SafetyLattice, SafetyVerdict};
pub use simplify::simplify;
pub(crate) use simplify::{factor_map, split_coeff};

/// Unary analytic primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Tanh, Func::Cosh];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Tanh => v.tanh(),
            Func::Cosh => v.cosh(),
        }
    }
}

/// Expression tree.
///
/// `Add` and `Mul` are n-ary; the parser builds them from chains of `+`
/// and `*`, and [`simplify`] produces flattened, sorted instances.
#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Pi,
    X,
    Nu,
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn zero() -> Expr {
        Expr::Num(0.0)
    }

    pub fn one() -> Expr {
        Expr::Num(1.0)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn pow(base: Expr, exp: i32) -> Expr {
        Expr::Pow(Box::new(base), exp)
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn add2(a: Expr, b: Expr) -> Expr {
        Expr::Add(vec![a, b])
    }

    pub fn mul2(a: Expr, b: Expr) -> Expr {
        Expr::Mul(vec![a, b])
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    /// True for the literal zero (after simplification this is the only
    /// representation of the zero expression).
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 1.0)
    }

    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::X | Expr::Nu => Vec::new(),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => vec![a],
            Expr::Sub(a, b) | Expr::Div(a, b) => vec![a, b],
            Expr::Add(v) | Expr::Mul(v) => v.iter().collect(),
        }
    }

    pub fn contains_nu(&self) -> bool {
        matches!(self, Expr::Nu) || self.children().into_iter().any(Expr::contains_nu)
    }

    pub fn contains_x(&self) -> bool {
        matches!(self, Expr::X) || self.children().into_iter().any(Expr::contains_x)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    /// Structural map over the leaves `x` and `nu`.
    fn map_leaves(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        match self {
            Expr::Num(_) | Expr::Pi | Expr::X | Expr::Nu => self.clone(),
            Expr::Neg(a) => Expr::neg(a.map_leaves(f)),
            Expr::Add(v) => Expr::Add(v.iter().map(|e| e.map_leaves(f)).collect()),
            Expr::Mul(v) => Expr::Mul(v.iter().map(|e| e.map_leaves(f)).collect()),
            Expr::Sub(a, b) => Expr::sub(a.map_leaves(f), b.map_leaves(f)),
            Expr::Div(a, b) => Expr::div(a.map_leaves(f), b.map_leaves(f)),
            Expr::Pow(a, k) => Expr::pow(a.map_leaves(f), *k),
            Expr::Call(g, a) => Expr::call(*g, a.map_leaves(f)),
        }
    }

    /// Replaces every occurrence of `x` by `value`.
    pub fn substitute_x(&self, value: &Expr) -> Expr {
        self.map_leaves(&|e| matches!(e, Expr::X).then(|| value.clone()))
    }

    /// Binds the index variable, producing an expression in `x` only.
    pub fn bind_nu(&self, nu: u32) -> Expr {
        simplify(&self.map_leaves(&|e| matches!(e, Expr::Nu).then(|| Expr::Num(f64::from(nu)))))
    }

    /// Every sub-expression that appears as a denominator: right operands
    /// of `/` and bases of negative powers.
    pub fn denominators(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        self.collect_denominators(&mut out);
        out
    }

    fn collect_denominators(&self, out: &mut Vec<Expr>) {
        match self {
            Expr::Div(_, b) => out.push((**b).clone()),
            Expr::Pow(b, k) if *k < 0 => out.push((**b).clone()),
            _ => {}
        }
        for c in self.children() {
            c.collect_denominators(out);
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Num(_) => 0,
            Expr::Pi => 1,
            Expr::Nu => 2,
            Expr::X => 3,
            Expr::Call(..) => 4,
            Expr::Pow(..) => 5,
            Expr::Mul(_) => 6,
            Expr::Add(_) => 7,
            Expr::Neg(_) => 8,
            Expr::Sub(..) => 9,
            Expr::Div(..) => 10,
        }
    }
}

// Structural total order, used to sort the operands of normalized sums and
// products. Literals compare with `total_cmp`, so the order is total even
// though the payload is a float.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        use Expr::*;
        match (self, other) {
            (Num(a), Num(b)) => a.total_cmp(b),
            (Pi, Pi) | (Nu, Nu) | (X, X) => Ordering::Equal,
            (Call(f, a), Call(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Pow(a, j), Pow(b, k)) => a.cmp(b).then(j.cmp(k)),
            (Mul(a), Mul(b)) | (Add(a), Add(b)) => a.cmp(b),
            (Neg(a), Neg(b)) => a.cmp(b),
            (Sub(a, b), Sub(c, d)) | (Div(a, b), Div(c, d)) => a.cmp(c).then_with(|| b.cmp(d)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("domain bounds must be finite, got ({lower}, {upper})")]
    NotFinite { lower: f64, upper: f64 },
    #[error("domain lower bound {lower} is not below upper bound {upper}")]
    Empty { lower: f64, upper: f64 },
}

/// The open interval X = (lower, upper).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct DomainInterval {
    lower: f64,
    upper: f64,
}

impl DomainInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self, DomainError> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(DomainError::NotFinite { lower, upper });
        }
        if lower >= upper {
            return Err(DomainError::Empty { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    /// Membership in the closure [lower, upper].
    pub fn contains_closed(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// `n` cell midpoints; all strictly inside the interval.
    pub fn midpoints(&self, n: usize) -> Vec<f64> {
        let h = self.width() / n as f64;
        (0..n).map(|j| self.lower + (j as f64 + 0.5) * h).collect()
    }
}

impl TryFrom<(f64, f64)> for DomainInterval {
    type Error = DomainError;

    fn try_from((lower, upper): (f64, f64)) -> Result<Self, Self::Error> {
        DomainInterval::new(lower, upper)
    }
}

impl From<DomainInterval> for (f64, f64) {
    fn from(d: DomainInterval) -> Self {
        (d.lower, d.upper)
    }
}

impl fmt::Display for DomainInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}
