//! Elements of the power algebra `(C∞(X))^N`.
//!
//! A [`SmoothSequence`] is a closed-form tail `ψ(nu, x)` together with
//! finitely many exceptional terms `ψ_ν(x)` that override the tail at
//! their index. Ring operations and derivations act term-wise, and the
//! exceptional indices of the operands are merged index by index.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    denominator_safety, diff, simplify, DomainInterval, EvalError, Expr, SafetyLattice, SafetyVerdict,
};
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("exceptional term at index {index} depends on nu: {expr}")]
    ExceptionalDependsOnNu { index: u32, expr: String },
    #[error("exceptional index {index} precedes the start index {start}")]
    ExceptionalBeforeStart { index: u32, start: u32 },
    #[error("start index must be at least 1")]
    ZeroStart,
    #[error("index {nu} precedes the start index {start}")]
    IndexBeforeStart { nu: u32, start: u32 },
    #[error("diagonal embedding requires an expression free of nu, got {0}")]
    DiagonalDependsOnNu(String),
    #[error("composition is not denominator-safe: {0:?}")]
    Unsafe(SafetyVerdict),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// An element `s = (ψ_ν)` of `(C∞(X))^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothSequence {
    tail: Expr,
    #[serde(default, rename = "exceptions")]
    exceptional: BTreeMap<u32, Expr>,
    #[serde(default = "one")]
    start: u32,
}

fn one() -> u32 {
    1
}

impl SmoothSequence {
    /// Sequence with the given tail and no exceptional terms.
    pub fn new(tail: Expr) -> Self {
        Self { tail: simplify(&tail), exceptional: BTreeMap::new(), start: 1 }
    }

    pub fn with_parts(tail: Expr, exceptional: BTreeMap<u32, Expr>, start: u32) -> Result<Self, SequenceError> {
        if start == 0 {
            return Err(SequenceError::ZeroStart);
        }
        let mut out = BTreeMap::new();
        for (index, e) in exceptional {
            if e.contains_nu() {
                return Err(SequenceError::ExceptionalDependsOnNu { index, expr: e.to_string() });
            }
            if index < start {
                return Err(SequenceError::ExceptionalBeforeStart { index, start });
            }
            out.insert(index, simplify(&e));
        }
        Ok(Self { tail: simplify(&tail), exceptional: out, start })
    }

    /// Replaces the term at `index`.
    pub fn with_exception(mut self, index: u32, term: Expr) -> Result<Self, SequenceError> {
        if term.contains_nu() {
            return Err(SequenceError::ExceptionalDependsOnNu { index, expr: term.to_string() });
        }
        if index < self.start {
            return Err(SequenceError::ExceptionalBeforeStart { index, start: self.start });
        }
        self.exceptional.insert(index, simplify(&term));
        Ok(self)
    }

    pub fn zero() -> Self {
        Self::new(Expr::zero())
    }

    /// The constant sequence `u_ψ = (ψ, ψ, ψ, …)`.
    pub fn diagonal(psi: &Expr) -> Result<Self, SequenceError> {
        if psi.contains_nu() {
            return Err(SequenceError::DiagonalDependsOnNu(psi.to_string()));
        }
        Ok(Self::new(psi.clone()))
    }

    pub fn tail(&self) -> &Expr {
        &self.tail
    }

    pub fn exceptional(&self) -> &BTreeMap<u32, Expr> {
        &self.exceptional
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// Largest exceptional index, if any.
    pub fn last_exception(&self) -> Option<u32> {
        self.exceptional.keys().next_back().copied()
    }

    /// The `nu`-th term as an expression in `x`.
    pub fn term(&self, nu: u32) -> Result<Expr, SequenceError> {
        if nu < self.start {
            return Err(SequenceError::IndexBeforeStart { nu, start: self.start });
        }
        Ok(match self.exceptional.get(&nu) {
            Some(e) => e.clone(),
            None => self.tail.bind_nu(nu),
        })
    }

    /// Value of the `nu`-th term at `x`.
    pub fn eval(&self, nu: u32, x: f64) -> Result<f64, EvalError> {
        if nu < self.start {
            return Err(EvalError::BadIndex { nu: f64::from(nu) });
        }
        match self.exceptional.get(&nu) {
            Some(e) => e.eval(nu, x),
            None => self.tail.eval(nu, x),
        }
    }

    /// True when the tail is the literal zero (finitely many nonzero terms).
    pub fn is_eventually_zero(&self) -> bool {
        self.tail.is_zero()
    }

    /// True when every term is the literal zero.
    pub fn is_zero(&self) -> bool {
        self.tail.is_zero() && self.exceptional.values().all(Expr::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        !self.tail.contains_nu() && self.exceptional.values().all(|e| *e == self.tail)
    }

    /// Term-wise combination; `op` receives simplified operands.
    fn zip_with(&self, other: &Self, op: impl Fn(Expr, Expr) -> Expr) -> Self {
        let start = self.start.max(other.start);
        let tail = simplify(&op(self.tail.clone(), other.tail.clone()));
        let indices: Vec<u32> = self
            .exceptional
            .keys()
            .chain(other.exceptional.keys())
            .copied()
            .filter(|&i| i >= start)
            .collect();
        let exceptional = indices
            .into_iter()
            .map(|i| {
                // both terms exist since i >= start of each operand
                let a = self.term(i).expect("index at or after start");
                let b = other.term(i).expect("index at or after start");
                (i, simplify(&op(a, b)))
            })
            .collect();
        Self { tail, exceptional, start }
    }

    fn map_terms(&self, op: impl Fn(&Expr) -> Expr) -> Self {
        Self {
            tail: simplify(&op(&self.tail)),
            exceptional: self.exceptional.iter().map(|(&i, e)| (i, simplify(&op(e)))).collect(),
            start: self.start,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_terms(|e| Expr::mul2(Expr::Num(c), e.clone()))
    }

    /// Term-wise derivative `D^p s = (D^p ψ_ν)`.
    pub fn derive(&self, order: u32) -> Self {
        self.map_terms(|e| diff(e, order))
    }

    /// Term-wise composition `outer ∘ ψ_ν`. `outer` is a one-variable
    /// expression whose variable occupies the `x` slot (see
    /// [`crate::expr::parse_outer`]). The composed tail must pass the
    /// denominator-safety check on `dom`.
    pub fn apply_smooth(&self, outer: &Expr, dom: &DomainInterval, lattice: &SafetyLattice) -> Result<Self, SequenceError> {
        let composed = self.map_terms(|e| outer.substitute_x(e));
        // check the unsimplified composition: simplification may cancel a
        // vanishing denominator against its numerator
        let raw_tail = outer.substitute_x(&self.tail);
        for e in std::iter::once(&raw_tail).chain(composed.exceptional.values()) {
            match denominator_safety(e, dom, lattice) {
                SafetyVerdict::Safe => {}
                other => return Err(SequenceError::Unsafe(other)),
            }
        }
        Ok(composed)
    }

    /// Denominator safety of every term expression on `dom`.
    pub fn safety(&self, dom: &DomainInterval, lattice: &SafetyLattice) -> SafetyVerdict {
        for e in std::iter::once(&self.tail).chain(self.exceptional.values()) {
            let v = denominator_safety(e, dom, lattice);
            if !v.is_safe() {
                return v;
            }
        }
        SafetyVerdict::Safe
    }

    /// Literal form `{ tail = "...", exceptions = { "3" = "..." }, start = 1 }`.
    pub fn to_literal(&self) -> String {
        let mut s = format!("{{ tail = \"{}\"", self.tail);
        if !self.exceptional.is_empty() {
            let parts: Vec<String> = self.exceptional.iter().map(|(i, e)| format!("\"{i}\" = \"{e}\"")).collect();
            s.push_str(&format!(", exceptions = {{ {} }}", parts.join(", ")));
        }
        s.push_str(&format!(", start = {} }}", self.start));
        s
    }
}

impl fmt::Display for SmoothSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exceptional.is_empty() && self.start == 1 {
            write!(f, "({})", self.tail)
        } else {
            f.write_str(&self.to_literal())
        }
    }
}

impl Add for &SmoothSequence {
    type Output = SmoothSequence;

    fn add(self, rhs: Self) -> SmoothSequence {
        self.zip_with(rhs, Expr::add2)
    }
}

impl Sub for &SmoothSequence {
    type Output = SmoothSequence;

    fn sub(self, rhs: Self) -> SmoothSequence {
        self.zip_with(rhs, Expr::sub)
    }
}

impl Mul for &SmoothSequence {
    type Output = SmoothSequence;

    fn mul(self, rhs: Self) -> SmoothSequence {
        self.zip_with(rhs, Expr::mul2)
    }
}

impl Neg for &SmoothSequence {
    type Output = SmoothSequence;

    fn neg(self) -> SmoothSequence {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpanError {
    #[error("a span needs at least one basis sequence")]
    Empty,
    #[error("sampling grid is degenerate: all sample points coincide")]
    DegenerateGrid,
    #[error("sampling grid has {points} points, need at least {needed}")]
    GridTooSmall { points: usize, needed: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Finite-dimensional stand-in for a subspace of `(C∞(X))^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpan {
    basis: Vec<SmoothSequence>,
}

impl FiniteSpan {
    pub fn new(basis: Vec<SmoothSequence>) -> Result<Self, SpanError> {
        if basis.is_empty() {
            return Err(SpanError::Empty);
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &[SmoothSequence] {
        &self.basis
    }
}

/// Sample points `(nu, x)`: every listed index crossed with `x_count`
/// interior midpoints of the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nu_values: Vec<u32>,
    pub x_count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nu_values: (1..=8).collect(), x_count: 32 }
    }
}

impl GridSpec {
    pub fn points(&self, dom: &DomainInterval) -> Vec<(u32, f64)> {
        let xs = dom.midpoints(self.x_count.max(1));
        self.nu_values.iter().flat_map(|&nu| xs.iter().map(move |&x| (nu, x))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum IndependenceVerdict {
    /// Sampled matrix has full column rank: the concatenated bases are
    /// linearly independent, so the spans meet only in zero.
    TrivialIntersection { rank: usize, columns: usize, smallest_ratio: f64 },
    /// Rank deficient at this sampling; says nothing either way.
    Inconclusive { rank: usize, columns: usize, smallest_ratio: f64 },
}

impl IndependenceVerdict {
    pub fn is_trivial_intersection(&self) -> bool {
        matches!(self, IndependenceVerdict::TrivialIntersection { .. })
    }
}

/// Certificate that `span(first) ∩ span(second) = {0}` from the rank of
/// sampled evaluations of the concatenated bases. Sound only in the
/// positive direction.
pub fn independence_certificate(
    first: &FiniteSpan,
    second: &FiniteSpan,
    dom: &DomainInterval,
    grid: &GridSpec,
) -> Result<IndependenceVerdict, SpanError> {
    let columns: Vec<&SmoothSequence> = first.basis.iter().chain(&second.basis).collect();
    let points = grid.points(dom);
    let needed = columns.len() + 8;
    if points.len() < needed {
        return Err(SpanError::GridTooSmall { points: points.len(), needed });
    }
    if points.iter().all(|p| *p == points[0]) {
        return Err(SpanError::DegenerateGrid);
    }
    let mut m = DMatrix::<f64>::zeros(points.len(), columns.len());
    for (j, s) in columns.iter().enumerate() {
        for (i, &(nu, x)) in points.iter().enumerate() {
            m[(i, j)] = s.eval(nu, x)?;
        }
        // column scaling leaves the rank unchanged and keeps the relative
        // threshold meaningful for bases of very different magnitude
        let norm = m.column(j).norm();
        if norm > 0.0 {
            m.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let rank = if largest == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > tolerances::RANK_RELATIVE * largest).count()
    };
    let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
    let n = columns.len();
    Ok(if rank == n {
        IndependenceVerdict::TrivialIntersection { rank, columns: n, smallest_ratio: ratio }
    } else {
        IndependenceVerdict::Inconclusive { rank, columns: n, smallest_ratio: ratio }
    })
}
