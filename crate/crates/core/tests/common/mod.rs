//! Random smooth expressions for the property suites.
//!
//! Denominators are always bounded away from zero (`2 + sin(..)`,
//! `cosh(..)`, `1 + (..)^2`) and `exp`/`cosh` only see bounded arguments,
//! so every generated expression is finite on `nu ∈ 1..=4`, `x ∈ [-1, 1]`.
#![allow(dead_code)]

use branch_lab_core::expr::Func;
use branch_lab_core::{Expr, SmoothSequence};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const LITERALS: [f64; 8] = [0.5, 1.0, 2.0, 3.0, -1.0, -2.0, 1.5, 0.25];
const BOUNDED: [Func; 3] = [Func::Sin, Func::Cos, Func::Tanh];

fn leaf(rng: &mut impl Rng, with_nu: bool) -> Expr {
    match rng.random_range(0..10) {
        0..=3 => Expr::X,
        4 | 5 if with_nu => Expr::Nu,
        6 => Expr::Pi,
        _ => Expr::Num(*LITERALS.choose(rng).unwrap()),
    }
}

fn bounded(rng: &mut impl Rng, depth: u32, with_nu: bool) -> Expr {
    Expr::call(*BOUNDED.choose(rng).unwrap(), random_expr(rng, depth, with_nu))
}

pub fn random_expr(rng: &mut impl Rng, depth: u32, with_nu: bool) -> Expr {
    if depth == 0 || rng.random_bool(0.2) {
        return leaf(rng, with_nu);
    }
    let d = depth - 1;
    match rng.random_range(0..9) {
        0 => Expr::Add((0..rng.random_range(2..=3)).map(|_| random_expr(rng, d, with_nu)).collect()),
        1 => Expr::Mul((0..rng.random_range(2..=3)).map(|_| random_expr(rng, d, with_nu)).collect()),
        2 => Expr::sub(random_expr(rng, d, with_nu), random_expr(rng, d, with_nu)),
        3 => Expr::neg(random_expr(rng, d, with_nu)),
        4 => {
            let den = match rng.random_range(0..3) {
                0 => Expr::add2(Expr::Num(2.0), Expr::call(Func::Sin, random_expr(rng, d, with_nu))),
                1 => Expr::call(Func::Cosh, bounded(rng, d, with_nu)),
                _ => Expr::add2(Expr::Num(1.0), Expr::pow(random_expr(rng, d, with_nu), 2)),
            };
            Expr::div(random_expr(rng, d, with_nu), den)
        }
        5 => Expr::pow(random_expr(rng, d, with_nu), rng.random_range(1..=3)),
        6 => bounded(rng, d, with_nu),
        7 => Expr::call(Func::Exp, bounded(rng, d, with_nu)),
        _ => Expr::call(Func::Cosh, bounded(rng, d, with_nu)),
    }
}

/// Sequence with a random tail and up to three exceptional terms in `1..=6`.
pub fn random_sequence(rng: &mut impl Rng) -> SmoothSequence {
    let mut s = SmoothSequence::new(random_expr(rng, 3, true));
    for _ in 0..rng.random_range(0..=3) {
        let index = rng.random_range(1..=6);
        s = s.with_exception(index, random_expr(rng, 2, false)).unwrap();
    }
    s
}

pub fn random_point(rng: &mut impl Rng) -> (u32, f64) {
    (rng.random_range(1..=6), rng.random_range(-1.0..=1.0))
}

/// `|a - b|` relative to the size of the operands, with an absolute floor
/// of one.
pub fn scaled_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
