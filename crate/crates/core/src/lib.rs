//! Symbolic-numeric laboratory for reduced-power algebras of generalized
//! functions.
//!
//! Elements of the power algebra `(C∞(X))^N` are represented as
//! [`sequences::SmoothSequence`]s: one closed-form tail in `x` and `nu`
//! plus finitely many exceptional terms. On top of that the crate provides
//!
//! * distributional pairings against compactly supported bumps
//!   ([`pairing`]) and an evidence-based weak-limit oracle ([`weaklimit`]),
//! * constructible ideals with membership, unit detection, zero-density
//!   certificates for the off-diagonality condition and derivation closure
//!   ([`ideals`]),
//! * quotient algebras, a small distribution catalog and the branching
//!   demonstrations for nonlinear operations ([`algebra`]).

pub mod algebra;
pub mod expr;
pub mod ideals;
pub mod pairing;
pub mod roots;
pub mod sequences;
pub mod tolerances;
pub mod weaklimit;

pub use expr::{DomainInterval, Expr};
pub use sequences::SmoothSequence;
