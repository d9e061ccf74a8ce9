//! Numerical thresholds shared across the crate.
//!
//! Verdict thresholds are separated by at least two orders of magnitude so
//! that a value cannot sit on both sides of a decision.

/// A generator term counts as vanishing below this magnitude.
pub const VANISH: f64 = 1e-10;

/// A sequence term counts as non-vanishing above this magnitude.
pub const NONVANISH: f64 = 1e-6;

/// Residual required of a certified root.
pub const ROOT_RESIDUAL: f64 = 1e-8;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_RELATIVE: f64 = 1e-8;

/// Minimum distance of a denominator from zero on the safety lattice.
pub const SAFETY_MARGIN: f64 = 1e-6;

/// Lower bound a candidate unit must clear on the sampling lattice.
pub const UNIT_MARGIN: f64 = 0.1;

/// Tail-Cauchy tolerance for weak limits.
pub const WEAK_LIMIT_TOL: f64 = 1e-4;

/// Maximum RMS residual (natural-log units) of a log-log growth fit.
pub const GROWTH_FIT_RESIDUAL: f64 = 0.2;

/// Smallest log-log slope reported as growth.
pub const MIN_GROWTH_EXPONENT: f64 = 0.1;

/// Required ratio between a limit separation and the combined uncertainty
/// before two limits count as distinct.
pub const SEPARATION_FACTOR: f64 = 100.0;
