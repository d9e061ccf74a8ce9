//! Constructible ideals of `(C∞(X))^N`.
//!
//! Two shapes are supported: finitely generated ideals `Σ gᵢ·(C∞(X))^N`
//! and the ideal of eventually-zero sequences. Membership is decided for
//! the latter and semi-decided for the former: a symbolic factorization
//! proves membership, a common zero of the generators where the candidate
//! does not vanish disproves it, and everything else is `Unknown`.
//!
//! The off-diagonality check (no nonzero constant sequence in the ideal)
//! is certified for principal ideals by exhibiting generator roots in
//! every cell of a partition of the domain: a constant `ψ` in the ideal
//! must vanish wherever some term of the generator does, so a dense root
//! set forces `ψ = 0`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{factor_map, simplify, split_coeff, DomainInterval, Expr, SafetyLattice, SafetyVerdict};
use crate::roots::{golden_min, near_roots};
use crate::sequences::SmoothSequence;
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdealError {
    #[error("the eventually-zero ideal has no finite generating set")]
    EventuallyZeroOperand,
    #[error("zero-density certificates need exactly one generator, got {0}")]
    NotPrincipal(usize),
    #[error("cell width must be positive and finite, got {0}")]
    BadCellWidth(f64),
    #[error("nu_max must be at least 1")]
    BadNuMax,
    #[error("generator {index} is not denominator-safe: {verdict:?}")]
    UnsafeGenerator { index: usize, verdict: SafetyVerdict },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IdealSpec {
    FinitelyGenerated { generators: Vec<SmoothSequence> },
    EventuallyZero,
}

impl IdealSpec {
    /// Ideal generated by `generators`, with zero and repeated generators
    /// removed (first occurrence wins).
    pub fn generated(generators: Vec<SmoothSequence>) -> Self {
        let mut out: Vec<SmoothSequence> = Vec::new();
        for g in generators {
            if !g.is_zero() && !out.contains(&g) {
                out.push(g);
            }
        }
        IdealSpec::FinitelyGenerated { generators: out }
    }

    pub fn principal(generator: SmoothSequence) -> Self {
        Self::generated(vec![generator])
    }

    pub fn generators(&self) -> Option<&[SmoothSequence]> {
        match self {
            IdealSpec::FinitelyGenerated { generators } => Some(generators),
            IdealSpec::EventuallyZero => None,
        }
    }

    /// Checks that every generator is denominator-safe on `dom`.
    pub fn validate(&self, dom: &DomainInterval, lattice: &SafetyLattice) -> Result<(), IdealError> {
        for (index, g) in self.generators().unwrap_or(&[]).iter().enumerate() {
            let verdict = g.safety(dom, lattice);
            if !verdict.is_safe() {
                return Err(IdealError::UnsafeGenerator { index, verdict });
            }
        }
        Ok(())
    }
}

/// `i1 + i2` for finitely generated ideals: the generator lists are
/// concatenated and deduplicated.
pub fn ideal_sum(i1: &IdealSpec, i2: &IdealSpec) -> Result<IdealSpec, IdealError> {
    match (i1.generators(), i2.generators()) {
        (Some(a), Some(b)) => Ok(IdealSpec::generated(a.iter().chain(b).cloned().collect())),
        _ => Err(IdealError::EventuallyZeroOperand),
    }
}

/// Evidence for an `InIdeal` verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Factorization {
    /// Eventually-zero ideal: the indices carrying nonzero terms.
    FiniteSupport { nonzero_indices: Vec<u32> },
    /// `s = Σ gᵢ·tᵢ` with one cofactor per generator.
    Cofactors { cofactors: Vec<SmoothSequence> },
}

impl Factorization {
    /// `Σ gᵢ·tᵢ`, or `None` for a finite-support factorization.
    pub fn recombine(&self, generators: &[SmoothSequence]) -> Option<SmoothSequence> {
        match self {
            Factorization::FiniteSupport { .. } => None,
            Factorization::Cofactors { cofactors } => Some(
                generators
                    .iter()
                    .zip(cofactors)
                    .fold(SmoothSequence::zero(), |acc, (g, t)| &acc + &(g * t)),
            ),
        }
    }
}

/// A point where every generator vanishes but the candidate does not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipWitness {
    pub nu: u32,
    pub x: f64,
    pub generator_values: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum MembershipVerdict {
    InIdeal { factorization: Factorization },
    NotInIdeal { witness: MembershipWitness },
    Unknown,
}

/// Sample points searched for a non-membership witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipScan {
    pub domain: DomainInterval,
    pub nu_values: Vec<u32>,
    pub x_samples: usize,
}

impl MembershipScan {
    pub fn new(domain: DomainInterval) -> Self {
        Self { domain, nu_values: (1..=8).collect(), x_samples: 256 }
    }
}

pub fn membership(s: &SmoothSequence, ideal: &IdealSpec, scan: &MembershipScan) -> MembershipVerdict {
    match ideal {
        IdealSpec::EventuallyZero => eventually_zero_membership(s, scan),
        IdealSpec::FinitelyGenerated { generators } => generated_membership(s, generators, scan),
    }
}

fn eventually_zero_membership(s: &SmoothSequence, scan: &MembershipScan) -> MembershipVerdict {
    if s.is_eventually_zero() {
        let nonzero_indices = s.exceptional().iter().filter(|(_, e)| !e.is_zero()).map(|(&i, _)| i).collect();
        return MembershipVerdict::InIdeal { factorization: Factorization::FiniteSupport { nonzero_indices } };
    }
    // past every exceptional index the terms are the tail, which is not
    // identically zero; find a point showing it
    let first = s.last_exception().map_or(s.start(), |i| i + 1).max(s.start());
    let xs = scan.domain.midpoints(scan.x_samples.max(1));
    for nu in first..first + 16 {
        for &x in &xs {
            if let Ok(value) = s.eval(nu, x) {
                if value.abs() > tolerances::NONVANISH {
                    let witness = MembershipWitness { nu, x, generator_values: Vec::new(), value };
                    return MembershipVerdict::NotInIdeal { witness };
                }
            }
        }
    }
    MembershipVerdict::Unknown
}

fn generated_membership(s: &SmoothSequence, generators: &[SmoothSequence], scan: &MembershipScan) -> MembershipVerdict {
    if s.is_zero() {
        let cofactors = vec![SmoothSequence::zero(); generators.len()];
        return MembershipVerdict::InIdeal { factorization: Factorization::Cofactors { cofactors } };
    }
    if let Some(cofactors) = factor_sequence(s, generators) {
        return MembershipVerdict::InIdeal { factorization: Factorization::Cofactors { cofactors } };
    }
    match common_zero_witness(s, generators, scan) {
        Some(witness) => MembershipVerdict::NotInIdeal { witness },
        None => MembershipVerdict::Unknown,
    }
}

fn factor_sequence(s: &SmoothSequence, generators: &[SmoothSequence]) -> Option<Vec<SmoothSequence>> {
    let start = generators.iter().map(SmoothSequence::start).fold(s.start(), u32::max);
    let tails: Vec<Expr> = generators.iter().map(|g| g.tail().clone()).collect();
    let tail_cofactors = factor_expr(s.tail(), &tails)?;
    let mut indices: Vec<u32> = s
        .exceptional()
        .keys()
        .chain(generators.iter().flat_map(|g| g.exceptional().keys()))
        .copied()
        .filter(|&i| i >= start)
        .collect();
    indices.sort_unstable();
    indices.dedup();
    let mut exceptional: Vec<BTreeMap<u32, Expr>> = vec![BTreeMap::new(); generators.len()];
    for i in indices {
        let terms: Vec<Expr> = generators.iter().map(|g| g.term(i).ok()).collect::<Option<_>>()?;
        let target = s.term(i).ok()?;
        for (slot, q) in exceptional.iter_mut().zip(factor_expr(&target, &terms)?) {
            slot.insert(i, q);
        }
    }
    tail_cofactors
        .into_iter()
        .zip(exceptional)
        .map(|(tail, exc)| SmoothSequence::with_parts(tail, exc, start).ok())
        .collect()
}

/// Cofactors `qᵢ` with `target = Σ gᵢ·qᵢ`, found by pattern matching on
/// simplified expressions.
fn factor_expr(target: &Expr, generators: &[Expr]) -> Option<Vec<Expr>> {
    let target = simplify(target);
    let n = generators.len();
    let single = |i: usize, q: Expr| {
        let mut out = vec![Expr::zero(); n];
        out[i] = q;
        out
    };
    if target.is_zero() {
        return Some(vec![Expr::zero(); n]);
    }
    for (i, g) in generators.iter().enumerate() {
        if let Some(q) = divide(&target, g) {
            return Some(single(i, q));
        }
    }
    if let Some(c) = constant_combination(&target, generators) {
        return Some(c.into_iter().map(Expr::Num).collect());
    }
    if let Expr::Add(terms) = &target {
        // terms carrying a generator factor, then a constant combination
        // of the generators for whatever is left
        let mut parts: Vec<Vec<Expr>> = vec![Vec::new(); n];
        let mut rest = Vec::new();
        for t in terms {
            match generators.iter().enumerate().find_map(|(i, g)| divide(t, g).map(|q| (i, q))) {
                Some((i, q)) => parts[i].push(q),
                None => rest.push(t.clone()),
            }
        }
        if !rest.is_empty() {
            let c = constant_combination(&simplify(&Expr::Add(rest)), generators)?;
            for (p, ci) in parts.iter_mut().zip(c) {
                p.push(Expr::Num(ci));
            }
        }
        return Some(parts.into_iter().map(|p| simplify(&Expr::Add(p))).collect());
    }
    None
}

/// `term / g` when `term` carries every factor of `g` with at least the
/// same positive multiplicity.
fn divide(term: &Expr, g: &Expr) -> Option<Expr> {
    let g = simplify(g);
    if g.is_zero() {
        return None;
    }
    if *term == g {
        return Some(Expr::one());
    }
    let (ct, mut powers) = factor_map(term);
    let (cg, gp) = factor_map(&g);
    for (base, k) in gp {
        let slot = powers.entry(base).or_insert(0);
        if k > 0 && *slot < k {
            return None;
        }
        *slot -= k;
    }
    let mut factors = vec![Expr::Num(ct / cg)];
    factors.extend(powers.into_iter().filter(|(_, k)| *k != 0).map(|(b, k)| Expr::pow(b, k)));
    Some(simplify(&Expr::Mul(factors)))
}

fn coefficient_map(e: &Expr) -> BTreeMap<Expr, f64> {
    let terms = match e {
        Expr::Add(v) => v.clone(),
        other => vec![other.clone()],
    };
    let mut out = BTreeMap::new();
    for t in terms {
        let (c, key) = split_coeff(t);
        *out.entry(key).or_insert(0.0) += c;
    }
    out
}

/// Constants `cᵢ` with `target = Σ cᵢ·gᵢ`, compared term by term after
/// a least-squares solve over the term coefficients.
fn constant_combination(target: &Expr, generators: &[Expr]) -> Option<Vec<f64>> {
    let a = coefficient_map(target);
    let bs: Vec<BTreeMap<Expr, f64>> = generators.iter().map(|g| coefficient_map(&simplify(g))).collect();
    let mut keys: Vec<&Expr> = a.keys().chain(bs.iter().flat_map(|b| b.keys())).collect();
    keys.sort();
    keys.dedup();
    if generators.is_empty() || keys.len() < generators.len() {
        return None;
    }
    let m = DMatrix::from_fn(keys.len(), generators.len(), |r, c| bs[c].get(keys[r]).copied().unwrap_or(0.0));
    let rhs = DVector::from_fn(keys.len(), |r, _| a.get(keys[r]).copied().unwrap_or(0.0));
    let c = m.clone().svd(true, true).solve(&rhs, 1e-12).ok()?;
    let scale = rhs.amax().max(1.0);
    let fits = (&m * &c - &rhs).amax() <= 1e-12 * scale;
    let snapped: Vec<f64> = c.iter().map(|&v| if (v - v.round()).abs() <= 1e-12 * v.abs().max(1.0) { v.round() } else { v }).collect();
    (fits && snapped.iter().all(|v| v.is_finite())).then_some(snapped)
}

fn common_zero_witness(s: &SmoothSequence, generators: &[SmoothSequence], scan: &MembershipScan) -> Option<MembershipWitness> {
    let start = generators.iter().map(SmoothSequence::start).fold(s.start(), u32::max);
    let mut nus: Vec<u32> = scan
        .nu_values
        .iter()
        .copied()
        .chain(s.exceptional().keys().copied())
        .chain(generators.iter().flat_map(|g| g.exceptional().keys().copied()))
        .filter(|&nu| nu >= start)
        .collect();
    nus.sort_unstable();
    nus.dedup();
    let dom = &scan.domain;
    nus.par_iter()
        .map(|&nu| {
            let candidates: Vec<f64> = match generators.first() {
                None => dom.midpoints(scan.x_samples.max(1)),
                Some(g0) => near_roots(
                    |x| g0.eval(nu, x).unwrap_or(f64::NAN),
                    dom.lower(),
                    dom.upper(),
                    scan.x_samples.max(16),
                    tolerances::VANISH,
                )
                .into_iter()
                .map(|r| r.x)
                .filter(|&x| dom.contains(x))
                .collect(),
            };
            candidates.into_iter().find_map(|x| {
                let generator_values: Vec<f64> = generators.iter().map(|g| g.eval(nu, x).ok()).collect::<Option<_>>()?;
                if generator_values.iter().any(|v| v.abs() >= tolerances::VANISH) {
                    return None;
                }
                let value = s.eval(nu, x).ok()?;
                (value.abs() > tolerances::NONVANISH).then_some(MembershipWitness { nu, x, generator_values, value })
            })
        })
        .find_map_first(|w| w)
}

/// Lattice on which candidate units are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSearch {
    pub nu_count: u32,
    pub x_count: usize,
    pub margin: f64,
}

impl Default for UnitSearch {
    fn default() -> Self {
        Self { nu_count: 64, x_count: 512, margin: tolerances::UNIT_MARGIN }
    }
}

/// An integer combination of generators whose sampled terms stay above
/// `lower_bound > 0`; `nu` and `x` locate the smallest value seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitWitness {
    pub coefficients: Vec<i32>,
    pub witness: SmoothSequence,
    pub lower_bound: f64,
    pub nu: u32,
    pub x: f64,
}

const COEFFICIENTS: [i32; 6] = [1, -1, 2, -2, 3, -3];

/// Coefficient vectors over at most two generators, smallest first.
fn candidate_combinations(n: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    for i in 0..n {
        for c in COEFFICIENTS {
            let mut v = vec![0; n];
            v[i] = c;
            out.push(v);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for a in COEFFICIENTS {
                for b in COEFFICIENTS {
                    let mut v = vec![0; n];
                    v[i] = a;
                    v[j] = b;
                    out.push(v);
                }
            }
        }
    }
    out.sort_by_key(|v| {
        let l1: i32 = v.iter().map(|c| c.abs()).sum();
        let max = v.iter().map(|c| c.abs()).max().unwrap_or(0);
        (l1, max)
    });
    out
}

/// Searches small integer combinations `Σ cᵢ gᵢ` (|cᵢ| ≤ 3, at most two
/// nonzero) for a sequence bounded below by `search.margin` on the
/// sampling lattice.
pub fn unit_detection(ideal: &IdealSpec, dom: &DomainInterval, search: &UnitSearch) -> Result<Option<UnitWitness>, IdealError> {
    let generators = ideal.generators().ok_or(IdealError::EventuallyZeroOperand)?;
    let xs = dom.midpoints(search.x_count.max(1));
    for coefficients in candidate_combinations(generators.len()) {
        let witness = generators
            .iter()
            .zip(&coefficients)
            .filter(|(_, &c)| c != 0)
            .fold(SmoothSequence::zero(), |acc, (g, &c)| &acc + &g.scale(f64::from(c)));
        if let Some((lower_bound, nu, x)) = sampled_infimum(&witness, dom, &xs, search) {
            return Ok(Some(UnitWitness { coefficients, witness, lower_bound, nu, x }));
        }
    }
    Ok(None)
}

/// Smallest sampled value (refined around the sampled minimum), or `None`
/// as soon as a sample falls below the margin.
fn sampled_infimum(w: &SmoothSequence, dom: &DomainInterval, xs: &[f64], search: &UnitSearch) -> Option<(f64, u32, f64)> {
    let mut best = (f64::INFINITY, 0, 0.0);
    for nu in w.start().max(1)..=search.nu_count.max(w.start()) {
        for &x in xs {
            let v = w.eval(nu, x).ok()?;
            if v.is_nan() || v < search.margin {
                return None;
            }
            if v < best.0 {
                best = (v, nu, x);
            }
        }
    }
    let (v, nu, x) = best;
    let h = dom.width() / xs.len() as f64;
    let lo = (x - h).max(dom.lower());
    let hi = (x + h).min(dom.upper());
    let (xr, vr) = golden_min(|t| w.eval(nu, t).unwrap_or(f64::NEG_INFINITY), lo, hi);
    if vr < search.margin {
        return None;
    }
    Some(if vr < v { (vr, nu, xr) } else { (v, nu, x) })
}

/// One cell of the partition with the generator root found inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedCell {
    pub lower: f64,
    pub upper: f64,
    pub nu: u32,
    pub root: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDensityCertificate {
    pub cell_width: f64,
    pub cells: Vec<CertifiedCell>,
}

/// Partition of `dom` into cells of width `cell_width` (the last one may
/// be shorter).
fn cells(dom: &DomainInterval, cell_width: f64) -> Vec<(f64, f64)> {
    let n = (dom.width() / cell_width).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let lo = dom.lower() + i as f64 * cell_width;
            let hi = if i + 1 == n { dom.upper() } else { (lo + cell_width).min(dom.upper()) };
            (lo, hi)
        })
        .collect()
}

fn certify_cell(g: &SmoothSequence, dom: &DomainInterval, lo: f64, hi: f64, nu_max: u32) -> Option<CertifiedCell> {
    for nu in g.start().max(1)..=nu_max {
        // enough samples per oscillation at this index
        let samples = ((hi - lo) * f64::from(nu) * 16.0 / std::f64::consts::TAU).ceil().max(16.0) as usize;
        let found = near_roots(|x| g.eval(nu, x).unwrap_or(f64::NAN), lo, hi, samples, tolerances::ROOT_RESIDUAL)
            .into_iter()
            .find(|r| dom.contains(r.x) && lo <= r.x && r.x <= hi);
        if let Some(r) = found {
            return Some(CertifiedCell { lower: lo, upper: hi, nu, root: r.x, residual: r.residual });
        }
    }
    None
}

/// Certificate that some term of the single generator has a root in every
/// cell of the partition, or `None` if a cell stays uncovered.
pub fn zero_density_certificate(
    ideal: &IdealSpec,
    dom: &DomainInterval,
    cell_width: f64,
    nu_max: u32,
) -> Result<Option<ZeroDensityCertificate>, IdealError> {
    let generators = ideal.generators().ok_or(IdealError::EventuallyZeroOperand)?;
    let [g] = generators else {
        return Err(IdealError::NotPrincipal(generators.len()));
    };
    if !(cell_width.is_finite() && cell_width > 0.0) {
        return Err(IdealError::BadCellWidth(cell_width));
    }
    if nu_max == 0 {
        return Err(IdealError::BadNuMax);
    }
    let found: Option<Vec<CertifiedCell>> =
        cells(dom, cell_width).into_par_iter().map(|(lo, hi)| certify_cell(g, dom, lo, hi, nu_max)).collect();
    Ok(found.map(|cells| ZeroDensityCertificate { cell_width, cells }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OffDiagCertificate {
    ZeroDensity(ZeroDensityCertificate),
    StructuralProof { argument: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum OffDiagVerdict {
    OffDiagonal { certificate: OffDiagCertificate },
    ContainsUnit { witness: SmoothSequence, lower_bound: f64 },
    Inconclusive { reason: String },
}

impl OffDiagVerdict {
    pub fn is_off_diagonal(&self) -> bool {
        matches!(self, OffDiagVerdict::OffDiagonal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffDiagParams {
    pub domain: DomainInterval,
    pub cell_width: f64,
    pub nu_max: u32,
    pub unit: UnitSearch,
}

impl OffDiagParams {
    pub fn new(domain: DomainInterval) -> Self {
        Self { domain, cell_width: 0.05, nu_max: 200, unit: UnitSearch::default() }
    }
}

const CONSTANT_TAIL_ARGUMENT: &str = "a constant sequence has the constant tail psi, and the tail of an \
eventually-zero sequence is 0, so the only constant sequence in the ideal is psi = 0";

/// Checks that the ideal contains no nonzero constant sequence. A unit is
/// looked for first, so `ContainsUnit` and `OffDiagonal` never both apply.
pub fn off_diagonality(ideal: &IdealSpec, params: &OffDiagParams) -> Result<OffDiagVerdict, IdealError> {
    let generators = match ideal {
        IdealSpec::EventuallyZero => {
            let argument = CONSTANT_TAIL_ARGUMENT.to_string();
            return Ok(OffDiagVerdict::OffDiagonal { certificate: OffDiagCertificate::StructuralProof { argument } });
        }
        IdealSpec::FinitelyGenerated { generators } => generators,
    };
    if generators.is_empty() {
        let argument = "the zero ideal contains no nonzero sequence".to_string();
        return Ok(OffDiagVerdict::OffDiagonal { certificate: OffDiagCertificate::StructuralProof { argument } });
    }
    if let Some(u) = unit_detection(ideal, &params.domain, &params.unit)? {
        return Ok(OffDiagVerdict::ContainsUnit { witness: u.witness, lower_bound: u.lower_bound });
    }
    if generators.len() > 1 {
        let reason = format!("no unit found and no certificate available for {} generators", generators.len());
        return Ok(OffDiagVerdict::Inconclusive { reason });
    }
    Ok(match zero_density_certificate(ideal, &params.domain, params.cell_width, params.nu_max)? {
        Some(c) => OffDiagVerdict::OffDiagonal { certificate: OffDiagCertificate::ZeroDensity(c) },
        None => OffDiagVerdict::Inconclusive {
            reason: format!(
                "generator roots do not reach every cell of width {} for nu <= {}",
                params.cell_width, params.nu_max
            ),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum ClosureVerdict {
    Closed,
    NotClosed { generator: usize, order: u32, derivative: SmoothSequence, witness: MembershipWitness },
    Unknown { undecided: Vec<String> },
}

/// Whether `D^p I ⊆ I` for `p ≤ order`, checked on the derivatives of
/// the generators (enough by the product rule).
pub fn derivation_closure(ideal: &IdealSpec, order: u32, scan: &MembershipScan) -> ClosureVerdict {
    let Some(generators) = ideal.generators() else {
        return ClosureVerdict::Closed;
    };
    let mut undecided = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        for p in 1..=order.max(1) {
            let derivative = g.derive(p);
            match membership(&derivative, ideal, scan) {
                MembershipVerdict::InIdeal { .. } => {}
                MembershipVerdict::NotInIdeal { witness } => {
                    return ClosureVerdict::NotClosed { generator: i, order: p, derivative, witness };
                }
                MembershipVerdict::Unknown => undecided.push(format!("D^{p} of generator {i}: {derivative}")),
            }
        }
    }
    if undecided.is_empty() {
        ClosureVerdict::Closed
    } else {
        ClosureVerdict::Unknown { undecided }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoStage {
    pub name: String,
    pub passed: bool,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoLargestIdealReport {
    pub domain: DomainInterval,
    pub first: IdealSpec,
    pub second: IdealSpec,
    pub first_verdict: OffDiagVerdict,
    pub second_verdict: OffDiagVerdict,
    pub sum: IdealSpec,
    pub unit: Option<UnitWitness>,
    pub stages: Vec<DemoStage>,
    pub applicable: bool,
    pub conclusion: String,
}

fn verdict_summary(v: &OffDiagVerdict) -> String {
    match v {
        OffDiagVerdict::OffDiagonal { certificate: OffDiagCertificate::ZeroDensity(c) } => {
            format!("off-diagonal: roots certified in all {} cells of width {}", c.cells.len(), c.cell_width)
        }
        OffDiagVerdict::OffDiagonal { certificate: OffDiagCertificate::StructuralProof { argument } } => {
            format!("off-diagonal: {argument}")
        }
        OffDiagVerdict::ContainsUnit { witness, lower_bound } => {
            format!("contains the unit {witness} (sampled lower bound {lower_bound})")
        }
        OffDiagVerdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

/// Two off-diagonal principal ideals whose sum contains a unit: no
/// off-diagonal ideal contains both, so the off-diagonal ideals have no
/// largest element.
pub fn no_largest_ideal_demo(
    first: &SmoothSequence,
    second: &SmoothSequence,
    params: &OffDiagParams,
) -> Result<NoLargestIdealReport, IdealError> {
    let i1 = IdealSpec::principal(first.clone());
    let i2 = IdealSpec::principal(second.clone());
    let first_verdict = off_diagonality(&i1, params)?;
    let second_verdict = off_diagonality(&i2, params)?;
    let sum = ideal_sum(&i1, &i2)?;
    let unit = unit_detection(&sum, &params.domain, &params.unit)?;
    let n_sum = sum.generators().map_or(0, <[_]>::len);
    let stages = vec![
        DemoStage {
            name: "off_diagonality(I')".into(),
            passed: first_verdict.is_off_diagonal(),
            summary: verdict_summary(&first_verdict),
        },
        DemoStage {
            name: "off_diagonality(I'')".into(),
            passed: second_verdict.is_off_diagonal(),
            summary: verdict_summary(&second_verdict),
        },
        DemoStage {
            name: "ideal_sum".into(),
            passed: n_sum > 0,
            summary: format!("I = I' + I'' has {n_sum} generator(s)"),
        },
        DemoStage {
            name: "unit_detection(I)".into(),
            passed: unit.as_ref().is_some_and(|u| u.lower_bound > 0.0),
            summary: match &unit {
                Some(u) => format!("witness {} with sampled lower bound {}", u.witness, u.lower_bound),
                None => "no combination stays bounded away from zero".into(),
            },
        },
    ];
    let applicable = stages.iter().all(|s| s.passed);
    let conclusion = if applicable {
        "I' and I'' are off-diagonal but their sum contains a sequence bounded away from zero, so it is the whole \
         algebra and not off-diagonal. No off-diagonal ideal contains both I' and I'', hence there is no largest \
         off-diagonal ideal."
            .to_string()
    } else {
        let failed: Vec<&str> = stages.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        format!("not applicable to this pair: stage(s) {} did not pass", failed.join(", "))
    };
    Ok(NoLargestIdealReport {
        domain: params.domain,
        first: i1,
        second: i2,
        first_verdict,
        second_verdict,
        sum,
        unit,
        stages,
        applicable,
        conclusion,
    })
}
