//! Integrality, order membership, units, and roots of unity.
//!
//! The order of interest inside a field L is the set of algebraic integers
//! congruent to a rational integer modulo m: x belongs when some j in
//! {0, ..., m-1} makes (x - j)/m an algebraic integer. Membership evidence
//! is the witness j, and every check here recomputes from first principles:
//! minimal polynomials come from exact linear algebra, integrality is read
//! off their coefficients, and unit inverses are reconstructed from the
//! polynomial rather than trusted.

use crate::cyclo::CyclotomicField;
use crate::cyclotomic::{cyclotomic, inverse_phi};
use crate::embedding::Signature;
use crate::poly::RatPoly;
use crate::rat::Rat;
use crate::tower::{AlgNum, TowerError};
use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntegralityError {
    #[error("modulus must be at least 1")]
    BadModulus,
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// True when the monic minimal polynomial of x has integer coefficients.
pub fn is_algebraic_integer(x: &AlgNum) -> bool {
    x.min_poly().has_integer_coeffs()
}

/// Evidence that x lies in the order: x - residue is divisible by the
/// modulus inside the ring of integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueWitness {
    pub modulus: u64,
    pub residue: u64,
}

/// Membership of x in Z + m O_L: searches for a rational residue j with
/// (x - j)/m an algebraic integer. Returns the witness, or None when no
/// residue works (including when x itself is not an algebraic integer).
pub fn r_m_membership(x: &AlgNum, m: u64) -> Result<Option<ResidueWitness>, IntegralityError> {
    if m == 0 {
        return Err(IntegralityError::BadModulus);
    }
    if !is_algebraic_integer(x) {
        return Ok(None);
    }
    let minv = Rat::new(BigInt::one(), BigInt::from(m));
    for j in 0..m {
        let shifted = x - &AlgNum::from_int(x.tower(), j as i64);
        let scaled = shifted.mul_rat(&minv);
        if is_algebraic_integer(&scaled) {
            return Ok(Some(ResidueWitness { modulus: m, residue: j }));
        }
    }
    Ok(None)
}

/// Evidence that x is a unit of the ring of integers: the minimal
/// polynomial with constant term +-1, and the inverse reconstructed from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitEvidence {
    pub min_poly: RatPoly,
    pub inverse: AlgNum,
}

/// Unit test: x is an algebraic integer whose minimal polynomial has
/// constant coefficient +-1. The inverse then comes out of the polynomial:
/// x (x^{n-1} + c_{n-1} x^{n-2} + ... + c_1) = -c_0, and the product with
/// x is verified to be 1 before the evidence is returned.
pub fn is_unit(x: &AlgNum) -> Option<UnitEvidence> {
    let mp = x.min_poly();
    if !mp.has_integer_coeffs() {
        return None;
    }
    let c0 = mp.coeff(0);
    if !(c0 == Rat::one() || c0 == -Rat::one()) {
        return None;
    }
    let n = mp.degree().expect("minimal polynomials are nonzero");
    // inverse = -(x^{n-1} + c_{n-1} x^{n-2} + ... + c_1) / c_0
    let mut acc = AlgNum::zero(x.tower());
    let mut power = AlgNum::one(x.tower());
    for k in 1..=n {
        let coeff = if k == n { Rat::one() } else { mp.coeff(k) };
        acc = &acc + &power.mul_rat(&coeff);
        if k < n {
            power = &power * x;
        }
    }
    let inverse = acc.mul_rat(&(-Rat::one() / c0));
    if &inverse * x != AlgNum::one(x.tower()) {
        return None;
    }
    Some(UnitEvidence { min_poly: mp, inverse })
}

/// Outcome of the root-of-unity test: the exact multiplicative order when
/// x is a root of unity, plus the candidate orders that were compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootOfUnityReport {
    pub order: Option<u64>,
    pub candidates_checked: Vec<u64>,
}

/// Decides whether x is a root of unity, and of which order.
///
/// A root of unity of order n has the n-th cyclotomic polynomial as its
/// minimal polynomial, of degree phi(n); the finitely many n with
/// phi(n) = deg(x) are enumerated and compared directly.
pub fn is_root_of_unity(x: &AlgNum) -> RootOfUnityReport {
    let mp = x.min_poly();
    if !mp.has_integer_coeffs() {
        return RootOfUnityReport { order: None, candidates_checked: Vec::new() };
    }
    let d = mp.degree().expect("minimal polynomials are nonzero") as u64;
    let candidates = inverse_phi(d);
    for &n in &candidates {
        if mp == cyclotomic(n) {
            return RootOfUnityReport { order: Some(n), candidates_checked: candidates };
        }
    }
    RootOfUnityReport { order: None, candidates_checked: candidates }
}

/// conj(u)/u for the top square root of u's tower. For CM towers over a
/// totally real subfield this is the ratio of complex conjugates; for a
/// unit it is an algebraic integer of absolute value 1 at every embedding.
pub fn conj_ratio(u: &AlgNum) -> Result<AlgNum, TowerError> {
    u.conj_top().div(u)
}

/// Dirichlet rank r + s - 1 of the unit group for a field of the given
/// signature.
pub fn expected_unit_rank(sig: &Signature) -> usize {
    sig.real + sig.complex_pairs - 1
}

/// Which powers of zeta lie in the order Z + m O_L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub modulus: u64,
    pub order: u64,
    /// Exponents k in 1..order with zeta^k in the order, rational ones
    /// (zeta^k = +-1) excluded.
    pub nontrivial_members: Vec<u64>,
    /// True when no nonrational root of unity lies in the order.
    pub trivial: bool,
}

/// Probes every power of the field's root of unity for membership in
/// Z + m O_L, reporting the nonrational ones that slip in. An empty list
/// means the order's torsion is as small as it can be: just +-1.
pub fn probe_mu_trivial(field: &CyclotomicField, m: u64) -> Result<ProbeReport, IntegralityError> {
    if m == 0 {
        return Err(IntegralityError::BadModulus);
    }
    let n = field.order();
    let mut members = Vec::new();
    for k in 1..n {
        let z = field.zeta_pow(k as i64);
        if z.rational_value().is_some() {
            continue;
        }
        if r_m_membership(&z, m)?.is_some() {
            members.push(k);
        }
    }
    let trivial = members.is_empty();
    Ok(ProbeReport { modulus: m, order: n, nontrivial_members: members, trivial })
}
