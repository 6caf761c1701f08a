//! Cyclotomic fields presented as square-root towers.
//!
//! Q(zeta_n) sits over its maximal real subfield Q(c), c = zeta + 1/zeta, as
//! a single square root: with delta = c^2 - 4 (totally negative for n >= 3),
//! zeta = (c + sqrt(delta)) / 2. The minimal polynomial of c is obtained by
//! eliminating x between the n-th cyclotomic polynomial and x^2 - yx + 1,
//! evaluating the resultant at sample points and interpolating; no
//! factorization is ever performed. Construction verifies the resulting
//! generator against the cyclotomic polynomial before returning.

use crate::cyclotomic::cyclotomic;
use crate::poly::RatPoly;
use crate::rat::{rat, Rat};
use crate::tower::{AlgNum, Tower, TowerError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycloError {
    #[error("order {n} has no CM presentation; the field is rational")]
    UnsupportedOrder { n: u64 },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Monic minimal polynomial of zeta_n + 1/zeta_n + shift.
///
/// Eliminates x between Phi_n(x) and x^2 - (y - shift) x + 1 by reducing
/// Phi_n modulo the quadratic over Z[y]: with Phi_n = r x + t in the
/// quotient and the quadratic's roots multiplying to 1 and summing to
/// w = y - shift, the resultant in y is r^2 + r t w + t^2. Its squarefree
/// part is the minimal polynomial (each value is hit by a root pair).
pub(crate) fn symmetric_elimination(n: u64, shift: i64) -> RatPoly {
    let phi = cyclotomic(n);
    let deg = phi.degree().unwrap();
    // w = y - shift as integer coefficients, ascending.
    let w = vec![BigInt::from(-shift), BigInt::one()];
    // Horner: V <- V x + c_i in Z[y][x] / (x^2 - w x + 1), V = r x + t.
    let mut r: Vec<BigInt> = Vec::new();
    let mut t: Vec<BigInt> = Vec::new();
    for i in (0..=deg).rev() {
        let c = phi.coeff(i);
        debug_assert!(c.is_integer());
        let mut nr = int_poly_mul(&r, &w);
        int_poly_add_into(&mut nr, &t);
        let mut nt: Vec<BigInt> = r.iter().map(|x| -x).collect();
        int_poly_add_const(&mut nt, c.numer().clone());
        r = nr;
        t = nt;
    }
    let mut res = int_poly_mul(&r, &r);
    int_poly_add_into(&mut res, &int_poly_mul(&int_poly_mul(&r, &t), &w));
    int_poly_add_into(&mut res, &int_poly_mul(&t, &t));
    let res = RatPoly::new(res.into_iter().map(Rat::from_integer).collect());
    // The resultant is the square of the minimal polynomial up to a constant;
    // the squarefree part is that minimal polynomial, made monic.
    res.squarefree_part().expect("resultant of coprime polynomials is nonzero")
}

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn int_poly_add_into(acc: &mut Vec<BigInt>, other: &[BigInt]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn int_poly_add_const(acc: &mut Vec<BigInt>, c: BigInt) {
    if acc.is_empty() {
        acc.push(c);
    } else {
        acc[0] += c;
    }
}

/// Minimal polynomial over Q of 2 cos(2 pi / n), the generator of the
/// maximal real subfield of Q(zeta_n).
pub fn real_subfield_poly(n: u64) -> RatPoly {
    assert!(n >= 1);
    symmetric_elimination(n, 0)
}

/// The maximal real subfield Q(zeta_n + 1/zeta_n) with its generator.
pub fn cyclotomic_base_field(n: u64) -> Result<(Arc<Tower>, AlgNum), CycloError> {
    assert!(n >= 1);
    let tower = Tower::number_field(real_subfield_poly(n))?;
    let c = AlgNum::base_gen(&tower);
    Ok((tower, c))
}

/// Q(zeta_n) as a square-root tower over its real subfield.
#[derive(Debug, Clone)]
pub struct CyclotomicField {
    n: u64,
    tower: Arc<Tower>,
    zeta: AlgNum,
}

/// Builds Q(zeta_n) for n >= 3 in CM form. The constructed generator is
/// checked against the n-th cyclotomic polynomial before being returned.
pub fn cyclotomic_cm_field(n: u64) -> Result<CyclotomicField, CycloError> {
    if n < 3 {
        return Err(CycloError::UnsupportedOrder { n });
    }
    let (base, c) = cyclotomic_base_field(n)?;
    let delta = &(&c * &c) - &AlgNum::from_int(&base, 4);
    let tower = Tower::adjoin_sqrt(&delta)?;
    let s = AlgNum::sqrt_gen(&tower, tower.num_steps() - 1);
    let zeta = (&c.lift_to(&tower)? + &s).mul_rat(&rat(1, 2));
    assert_eq!(
        zeta.min_poly(),
        cyclotomic(n),
        "constructed generator must be a primitive root of unity of order {n}"
    );
    Ok(CyclotomicField { n, tower, zeta })
}

impl CyclotomicField {
    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    /// The chosen primitive n-th root of unity.
    pub fn zeta(&self) -> &AlgNum {
        &self.zeta
    }

    /// zeta^k for any integer k.
    pub fn zeta_pow(&self, k: i64) -> AlgNum {
        self.zeta
            .pow_i64(k)
            .expect("a verified root of unity is invertible")
    }

    /// Generator of the maximal real subfield, lifted to the full tower.
    pub fn real_gen(&self) -> AlgNum {
        AlgNum::base_gen(&self.tower)
    }

    /// Complex conjugation: negates the square root adjoined on top of the
    /// real subfield, which sends zeta to 1/zeta.
    pub fn conj(&self, x: &AlgNum) -> Result<AlgNum, CycloError> {
        let lifted = if x.tower() == &self.tower {
            x.clone()
        } else {
            x.lift_to(&self.tower)?
        };
        Ok(lifted.conj_top())
    }
}
