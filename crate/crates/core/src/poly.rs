//! Dense univariate polynomials over Q.
//!
//! Coefficients are stored lowest degree first with no trailing zeros; the
//! zero polynomial is the empty list. Resultants and gcds run on integer
//! polynomials through a subresultant pseudo-remainder sequence, clearing
//! denominators on entry and restoring exact rational scale factors at the
//! boundary, which keeps intermediate coefficient growth polynomial instead
//! of exponential.

use crate::rat::{format_rat, parse_rat, rat_height, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("division left a nonzero remainder")]
    InexactDivision,
    #[error("bad coefficient literal: {0}")]
    BadCoefficient(String),
    #[error("duplicate interpolation node")]
    DuplicateNode,
}

/// Polynomial over Q, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        RatPoly::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        RatPoly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn from_int_coeffs(cs: &[i64]) -> Self {
        RatPoly::new(cs.iter().map(|&c| Rat::from_integer(BigInt::from(c))).collect())
    }

    pub fn from_big_coeffs(cs: Vec<BigInt>) -> Self {
        RatPoly::new(cs.into_iter().map(Rat::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn to_int_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.numer().clone()))
            .collect()
    }

    pub fn neg(&self) -> Self {
        RatPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        RatPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        RatPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder over Q; errors only for a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = Rat::one() / divisor.lead().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() * &lead_inv;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                let t = &q * c;
                rem[k + i] -= t;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                if rem.len() <= dd {
                    break;
                }
                rem.pop();
            }
            quot[k] = q;
        }
        Ok((RatPoly::new(quot), RatPoly::new(rem)))
    }

    /// Exact quotient; errors if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, PolyError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::InexactDivision)
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i as u64 + 1)))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn monic(&self) -> Result<Self, PolyError> {
        let lead = self.lead().ok_or(PolyError::ZeroPolynomial)?;
        Ok(self.scale(&(Rat::one() / lead.clone())))
    }

    /// Largest height among the coefficients (0 for the zero polynomial).
    pub fn height(&self) -> num_bigint::BigUint {
        self.coeffs
            .iter()
            .map(rat_height)
            .max()
            .unwrap_or_else(num_bigint::BigUint::zero)
    }

    /// Clears denominators: returns (integer coefficients, common denominator d)
    /// with self = (1/d) * sum c_k x^k.
    pub fn to_integer_scaled(&self) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (ints, den)
    }

    /// Resultant of self and other, exact over Q.
    pub fn resultant(&self, other: &Self) -> Result<Rat, PolyError> {
        let da = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let db = other.degree().ok_or(PolyError::ZeroPolynomial)?;
        let (a, ad) = self.to_integer_scaled();
        let (b, bd) = other.to_integer_scaled();
        // Res(A/ad, B/bd) = ad^(-deg B) * bd^(-deg A) * Res(A, B)
        let scale = rat_pow(&Rat::from_integer(ad), -(db as i64))
            * rat_pow(&Rat::from_integer(bd), -(da as i64));
        Ok(scale * resultant_int(a, b))
    }

    /// Monic gcd over Q via the subresultant sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic().unwrap_or_else(|_| RatPoly::zero());
        }
        if other.is_zero() {
            return self.monic().unwrap_or_else(|_| RatPoly::zero());
        }
        let (a, _) = self.to_integer_scaled();
        let (b, _) = other.to_integer_scaled();
        let g = gcd_int(a, b);
        RatPoly::from_big_coeffs(g).monic().unwrap()
    }

    /// p / gcd(p, p'), monic: same distinct roots, each simple.
    pub fn squarefree_part(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(RatPoly::one());
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g)?.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.is_constant() {
            return true;
        }
        self.gcd(&self.derivative()).is_constant()
    }

    /// Serialization form: one `num/den` string per coefficient, lowest first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rat).collect()
    }

    pub fn from_strings(ss: &[String]) -> Result<Self, PolyError> {
        let coeffs = ss
            .iter()
            .map(|s| parse_rat(s).map_err(|_| PolyError::BadCoefficient(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RatPoly::new(coeffs))
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({})", self)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{}", k)?,
            }
        }
        Ok(())
    }
}

/// Lagrange interpolation through distinct nodes.
pub fn interpolate(points: &[(Rat, Rat)]) -> Result<RatPoly, PolyError> {
    let mut acc = RatPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut num = RatPoly::constant(yi.clone());
        let mut den = Rat::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = xi - xj;
            if diff.is_zero() {
                return Err(PolyError::DuplicateNode);
            }
            num = num.mul(&RatPoly::new(vec![-xj.clone(), Rat::one()]));
            den *= diff;
        }
        acc = acc.add(&num.scale(&(Rat::one() / den)));
    }
    Ok(acc)
}

fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    let mag = base.clone().pow(exp.unsigned_abs() as u32 as i32);
    if exp < 0 {
        Rat::one() / mag
    } else {
        mag
    }
}

// Integer-polynomial internals. Vectors are lowest first, trailing zeros trimmed.

fn zp_trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn zp_deg(v: &[BigInt]) -> usize {
    debug_assert!(!v.is_empty());
    v.len() - 1
}

fn zp_content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn zp_div_scalar(v: &mut [BigInt], s: &BigInt) {
    for c in v.iter_mut() {
        let (q, r) = c.div_rem(s);
        debug_assert!(r.is_zero(), "inexact scalar division in PRS");
        *c = q;
    }
}

/// Pseudo-remainder: returns r with lc(b)^(deg a - deg b + 1) * a = q*b + r.
fn zp_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = zp_deg(b);
    let c = b.last().unwrap().clone();
    let mut e = (zp_deg(a) - db + 1) as i64;
    let mut r = a.to_vec();
    loop {
        zp_trim(&mut r);
        if r.is_empty() || zp_deg(&r) < db {
            break;
        }
        let dr = zp_deg(&r);
        let top = r.last().unwrap().clone();
        // r <- c*r - top * x^(dr-db) * b
        for coeff in r.iter_mut() {
            *coeff *= &c;
        }
        for (i, bc) in b.iter().enumerate() {
            r[dr - db + i] -= &top * bc;
        }
        e -= 1;
    }
    if e > 0 {
        let f = num_traits::pow::pow(c, e as usize);
        for coeff in r.iter_mut() {
            *coeff *= &f;
        }
    }
    r
}

/// Resultant of two nonzero integer polynomials, by the subresultant PRS.
///
/// Each pseudo-remainder is divided by the subresultant divisor g*h^delta;
/// every scale factor introduced along the way is tracked exactly, so the
/// value returned is the true resultant (an integer, carried as a rational
/// during the computation).
fn resultant_int(a0: Vec<BigInt>, b0: Vec<BigInt>) -> Rat {
    let mut a = a0;
    let mut b = b0;
    zp_trim(&mut a);
    zp_trim(&mut b);
    assert!(!a.is_empty() && !b.is_empty());
    let mut sign = 1i32;
    let mut acc = Rat::one();
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        if zp_deg(&a) < zp_deg(&b) {
            if zp_deg(&a) % 2 == 1 && zp_deg(&b) % 2 == 1 {
                sign = -sign;
            }
            std::mem::swap(&mut a, &mut b);
        }
        let da = zp_deg(&a);
        let db = zp_deg(&b);
        if db == 0 {
            let base = Rat::from_integer(b[0].clone());
            let mut res = acc * rat_pow(&base, da as i64);
            if sign < 0 {
                res = -res;
            }
            return res;
        }
        let delta = da - db;
        let c = Rat::from_integer(b.last().unwrap().clone());
        let mut r = zp_prem(&a, &b);
        zp_trim(&mut r);
        if r.is_empty() {
            return Rat::zero();
        }
        let dr = zp_deg(&r);
        // Res(a,b) = (-1)^(da*db) * c^(da - dr - (delta+1)*db) * Res(b, r)
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let exp = da as i64 - dr as i64 - (delta as i64 + 1) * db as i64;
        acc *= rat_pow(&c, exp);
        // Divide r by the subresultant divisor u = g*h^delta (exact), putting
        // the factor back through Res(b, r) = u^(deg b) * Res(b, r/u).
        let u = &g * num_traits::pow::pow(h.clone(), delta);
        zp_div_scalar(&mut r, &u);
        acc *= rat_pow(&Rat::from_integer(u), db as i64);
        a = b;
        b = r;
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            let gp = num_traits::pow::pow(g.clone(), delta);
            if delta == 1 {
                gp
            } else {
                let hp = num_traits::pow::pow(h.clone(), delta - 1);
                let (q, rem) = gp.div_rem(&hp);
                debug_assert!(rem.is_zero());
                q
            }
        };
    }
}

/// Gcd of two nonzero integer polynomials by the same PRS, returned primitive
/// with positive leading coefficient.
fn gcd_int(a0: Vec<BigInt>, b0: Vec<BigInt>) -> Vec<BigInt> {
    let mut a = a0;
    let mut b = b0;
    zp_trim(&mut a);
    zp_trim(&mut b);
    assert!(!a.is_empty() && !b.is_empty());
    let ca = zp_content(&a);
    let cb = zp_content(&b);
    zp_div_scalar(&mut a, &ca);
    zp_div_scalar(&mut b, &cb);
    if zp_deg(&a) < zp_deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        if zp_deg(&b) == 0 {
            return vec![BigInt::one()];
        }
        let delta = zp_deg(&a) - zp_deg(&b);
        let mut r = zp_prem(&a, &b);
        zp_trim(&mut r);
        if r.is_empty() {
            let c = zp_content(&b);
            zp_div_scalar(&mut b, &c);
            if b.last().unwrap().is_negative() {
                for coeff in b.iter_mut() {
                    *coeff = -std::mem::take(coeff);
                }
            }
            return b;
        }
        let u = &g * num_traits::pow::pow(h.clone(), delta);
        zp_div_scalar(&mut r, &u);
        a = b;
        b = r;
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            let gp = num_traits::pow::pow(g.clone(), delta);
            if delta == 1 {
                gp
            } else {
                let hp = num_traits::pow::pow(h.clone(), delta - 1);
                let (q, rem) = gp.div_rem(&hp);
                debug_assert!(rem.is_zero());
                q
            }
        };
    }
}
