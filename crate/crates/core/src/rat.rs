//! Arbitrary-precision rationals plus the few helpers the rest of the crate
//! leans on: `num/den` formatting, integer square-root bounds, and exact
//! square testing.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number. Always stored reduced with a positive denominator.
pub type Rat = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `num/den` with the denominator always present, e.g. `-6/1`.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a/b` or a bare integer `a`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let bad = || ParseRatError::Malformed(s.to_string());
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rat::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ParseRatError::ZeroDenominator(s.to_string()));
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// max(|numerator|, denominator), the usual naive height.
pub fn rat_height(r: &Rat) -> BigUint {
    let n = r.numer().magnitude().clone();
    let d = r.denom().magnitude().clone();
    n.max(d)
}

/// Floor of the integer square root; panics on negative input.
pub fn int_sqrt_floor(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "integer square root of a negative number");
    n.sqrt()
}

/// Exact rational square root if one exists.
pub fn rat_exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let sn = int_sqrt_floor(x.numer());
    let sd = int_sqrt_floor(x.denom());
    if &(&sn * &sn) == x.numer() && &(&sd * &sd) == x.denom() {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// Rational lower bound on sqrt(x) for x >= 0, within 2^-bits of the true value.
pub fn rat_sqrt_lower(x: &Rat, bits: u32) -> Rat {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Rat::zero();
    }
    // sqrt(n/d) = sqrt(n*d)/d; scale by 4^bits so the floor sqrt lands within
    // 2^-bits of the target after dividing the scale back out.
    let scale = BigInt::one() << bits;
    let nd = x.numer() * x.denom() * (&scale * &scale);
    let root = int_sqrt_floor(&nd);
    Rat::new(root, x.denom() * scale)
}

/// Rational upper bound on sqrt(x) for x >= 0, within 2^-bits of the true value.
pub fn rat_sqrt_upper(x: &Rat, bits: u32) -> Rat {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Rat::zero();
    }
    let scale = BigInt::one() << bits;
    let nd = x.numer() * x.denom() * (&scale * &scale);
    let root = int_sqrt_floor(&nd);
    let root = if &root * &root == nd { root } else { root + 1 };
    Rat::new(root, x.denom() * scale)
}

/// Sign as -1, 0, or 1.
pub fn sign_of(r: &Rat) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
