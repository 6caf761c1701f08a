//! Cyclotomic polynomials and the small arithmetic functions around them.
//!
//! Phi_n is computed by exact division: x^n - 1 divided by the cyclotomic
//! polynomials of the proper divisors of n. Coefficients stay integral at
//! every step because each divisor is monic.

use crate::poly::RatPoly;
use crate::rat::{rat_int, Rat};
use num_traits::One;

/// Sorted list of the positive divisors of n (n >= 1).
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// All n with euler_phi(n) == g, ascending.
///
/// Uses the bound phi(n) >= sqrt(n/2), so every solution satisfies
/// n <= 2 g^2; the search space is finite and scanned directly.
pub fn inverse_phi(g: u64) -> Vec<u64> {
    if g == 0 {
        return Vec::new();
    }
    let limit = 2 * g * g;
    (1..=limit).filter(|&n| euler_phi(n) == g).collect()
}

/// The n-th cyclotomic polynomial, monic with integer coefficients.
pub fn cyclotomic(n: u64) -> RatPoly {
    assert!(n >= 1);
    // x^n - 1
    let mut coeffs = vec![Rat::from_integer((-1).into())];
    coeffs.resize(n as usize, rat_int(0));
    coeffs.push(Rat::one());
    let mut acc = RatPoly::new(coeffs);
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic(d);
        acc = acc
            .exact_div(&phi_d)
            .expect("x^n - 1 is divisible by each cyclotomic factor");
    }
    acc
}
