//! Sturm chains and exact real-root counting.
//!
//! The chain for a squarefree p is p, p', then negated remainders. For
//! rationals lo < hi the difference of sign variations counts roots in the
//! half-open interval (lo, hi]: variations are taken ignoring zeros, which
//! shifts each endpoint root into the interval on its left. Everything is
//! rational arithmetic; no floating point is involved anywhere.

use crate::poly::{PolyError, RatPoly};
use crate::rat::{sign_of, Rat};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SturmError {
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial has a repeated root; take the squarefree part first")]
    NotSquarefree,
    #[error("interval endpoints must satisfy lo < hi")]
    EmptyInterval,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Sturm chain of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<RatPoly>,
}

impl SturmChain {
    /// Builds the chain for p, rejecting zero and non-squarefree inputs.
    pub fn new(p: &RatPoly) -> Result<Self, SturmError> {
        if p.is_zero() {
            return Err(SturmError::ZeroPolynomial);
        }
        let mut chain = vec![p.clone()];
        if p.is_constant() {
            return Ok(SturmChain { chain });
        }
        chain.push(p.derivative());
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1])?;
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        // For squarefree p the chain ends in a nonzero constant; a nonconstant
        // tail is gcd(p, p') and certifies a repeated root.
        if !chain.last().unwrap().is_constant() {
            return Err(SturmError::NotSquarefree);
        }
        Ok(SturmChain { chain })
    }

    pub fn polynomial(&self) -> &RatPoly {
        &self.chain[0]
    }

    /// Sign variations of the chain at x, zeros skipped.
    pub fn variations_at(&self, x: &Rat) -> usize {
        let signs = self.chain.iter().map(|q| sign_of(&q.eval(x)));
        count_variations(signs)
    }

    /// Sign variations at +infinity (or -infinity), read off leading terms.
    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        let signs = self.chain.iter().map(|q| {
            let d = q.degree().expect("chain entries are nonzero");
            let mut s = sign_of(q.lead().unwrap());
            if !positive && d % 2 == 1 {
                s = -s;
            }
            s
        });
        count_variations(signs)
    }

    /// Number of real roots in the half-open interval (lo, hi].
    pub fn count_half_open(&self, lo: &Rat, hi: &Rat) -> Result<usize, SturmError> {
        if lo >= hi {
            return Err(SturmError::EmptyInterval);
        }
        let vl = self.variations_at(lo);
        let vh = self.variations_at(hi);
        debug_assert!(vl >= vh);
        Ok(vl - vh)
    }

    /// Number of real roots in (lo, +infinity).
    pub fn count_above(&self, lo: &Rat) -> usize {
        let vl = self.variations_at(lo);
        let vh = self.variations_at_infinity(true);
        // The polynomial never vanishes at +infinity, so (lo, inf] = (lo, inf).
        vl.saturating_sub(vh)
    }

    /// Number of real roots in (-infinity, hi].
    pub fn count_up_to(&self, hi: &Rat) -> usize {
        let vl = self.variations_at_infinity(false);
        let vh = self.variations_at(hi);
        vl.saturating_sub(vh)
    }

    /// Total number of distinct real roots.
    pub fn count_all(&self) -> usize {
        let vl = self.variations_at_infinity(false);
        let vh = self.variations_at_infinity(true);
        vl.saturating_sub(vh)
    }
}

fn count_variations<I: Iterator<Item = i32>>(signs: I) -> usize {
    let mut last = 0i32;
    let mut count = 0usize;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Roots of p in (lo, hi] for squarefree p.
pub fn sturm_count(p: &RatPoly, lo: &Rat, hi: &Rat) -> Result<usize, SturmError> {
    SturmChain::new(p)?.count_half_open(lo, hi)
}

/// A bound B with every real root of p inside [-B, B] (Cauchy bound).
pub fn cauchy_root_bound(p: &RatPoly) -> Result<Rat, SturmError> {
    let d = p.degree().ok_or(SturmError::ZeroPolynomial)?;
    let lead = p.lead().unwrap();
    let mut max = Rat::zero();
    for c in &p.coeffs()[..d] {
        let t = (c / lead).abs();
        if t > max {
            max = t;
        }
    }
    Ok(Rat::one() + max)
}

/// Number of distinct real roots of an arbitrary nonzero polynomial.
///
/// Works through the squarefree part, so repeated roots are counted once.
pub fn count_real_roots(p: &RatPoly) -> Result<usize, SturmError> {
    if p.is_zero() {
        return Err(SturmError::ZeroPolynomial);
    }
    if p.is_constant() {
        return Ok(0);
    }
    let sf = p.squarefree_part()?;
    Ok(SturmChain::new(&sf)?.count_all())
}

/// Disjoint rational intervals (a, b], one per real root of squarefree p,
/// each containing exactly one root, in increasing order.
pub fn isolate_real_roots(p: &RatPoly) -> Result<Vec<(Rat, Rat)>, SturmError> {
    let chain = SturmChain::new(p)?;
    let total = chain.count_all();
    if total == 0 {
        return Ok(Vec::new());
    }
    let bound = cauchy_root_bound(p)?;
    let lo = -bound.clone();
    let mut out = Vec::with_capacity(total);
    let mut stack = vec![(lo, bound, total)];
    while let Some((a, b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((a, b));
            continue;
        }
        let mid = (&a + &b) / Rat::from_integer(2.into());
        let left = chain.count_half_open(&a, &mid)?;
        // Push right first so the left half is processed first: output stays
        // sorted in increasing order.
        stack.push((mid.clone(), b, n - left));
        stack.push((a, mid, left));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out)
}

/// Shrinks an isolating interval (a, b] of squarefree p until b - a <= eps.
/// The half-open convention is preserved at every step.
pub fn refine_root(
    chain: &SturmChain,
    mut a: Rat,
    mut b: Rat,
    eps: &Rat,
) -> Result<(Rat, Rat), SturmError> {
    debug_assert_eq!(chain.count_half_open(&a, &b)?, 1);
    let two = Rat::from_integer(2.into());
    while &b - &a > *eps {
        let mid = (&a + &b) / &two;
        if chain.count_half_open(&a, &mid)? == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok((a, b))
}
