//! Totally-real and interval questions about all conjugates of an element.
//!
//! Every predicate here reduces to exact root counting on the minimal
//! polynomial: an element is totally real when all roots are real, lies
//! totally in an interval when every root does, and avoids an interval when
//! no real root enters it (complex roots avoid every real interval by
//! themselves). Endpoint membership is decided by exact evaluation, so open,
//! closed, and unbounded ends all come out right. No floating point.

use crate::poly::PolyError;
use crate::rat::Rat;
use crate::sturm::{SturmChain, SturmError};
use crate::tower::AlgNum;
use num_traits::Zero;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PositivityError {
    #[error(transparent)]
    Sturm(#[from] SturmError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("interval is empty or has crossed endpoints")]
    BadInterval,
    #[error("unreadable interval literal: {0}")]
    BadLiteral(String),
}

/// One end of an interval: unbounded, or a rational endpoint that is either
/// excluded (open) or included (closed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntervalEnd {
    Unbounded,
    Open(Rat),
    Closed(Rat),
}

/// A real interval with rational or infinite endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    pub lo: IntervalEnd,
    pub hi: IntervalEnd,
}

impl IntervalSpec {
    pub fn open(lo: Rat, hi: Rat) -> Self {
        IntervalSpec { lo: IntervalEnd::Open(lo), hi: IntervalEnd::Open(hi) }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        IntervalSpec { lo: IntervalEnd::Closed(lo), hi: IntervalEnd::Closed(hi) }
    }

    /// [lo, +inf)
    pub fn at_least(lo: Rat) -> Self {
        IntervalSpec { lo: IntervalEnd::Closed(lo), hi: IntervalEnd::Unbounded }
    }

    /// (-inf, hi]
    pub fn at_most(hi: Rat) -> Self {
        IntervalSpec { lo: IntervalEnd::Unbounded, hi: IntervalEnd::Closed(hi) }
    }

    pub fn all() -> Self {
        IntervalSpec { lo: IntervalEnd::Unbounded, hi: IntervalEnd::Unbounded }
    }

    fn validate(&self) -> Result<(), PositivityError> {
        let (a, b) = match (&self.lo, &self.hi) {
            (IntervalEnd::Open(a) | IntervalEnd::Closed(a),
             IntervalEnd::Open(b) | IntervalEnd::Closed(b)) => (a, b),
            _ => return Ok(()),
        };
        if a > b {
            return Err(PositivityError::BadInterval);
        }
        if a == b
            && !matches!(
                (&self.lo, &self.hi),
                (IntervalEnd::Closed(_), IntervalEnd::Closed(_))
            )
        {
            return Err(PositivityError::BadInterval);
        }
        Ok(())
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            IntervalEnd::Unbounded => write!(f, "(-inf, ")?,
            IntervalEnd::Open(a) => write!(f, "({}, ", a)?,
            IntervalEnd::Closed(a) => write!(f, "[{}, ", a)?,
        }
        match &self.hi {
            IntervalEnd::Unbounded => write!(f, "inf)"),
            IntervalEnd::Open(b) => write!(f, "{})", b),
            IntervalEnd::Closed(b) => write!(f, "{}]", b),
        }
    }
}

impl FromStr for IntervalSpec {
    type Err = PositivityError;

    /// Accepts forms like "(-2,0)", "[0,inf)", "(-inf,1]", "[3/2,5/2]".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PositivityError::BadLiteral(s.to_string());
        let t = s.trim();
        let open_ch = t.chars().next().ok_or_else(bad)?;
        let close_ch = t.chars().last().ok_or_else(bad)?;
        if t.len() < 2 || !"([".contains(open_ch) || !")]".contains(close_ch) {
            return Err(bad());
        }
        let inner = &t[1..t.len() - 1];
        let (lo_s, hi_s) = inner.split_once(',').ok_or_else(bad)?;
        let lo_s = lo_s.trim();
        let hi_s = hi_s.trim();
        let lo = match (open_ch, lo_s) {
            ('(', "-inf") => IntervalEnd::Unbounded,
            ('(', v) => IntervalEnd::Open(parse_rat_lit(v).ok_or_else(bad)?),
            ('[', v) => IntervalEnd::Closed(parse_rat_lit(v).ok_or_else(bad)?),
            _ => return Err(bad()),
        };
        let hi = match (close_ch, hi_s) {
            (')', "inf") | (')', "+inf") => IntervalEnd::Unbounded,
            (')', v) => IntervalEnd::Open(parse_rat_lit(v).ok_or_else(bad)?),
            (']', v) => IntervalEnd::Closed(parse_rat_lit(v).ok_or_else(bad)?),
            _ => return Err(bad()),
        };
        let spec = IntervalSpec { lo, hi };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_rat_lit(s: &str) -> Option<Rat> {
    crate::rat::parse_rat(s).ok()
}

/// Number of real roots of the squarefree polynomial inside the interval.
fn count_in_interval(
    chain: &SturmChain,
    spec: &IntervalSpec,
) -> Result<usize, PositivityError> {
    spec.validate()?;
    let p = chain.polynomial();
    let is_root = |t: &Rat| p.eval(t).is_zero();
    let n = match (&spec.lo, &spec.hi) {
        (IntervalEnd::Unbounded, IntervalEnd::Unbounded) => chain.count_all(),
        (IntervalEnd::Unbounded, IntervalEnd::Open(b)) => {
            chain.count_up_to(b) - usize::from(is_root(b))
        }
        (IntervalEnd::Unbounded, IntervalEnd::Closed(b)) => chain.count_up_to(b),
        (IntervalEnd::Open(a), IntervalEnd::Unbounded) => chain.count_above(a),
        (IntervalEnd::Closed(a), IntervalEnd::Unbounded) => {
            chain.count_above(a) + usize::from(is_root(a))
        }
        (lo, hi) => {
            let (a, closed_lo) = match lo {
                IntervalEnd::Open(a) => (a, false),
                IntervalEnd::Closed(a) => (a, true),
                IntervalEnd::Unbounded => unreachable!(),
            };
            let (b, closed_hi) = match hi {
                IntervalEnd::Open(b) => (b, false),
                IntervalEnd::Closed(b) => (b, true),
                IntervalEnd::Unbounded => unreachable!(),
            };
            if a == b {
                // Validated: both ends closed. The interval is one point.
                return Ok(usize::from(is_root(a)));
            }
            let mut count = chain.count_half_open(a, b)?;
            if closed_lo && is_root(a) {
                count += 1;
            }
            if !closed_hi && is_root(b) {
                count -= 1;
            }
            count
        }
    };
    Ok(n)
}

fn squarefree_chain(x: &AlgNum) -> Result<(SturmChain, usize), PositivityError> {
    let mp = x.min_poly();
    let deg = mp.degree().expect("minimal polynomials are nonzero");
    let sf = mp.squarefree_part()?;
    Ok((SturmChain::new(&sf)?, deg))
}

/// True when every conjugate of x is real.
pub fn is_totally_real(x: &AlgNum) -> Result<bool, PositivityError> {
    let (chain, deg) = squarefree_chain(x)?;
    Ok(chain.count_all() == deg)
}

/// True when every conjugate of x is real and lies in the interval.
pub fn totally_in(x: &AlgNum, spec: &IntervalSpec) -> Result<bool, PositivityError> {
    let (chain, deg) = squarefree_chain(x)?;
    if chain.count_all() != deg {
        return Ok(false);
    }
    Ok(count_in_interval(&chain, spec)? == deg)
}

/// True when no conjugate of x lies in the interval. Complex conjugates
/// avoid every real interval, so this does not require x to be totally real.
pub fn totally_avoids(x: &AlgNum, spec: &IntervalSpec) -> Result<bool, PositivityError> {
    let (chain, _) = squarefree_chain(x)?;
    Ok(count_in_interval(&chain, spec)? == 0)
}

/// True when every conjugate of x is real and >= 0.
pub fn is_totally_nonnegative(x: &AlgNum) -> Result<bool, PositivityError> {
    totally_in(x, &IntervalSpec::at_least(Rat::zero()))
}

/// True when every conjugate of x is real and > 0.
pub fn is_totally_positive(x: &AlgNum) -> Result<bool, PositivityError> {
    totally_in(
        x,
        &IntervalSpec { lo: IntervalEnd::Open(Rat::zero()), hi: IntervalEnd::Unbounded },
    )
}
