//! Four-square interior certificates for totally positive elements.
//!
//! A certificate pins a tower element x strictly between 0 and a rational
//! bound a/b by exhibiting nine totally real witnesses: a common scale y0
//! and two four-square decompositions
//!
//! ```text
//! x * y0^2            = y1^2 + y2^2 + y3^2 + y4^2
//! (a - b*x) * y0^2    = y5^2 + y6^2 + y7^2 + y8^2   (up to the factor b)
//! ```
//!
//! together with the nondegeneracy clauses b*x*y0^2 != 0 and b*x != a.
//! Since squares of nonzero totally real elements are totally positive, a
//! passing certificate forces every conjugate of x into the open interval
//! (0, a/b); the second identity carries the scale y0^2 so that both sides
//! stay inside the ring generated by the witnesses.
//!
//! The search is deliberately bounded: it tries integer scales y0 and
//! witness coordinates of bounded height, so a `None` outcome means only
//! that no certificate exists within the bound, never that x fails to lie
//! in the interval.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::constructions::{Checker, VerifyReport};
use crate::integrality::is_algebraic_integer;
use crate::par::{find_map_ranges, Exec};
use crate::positivity::{
    is_totally_nonnegative, is_totally_real, totally_in, IntervalSpec, PositivityError,
};
use crate::rat::{rat_int, Rat};
use crate::tower::{AlgNum, TowerError};

/// Why a search could not run.
#[derive(Debug, Error)]
pub enum SearchError {
    #[error("x must be an algebraic integer with every conjugate strictly between 0 and a/b")]
    PreconditionFailed,
    #[error("candidate enumeration would visit {cells} coordinate vectors, over the budget {budget}")]
    BudgetExceeded { cells: u128, budget: u128 },
    #[error("tower arithmetic failed: {0}")]
    Tower(#[from] TowerError),
    #[error("positivity check failed: {0}")]
    Positivity(#[from] PositivityError),
}

/// Interior certificate: x together with the bound a/b and witnesses
/// y0..y8.
#[derive(Clone, Debug)]
pub struct FourSquaresCert {
    pub x: AlgNum,
    pub a: BigInt,
    pub b: BigInt,
    /// Exactly nine witnesses: the scale y0, then y1..y4 and y5..y8.
    pub y: [AlgNum; 9],
}

const FOUR_SQUARES_CLAUSES: &[&str] = &[
    "b x y0^2 is nonzero",
    "b x differs from a",
    "x y0^2 equals y1^2 + y2^2 + y3^2 + y4^2",
    "(a - b x) y0^2 equals y5^2 + y6^2 + y7^2 + y8^2",
    "all witnesses are totally real",
];

/// Rechecks every certificate clause from scratch.
pub fn verify_four_squares(cert: &FourSquaresCert) -> VerifyReport {
    let mut ck = Checker::new();
    let bound_ok = cert.a.is_positive() && cert.b.is_positive();
    ck.record(
        "the bound a/b is positive",
        bound_ok,
        (!bound_ok).then(|| format!("a = {}, b = {}", cert.a, cert.b)),
    );

    let tower = cert.x.tower();
    let compatible = cert.y.iter().all(|y| y.tower() == tower);
    ck.record(
        "certificate elements share one tower",
        compatible,
        (!compatible).then(|| "witnesses live in a different tower than x".to_string()),
    );
    if !compatible {
        ck.skip_all(FOUR_SQUARES_CLAUSES, "tower mismatch");
        return ck.finish();
    }

    let ar = Rat::from(cert.a.clone());
    let br = Rat::from(cert.b.clone());
    let y0sq = &cert.y[0] * &cert.y[0];
    let bxy = (&cert.x * &y0sq).mul_rat(&br);
    ck.clause("b x y0^2 is nonzero", Ok::<_, PositivityError>(!bxy.is_zero()));
    let bx = cert.x.mul_rat(&br);
    ck.clause(
        "b x differs from a",
        Ok::<_, PositivityError>(bx != AlgNum::from_rat(tower, ar.clone())),
    );

    let sum_sq = |lo: usize| {
        let mut s = AlgNum::zero(tower);
        for y in &cert.y[lo..lo + 4] {
            s = &s + &(y * y);
        }
        s
    };
    ck.clause(
        "x y0^2 equals y1^2 + y2^2 + y3^2 + y4^2",
        Ok::<_, PositivityError>(&cert.x * &y0sq == sum_sq(1)),
    );
    let rem = &AlgNum::from_rat(tower, ar) - &bx;
    ck.clause(
        "(a - b x) y0^2 equals y5^2 + y6^2 + y7^2 + y8^2",
        Ok::<_, PositivityError>(&rem * &y0sq == sum_sq(5)),
    );

    let mut all_real = Ok(true);
    for y in &cert.y {
        match is_totally_real(y) {
            Ok(true) => {}
            Ok(false) => {
                all_real = Ok(false);
                break;
            }
            Err(e) => {
                all_real = Err(e);
                break;
            }
        }
    }
    ck.clause("all witnesses are totally real", all_real);
    ck.finish()
}

/// One precomputed candidate: the witness, its square, and the trace of
/// the square (the sum of the squares of its conjugates).
struct Cand {
    y: AlgNum,
    y2: AlgNum,
    tr: Rat,
}

/// Bounded certificate search with the default execution strategy.
///
/// Requires x to be an algebraic integer with all conjugates strictly
/// inside (0, a/b). Tries integer scales y0 = 1..=height_bound and witness
/// coordinates p/q with max(|p|, q) <= height_bound. Returns the first
/// certificate in scan order, or None when the bound is exhausted.
pub fn search_four_squares(
    x: &AlgNum,
    a: i64,
    b: i64,
    height_bound: u32,
) -> Result<Option<FourSquaresCert>, SearchError> {
    search_four_squares_with(x, a, b, height_bound, Exec::default())
}

/// Budget on enumerated coordinate vectors, preventing accidental blowup
/// on high-degree towers.
const CANDIDATE_BUDGET: u128 = 4_000_000;

/// As [`search_four_squares`], with an explicit execution strategy. Both
/// strategies return bit-identical results.
pub fn search_four_squares_with(
    x: &AlgNum,
    a: i64,
    b: i64,
    height_bound: u32,
    exec: Exec,
) -> Result<Option<FourSquaresCert>, SearchError> {
    if a <= 0 || b <= 0 || height_bound == 0 {
        return Err(SearchError::PreconditionFailed);
    }
    if !is_algebraic_integer(x) {
        return Err(SearchError::PreconditionFailed);
    }
    let spec = IntervalSpec::open(Rat::zero(), Rat::new(a.into(), b.into()));
    if !totally_in(x, &spec)? {
        return Err(SearchError::PreconditionFailed);
    }

    let cands = candidates(x, height_bound)?;
    let tower = x.tower();
    let a_elem = AlgNum::from_int(tower, a);
    let bx = x.mul_rat(&rat_int(b));
    let rem = &a_elem - &bx;
    for y0_int in 1..=i64::from(height_bound) {
        let y0 = AlgNum::from_int(tower, y0_int);
        let y0sq = &y0 * &y0;
        let target1 = x * &y0sq;
        let Some(first) = decompose(&cands, &target1, exec) else {
            continue;
        };
        let target2 = &rem * &y0sq;
        let Some(second) = decompose(&cands, &target2, exec) else {
            continue;
        };
        let [y1, y2, y3, y4] = first;
        let [y5, y6, y7, y8] = second;
        let cert = FourSquaresCert {
            x: x.clone(),
            a: BigInt::from(a),
            b: BigInt::from(b),
            y: [y0, y1, y2, y3, y4, y5, y6, y7, y8],
        };
        debug_assert!(verify_four_squares(&cert).passed());
        return Ok(Some(cert));
    }
    Ok(None)
}

/// All coordinate values p/q in lowest terms with max(|p|, q) <= h.
fn coordinate_values(h: u32) -> Vec<Rat> {
    let mut vals = vec![Rat::zero()];
    for q in 1..=i64::from(h) {
        for p in 1..=i64::from(h) {
            if p.gcd(&q) == 1 {
                vals.push(Rat::new(p.into(), q.into()));
                vals.push(Rat::new((-p).into(), q.into()));
            }
        }
    }
    vals
}

/// Nonzero witness candidates up to sign, sorted by decreasing trace of
/// the square and then by coordinates, so scan order is deterministic.
fn candidates(x: &AlgNum, h: u32) -> Result<Vec<Cand>, SearchError> {
    let tower = x.tower();
    let deg = tower.degree();
    let vals = coordinate_values(h);
    let cells = (vals.len() as u128).checked_pow(deg as u32).unwrap_or(u128::MAX);
    if cells > CANDIDATE_BUDGET {
        return Err(SearchError::BudgetExceeded { cells, budget: CANDIDATE_BUDGET });
    }

    // Filtering non-real candidates only matters in towers with complex
    // embeddings; in a totally real tower every element qualifies.
    let need_real_filter = crate::embedding::signature(tower)
        .map(|s| s.complex_pairs > 0)
        .unwrap_or(true);

    let mut out = Vec::new();
    let mut idx = vec![0usize; deg];
    loop {
        // Canonical sign: the first nonzero coordinate is positive, since
        // y and -y contribute the same square.
        let first_nonzero = idx.iter().find(|&&i| i != 0);
        let canonical = match first_nonzero {
            None => false, // the zero vector is not a candidate
            Some(&i) => vals[i].is_positive(),
        };
        if canonical {
            let coeffs: Vec<Rat> = idx.iter().map(|&i| vals[i].clone()).collect();
            let y = AlgNum::from_coeff_vector(tower, &coeffs);
            if !need_real_filter || is_totally_real(&y).unwrap_or(false) {
                let y2 = &y * &y;
                let tr = y2.trace_q();
                out.push(Cand { y, y2, tr });
            }
        }
        // Odometer step.
        let mut k = 0;
        loop {
            if k == deg {
                let mut out = out;
                out.sort_by(|p, q| {
                    q.tr.cmp(&p.tr).then_with(|| p.y.coeff_vector().cmp(&q.y.coeff_vector()))
                });
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < vals.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// First decomposition of target as a sum of four candidate squares, in
/// scan order: slots are filled with candidates of non-increasing index,
/// and exhausted slots are zero.
fn decompose(cands: &[Cand], target: &AlgNum, exec: Exec) -> Option<[AlgNum; 4]> {
    let tower = target.tower();
    if target.is_zero() {
        let z = AlgNum::zero(tower);
        return Some([z.clone(), z.clone(), z.clone(), z]);
    }
    if !is_totally_nonnegative(target).unwrap_or(false) {
        return None;
    }
    let tr = target.trace_q();
    let chunk = (cands.len() as u64 / 64).max(8);
    let found = find_map_ranges(exec, 0..cands.len() as u64, chunk, |range| {
        for i in range {
            let i = i as usize;
            if let Some(rest) = descend(cands, target, &tr, i, 4) {
                return Some(rest);
            }
        }
        None
    })?;
    let z = AlgNum::zero(tower);
    let mut it = found.into_iter();
    Some([
        it.next().unwrap_or_else(|| z.clone()),
        it.next().unwrap_or_else(|| z.clone()),
        it.next().unwrap_or_else(|| z.clone()),
        it.next().unwrap_or(z),
    ])
}

/// Tries candidate i as the next slot and recurses on the residual with
/// indices >= i.
fn descend(
    cands: &[Cand],
    residual: &AlgNum,
    residual_tr: &Rat,
    i: usize,
    slots: usize,
) -> Option<Vec<AlgNum>> {
    let c = &cands[i];
    // Traces of squares of totally real elements add up, so one square of
    // trace above the residual's cannot fit.
    if c.tr > *residual_tr {
        return None;
    }
    let next = residual - &c.y2;
    if next.is_zero() {
        return Some(vec![c.y.clone()]);
    }
    if slots == 1 || !is_totally_nonnegative(&next).unwrap_or(false) {
        return None;
    }
    let next_tr = residual_tr - &c.tr;
    for j in i..cands.len() {
        if let Some(mut rest) = descend(cands, &next, &next_tr, j, slots - 1) {
            let mut v = vec![c.y.clone()];
            v.append(&mut rest);
            return Some(v);
        }
    }
    None
}

impl FourSquaresCert {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": "four_squares",
            "tower": self.x.tower().to_json(),
            "payload": {
                "x": self.x.to_json(),
                "a": self.a.to_string(),
                "b": self.b.to_string(),
                "y": self.y.iter().map(AlgNum::to_json).collect::<Vec<_>>(),
            },
        })
    }

    pub fn from_json(v: &Value) -> Result<FourSquaresCert, TowerError> {
        if v.get("kind").and_then(Value::as_str) != Some("four_squares") {
            return Err(TowerError::BadEncoding);
        }
        let tower = crate::tower::Tower::from_json(v.get("tower").ok_or(TowerError::BadEncoding)?)?;
        let payload = v.get("payload").ok_or(TowerError::BadEncoding)?;
        let int_field = |name: &str| -> Result<BigInt, TowerError> {
            payload
                .get(name)
                .and_then(Value::as_str)
                .and_then(|s| s.parse::<BigInt>().ok())
                .ok_or(TowerError::BadEncoding)
        };
        let x = AlgNum::from_json(&tower, payload.get("x").ok_or(TowerError::BadEncoding)?)?;
        let ys = payload
            .get("y")
            .and_then(Value::as_array)
            .ok_or(TowerError::BadEncoding)?;
        if ys.len() != 9 {
            return Err(TowerError::BadEncoding);
        }
        let mut parsed = Vec::with_capacity(9);
        for y in ys {
            parsed.push(AlgNum::from_json(&tower, y)?);
        }
        let y: [AlgNum; 9] = parsed.try_into().map_err(|_| TowerError::BadEncoding)?;
        Ok(FourSquaresCert { x, a: int_field("a")?, b: int_field("b")?, y })
    }
}
