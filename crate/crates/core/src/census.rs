//! Census of algebraic integers with every conjugate inside (0, t).
//!
//! The census enumerates monic integer polynomials of degree k <= D whose
//! k roots are real, distinct, and strictly between 0 and t. Any such
//! polynomial has signed elementary-symmetric coefficients
//! p(x) = x^k - e_1 x^{k-1} + e_2 x^{k-2} - ... with 0 < e_j < C(k,j) t^j,
//! so the search space is a finite coefficient box. A cell budget guards
//! against boxes too large to sweep.
//!
//! Candidates pass through cheap integer necessary conditions (Newton's
//! inequalities, the arithmetic-geometric mean bound, and strict sign
//! alternation of the transform that maps (0,t) to the positive axis)
//! before the exact decision by a Sturm chain. Entries are deduplicated
//! against kept lower-degree entries by a resultant test; since every
//! factor of a qualifying reducible polynomial also qualifies at lower
//! degree, the kept entries are exactly the irreducible ones, with no
//! factorization routine anywhere.
//!
//! The comparison family: kappa_n = zeta_n + 1/zeta_n + 2 for n >= 3 is an
//! algebraic integer of degree phi(n)/2 with all conjugates in (0, 4), and
//! by Kronecker's theorem these exhaust the census at t = 4. The module
//! computes kappa_n minimal polynomials by resultant elimination and
//! cross-validates the two enumerations.
//!
//! The box sweep partitions into independent index ranges evaluated
//! concurrently; merging preserves index order, so results are identical
//! under sequential and parallel execution.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cyclo::symmetric_elimination;
use crate::cyclotomic::{euler_phi, inverse_phi};
use crate::par::{map_ranges, Exec};
use crate::poly::{PolyError, RatPoly};
use crate::rat::{rat_int, Rat};
use crate::sturm::{sturm_count, SturmError};

/// Default ceiling on the number of coefficient-box cells a census sweeps.
pub const DEFAULT_CELL_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census needs max degree >= 1 and t > 0")]
    InvalidParameters,
    #[error("coefficient box holds {cells} cells, over the budget of {budget}; rerun with a budget of at least {cells}")]
    BudgetExceeded { cells: u128, budget: u128 },
    #[error("kappa_{n} is undefined for the census: kappa_1 = 4 and kappa_2 = 0 sit on the boundary of (0, 4)")]
    OrderTooSmall { n: u64 },
    #[error("root counting failed: {0}")]
    Sturm(#[from] SturmError),
    #[error("polynomial arithmetic failed: {0}")]
    Poly(#[from] PolyError),
}

/// Minimal polynomial of kappa_n = zeta_n + 1/zeta_n + 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KroneckerEntry {
    pub n: u64,
    pub poly: RatPoly,
}

impl KroneckerEntry {
    pub fn degree(&self) -> usize {
        self.poly.degree().expect("minimal polynomials are nonzero")
    }
}

/// Computes the minimal polynomial of kappa_n by eliminating x from
/// Phi_n(x) and x^2 - (y-2)x + 1, then checks degree phi(n)/2 and that
/// every root lies strictly inside (0, 4).
pub fn kronecker_entry(n: u64) -> Result<KroneckerEntry, CensusError> {
    if n < 3 {
        return Err(CensusError::OrderTooSmall { n });
    }
    let poly = symmetric_elimination(n, 2);
    let expected = (euler_phi(n) / 2) as usize;
    assert_eq!(
        poly.degree(),
        Some(expected),
        "elimination for kappa_{n} missed the expected degree"
    );
    assert!(
        roots_strictly_inside(&poly, &rat_int(4))?,
        "kappa_{n} has a conjugate outside (0, 4)"
    );
    Ok(KroneckerEntry { n, poly })
}

/// Exact check that p is squarefree with deg(p) distinct real roots, all
/// strictly inside (0, t). This is the recheck every census entry must
/// survive, built on a fresh Sturm chain.
pub fn roots_strictly_inside(p: &RatPoly, t: &Rat) -> Result<bool, CensusError> {
    let Some(k) = p.degree() else { return Ok(false) };
    if k == 0 {
        return Ok(false);
    }
    if p.eval(&Rat::zero()).is_zero() || p.eval(t).is_zero() {
        return Ok(false);
    }
    match sturm_count(p, &Rat::zero(), t) {
        Ok(c) => Ok(c == k),
        Err(SturmError::NotSquarefree) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// One kept census polynomial: monic, integer, irreducible by the
/// lower-degree dedup rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub poly: RatPoly,
}

impl CensusEntry {
    pub fn degree(&self) -> usize {
        self.poly.degree().expect("census entries are nonzero")
    }
}

/// Full enumeration result for one (max_degree, t) pair.
///
/// Entries ascend by degree, then by the signed coefficient vector
/// (e_1, ..., e_k); the order is a pure function of the parameters.
#[derive(Clone, Debug)]
pub struct CensusTable {
    pub max_degree: u32,
    pub t: Rat,
    pub entries: Vec<CensusEntry>,
}

impl CensusTable {
    pub fn counts_per_degree(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for e in &self.entries {
            *m.entry(e.degree()).or_insert(0) += 1;
        }
        m
    }

    /// Number of algebraic integers listed: each degree-k entry stands for
    /// its k conjugate roots.
    pub fn element_count(&self) -> u64 {
        self.entries.iter().map(|e| e.degree() as u64).sum()
    }

    pub fn contains(&self, p: &RatPoly) -> bool {
        self.entries.iter().any(|e| &e.poly == p)
    }

    pub fn to_json(&self) -> Value {
        let counts: BTreeMap<String, usize> = self
            .counts_per_degree()
            .into_iter()
            .map(|(d, c)| (d.to_string(), c))
            .collect();
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let coeffs: Vec<String> =
                    e.poly.coeffs().iter().map(|c| c.numer().to_string()).collect();
                json!({ "degree": e.degree(), "coefficients": coeffs })
            })
            .collect();
        json!({
            "max_degree": self.max_degree,
            "t": self.t.to_string(),
            "counts_per_degree": counts,
            "element_count": self.element_count(),
            "entries": entries,
        })
    }
}

/// Census parameters with an explicit cell budget.
#[derive(Clone, Debug)]
pub struct CensusParams {
    pub max_degree: u32,
    pub t: Rat,
    pub cell_budget: u64,
}

/// Sweeps the coefficient box with the default budget and execution mode.
pub fn census(max_degree: u32, t: &Rat) -> Result<CensusTable, CensusError> {
    census_with(
        &CensusParams { max_degree, t: t.clone(), cell_budget: DEFAULT_CELL_BUDGET },
        Exec::default(),
    )
}

/// Sweeps the coefficient box degree by degree. Results are independent of
/// the execution mode: ranges merge in index order.
pub fn census_with(params: &CensusParams, exec: Exec) -> Result<CensusTable, CensusError> {
    if params.max_degree < 1 || !params.t.is_positive() {
        return Err(CensusError::InvalidParameters);
    }
    let boxes: Vec<DegreeBox> =
        (1..=params.max_degree).map(|k| DegreeBox::new(k as usize, &params.t)).collect();
    let cells: u128 = boxes.iter().map(|b| b.cells).fold(0u128, u128::saturating_add);
    if cells > params.cell_budget as u128 {
        return Err(CensusError::BudgetExceeded { cells, budget: params.cell_budget as u128 });
    }

    let mut entries: Vec<CensusEntry> = Vec::new();
    for b in &boxes {
        if b.cells == 0 {
            continue;
        }
        let kept_lower: Vec<RatPoly> = entries.iter().map(|e| e.poly.clone()).collect();
        let total = b.cells as u64;
        let chunk = (total / 128).clamp(1024, 1 << 20);
        let found = map_ranges(exec, 0..total, chunk, |range| {
            b.scan(range, &params.t, &kept_lower)
        });
        // Any Sturm or resultant failure inside the sweep surfaces here.
        let mut fresh = Vec::new();
        for r in found {
            fresh.push(CensusEntry { poly: r? });
        }
        entries.extend(fresh);
    }
    Ok(CensusTable { max_degree: params.max_degree, t: params.t.clone(), entries })
}

/// The degree-k slice of the coefficient box, with the integer tables the
/// cheap filters need.
struct DegreeBox {
    k: usize,
    /// emax[j-1] = number of admissible values for e_j (e_j runs 1..=emax).
    emax: Vec<u64>,
    cells: u128,
    /// binom[j] = C(k, j).
    binom: Vec<i128>,
    /// alt[m][j] = signed weight of e_j in the m-th transform coefficient,
    /// scaled so that every coefficient must come out strictly positive.
    alt: Vec<Vec<i128>>,
    /// Whether the i128 filters are safe from overflow for this box.
    filters_ok: bool,
}

impl DegreeBox {
    fn new(k: usize, t: &Rat) -> DegreeBox {
        let a = t.numer().clone();
        let b = t.denom().clone();
        let mut binom_big = vec![BigInt::one(); k + 1];
        for j in 1..=k {
            binom_big[j] = &binom_big[j - 1] * BigInt::from(k + 1 - j) / BigInt::from(j);
        }
        // e_j < C(k,j) (a/b)^j, so e_j <= (C(k,j) a^j - 1) div b^j.
        let mut emax = Vec::with_capacity(k);
        let mut apow = vec![BigInt::one(); k + 1];
        let mut bpow = vec![BigInt::one(); k + 1];
        for j in 1..=k {
            apow[j] = &apow[j - 1] * &a;
            bpow[j] = &bpow[j - 1] * &b;
            let bound = (&binom_big[j] * &apow[j] - BigInt::one()) / &bpow[j];
            emax.push(if bound.is_positive() {
                u64::try_from(&bound).unwrap_or(u64::MAX)
            } else {
                0
            });
        }
        let cells = emax.iter().fold(1u128, |acc, &m| acc.saturating_mul(m as u128));

        // Transform weights: substituting x = t y / (1 + y) sends (0, t) to
        // (0, inf), so a qualifying p has b^k (1+y)^k p(ty/(1+y)) with k
        // positive roots, hence strictly alternating coefficients. The
        // weight of e_j in the y^m coefficient, including the alternation
        // sign, is (-1)^{k-m} (-1)^j a^{k-j} b^j C(j, m-k+j).
        let mut alt = vec![vec![0i128; k + 1]; k + 1];
        let mut filters_ok = true;
        let mut worst: u128 = 0;
        for (m, row) in alt.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let i = m as i64 - (k as i64 - j as i64);
                if i < 0 || i > j as i64 {
                    continue;
                }
                let w = &apow[k - j] * &bpow[j] * binomial_big(j, i as usize);
                let signed = if (k - m + j).is_multiple_of(2) { w } else { -w };
                match i128::try_from(&signed) {
                    Ok(v) => *cell = v,
                    Err(_) => filters_ok = false,
                }
            }
        }
        let binom: Vec<i128> = binom_big
            .iter()
            .map(|c| i128::try_from(c).unwrap_or_else(|_| {
                filters_ok = false;
                0
            }))
            .collect();
        // Overflow audit for the filter sums: (k+1) terms of e_j * weight.
        for row in &alt {
            let mut s: u128 = 0;
            for (j, cell) in row.iter().enumerate() {
                let e = if j == 0 { 1u128 } else { emax[j - 1] as u128 };
                s = s.saturating_add(e.saturating_mul(cell.unsigned_abs()));
            }
            worst = worst.max(s);
        }
        for j in 1..k {
            let e2 = (emax[j - 1] as u128).saturating_mul(emax[j - 1] as u128);
            let lhs = e2.saturating_mul((binom[j - 1].unsigned_abs()).saturating_mul(binom[j + 1].unsigned_abs()));
            let e01 = (if j >= 2 { emax[j - 2] as u128 } else { 1 })
                .saturating_mul(emax[j] as u128);
            let rhs = e01.saturating_mul(binom[j].unsigned_abs().saturating_mul(binom[j].unsigned_abs()));
            worst = worst.max(lhs).max(rhs);
        }
        if worst > i128::MAX as u128 / 4 {
            filters_ok = false;
        }
        DegreeBox { k, emax, cells, binom, alt, filters_ok }
    }

    /// Decodes indices of the range, filters, and decides each candidate
    /// exactly; keeps polynomials sharing no root with a kept lower-degree
    /// entry. Index decode is mixed-radix with e_1 most significant, so
    /// ascending indices give the (e_1, ..., e_k) lexicographic order.
    fn scan(
        &self,
        range: std::ops::Range<u64>,
        t: &Rat,
        kept_lower: &[RatPoly],
    ) -> Vec<Result<RatPoly, CensusError>> {
        let k = self.k;
        let mut out = Vec::new();
        let mut e = vec![0i128; k + 1];
        e[0] = 1;
        for idx in range {
            let mut rest = idx;
            for j in (1..=k).rev() {
                e[j] = (rest % self.emax[j - 1]) as i128 + 1;
                rest /= self.emax[j - 1];
            }
            if self.filters_ok && !self.cheap_filters(&e) {
                continue;
            }
            // Exact decision. Coefficients ascend: the x^{k-j} slot holds
            // (-1)^j e_j.
            let mut coeffs = vec![Rat::zero(); k + 1];
            for (j, ej) in e.iter().enumerate() {
                let v = if j % 2 == 0 { *ej } else { -*ej };
                coeffs[k - j] = Rat::from_integer(BigInt::from(v));
            }
            let p = RatPoly::new(coeffs);
            match roots_strictly_inside(&p, t) {
                Ok(true) => {}
                Ok(false) => continue,
                Err(err) => {
                    out.push(Err(err));
                    continue;
                }
            }
            match shares_no_root(&p, kept_lower) {
                Ok(true) => out.push(Ok(p)),
                Ok(false) => {}
                Err(err) => out.push(Err(err)),
            }
        }
        out
    }

    /// Integer necessary conditions; false rejects the cell.
    fn cheap_filters(&self, e: &[i128]) -> bool {
        let k = self.k;
        // Strict alternation of the (0,t) -> (0,inf) transform.
        for row in &self.alt {
            let mut acc: i128 = 0;
            for (j, w) in row.iter().enumerate() {
                acc += e[j] * w;
            }
            if acc <= 0 {
                return false;
            }
        }
        // Newton's inequalities for real-rooted polynomials.
        for j in 1..k {
            let lhs = e[j] * e[j] * self.binom[j - 1] * self.binom[j + 1];
            let rhs = e[j - 1] * e[j + 1] * self.binom[j] * self.binom[j];
            if lhs < rhs {
                return false;
            }
        }
        // AM-GM for k positive roots: (e_1 / k)^k >= e_k.
        if let Some(p) = e[1].checked_pow(k as u32) {
            if let Some(kk) = (k as i128).checked_pow(k as u32) {
                if let Some(rhs) = kk.checked_mul(e[k]) {
                    if p < rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// True when p shares no root with any polynomial of the list.
fn shares_no_root(p: &RatPoly, kept: &[RatPoly]) -> Result<bool, CensusError> {
    for q in kept {
        if p.resultant(q)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Discrepancies between the census at t = 4 and the kappa family with
/// phi(n)/2 <= max_degree.
#[derive(Clone, Debug)]
pub struct CompletenessReport {
    pub max_degree: u32,
    pub matched: usize,
    pub census_only: Vec<RatPoly>,
    pub kronecker_only: Vec<RatPoly>,
}

impl CompletenessReport {
    pub fn passed(&self) -> bool {
        self.census_only.is_empty() && self.kronecker_only.is_empty()
    }
}

impl fmt::Display for CompletenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degree <= {}: {} matched, {} census-only, {} kappa-only",
            self.max_degree,
            self.matched,
            self.census_only.len(),
            self.kronecker_only.len()
        )?;
        for p in &self.census_only {
            write!(f, "\n  census only: {p}")?;
        }
        for p in &self.kronecker_only {
            write!(f, "\n  kappa only: {p}")?;
        }
        Ok(())
    }
}

/// Compares census(max_degree, 4) against { kappa_n : phi(n)/2 <= max_degree }
/// as polynomial sets; the two sides come from independent computations
/// (coefficient-box sweep vs cyclotomic resultants).
pub fn kronecker_completeness(max_degree: u32) -> Result<CompletenessReport, CensusError> {
    let table = census(max_degree, &rat_int(4))?;
    let mut family: Vec<RatPoly> = Vec::new();
    for j in 1..=max_degree {
        for n in inverse_phi(2 * j as u64) {
            if n >= 3 {
                family.push(kronecker_entry(n)?.poly);
            }
        }
    }
    let mut census_only = Vec::new();
    let mut matched = 0usize;
    let mut remaining = family.clone();
    for e in &table.entries {
        if let Some(pos) = remaining.iter().position(|q| q == &e.poly) {
            remaining.remove(pos);
            matched += 1;
        } else {
            census_only.push(e.poly.clone());
        }
    }
    Ok(CompletenessReport { max_degree, matched, census_only, kronecker_only: remaining })
}

/// Element counts of census(max_degree, t) across a list of thresholds.
#[derive(Clone, Debug)]
pub struct JrProfile {
    pub max_degree: u32,
    pub rows: Vec<(Rat, u64)>,
}

impl JrProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,element_count\n");
        for (t, c) in &self.rows {
            s.push_str(&format!("{t},{c}\n"));
        }
        s
    }
}

pub fn jr_profile(max_degree: u32, ts: &[Rat]) -> Result<JrProfile, CensusError> {
    let mut rows = Vec::with_capacity(ts.len());
    for t in ts {
        rows.push((t.clone(), census(max_degree, t)?.element_count()));
    }
    Ok(JrProfile { max_degree, rows })
}
