//! Search for antisymmetric units in cyclotomic fields.
//!
//! The quarry: a unit u of Z[zeta_n] with u congruent to 1 modulo 2 and
//! conj(u) = -u, where conj is complex conjugation. Candidates are drawn
//! from one of two classical families indexed by exponent vectors over the
//! residues b coprime to n:
//!
//! * [`UnitFamily::Ratios`]: products of (1 - zeta^b)/(1 - zeta),
//! * [`UnitFamily::Cyclotomic`]: products of 1 - zeta^b directly,
//!
//! each times a power of zeta and an overall sign. The sign never matters:
//! both conditions are preserved under negation, so the search fixes +1.
//! Residues b not coprime to n are excluded; 1 - zeta^b then has norm
//! larger than 1 and no single factor of that shape is a unit.
//!
//! The search walks exponent vectors depth first and carries two cheap
//! images of the running product: its values at the primitive n-th roots
//! of unity in a prime field F_p with p = 1 (mod n), and its image in
//! F_2[x]/(Phi_n). The first yields a necessary condition for
//! conj(u) = -u; the second decides membership in R_2 = {u : u = 1 mod 2}
//! exactly, because Z[zeta_n] is the full ring of integers of the field.
//! Each survivor is rebuilt in the square-root tower and re-verified with
//! exact arithmetic before it is reported, so a returned unit is correct
//! even if a screen were too permissive. Scan order is deterministic, so
//! the first reported unit is a stable function of the inputs.

use thiserror::Error;

use crate::constructions::{Checker, VerifyReport};
use crate::cyclo::{CycloError, CyclotomicField};
use crate::cyclotomic::cyclotomic;
use crate::integrality::{is_unit, r_m_membership};
use crate::tower::{AlgNum, TowerError};
use num_integer::Integer;

/// Which family of candidate units to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitFamily {
    /// (1 - zeta^b)/(1 - zeta) for b coprime to n, b != 1.
    Ratios,
    /// 1 - zeta^b for b coprime to n (units exactly when n has two
    /// distinct prime factors).
    Cyclotomic,
}

/// A found unit together with the exponent data that produced it.
#[derive(Clone, Debug)]
pub struct AntisymmetricUnit {
    /// The unit, as an element of the field's tower.
    pub unit: AlgNum,
    /// Power of zeta in front of the product.
    pub zeta_exp: u64,
    /// (b, exponent) pairs for the factors of the family.
    pub exponents: Vec<(u64, i64)>,
}

/// Search result plus counters describing how hard the search worked.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub found: Option<AntisymmetricUnit>,
    /// Exponent vectors enumerated.
    pub vectors_scanned: u64,
    /// Candidates that passed both modular screens and were rebuilt and
    /// checked exactly.
    pub survivors_checked: u64,
}

#[derive(Debug, Error)]
pub enum UnitSearchError {
    #[error("order {0} is not supported by this search")]
    UnsupportedOrder(u64),
    #[error("field construction failed: {0}")]
    Cyclo(#[from] CycloError),
    #[error("tower arithmetic failed: {0}")]
    Tower(#[from] TowerError),
}

/// Verifies with exact arithmetic that u is a unit, lies in R_2 with
/// residue 1, and is negated by complex conjugation.
pub fn verify_antisymmetric_unit(field: &CyclotomicField, u: &AlgNum) -> VerifyReport {
    let mut ck = Checker::new();
    let in_tower = u.tower() == field.tower();
    ck.record(
        "u lies in the field's tower",
        in_tower,
        (!in_tower).then(|| "element belongs to a different tower".to_string()),
    );
    if !in_tower {
        ck.skip_all(
            &[
                "u is a unit",
                "u lies in R_2 with residue 1",
                "complex conjugation sends u to -u",
            ],
            "tower mismatch",
        );
        return ck.finish();
    }
    ck.clause("u is a unit", Ok::<_, CycloError>(is_unit(u).is_some()));
    ck.clause(
        "u lies in R_2 with residue 1",
        r_m_membership(u, 2).map(|w| w.is_some_and(|w| w.residue == 1)),
    );
    match field.conj(u) {
        Ok(c) => ck.clause(
            "complex conjugation sends u to -u",
            Ok::<_, CycloError>(c == -u),
        ),
        Err(e) => ck.record("complex conjugation sends u to -u", false, Some(e.to_string())),
    }
    ck.finish()
}

/// Enumerates the family with exponents |e_b| <= max_exp and zeta powers
/// a < n, returning the first exactly verified antisymmetric unit of R_2,
/// or None with the scan counters when the family holds none.
pub fn search_antisymmetric_unit(
    field: &CyclotomicField,
    family: UnitFamily,
    max_exp: u32,
) -> Result<SearchOutcome, UnitSearchError> {
    let n = field.order();
    if n < 3 || n.is_multiple_of(2) {
        return Err(UnitSearchError::UnsupportedOrder(n));
    }
    let phi2 = Phi2::new(n).ok_or(UnitSearchError::UnsupportedOrder(n))?;
    let screen = RootScreen::new(n).ok_or(UnitSearchError::UnsupportedOrder(n))?;

    let bs: Vec<u64> = (1..n)
        .filter(|b| b.gcd(&n) == 1 && !(family == UnitFamily::Ratios && *b == 1))
        .collect();
    let ftabs: Vec<FactorTables> = bs
        .iter()
        .map(|&b| FactorTables::new(b, family, max_exp, &screen, &phi2))
        .collect();

    let mut dfs = Dfs {
        field,
        family,
        screen: &screen,
        phi2: &phi2,
        bs: &bs,
        ftabs: &ftabs,
        max_exp,
        vectors_scanned: 0,
        survivors_checked: 0,
        exps: vec![0i64; bs.len()],
    };
    let start_roots = vec![1u64; screen.roots.len()];
    let found = dfs.descend(0, &start_roots, phi2.one())?;
    Ok(SearchOutcome {
        found,
        vectors_scanned: dfs.vectors_scanned,
        survivors_checked: dfs.survivors_checked,
    })
}

struct Dfs<'a> {
    field: &'a CyclotomicField,
    family: UnitFamily,
    screen: &'a RootScreen,
    phi2: &'a Phi2,
    bs: &'a [u64],
    ftabs: &'a [FactorTables],
    max_exp: u32,
    vectors_scanned: u64,
    survivors_checked: u64,
    exps: Vec<i64>,
}

impl Dfs<'_> {
    fn descend(
        &mut self,
        depth: usize,
        rootvals: &[u64],
        poly2: u128,
    ) -> Result<Option<AntisymmetricUnit>, UnitSearchError> {
        if depth == self.bs.len() {
            self.vectors_scanned += 1;
            return self.leaf(rootvals, poly2);
        }
        let m = self.max_exp as i64;
        for e in -m..=m {
            let tab = &self.ftabs[depth];
            let mut next = rootvals.to_vec();
            for (t, v) in next.iter_mut().enumerate() {
                *v = self.screen.mulmod(*v, tab.root_pow(t, e));
            }
            let next2 = self.phi2.mulmod(poly2, tab.poly_pow(e));
            self.exps[depth] = e;
            if let Some(hit) = self.descend(depth + 1, &next, next2)? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }

    /// Full exponent vector chosen: decide the zeta power from the exact
    /// mod-2 image, screen antisymmetry mod p, then verify exactly.
    fn leaf(
        &mut self,
        rootvals: &[u64],
        poly2: u128,
    ) -> Result<Option<AntisymmetricUnit>, UnitSearchError> {
        let n = self.field.order();
        // zeta^a * P = 1 (mod 2) pins a uniquely: x has exact order n in
        // F_2[x]/(Phi_n), so its powers are pairwise distinct.
        let Some(a) = (0..n).find(|a| poly2 == self.phi2.xpow((n - a) % n)) else {
            return Ok(None);
        };
        if !self.screen.antisymmetric(rootvals, a) {
            return Ok(None);
        }
        self.survivors_checked += 1;

        let exponents: Vec<(u64, i64)> =
            self.bs.iter().copied().zip(self.exps.iter().copied()).collect();
        let unit = self.realize(a, &exponents)?;
        let report = verify_antisymmetric_unit(self.field, &unit);
        if report.passed() {
            Ok(Some(AntisymmetricUnit { unit, zeta_exp: a, exponents }))
        } else {
            // A screen was too permissive for this candidate; keep going.
            Ok(None)
        }
    }

    /// Rebuilds the candidate exactly in the tower.
    fn realize(&self, a: u64, exponents: &[(u64, i64)]) -> Result<AlgNum, UnitSearchError> {
        let tower = self.field.tower();
        let one = AlgNum::one(tower);
        let base = &one - &self.field.zeta_pow(1);
        let mut u = self.field.zeta_pow(a as i64);
        for &(b, e) in exponents {
            if e == 0 {
                continue;
            }
            let mut f = &one - &self.field.zeta_pow(b as i64);
            if self.family == UnitFamily::Ratios {
                f = f.div(&base)?;
            }
            u = &u * &f.pow_i64(e)?;
        }
        Ok(u)
    }
}

/// Values at the primitive n-th roots of unity in F_p, p = 1 (mod n).
struct RootScreen {
    p: u64,
    /// Residues j coprime to n, ascending; root t is g^{j_t}.
    js: Vec<u64>,
    roots: Vec<u64>,
    /// Index of the root for -j_t, i.e. the complex-conjugate embedding.
    conj_index: Vec<usize>,
    /// rpow[t][a] = roots[t]^a.
    rpow: Vec<Vec<u64>>,
}

impl RootScreen {
    fn new(n: u64) -> Option<RootScreen> {
        let p = (1..).map(|k| k * n + 1).find(|&c| is_prime_u64(c))?;
        let g = element_of_order(p, n)?;
        let js: Vec<u64> = (1..n).filter(|j| j.gcd(&n) == 1).collect();
        let roots: Vec<u64> = js.iter().map(|&j| pow_mod(g, j, p)).collect();
        let conj_index = js
            .iter()
            .map(|&j| js.iter().position(|&k| k == n - j).expect("closed under negation"))
            .collect();
        let rpow = roots
            .iter()
            .map(|&r| {
                let mut row = Vec::with_capacity(n as usize);
                let mut acc = 1u64;
                for _ in 0..n {
                    row.push(acc);
                    acc = mul_mod(acc, r, p);
                }
                row
            })
            .collect();
        Some(RootScreen { p, js, roots, conj_index, rpow })
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    /// Necessary condition for conj(u) = -u: at every primitive root the
    /// value at the conjugate root is the negative of the value here.
    fn antisymmetric(&self, prodvals: &[u64], a: u64) -> bool {
        (0..self.js.len()).all(|t| {
            let here = mul_mod(self.rpow[t][a as usize], prodvals[t], self.p);
            let s = self.conj_index[t];
            let there = mul_mod(self.rpow[s][a as usize], prodvals[s], self.p);
            (here + there).is_multiple_of(self.p)
        })
    }
}

/// The quotient F_2[x]/(Phi_n), elements as bit masks (bit i = x^i).
struct Phi2 {
    modulus: u128,
    deg: u32,
    xpows: Vec<u128>,
}

impl Phi2 {
    fn new(n: u64) -> Option<Phi2> {
        let phi = cyclotomic(n);
        let deg = phi.degree().expect("cyclotomic polynomials are nonzero") as u32;
        if deg >= 64 {
            return None;
        }
        let mut modulus: u128 = 0;
        for i in 0..=deg {
            if phi.coeff(i as usize).numer().is_odd() {
                modulus |= 1 << i;
            }
        }
        let mut p2 = Phi2 { modulus, deg, xpows: Vec::new() };
        let mut xpows = Vec::with_capacity(n as usize);
        let mut acc = 1u128;
        for _ in 0..n {
            xpows.push(acc);
            acc = p2.mulmod(acc, 0b10); // multiply by x
        }
        p2.xpows = xpows;
        Some(p2)
    }

    fn one(&self) -> u128 {
        1
    }

    fn xpow(&self, k: u64) -> u128 {
        self.xpows[k as usize]
    }

    fn reduce(&self, mut a: u128) -> u128 {
        let d = self.deg;
        while a >> d != 0 {
            let top = 127 - a.leading_zeros();
            a ^= self.modulus << (top - d);
        }
        a
    }

    fn mulmod(&self, a: u128, b: u128) -> u128 {
        self.reduce(p2_mulraw(a, b))
    }

    fn powmod(&self, base: u128, k: u32) -> u128 {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mulmod(acc, base);
        }
        acc
    }

    /// Inverse by extended Euclid; the input must be coprime to Phi_n,
    /// which holds for every factor here since its norm is odd.
    fn inv(&self, a: u128) -> Option<u128> {
        let (mut r0, mut r1) = (self.modulus, self.reduce(a));
        let (mut s0, mut s1) = (0u128, 1u128);
        while r1 != 0 {
            let (q, r) = p2_divmod(r0, r1);
            r0 = r1;
            r1 = r;
            let t = s0 ^ p2_mulraw(q, s1);
            s0 = s1;
            s1 = t;
        }
        (r0 == 1).then(|| self.reduce(s0))
    }
}

/// Carryless product of bit-mask polynomials, no reduction.
fn p2_mulraw(a: u128, mut b: u128) -> u128 {
    let mut acc = 0u128;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

/// Carryless division of bit-mask polynomials.
fn p2_divmod(a: u128, b: u128) -> (u128, u128) {
    debug_assert!(b != 0);
    let db = 127 - b.leading_zeros();
    let mut rem = a;
    let mut quo = 0u128;
    while rem != 0 {
        let dr = 127 - rem.leading_zeros();
        if dr < db {
            break;
        }
        quo |= 1 << (dr - db);
        rem ^= b << (dr - db);
    }
    (quo, rem)
}

/// Per-factor power tables, indexed by e from -max_exp to max_exp.
struct FactorTables {
    offset: i64,
    /// roots[t][e + offset] = factor(root_t)^e mod p.
    roots: Vec<Vec<u64>>,
    /// polys[e + offset] = factor^e in F_2[x]/(Phi_n).
    polys: Vec<u128>,
}

impl FactorTables {
    fn new(b: u64, family: UnitFamily, max_exp: u32, screen: &RootScreen, phi2: &Phi2) -> FactorTables {
        let p = screen.p;
        let n = phi2.xpows.len() as u64;
        // Base images of the factor. At a primitive root r the value
        // 1 - r^b is nonzero because b and the root's index are both
        // coprime to n.
        let base_root: Vec<u64> = screen
            .roots
            .iter()
            .map(|&r| {
                let mut v = (1 + p - pow_mod(r, b, p)) % p;
                if family == UnitFamily::Ratios {
                    let denom = (1 + p - r) % p;
                    v = mul_mod(v, pow_mod(denom, p - 2, p), p);
                }
                v
            })
            .collect();
        let base_poly = {
            let mut v = phi2.reduce(1 ^ phi2.xpow(b % n));
            if family == UnitFamily::Ratios {
                let denom = phi2.reduce(1 ^ phi2.xpow(1));
                v = phi2.mulmod(v, phi2.inv(denom).expect("odd-norm factor"));
            }
            v
        };

        let m = max_exp as i64;
        let count = (2 * m + 1) as usize;
        let mut roots = Vec::with_capacity(base_root.len());
        for &bv in &base_root {
            let inv = pow_mod(bv, p - 2, p);
            let mut row = Vec::with_capacity(count);
            for e in -m..=m {
                let (base, k) = if e >= 0 { (bv, e as u64) } else { (inv, (-e) as u64) };
                row.push(pow_mod(base, k, p));
            }
            roots.push(row);
        }
        let pinv = phi2.inv(base_poly).expect("odd-norm factor");
        let mut polys = Vec::with_capacity(count);
        for e in -m..=m {
            let (base, k) = if e >= 0 { (base_poly, e as u32) } else { (pinv, (-e) as u32) };
            polys.push(phi2.powmod(base, k));
        }
        FactorTables { offset: m, roots, polys }
    }

    fn root_pow(&self, t: usize, e: i64) -> u64 {
        self.roots[t][(e + self.offset) as usize]
    }

    fn poly_pow(&self, e: i64) -> u128 {
        self.polys[(e + self.offset) as usize]
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest h with h^((p-1)/n) of order exactly n in F_p^*.
fn element_of_order(p: u64, n: u64) -> Option<u64> {
    let mut prime_divs = Vec::new();
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            prime_divs.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        prime_divs.push(m);
    }
    let cof = (p - 1) / n;
    (2..p).find_map(|h| {
        let g = pow_mod(h, cof, p);
        if g != 1 && prime_divs.iter().all(|&q| pow_mod(g, n / q, p) != 1) {
            Some(g)
        } else {
            None
        }
    })
}
