//! Shared property pool for the integration suites.
//!
//! Each `pub fn` checks one documented invariant and panics on violation.
//! Randomized cases draw from fixed-seed ChaCha streams, one stream per
//! property, so results do not depend on execution order and failures
//! reproduce exactly. The two test targets decide how to group, time,
//! and report these checks.

// Each test target uses its own subset of the pool.
#![allow(dead_code)]

pub mod oracle;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::{Duration, Instant};
use trcert_core::*;

const SEED: u64 = 0x5EED_CA5C_ADE5;

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn q() -> Arc<Tower> {
    Tower::rational()
}

/// Q(sqrt r1, sqrt r2, ...) for pairwise-coprime squarefree radicands.
pub fn multi_quadratic(radicands: &[i64]) -> Arc<Tower> {
    let mut t = q();
    for &r in radicands {
        t = Tower::adjoin_sqrt(&AlgNum::from_int(&t, r)).unwrap();
    }
    t
}

/// The real field Q(2 cos(2 pi / n)) as a base number field.
fn cos_field(n: u64) -> Arc<Tower> {
    Tower::number_field(real_subfield_poly(n)).unwrap()
}

/// Uniform element with integer coordinates in [-h, h].
fn rand_elem(rng: &mut ChaCha8Rng, tower: &Arc<Tower>, h: i64) -> AlgNum {
    let coords: Vec<Rat> = (0..tower.degree()).map(|_| rint(rng.gen_range(-h..=h))).collect();
    AlgNum::from_coeff_vector(tower, &coords)
}

fn rand_nonzero(rng: &mut ChaCha8Rng, tower: &Arc<Tower>, h: i64) -> AlgNum {
    loop {
        let x = rand_elem(rng, tower, h);
        if !x.is_zero() {
            return x;
        }
    }
}

fn rand_poly(rng: &mut ChaCha8Rng, max_deg: usize, h: i64) -> RatPoly {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let coeffs: Vec<Rat> = (0..=deg).map(|_| rint(rng.gen_range(-h..=h))).collect();
        let p = RatPoly::new(coeffs);
        if !p.is_zero() {
            return p;
        }
    }
}

/// p evaluated at a tower element, by Horner's rule.
fn eval_at(p: &RatPoly, x: &AlgNum) -> AlgNum {
    let tower = x.tower();
    let mut acc = AlgNum::zero(tower);
    let Some(deg) = p.degree() else {
        return acc;
    };
    for k in (0..=deg).rev() {
        acc = &(&acc * x) + &AlgNum::from_rat(tower, p.coeff(k));
    }
    acc
}

/// Shrinks an isolating interval of p to width 2^-bits by bisection.
fn refine_root(p: &RatPoly, mut lo: Rat, mut hi: Rat, bits: u32) -> Rat {
    let chain = SturmChain::new(p).unwrap();
    let width = Rat::new(BigInt::from(1), BigInt::from(2).pow(bits));
    while &hi - &lo > width {
        let mid = (&lo + &hi) / rint(2);
        if chain.count_half_open(&lo, &mid).unwrap() >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (&lo + &hi) / rint(2)
}

// ---------------------------------------------------------------------
// Exact kernel: polynomials, resultants, Sturm chains, cyclotomics.
// ---------------------------------------------------------------------

/// resultant(p, q) = 0 exactly when gcd(p, q) is nonconstant.
pub fn resultant_matches_gcd() {
    let mut rng = rng(1);
    for round in 0..80 {
        // Half the rounds plant a shared factor to exercise both sides.
        let (p, q) = if round % 2 == 0 {
            (rand_poly(&mut rng, 6, 8), rand_poly(&mut rng, 6, 8))
        } else {
            let f = rand_poly(&mut rng, 2, 5);
            (f.mul(&rand_poly(&mut rng, 3, 5)), f.mul(&rand_poly(&mut rng, 3, 5)))
        };
        if p.is_constant() && q.is_constant() {
            continue;
        }
        let res = p.resultant(&q).unwrap();
        let shared = p.gcd(&q).degree().unwrap() >= 1;
        assert_eq!(res.is_zero(), shared, "resultant/gcd disagree for {p} and {q}");
    }
}

/// Root counts over (lo, hi] split additively at any interior point.
pub fn sturm_counts_add_across_split() {
    let mut rng = rng(2);
    for _ in 0..60 {
        let p = rand_poly(&mut rng, 6, 8).squarefree_part().unwrap();
        if p.is_constant() {
            continue;
        }
        let mut ends: Vec<i64> = (0..3).map(|_| rng.gen_range(-20..=20)).collect();
        ends.sort_unstable();
        ends.dedup();
        if ends.len() < 3 {
            continue;
        }
        let (lo, mid, hi) = (
            Rat::new(ends[0].into(), 2.into()),
            Rat::new(ends[1].into(), 2.into()),
            Rat::new(ends[2].into(), 2.into()),
        );
        let whole = sturm_count(&p, &lo, &hi).unwrap();
        let left = sturm_count(&p, &lo, &mid).unwrap();
        let right = sturm_count(&p, &mid, &hi).unwrap();
        assert_eq!(whole, left + right, "split count mismatch for {p}");
    }
}

/// Real-root counts never exceed the degree, and hit it exactly for
/// products of distinct linear factors.
pub fn real_root_count_bounded_by_degree() {
    let mut rng = rng(3);
    for _ in 0..60 {
        let p = rand_poly(&mut rng, 6, 8).squarefree_part().unwrap();
        if p.is_constant() {
            continue;
        }
        assert!(count_real_roots(&p).unwrap() <= p.degree().unwrap());
    }
    for _ in 0..20 {
        let mut roots: Vec<i64> = (0..5).map(|_| rng.gen_range(-10..=10)).collect();
        roots.sort_unstable();
        roots.dedup();
        let mut p = RatPoly::from_int_coeffs(&[1]);
        for r in &roots {
            p = p.mul(&RatPoly::from_int_coeffs(&[-r, 1]));
        }
        assert_eq!(count_real_roots(&p).unwrap(), roots.len());
    }
}

/// Degrees of the cyclotomic factors of x^n - 1 sum to n, and the n-th
/// factor divides x^n - 1 exactly.
pub fn cyclotomic_degrees_sum_and_divide() {
    for n in 1..=100u64 {
        let total: u64 = divisors(n).iter().map(|d| euler_phi(*d)).sum();
        assert_eq!(total, n);
        let phi_n = cyclotomic(n);
        assert_eq!(phi_n.degree().unwrap() as u64, euler_phi(n));
        let mut xn = vec![0i64; n as usize + 1];
        xn[0] = -1;
        xn[n as usize] = 1;
        let (_, rem) = RatPoly::from_int_coeffs(&xn).div_rem(&phi_n).unwrap();
        assert!(rem.is_zero(), "cyclotomic factor of order {n} does not divide x^n - 1");
    }
}

// ---------------------------------------------------------------------
// Tower arithmetic, minimal polynomials, embeddings.
// ---------------------------------------------------------------------

fn axiom_towers() -> Vec<Arc<Tower>> {
    vec![
        q(),
        multi_quadratic(&[2]),
        multi_quadratic(&[2, 3]),
        multi_quadratic(&[2, 3, 5]),
        cos_field(5),
        Tower::adjoin_sqrt(&AlgNum::from_int(&cos_field(5), 2)).unwrap(),
        cos_field(7),
    ]
}

/// Field axioms on random elements: associativity, distributivity,
/// identities, inverses, and division as multiplication by the inverse.
pub fn field_axioms_hold() {
    let mut rng = rng(4);
    for tower in axiom_towers() {
        for _ in 0..8 {
            let a = rand_elem(&mut rng, &tower, 6);
            let b = rand_elem(&mut rng, &tower, 6);
            let c = rand_elem(&mut rng, &tower, 6);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert_eq!(&a + &(-&a), AlgNum::zero(&tower));
            assert_eq!(&a * &AlgNum::one(&tower), a);
            let x = rand_nonzero(&mut rng, &tower, 6);
            assert_eq!(&x * &x.inv().unwrap(), AlgNum::one(&tower));
            assert_eq!(&a.div(&x).unwrap() * &x, a);
        }
    }
}

/// The minimal polynomial annihilates its element, has degree dividing
/// the tower degree, and is unchanged by lifting to a taller tower.
pub fn min_poly_annihilates_and_divides_degree() {
    let mut rng = rng(5);
    let deep = multi_quadratic(&[2, 3, 5]);
    for tower in [q(), multi_quadratic(&[2]), multi_quadratic(&[2, 3]), cos_field(5)] {
        for _ in 0..6 {
            let x = rand_elem(&mut rng, &tower, 6);
            let m = x.min_poly();
            assert!(eval_at(&m, &x).is_zero(), "min poly fails to annihilate");
            assert!(tower.degree().is_multiple_of(m.degree().unwrap()));
        }
    }
    for _ in 0..6 {
        let x = rand_elem(&mut rng, &multi_quadratic(&[2]), 6);
        let lifted = x.lift_to(&deep).unwrap();
        assert_eq!(lifted.min_poly(), x.min_poly());
    }
}

/// Complex conjugation permutes the conjugates, so it preserves minimal
/// polynomials on towers whose top step is imaginary.
pub fn min_poly_stable_under_conjugation() {
    let mut rng = rng(6);
    for n in [4, 5, 15] {
        let f = cyclotomic_cm_field(n).unwrap();
        for _ in 0..5 {
            let x = rand_elem(&mut rng, f.tower(), 4);
            let c = f.conj(&x).unwrap();
            assert_eq!(c.min_poly(), x.min_poly());
        }
    }
    let gauss = Tower::adjoin_sqrt(&AlgNum::from_int(&multi_quadratic(&[2]), -1)).unwrap();
    for _ in 0..5 {
        let x = rand_elem(&mut rng, &gauss, 4);
        assert_eq!(x.conj_top().min_poly(), x.min_poly());
    }
}

/// r + 2s equals the degree everywhere; a totally positive radicand
/// doubles the real count, a totally negative radicand over a totally
/// real tower leaves none.
pub fn signature_accounts_for_degree() {
    let cases: Vec<(Arc<Tower>, usize, usize)> = vec![
        (q(), 1, 0),
        (multi_quadratic(&[2]), 2, 0),
        (multi_quadratic(&[2, 3]), 4, 0),
        (cos_field(5), 2, 0),
        (Tower::adjoin_sqrt(&AlgNum::from_int(&q(), -7)).unwrap(), 0, 1),
        (Tower::adjoin_sqrt(&AlgNum::from_int(&multi_quadratic(&[2]), -1)).unwrap(), 0, 2),
        (Tower::adjoin_sqrt(&AlgNum::from_int(&cos_field(5), -1)).unwrap(), 0, 2),
    ];
    for (tower, real, pairs) in cases {
        let sig = signature(&tower).unwrap();
        assert_eq!((sig.real, sig.complex_pairs), (real, pairs), "tower {tower:?}");
        assert_eq!(sig.real + 2 * sig.complex_pairs, tower.degree());
    }
    // Doubling: sqrt of a totally positive element doubles r.
    let base = multi_quadratic(&[2]);
    let tp = &(&AlgNum::sqrt_gen(&base, 0) + &AlgNum::from_int(&base, 2))
        * &(&AlgNum::sqrt_gen(&base, 0) + &AlgNum::from_int(&base, 2));
    let doubled = Tower::adjoin_sqrt(&tp).unwrap();
    assert_eq!(signature(&doubled).unwrap().real, 2 * signature(&base).unwrap().real);
}

/// Top-step conjugation is an involutive ring homomorphism fixing the
/// subtower.
pub fn conjugation_is_involutive_ring_map() {
    let mut rng = rng(7);
    for tower in [
        multi_quadratic(&[2, 3]),
        Tower::adjoin_sqrt(&AlgNum::from_int(&multi_quadratic(&[2]), -1)).unwrap(),
        cyclotomic_cm_field(5).unwrap().tower().clone(),
    ] {
        for _ in 0..6 {
            let a = rand_elem(&mut rng, &tower, 5);
            let b = rand_elem(&mut rng, &tower, 5);
            assert_eq!(a.conj_top().conj_top(), a);
            assert_eq!((&a + &b).conj_top(), &a.conj_top() + &b.conj_top());
            assert_eq!((&a * &b).conj_top(), &a.conj_top() * &b.conj_top());
        }
        let sub = tower.subtower(tower.num_steps() - 1);
        let fixed = rand_elem(&mut rng, &sub, 5).lift_to(&tower).unwrap();
        assert_eq!(fixed.conj_top(), fixed);
    }
}

/// On a totally real tower, the embedding boxes of x enclose exactly the
/// real roots of its minimal polynomial, each root appearing
/// degree(tower) / degree(min poly) times.
pub fn embedding_boxes_match_real_root_counts() {
    let mut rng = rng(8);
    let tol = Rat::new(BigInt::from(1), BigInt::from(2).pow(28));
    for (tower, samples) in [(multi_quadratic(&[2, 3]), 6), (cos_field(5), 4)] {
        for _ in 0..samples {
            let x = rand_elem(&mut rng, &tower, 6);
            let m = x.min_poly();
            let deg_m = m.degree().unwrap();
            assert_eq!(count_real_roots(&m).unwrap(), deg_m, "totally real element");
            let enc = embed(&x, &Rat::new(BigInt::from(1), BigInt::from(2).pow(34))).unwrap();
            assert_eq!(enc.boxes.len(), tower.degree());
            let roots: Vec<Rat> = isolate_real_roots(&m)
                .unwrap()
                .into_iter()
                .map(|(lo, hi)| refine_root(&m, lo, hi, 32))
                .collect();
            let mut counts = vec![0usize; roots.len()];
            for b in &enc.boxes {
                let EmbeddingBox::Real { lo, hi } = b else {
                    panic!("complex box on a totally real tower");
                };
                let mid = (lo + hi) / rint(2);
                let hits: Vec<usize> = roots
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| {
                        let d = &mid - *r;
                        (if d < Rat::new(0.into(), 1.into()) { -d } else { d }) < tol
                    })
                    .map(|(i, _)| i)
                    .collect();
                assert_eq!(hits.len(), 1, "box matches exactly one root");
                counts[hits[0]] += 1;
            }
            let mult = tower.degree() / deg_m;
            assert!(counts.iter().all(|c| *c == mult), "uneven multiplicities {counts:?}");
        }
    }
}

// ---------------------------------------------------------------------
// Integral elements with rational residues.
// ---------------------------------------------------------------------

/// Elements congruent to a rational integer modulo m form a subring:
/// residues add and multiply mod m, and m-multiples of integers sit at
/// residue zero.
pub fn residue_arithmetic_follows_ring_ops() {
    let mut rng = rng(9);
    for tower in [multi_quadratic(&[2, 3]), cos_field(5)] {
        for m in [2u64, 3, 5] {
            for _ in 0..6 {
                let g1 = rand_elem(&mut rng, &tower, 4);
                let g2 = rand_elem(&mut rng, &tower, 4);
                let j1 = rng.gen_range(0..m);
                let j2 = rng.gen_range(0..m);
                let a = &g1.mul_rat(&rint(m as i64)) + &AlgNum::from_int(&tower, j1 as i64);
                let b = &g2.mul_rat(&rint(m as i64)) + &AlgNum::from_int(&tower, j2 as i64);
                let wa = r_m_membership(&a, m).unwrap().expect("constructed member");
                let wb = r_m_membership(&b, m).unwrap().expect("constructed member");
                assert_eq!((wa.residue, wb.residue), (j1, j2));
                let ws = r_m_membership(&(&a + &b), m).unwrap().expect("sum stays inside");
                assert_eq!(ws.residue, (j1 + j2) % m);
                let wp = r_m_membership(&(&a * &b), m).unwrap().expect("product stays inside");
                assert_eq!(wp.residue, (j1 * j2) % m);
                let w0 = r_m_membership(&g1.mul_rat(&rint(m as i64)), m).unwrap().unwrap();
                assert_eq!(w0.residue, 0);
            }
        }
    }
}

/// Unit evidence is exact: the reported inverse multiplies back to one,
/// is itself integral, and inherits residue membership with the inverse
/// residue.
pub fn unit_evidence_inverts_exactly() {
    let s2 = multi_quadratic(&[2]);
    let root2 = AlgNum::sqrt_gen(&s2, 0);
    let golden_field = cos_field(5);
    let units = vec![
        AlgNum::from_int(&q(), 1),
        AlgNum::from_int(&q(), -1),
        &AlgNum::from_int(&s2, 1) + &root2,
        &AlgNum::from_int(&s2, 3) + &root2.mul_rat(&rint(2)),
        &AlgNum::from_int(&s2, 17) + &root2.mul_rat(&rint(12)),
        AlgNum::base_gen(&golden_field),
    ];
    for u in &units {
        let ev = is_unit(u).expect("sample is a unit");
        assert_eq!(&(u * &ev.inverse), &AlgNum::one(u.tower()));
        assert!(is_algebraic_integer(&ev.inverse));
        assert_eq!(ev.min_poly, u.min_poly());
        for m in [2u64, 3, 5] {
            if let Some(w) = r_m_membership(u, m).unwrap() {
                let wi = r_m_membership(&ev.inverse, m)
                    .unwrap()
                    .expect("inverse of a residue-integer unit is one too");
                assert_eq!((w.residue * wi.residue) % m, 1 % m, "residues multiply to 1");
            }
        }
    }
    assert!(is_unit(&AlgNum::from_int(&q(), 2)).is_none());
    assert!(is_unit(&root2).is_none());
}

/// Sampled units congruent to 1 mod 2 on an imaginary tower commute with
/// conjugation up to sign.
pub fn level_two_unit_conjugates_differ_by_sign() {
    let f = cyclotomic_cm_field(15).unwrap();
    let found = search_antisymmetric_unit(&f, UnitFamily::Cyclotomic, 2)
        .unwrap()
        .found
        .expect("antisymmetric unit exists at order 15");
    let u = found.unit;
    let mut samples = vec![u.clone(), -&u, u.inv().unwrap(), &u * &u, &(&u * &u) * &u];
    samples.push(&u.inv().unwrap() * &(&u * &u));
    for v in &samples {
        let w = r_m_membership(v, 2).unwrap().expect("sample lies at level 2");
        assert_eq!(w.residue, 1);
        assert!(is_unit(v).is_some());
        let c = f.conj(v).unwrap();
        assert!(c == *v || c == -v, "conjugate is the unit itself up to sign");
    }
}

/// Squares of level-2 units are fixed by conjugation (hence totally
/// real); at level m >= 3 the sampled units are totally real themselves.
pub fn unit_squares_and_higher_levels_totally_real() {
    let f = cyclotomic_cm_field(15).unwrap();
    let u = search_antisymmetric_unit(&f, UnitFamily::Cyclotomic, 2)
        .unwrap()
        .found
        .expect("antisymmetric unit exists at order 15")
        .unit;
    let usq = &u * &u;
    assert_eq!(f.conj(&usq).unwrap(), usq);
    assert!(is_totally_real(&usq).unwrap());
    assert!(!is_totally_real(&u).unwrap(), "the unit itself is imaginary");

    // Level 3 and level 5 members of the fundamental-unit powers in
    // Q(sqrt 2), checked both in the real field and after adjoining i.
    let s2 = multi_quadratic(&[2]);
    let root2 = AlgNum::sqrt_gen(&s2, 0);
    let cm = Tower::adjoin_sqrt(&AlgNum::from_int(&s2, -1)).unwrap();
    let cases = [
        (&AlgNum::from_int(&s2, 17) + &root2.mul_rat(&rint(12)), 3u64, 2u64),
        (&AlgNum::from_int(&s2, 577) + &root2.mul_rat(&rint(408)), 3, 1),
        (&AlgNum::from_int(&s2, 99) + &root2.mul_rat(&rint(70)), 5, 4),
    ];
    for (u, m, j) in cases {
        assert!(is_unit(&u).is_some());
        let w = r_m_membership(&u, m).unwrap().expect("constructed member");
        assert_eq!(w.residue, j);
        assert!(is_totally_real(&u).unwrap());
        let lifted = u.lift_to(&cm).unwrap();
        assert!(is_totally_real(&lifted).unwrap());
        assert_eq!(lifted.conj_top(), lifted);
    }
}

// ---------------------------------------------------------------------
// Total positivity and interval location.
// ---------------------------------------------------------------------

/// Interval membership is translation-equivariant.
pub fn interval_membership_translates() {
    let mut rng = rng(10);
    for tower in [multi_quadratic(&[2]), multi_quadratic(&[2, 3]), cos_field(5)] {
        for _ in 0..10 {
            let x = rand_elem(&mut rng, &tower, 5);
            if !is_totally_real(&x).unwrap() {
                continue;
            }
            let c = rng.gen_range(-4i64..=4);
            let t = rng.gen_range(1i64..=6);
            let inside = totally_in(&x, &IntervalSpec::open(rint(0), rint(t))).unwrap();
            let shifted = &x + &AlgNum::from_int(&tower, c);
            let inside2 =
                totally_in(&shifted, &IntervalSpec::open(rint(c), rint(t + c))).unwrap();
            assert_eq!(inside, inside2);
        }
    }
}

/// Nonzero elements of (-B, B) square into (0, B^2).
pub fn squares_land_in_squared_intervals() {
    let mut rng = rng(11);
    let b = 6i64;
    for tower in [multi_quadratic(&[2]), multi_quadratic(&[2, 3])] {
        for _ in 0..12 {
            let x = rand_nonzero(&mut rng, &tower, 3);
            if !totally_in(&x, &IntervalSpec::open(rint(-b), rint(b))).unwrap() {
                continue;
            }
            let sq = &x * &x;
            assert!(totally_in(&sq, &IntervalSpec::open(rint(0), rint(b * b))).unwrap());
        }
    }
}

/// Radicand nonnegativity window: x(x+1) is negative exactly on (-1, 0)
/// and x(x-1) exactly on (0, 1), so for d with every conjugate outside
/// (-1, 1) both d^2 + d and (d-1)^2 + (d-1) are totally nonnegative.
/// The first radicand alone already tolerates the wider window avoiding
/// only (-1, 0).
pub fn radicand_windows_are_exact() {
    let mut rng = rng(12);
    let towers = [q(), multi_quadratic(&[2]), multi_quadratic(&[2, 3]), cos_field(5)];
    let gap = IntervalSpec::open(rint(-1), rint(1));
    let mut checked = 0;
    while checked < 200 {
        let tower = &towers[rng.gen_range(0..towers.len())];
        let g = rand_elem(&mut rng, tower, 3);
        let d = match checked % 3 {
            0 => &(&g * &g) + &AlgNum::from_int(tower, 1),
            1 => -&(&(&g * &g) + &AlgNum::from_int(tower, 1)),
            _ => {
                let c = rand_elem(&mut rng, tower, 6);
                if !totally_avoids(&c, &gap).unwrap() {
                    continue;
                }
                c
            }
        };
        let first = &(&d * &d) + &d;
        let shifted = &d - &AlgNum::one(d.tower());
        let second = &(&shifted * &shifted) + &shifted;
        assert!(is_totally_nonnegative(&first).unwrap(), "d(d+1) with d outside (-1,1)");
        assert!(is_totally_nonnegative(&second).unwrap(), "d(d-1) with d outside (-1,1)");
        checked += 1;
    }
    // First radicand only: conjugates in [0, 1) are fine for d(d+1).
    let phi_minus = cos_field(5);
    let g = AlgNum::base_gen(&phi_minus); // conjugates (3 +- sqrt5)/2
    let d = &g - &AlgNum::from_int(&phi_minus, 1); // conjugates (1 +- sqrt5)/2
    let d = &d * &d; // conjugates 0.38..., 2.61... -- inside (0, 1) occurs
    assert!(totally_avoids(&d, &IntervalSpec::open(rint(-1), rint(0))).unwrap());
    let first = &(&d * &d) + &d;
    assert!(is_totally_nonnegative(&first).unwrap());
    // ... while d(d-1) genuinely fails there: the window matters.
    let shifted = &d - &AlgNum::one(&phi_minus);
    let second = &(&shifted * &shifted) + &shifted;
    assert!(!is_totally_nonnegative(&second).unwrap());
}

/// Interval predicates decide exactly: nudging the endpoint across a
/// conjugate of 3 + 2 sqrt 2 flips the answer.
pub fn interval_tests_exact_at_conjugates() {
    let s2 = multi_quadratic(&[2]);
    let x = &AlgNum::from_int(&s2, 3) + &AlgNum::sqrt_gen(&s2, 0).mul_rat(&rint(2));
    let ten7 = BigInt::from(10_000_000i64);
    // Conjugates are 3 +- 2 sqrt 2 = 5.8284271..., 0.1715728...
    let below = Rat::new(BigInt::from(58_284_271i64), ten7.clone());
    let above = Rat::new(BigInt::from(58_284_272i64), ten7.clone());
    assert!(!totally_in(&x, &IntervalSpec::open(rint(0), below)).unwrap());
    assert!(totally_in(&x, &IntervalSpec::open(rint(0), above)).unwrap());
    let under = Rat::new(BigInt::from(1_715_728i64), ten7.clone());
    let over = Rat::new(BigInt::from(1_715_729i64), ten7);
    assert!(totally_in(&x, &IntervalSpec::open(under.clone(), rint(6))).unwrap());
    assert!(!totally_in(&x, &IntervalSpec::open(over.clone(), rint(6))).unwrap());
    assert!(totally_avoids(&x, &IntervalSpec::open(rint(-1), under)).unwrap());
    assert!(!totally_avoids(&x, &IntervalSpec::open(rint(-1), over)).unwrap());
}

// ---------------------------------------------------------------------
// Certificate constructions.
// ---------------------------------------------------------------------

/// Random parameter for the unit-pair builder: totally real, integral,
/// with d^2 + d totally nonnegative by construction.
fn rand_unit_pair_param(rng: &mut ChaCha8Rng, tower: &Arc<Tower>) -> AlgNum {
    loop {
        let g = rand_elem(rng, tower, 2);
        let d = match rng.gen_range(0..3) {
            0 => &g * &g,
            1 => -&(&(&g * &g) + &AlgNum::from_int(tower, 1)),
            _ => AlgNum::from_int(tower, rng.gen_range(0..=9)),
        };
        if d.height() <= 10u32.into() {
            return d;
        }
    }
}

/// Random parameter for the difference builder: conjugates avoid (-2, 0).
fn rand_sum32_param(rng: &mut ChaCha8Rng, tower: &Arc<Tower>) -> AlgNum {
    loop {
        let g = rand_elem(rng, tower, 2);
        let d = match rng.gen_range(0..3) {
            0 => &(&g * &g) + &AlgNum::from_int(tower, 2),
            1 => -&(&(&g * &g) + &AlgNum::from_int(tower, 2)),
            _ => AlgNum::from_int(tower, rng.gen_range(1..=9)),
        };
        if d.height() <= 10u32.into() {
            return d;
        }
    }
}

/// verify(build(d)) passes across 100 randomized parameters spread over
/// the three certificate kinds at tower depth up to 2.
pub fn build_verify_round_trips() {
    let mut rng = rng(13);
    let depth0 = q();
    let depth1a = multi_quadratic(&[2]);
    let depth1b = multi_quadratic(&[5]);
    let depth2 = multi_quadratic(&[2, 3]);
    let towers = [depth0.clone(), depth1a.clone(), depth1b.clone(), depth2.clone()];
    for i in 0..50 {
        let tower = &towers[i % towers.len()];
        let d = rand_unit_pair_param(&mut rng, tower);
        let cert = build_unit_pair(&d).unwrap();
        let report = verify_unit_pair(&cert);
        assert!(report.passed(), "unit pair round trip for d = {d:?}: {report}");
    }
    for i in 0..30 {
        let tower = &towers[i % towers.len()];
        let d = rand_sum32_param(&mut rng, tower);
        let cert = build_sum32(&d).unwrap();
        let report = verify_sum32(&cert);
        assert!(report.passed(), "difference round trip for d = {d:?}: {report}");
    }
    for i in 0..20 {
        let tower = match i {
            0..=13 => &depth0,
            14..=17 => &depth1a,
            _ => &depth2,
        };
        let alpha = rand_elem(&mut rng, tower, 3);
        let cert = build_x_witness(&alpha).unwrap();
        let report = verify_x_witness(&cert);
        assert!(report.passed(), "witness round trip for alpha = {alpha:?}: {report}");
    }
}

/// The mirror unit from the certificate identity agrees with field
/// inversion: two disjoint code paths to 1/u.
pub fn mirror_units_agree_with_inversion() {
    let mut rng = rng(14);
    for tower in [q(), multi_quadratic(&[2]), multi_quadratic(&[2, 3])] {
        for _ in 0..8 {
            let d = rand_unit_pair_param(&mut rng, &tower);
            let cert = build_unit_pair(&d).unwrap();
            let mirror = &cert.a - &cert.u;
            assert_eq!(&cert.u * &mirror, AlgNum::one(&cert.tower));
            assert_eq!(mirror, cert.u.inv().unwrap());
        }
    }
}

/// After adjoining sqrt(-1) above a certificate tower, unit squares are
/// fixed by the new conjugation.
pub fn unit_squares_survive_cm_lift() {
    let mut rng = rng(15);
    for tower in [q(), multi_quadratic(&[2])] {
        for _ in 0..4 {
            let d = rand_sum32_param(&mut rng, &tower);
            let cert = build_sum32(&d).unwrap();
            let cm = Tower::adjoin_sqrt(&AlgNum::from_int(&cert.tower, -1)).unwrap();
            for unit in [&cert.u, &cert.v] {
                let lifted = unit.lift_to(&cm).unwrap();
                let sq = &lifted * &lifted;
                assert_eq!(sq.conj_top(), sq);
                assert_eq!(lifted.conj_top(), lifted);
            }
        }
    }
}

fn failing_clauses(report: &VerifyReport) -> Vec<String> {
    report.clauses.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
}

/// A mutation in any single certificate field is caught by the clause
/// that checks it.
pub fn tampered_certificates_fail() {
    let mut rng = rng(16);
    let towers = [q(), multi_quadratic(&[2])];
    for round in 0..16 {
        let tower = &towers[round % towers.len()];
        let expected: &str;
        let report = match round % 8 {
            0 => {
                let d = rand_unit_pair_param(&mut rng, tower);
                let mut cert = build_unit_pair(&d).unwrap();
                cert.u = &cert.u + &AlgNum::from_int(&cert.tower, 1);
                expected = "u has shape 2(d + w) + 1 with w^2 = d^2 + d";
                verify_unit_pair(&cert)
            }
            1 => {
                let d = rand_unit_pair_param(&mut rng, tower);
                let mut cert = build_unit_pair(&d).unwrap();
                cert.a = &cert.a + &AlgNum::from_int(&cert.tower, 2);
                expected = "a equals 2(2d + 1)";
                verify_unit_pair(&cert)
            }
            2 => {
                let d = rand_unit_pair_param(&mut rng, tower);
                let mut cert = build_unit_pair(&d).unwrap();
                cert.d = &cert.d + &AlgNum::one(cert.d.tower());
                expected = "a equals 2(2d + 1)";
                verify_unit_pair(&cert)
            }
            3 => {
                let d = rand_sum32_param(&mut rng, tower);
                let mut cert = build_sum32(&d).unwrap();
                cert.d = &cert.d + &AlgNum::one(cert.d.tower());
                expected = "32d identity";
                verify_sum32(&cert)
            }
            4 => {
                // d != 0 so that swapping u and v negates the 32d value.
                let d = AlgNum::from_int(tower, (round % 5 + 2) as i64);
                let mut cert = build_sum32(&d).unwrap();
                std::mem::swap(&mut cert.u, &mut cert.v);
                expected = "32d identity";
                verify_sum32(&cert)
            }
            5 => {
                let alpha = rand_elem(&mut rng, tower, 3);
                let mut cert = build_x_witness(&alpha).unwrap();
                cert.d1 = &cert.d1 + &AlgNum::one(cert.d1.tower());
                expected = "d1 equals (alpha + 1)^2";
                verify_x_witness(&cert)
            }
            6 => {
                let alpha = rand_elem(&mut rng, tower, 3);
                let mut cert = build_x_witness(&alpha).unwrap();
                cert.alpha = &cert.alpha + &AlgNum::one(cert.alpha.tower());
                expected = "d1 equals (alpha + 1)^2";
                verify_x_witness(&cert)
            }
            _ => {
                let x = AlgNum::from_int(&q(), 2);
                let mut cert = search_four_squares(&x, 4, 1, 4).unwrap().expect("2 decomposes");
                let one = AlgNum::one(cert.x.tower());
                cert.y[1] = &cert.y[1] + &one;
                expected = "x y0^2 equals y1^2 + y2^2 + y3^2 + y4^2";
                verify_four_squares(&cert)
            }
        };
        assert!(!report.passed(), "tamper must not verify");
        assert!(
            failing_clauses(&report).iter().any(|c| c == expected),
            "expected clause {expected:?} among failures, got {:?}",
            failing_clauses(&report)
        );
    }
}

/// A passing four-squares certificate forces every conjugate of x into
/// (0, a/b).
pub fn four_squares_imply_interval_membership() {
    let q5 = multi_quadratic(&[5]);
    let golden =
        (&AlgNum::from_int(&q5, 3) + &AlgNum::sqrt_gen(&q5, 0)).mul_rat(&Rat::new(1.into(), 2.into()));
    let xs = vec![AlgNum::from_int(&q(), 2), AlgNum::from_int(&q(), 3), golden];
    for x in &xs {
        let cert = search_four_squares(x, 4, 1, 8).unwrap().expect("decomposition exists");
        assert!(verify_four_squares(&cert).passed());
        let spec = IntervalSpec::open(rint(0), Rat::new(cert.a.clone(), cert.b.clone()));
        assert!(totally_in(&cert.x, &spec).unwrap());
    }
}

// ---------------------------------------------------------------------
// Censuses.
// ---------------------------------------------------------------------

/// The trigonometric family entries are monic and integral of degree
/// phi(n)/2 with every root in (0, 4).
pub fn kronecker_entries_integral_in_range() {
    for n in 3..=60u64 {
        let e = kronecker_entry(n).unwrap();
        assert_eq!(e.degree() as u64, euler_phi(n) / 2);
        assert!(e.poly.has_integer_coeffs());
        assert_eq!(e.poly.lead().unwrap(), &rint(1));
        assert!(roots_strictly_inside(&e.poly, &rint(4)).unwrap());
    }
    // Spot-check the element form: the generator of the defining field is
    // an algebraic integer strictly inside (0, 4).
    for n in [3u64, 5, 7, 15, 16, 20] {
        let e = kronecker_entry(n).unwrap();
        let field = Tower::number_field(e.poly.clone()).unwrap();
        let kappa = AlgNum::base_gen(&field);
        assert!(is_algebraic_integer(&kappa));
        assert!(totally_in(&kappa, &IntervalSpec::open(rint(0), rint(4))).unwrap());
    }
}

fn entry_polys(table: &CensusTable) -> Vec<RatPoly> {
    table.entries.iter().map(|e| e.poly.clone()).collect()
}

fn is_subset(small: &[RatPoly], large: &[RatPoly]) -> bool {
    small.iter().all(|p| large.contains(p))
}

/// Census tables grow monotonically in both the threshold and the degree
/// bound.
pub fn census_monotone_in_threshold_and_degree() {
    let t3 = census(2, &rint(3)).unwrap();
    let t39 = census(2, &Rat::new(39.into(), 10.into())).unwrap();
    let t4 = census(2, &rint(4)).unwrap();
    let d3 = census(3, &rint(4)).unwrap();
    assert!(is_subset(&entry_polys(&t3), &entry_polys(&t39)));
    assert!(is_subset(&entry_polys(&t39), &entry_polys(&t4)));
    assert!(is_subset(&entry_polys(&t4), &entry_polys(&d3)));
    assert!(t3.element_count() <= t39.element_count());
    assert!(t39.element_count() <= t4.element_count());
}

/// Every census entry survives an independent fresh re-check of its root
/// locations.
pub fn census_entries_pass_fresh_recheck() {
    let t = rint(4);
    let table = census(3, &t).unwrap();
    assert!(!table.entries.is_empty());
    for e in &table.entries {
        assert!(e.poly.is_squarefree());
        assert!(roots_strictly_inside(&e.poly, &t).unwrap());
        assert_eq!(
            sturm_count(&e.poly, &rint(0), &t).unwrap(),
            e.degree(),
            "all roots inside for {}",
            e.poly
        );
    }
}

/// The box sweep and the trigonometric family agree at small degrees.
pub fn census_completeness_small_degrees() {
    for max_degree in 1..=3u32 {
        let report = kronecker_completeness(max_degree).unwrap();
        assert!(report.passed(), "mismatch at degree {max_degree}: {report}");
    }
}

/// The degree <= 2 tables match the naive quadratic-formula enumerator.
pub fn census_matches_quadratic_oracle() {
    for (a, b) in [(39i128, 10i128), (3, 1)] {
        let table = census(2, &Rat::new(BigInt::from(a), BigInt::from(b))).unwrap();
        let expected = oracle::quadratic_table(a, b);
        assert_eq!(entry_polys(&table), expected, "census (2, {a}/{b}) vs naive double loop");
    }
}

/// The full degree <= 4 table at t = 39/10 matches the independent
/// discriminant-and-substitution enumerator entry for entry.
pub fn census_matches_independent_enumeration() {
    let table = census(4, &Rat::new(39.into(), 10.into())).unwrap();
    let expected = oracle::full_table(4, 39, 10);
    let got = entry_polys(&table);
    assert_eq!(got.len(), expected.len(), "entry counts differ");
    assert_eq!(got, expected, "entry sets differ");
}

/// Profiles report exactly the element counts of their underlying
/// tables, in CSV with one row per threshold.
pub fn profile_rows_match_tables() {
    let ts = [rint(2), rint(3), Rat::new(7.into(), 2.into())];
    let profile = jr_profile(2, &ts).unwrap();
    assert_eq!(profile.rows.len(), 3);
    for (t, count) in &profile.rows {
        let table = census(2, t).unwrap();
        assert_eq!(*count, table.element_count());
    }
    let csv = profile.to_csv();
    assert!(csv.starts_with("t,element_count\n"));
    assert_eq!(csv.lines().count(), 4);
}

// ---------------------------------------------------------------------
// Registry.
// ---------------------------------------------------------------------

type Prop = (&'static str, fn());

/// Every property in the pool, in suite order.
pub const ALL: &[Prop] = &[
    ("resultant matches gcd", resultant_matches_gcd),
    ("sturm counts add across split", sturm_counts_add_across_split),
    ("real root count bounded by degree", real_root_count_bounded_by_degree),
    ("cyclotomic degrees sum and divide", cyclotomic_degrees_sum_and_divide),
    ("field axioms hold", field_axioms_hold),
    ("min poly annihilates and divides degree", min_poly_annihilates_and_divides_degree),
    ("min poly stable under conjugation", min_poly_stable_under_conjugation),
    ("signature accounts for degree", signature_accounts_for_degree),
    ("conjugation is involutive ring map", conjugation_is_involutive_ring_map),
    ("embedding boxes match real root counts", embedding_boxes_match_real_root_counts),
    ("residue arithmetic follows ring ops", residue_arithmetic_follows_ring_ops),
    ("unit evidence inverts exactly", unit_evidence_inverts_exactly),
    ("level two unit conjugates differ by sign", level_two_unit_conjugates_differ_by_sign),
    ("unit squares and higher levels totally real", unit_squares_and_higher_levels_totally_real),
    ("interval membership translates", interval_membership_translates),
    ("squares land in squared intervals", squares_land_in_squared_intervals),
    ("radicand windows are exact", radicand_windows_are_exact),
    ("interval tests exact at conjugates", interval_tests_exact_at_conjugates),
    ("build verify round trips", build_verify_round_trips),
    ("mirror units agree with inversion", mirror_units_agree_with_inversion),
    ("unit squares survive cm lift", unit_squares_survive_cm_lift),
    ("tampered certificates fail", tampered_certificates_fail),
    ("four squares imply interval membership", four_squares_imply_interval_membership),
    ("kronecker entries integral in range", kronecker_entries_integral_in_range),
    ("census monotone in threshold and degree", census_monotone_in_threshold_and_degree),
    ("census entries pass fresh recheck", census_entries_pass_fresh_recheck),
    ("census completeness small degrees", census_completeness_small_degrees),
    ("census matches quadratic oracle", census_matches_quadratic_oracle),
    ("census matches independent enumeration", census_matches_independent_enumeration),
    ("profile rows match tables", profile_rows_match_tables),
];

/// Runs the whole pool sequentially, returning the total elapsed time.
pub fn run_all(verbose: bool) -> Duration {
    let start = Instant::now();
    for (name, prop) in ALL {
        let t0 = Instant::now();
        prop();
        if verbose {
            println!("  property: {name} ... ok ({:.2?})", t0.elapsed());
        }
    }
    start.elapsed()
}
