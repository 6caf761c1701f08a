//! Independent census enumerators used to cross-check the production
//! sweep.
//!
//! Root location here avoids Sturm chains entirely: real-rootedness comes
//! from discriminant signs, interval location from the sign pattern of a
//! hand-expanded fractional-linear substitution, and duplicate
//! suppression from literal trial division instead of resultants. A
//! systematic error would have to be made twice, independently, for the
//! two sides to agree.

use trcert_core::{Rat, RatPoly};

/// Monic integer polynomial from signed elementary-symmetric values:
/// x^k - e1 x^{k-1} + e2 x^{k-2} - ...
fn poly_from_sym(es: &[i128]) -> RatPoly {
    let k = es.len();
    let mut coeffs = vec![Rat::from_integer(0.into()); k + 1];
    coeffs[k] = Rat::from_integer(1.into());
    for (j, e) in es.iter().enumerate() {
        let sign: i128 = if (j + 1) % 2 == 0 { 1 } else { -1 };
        coeffs[k - (j + 1)] = Rat::from_integer((sign * e).into());
    }
    RatPoly::new(coeffs)
}

fn isqrt(n: i128) -> i128 {
    if n < 2 {
        return n.max(0);
    }
    let mut x = (n as f64).sqrt() as i128 + 2;
    while x * x > n {
        x -= 1;
    }
    x
}

/// All monic integer polynomials of degree <= 2 that are irreducible with
/// every root in the open interval (0, a/b): a literal double loop with
/// the root checks spelled out through the quadratic formula.
///
/// Degree 1: the root is e1 itself. Degree 2: the roots are
/// (e1 +- sqrt(e1^2 - 4 e2)) / 2; both are real and distinct exactly when
/// the discriminant is positive, both are positive exactly when e1 and e2
/// are (sum and product of roots), and the larger stays below t = a/b
/// exactly when b sqrt(disc) < 2a - e1 b with the right side positive.
/// A perfect-square discriminant means two rational (hence integer)
/// roots, so the polynomial splits and is skipped.
pub fn quadratic_table(a: i128, b: i128) -> Vec<RatPoly> {
    assert!(a > 0 && b > 0);
    let mut out = Vec::new();
    let mut e = 1;
    while e * b < a {
        out.push(poly_from_sym(&[e]));
        e += 1;
    }
    let mut e1 = 1;
    while e1 * b < 2 * a {
        let mut e2 = 1;
        while e2 * b * b < a * a {
            let disc = e1 * e1 - 4 * e2;
            let room = 2 * a - e1 * b;
            let keep = disc > 0
                && isqrt(disc) * isqrt(disc) != disc
                && room > 0
                && b * b * disc < room * room;
            if keep {
                out.push(poly_from_sym(&[e1, e2]));
            }
            e2 += 1;
        }
        e1 += 1;
    }
    out
}

/// Coefficients of (1 - y)^i, ascending.
fn one_minus_y_pow(i: usize) -> Vec<i128> {
    let mut c = vec![1i128];
    for _ in 0..i {
        let mut next = vec![0i128; c.len() + 1];
        for (j, v) in c.iter().enumerate() {
            next[j] += v;
            next[j + 1] -= v;
        }
        c = next;
    }
    c
}

/// Weight vectors for the substitution x = a y / (b (1 + y)), which maps
/// (0, t) onto the positive half-line. For p = x^k - e1 x^{k-1} + ...,
/// the transformed-and-sign-adjusted polynomial works out to
///   R(y) = sum_i e_i a^{k-i} b^i y^{k-i} (1 - y)^i     (e_0 = 1),
/// and a real-rooted p with p(0) p(t) != 0 has every root in (0, t)
/// exactly when all k+1 coefficients of R are strictly positive.
fn weight_rows(k: usize, a: i128, b: i128) -> Vec<[i128; 5]> {
    let mut rows = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let scale = a.pow((k - i) as u32) * b.pow(i as u32);
        let binom = one_minus_y_pow(i);
        let mut row = [0i128; 5];
        // y^{k-i} (1 - y)^i: shift the expansion up by k - i.
        for (j, v) in binom.iter().enumerate() {
            row[k - i + j] = scale * v;
        }
        rows.push(row);
    }
    rows
}

fn disc2(e: &[i128]) -> i128 {
    e[0] * e[0] - 4 * e[1]
}

fn disc3(e: &[i128]) -> i128 {
    let (e1, e2, e3) = (e[0], e[1], e[2]);
    18 * e1 * e2 * e3 - 4 * e1 * e1 * e1 * e3 + e1 * e1 * e2 * e2
        - 4 * e2 * e2 * e2
        - 27 * e3 * e3
}

/// Four distinct real roots for x^4 + p x^3 + q x^2 + r x + s exactly
/// when the discriminant is positive and both P = 8q - 3p^2 and
/// D = 64s - 16q^2 + 16p^2 q - 16 p r - 3 p^4 are negative.
fn quartic_all_real_distinct(e: &[i128]) -> bool {
    let (p, q, r, s) = (-e[0], e[1], -e[2], e[3]);
    let disc = 256 * s * s * s - 192 * p * r * s * s - 128 * q * q * s * s
        + 144 * q * r * r * s
        - 27 * r * r * r * r
        + 144 * p * p * q * s * s
        - 6 * p * p * r * r * s
        - 80 * p * q * q * r * s
        + 18 * p * q * r * r * r
        + 16 * q * q * q * q * s
        - 4 * q * q * q * r * r
        - 27 * p * p * p * p * s * s
        + 18 * p * p * p * q * r * s
        - 4 * p * p * p * r * r * r
        - 4 * p * p * q * q * q * s
        + p * p * q * q * r * r;
    let cap_p = 8 * q - 3 * p * p;
    let cap_d = 64 * s - 16 * q * q + 16 * p * p * q - 16 * p * r - 3 * p * p * p * p;
    disc > 0 && cap_p < 0 && cap_d < 0
}

fn all_real_distinct(k: usize, e: &[i128]) -> bool {
    match k {
        1 => true,
        2 => disc2(e) > 0,
        3 => disc3(e) > 0,
        4 => quartic_all_real_distinct(e),
        _ => unreachable!("degrees above 4 are not enumerated"),
    }
}

/// Monic integer polynomial as ascending i128 coefficients.
fn int_coeffs(es: &[i128]) -> Vec<i128> {
    let k = es.len();
    let mut c = vec![0i128; k + 1];
    c[k] = 1;
    for (j, e) in es.iter().enumerate() {
        let sign: i128 = if (j + 1) % 2 == 0 { 1 } else { -1 };
        c[k - (j + 1)] = sign * e;
    }
    c
}

/// Exact long division by a monic divisor; true when the remainder is 0.
fn monic_divides(divisor: &[i128], target: &[i128]) -> bool {
    let m = divisor.len() - 1;
    let k = target.len() - 1;
    if m > k {
        return false;
    }
    let mut r = target.to_vec();
    for i in (0..=k - m).rev() {
        let c = r[i + m];
        if c != 0 {
            for (j, d) in divisor.iter().enumerate().take(m) {
                r[i + j] -= c * d;
            }
            r[i + m] = 0;
        }
    }
    r.iter().all(|c| *c == 0)
}

/// Independent full enumeration for degrees up to `max_degree` (<= 4) at
/// t = a/b, ordered by degree and then by (e1, ..., ek) ascending: for
/// each coefficient cell, strict positivity of the substituted
/// coefficient row locates the roots, the discriminant conditions
/// certify real-rootedness, and trial division against already-kept
/// entries discards reducible polynomials (every factor of a qualifying
/// polynomial qualifies at lower degree, so irreducibility is exactly
/// "no kept divisor").
pub fn full_table(max_degree: u32, a: i128, b: i128) -> Vec<RatPoly> {
    assert!((1..=4).contains(&max_degree) && a > 0 && b > 0);
    let mut kept: Vec<Vec<i128>> = Vec::new();
    let mut out = Vec::new();
    for k in 1..=max_degree as usize {
        // Pascal row for C(k, i).
        let mut binom = vec![1i128; k + 1];
        for i in 1..=k {
            binom[i] = binom[i - 1] * (k as i128 - i as i128 + 1) / i as i128;
        }
        let emax: Vec<i128> =
            (1..=k).map(|i| (binom[i] * a.pow(i as u32) - 1) / b.pow(i as u32)).collect();
        if emax.iter().any(|m| *m < 1) {
            continue;
        }
        let rows = weight_rows(k, a, b);
        let mut es = vec![0i128; k];
        descend(k, 0, rows[0], &rows, &emax, &mut es, &mut kept, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn descend(
    k: usize,
    level: usize,
    acc: [i128; 5],
    rows: &[[i128; 5]],
    emax: &[i128],
    es: &mut Vec<i128>,
    kept: &mut Vec<Vec<i128>>,
    out: &mut Vec<RatPoly>,
) {
    let mut acc = acc;
    let row = rows[level + 1];
    if level == k - 1 {
        // Innermost coefficient: flat loop, leaf checks inline.
        for e in 1..=emax[level] {
            for (t, w) in acc.iter_mut().zip(row.iter()) {
                *t += w;
            }
            es[level] = e;
            if acc[..=k].iter().any(|c| *c <= 0) || !all_real_distinct(k, es) {
                continue;
            }
            let cand = int_coeffs(es);
            if kept.iter().any(|f| monic_divides(f, &cand)) {
                continue;
            }
            out.push(poly_from_sym(es));
            kept.push(cand);
        }
        return;
    }
    for e in 1..=emax[level] {
        for (t, w) in acc.iter_mut().zip(row.iter()) {
            *t += w;
        }
        es[level] = e;
        descend(k, level + 1, acc, rows, emax, es, kept, out);
    }
}
