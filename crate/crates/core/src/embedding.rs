//! Real embeddings of square-root towers, signatures, and enclosure boxes.
//!
//! A real embedding is a choice of real root of the base polynomial plus a
//! sign for each adjoined square root whose radicand is positive under the
//! choices made so far. Values are enclosed in rational-endpoint intervals
//! that refine on demand: the isolating interval of the base root shrinks by
//! Sturm bisection, and interval arithmetic propagates upward. Signs of
//! nonzero values are always decided exactly; no floating point appears.
//!
//! Complex embeddings are never isolated individually. They are counted for
//! the signature, and when complexity enters only at the last step of the
//! tower (the radicand of the final square root is the first negative one),
//! `embed` reports the modulus of the conjugate pair as an interval instead.

use crate::rat::{rat_sqrt_lower, rat_sqrt_upper, Rat};
use crate::sturm::{isolate_real_roots, refine_root, SturmChain, SturmError};
use crate::tower::{AlgNum, Tower, TowerError};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cell::RefCell;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error(transparent)]
    Sturm(#[from] SturmError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("element does not belong to this embedding's tower")]
    WrongTower,
    #[error("enclosure precision exhausted at {bits} bits; the tower may be reducible")]
    PrecisionExhausted { bits: u32 },
    #[error("complex embeddings arise below the final step; only top-step complexity is enclosed")]
    DeepComplex,
    #[error("requested width must be positive")]
    BadWidth,
}

const MAX_BITS: u32 = 1 << 16;

/// Field signature: r real embeddings, s conjugate pairs, r + 2s = degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub real: usize,
    pub complex_pairs: usize,
}

/// One real embedding of a tower, with refinable interval state.
#[derive(Clone)]
pub struct RealEmbedding {
    tower: Arc<Tower>,
    chain: Arc<SturmChain>,
    root: RefCell<(Rat, Rat)>,
    signs: Vec<bool>,
}

impl RealEmbedding {
    /// Sign choices per step: true selects the positive square root.
    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    fn refined_root(&self, bits: u32) -> (Rat, Rat) {
        let width = Rat::new(BigInt::one(), BigInt::one() << bits as usize);
        let current = self.root.borrow().clone();
        if &current.1 - &current.0 <= width {
            return current;
        }
        let refined = refine_root(&self.chain, current.0, current.1, &width)
            .expect("isolating interval stays isolating under bisection");
        *self.root.borrow_mut() = refined.clone();
        refined
    }

    fn coerced<'a>(&self, x: &'a AlgNum) -> Result<std::borrow::Cow<'a, AlgNum>, EmbedError> {
        if *x.tower() == self.tower {
            Ok(std::borrow::Cow::Borrowed(x))
        } else if x.tower().is_prefix_of(&self.tower) {
            Ok(std::borrow::Cow::Owned(x.lift_to(&self.tower)?))
        } else {
            Err(EmbedError::WrongTower)
        }
    }

    fn enclose_raw(&self, x: &AlgNum, bits: u32) -> Option<Iv> {
        enclose_tree(self, &self.tower, tree_of(x), self.tower.num_steps(), bits)
    }

    /// Interval around the embedded value with width at most `width`.
    pub fn enclose(&self, x: &AlgNum, width: &Rat) -> Result<(Rat, Rat), EmbedError> {
        if !width.is_positive() {
            return Err(EmbedError::BadWidth);
        }
        let x = self.coerced(x)?;
        let mut bits = 8u32;
        loop {
            if let Some(iv) = self.enclose_raw(&x, bits) {
                if &iv.1 - &iv.0 <= *width {
                    return Ok(iv);
                }
            }
            if bits >= MAX_BITS {
                return Err(EmbedError::PrecisionExhausted { bits });
            }
            bits *= 2;
        }
    }

    /// Exact sign of the embedded value: -1, 0, or +1.
    pub fn sign_at(&self, x: &AlgNum) -> Result<i32, EmbedError> {
        let x = self.coerced(x)?;
        if x.is_zero() {
            return Ok(0);
        }
        let mut bits = 8u32;
        loop {
            if let Some((lo, hi)) = self.enclose_raw(&x, bits) {
                if lo.is_positive() {
                    return Ok(1);
                }
                if hi.is_negative() {
                    return Ok(-1);
                }
            }
            if bits >= MAX_BITS {
                return Err(EmbedError::PrecisionExhausted { bits });
            }
            bits *= 2;
        }
    }
}

impl std::fmt::Debug for RealEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let root = self.root.borrow();
        write!(
            f,
            "RealEmbedding(root in ({}, {}], signs {:?})",
            root.0, root.1, self.signs
        )
    }
}

/// Rational-endpoint enclosure of one embedding's value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingBox {
    /// Value of a real embedding.
    Real { lo: Rat, hi: Rat },
    /// Modulus of a conjugate pair of complex embeddings.
    Modulus { lo: Rat, hi: Rat },
}

/// All embedding values of one element: real boxes first, in enumeration
/// order, then one modulus box per conjugate pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingEnclosure {
    pub boxes: Vec<EmbeddingBox>,
}

struct Enumeration {
    reals: Vec<RealEmbedding>,
    /// Embeddings of the next-to-top subtower under which the final
    /// radicand is negative: each contributes one conjugate pair.
    top_negative: Vec<RealEmbedding>,
    /// True when complexity appears before the final step (including
    /// complex roots of the base polynomial itself).
    deep_complex: bool,
}

fn enumerate(tower: &Arc<Tower>) -> Result<Enumeration, EmbedError> {
    let chain = Arc::new(SturmChain::new(tower.base_poly())?);
    let boxes = isolate_real_roots(tower.base_poly())?;
    let h = tower.num_steps();
    let mut deep_complex = boxes.len() < tower.base_degree();
    let mut level: Vec<RealEmbedding> = boxes
        .into_iter()
        .map(|b| RealEmbedding {
            tower: tower.subtower(0),
            chain: chain.clone(),
            root: RefCell::new(b),
            signs: Vec::new(),
        })
        .collect();
    let mut top_negative = Vec::new();
    for k in 0..h {
        let delta = tower.step_radicand(k);
        let next_tower = tower.subtower(k + 1);
        let mut next = Vec::with_capacity(level.len() * 2);
        for e in level {
            let s = e.sign_at(&delta)?;
            debug_assert_ne!(s, 0, "step radicands are nonzero");
            if s > 0 {
                for sign in [true, false] {
                    let mut signs = e.signs.clone();
                    signs.push(sign);
                    next.push(RealEmbedding {
                        tower: next_tower.clone(),
                        chain: chain.clone(),
                        root: RefCell::new(e.root.borrow().clone()),
                        signs,
                    });
                }
            } else if k + 1 == h {
                top_negative.push(e);
            } else {
                deep_complex = true;
            }
        }
        level = next;
    }
    Ok(Enumeration { reals: level, top_negative, deep_complex })
}

/// All real embeddings of the tower. Order: base roots ascending, then at
/// each step the positive branch before the negative one.
pub fn real_embeddings(tower: &Arc<Tower>) -> Result<Vec<RealEmbedding>, EmbedError> {
    Ok(enumerate(tower)?.reals)
}

/// Signature (r, s) of the tower's field.
pub fn signature(tower: &Arc<Tower>) -> Result<Signature, EmbedError> {
    let r = enumerate(tower)?.reals.len();
    let n = tower.degree();
    debug_assert!(n >= r && (n - r).is_multiple_of(2));
    Ok(Signature { real: r, complex_pairs: (n - r) / 2 })
}

/// True when the tower is a totally imaginary quadratic extension of a
/// totally real field, with the quadratic step being the tower's last one:
/// the prefix below the final square root is totally real and the full
/// tower has no real embedding.
pub fn is_cm_tower(tower: &Arc<Tower>) -> Result<bool, EmbedError> {
    let h = tower.num_steps();
    if h == 0 {
        return Ok(false);
    }
    let prefix = tower.subtower(h - 1);
    if signature(&prefix)?.complex_pairs != 0 {
        return Ok(false);
    }
    Ok(signature(tower)?.real == 0)
}

/// Encloses every embedding value of x in boxes of width at most `width`.
///
/// Real embeddings yield Real boxes. When the only source of complexity is
/// the final step of the tower, each conjugate pair yields a Modulus box;
/// complexity any earlier is reported as DeepComplex instead of enclosed.
pub fn embed(x: &AlgNum, width: &Rat) -> Result<EmbeddingEnclosure, EmbedError> {
    if !width.is_positive() {
        return Err(EmbedError::BadWidth);
    }
    let tower = x.tower();
    let en = enumerate(tower)?;
    if en.deep_complex {
        return Err(EmbedError::DeepComplex);
    }
    let mut boxes = Vec::with_capacity(en.reals.len() + en.top_negative.len());
    for e in &en.reals {
        let (lo, hi) = e.enclose(x, width)?;
        boxes.push(EmbeddingBox::Real { lo, hi });
    }
    if !en.top_negative.is_empty() {
        let h = tower.num_steps();
        let delta = tower.step_radicand(h - 1);
        let (a, b) = x.split_top();
        for e in &en.top_negative {
            let (lo, hi) = modulus_box(e, &a, &b, &delta, width)?;
            boxes.push(EmbeddingBox::Modulus { lo, hi });
        }
    }
    Ok(EmbeddingEnclosure { boxes })
}

/// |a + b s|^2 = a^2 + b^2 |delta| under an embedding with delta < 0.
fn modulus_box(
    e: &RealEmbedding,
    a: &AlgNum,
    b: &AlgNum,
    delta: &AlgNum,
    width: &Rat,
) -> Result<(Rat, Rat), EmbedError> {
    let mut bits = 8u32;
    loop {
        let attempt = (|| {
            let ia = e.enclose_raw(a, bits)?;
            let ib = e.enclose_raw(b, bits)?;
            let id = e.enclose_raw(delta, bits)?;
            if !id.1.is_negative() {
                return None;
            }
            let abs_d = (-id.1, -id.0);
            let m2 = iv_add(&iv_sq(&ia), &iv_mul(&iv_sq(&ib), &abs_d));
            let lo_in = if m2.0.is_negative() { Rat::zero() } else { m2.0 };
            let lo = rat_sqrt_lower(&lo_in, bits);
            let hi = rat_sqrt_upper(&m2.1, bits);
            Some((lo, hi))
        })();
        if let Some((lo, hi)) = attempt {
            if &hi - &lo <= *width {
                return Ok((lo, hi));
            }
        }
        if bits >= MAX_BITS {
            return Err(EmbedError::PrecisionExhausted { bits });
        }
        bits *= 2;
    }
}

// Interval arithmetic over rational endpoints.

type Iv = (Rat, Rat);

fn iv_point(r: &Rat) -> Iv {
    (r.clone(), r.clone())
}

fn iv_add(a: &Iv, b: &Iv) -> Iv {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn iv_neg(a: &Iv) -> Iv {
    (-&a.1, -&a.0)
}

fn iv_mul(a: &Iv, b: &Iv) -> Iv {
    let products = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = products.iter().min().unwrap().clone();
    let hi = products.iter().max().unwrap().clone();
    (lo, hi)
}

fn iv_sq(a: &Iv) -> Iv {
    let l2 = &a.0 * &a.0;
    let h2 = &a.1 * &a.1;
    if !a.0.is_negative() {
        (l2, h2)
    } else if !a.1.is_positive() {
        (h2, l2)
    } else {
        (Rat::zero(), l2.max(h2))
    }
}

fn iv_sqrt(a: &Iv, bits: u32) -> Iv {
    (rat_sqrt_lower(&a.0, bits), rat_sqrt_upper(&a.1, bits))
}

fn tree_of(x: &AlgNum) -> &crate::tower::ElemTree {
    x.tree_ref()
}

fn enclose_tree(
    e: &RealEmbedding,
    tower: &Tower,
    tree: &crate::tower::ElemTree,
    level: usize,
    bits: u32,
) -> Option<Iv> {
    use crate::tower::ElemTree;
    match tree {
        ElemTree::Base(v) => {
            let theta = e.refined_root(bits);
            let mut acc = iv_point(&Rat::zero());
            for c in v.iter().rev() {
                acc = iv_add(&iv_mul(&acc, &theta), &iv_point(c));
            }
            Some(acc)
        }
        ElemTree::Ext(lo, hi) => {
            let ia = enclose_tree(e, tower, lo, level - 1, bits)?;
            if hi.is_zero() {
                return Some(ia);
            }
            let ib = enclose_tree(e, tower, hi, level - 1, bits)?;
            let id = enclose_tree(e, tower, tower.step_tree(level - 1), level - 1, bits)?;
            if !id.0.is_positive() {
                // Radicand not yet separated above zero at this precision.
                return None;
            }
            let mut s = iv_sqrt(&id, bits);
            if !e.signs[level - 1] {
                s = iv_neg(&s);
            }
            Some(iv_add(&ia, &iv_mul(&ib, &s)))
        }
    }
}
