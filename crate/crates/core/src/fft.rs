//! The LCH butterfly network over GF(2^m) and its inverse.
//!
//! Given coefficients `g_0 .. g_{n-1}` in the novel polynomial basis, the
//! forward network leaves `f(base + i)` at index `i`, where `i` is read as
//! a Cantor vector. Layer `i` (run from `l - 1` down to 0) splits each block
//! of `2^(i+1)` entries into halves `p0`, `p1` and computes
//!
//! ```text
//! h0 = p0 + s_i(beta) * p1
//! h1 = h0 + p1
//! ```
//!
//! with `beta` the evaluation base of the block. Since `s_i(v_i) = 1` each
//! butterfly costs one field multiplication.

use crate::cantor::{subspace_eval, CantorVec, FieldParams};
use crate::field::{BinaryField, FieldWord};
use crate::{Error, Result};

/// Default working-set size for cache blocking, in field elements.
pub const DEFAULT_CACHE_ELEMS: usize = 1 << 15;

/// Precomputed butterfly multipliers for one size and base.
///
/// `mults[i][b]` is `s_i(base + b * 2^(i+1))` in polynomial representation,
/// the multiplier of block `b` in layer `i`.
#[derive(Clone, Debug)]
pub struct ButterflyPlan<F: BinaryField> {
    log_len: u32,
    base: CantorVec,
    mults: Vec<Vec<F::Elem>>,
}

impl<F: BinaryField> ButterflyPlan<F> {
    /// Number of layers (`log2` of the vector length).
    pub fn layers(&self) -> u32 {
        self.log_len
    }

    pub fn len(&self) -> usize {
        1 << self.log_len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn base(&self) -> CantorVec {
        self.base
    }

    pub fn multiplier(&self, layer: u32, block: usize) -> F::Elem {
        self.mults[layer as usize][block]
    }

    pub fn layer_multipliers(&self, layer: u32) -> &[F::Elem] {
        &self.mults[layer as usize]
    }

    /// Total number of stored multipliers (`2^l - 1`).
    pub fn multiplier_count(&self) -> usize {
        self.mults.iter().map(Vec::len).sum()
    }
}

/// Precomputes the multipliers for evaluating at `base + V_l`.
pub fn plan_butterflies<F: BinaryField>(params: &FieldParams<F>, l: u32, base: CantorVec) -> ButterflyPlan<F> {
    let mults = (0..l)
        .map(|i| {
            let blocks = 1usize << (l - 1 - i);
            (0..blocks)
                .map(|b| {
                    let block_base = CantorVec((b as u128) << (i + 1));
                    params.cantor_to_poly(subspace_eval(i as usize, base ^ block_base))
                })
                .collect()
        })
        .collect();
    ButterflyPlan { log_len: l, base, mults }
}

fn check_len<F: BinaryField>(v: &[F::Elem], plan: &ButterflyPlan<F>) -> Result<()> {
    if v.len() != plan.len() {
        return Err(Error::LengthMismatch { expected: plan.len(), actual: v.len() });
    }
    Ok(())
}

/// Forward layer `i` on a window of `v` that starts at element `offset`.
#[inline(always)]
fn layer_fwd<F: BinaryField>(v: &mut [F::Elem], offset: usize, i: u32, mults: &[F::Elem]) {
    let half = 1usize << i;
    for (k, block) in v.chunks_exact_mut(2 * half).enumerate() {
        let c = mults[(offset >> (i + 1)) + k];
        let (p0, p1) = block.split_at_mut(half);
        for (a, b) in p0.iter_mut().zip(p1.iter_mut()) {
            let h0 = *a ^ F::mul(c, *b);
            *a = h0;
            *b ^= h0;
        }
    }
}

#[inline(always)]
fn layer_inv<F: BinaryField>(v: &mut [F::Elem], offset: usize, i: u32, mults: &[F::Elem]) {
    let half = 1usize << i;
    for (k, block) in v.chunks_exact_mut(2 * half).enumerate() {
        let c = mults[(offset >> (i + 1)) + k];
        let (p0, p1) = block.split_at_mut(half);
        for (a, b) in p0.iter_mut().zip(p1.iter_mut()) {
            *b ^= *a;
            *a ^= F::mul(c, *b);
        }
    }
}

/// Forward butterflies in place with the default cache budget.
pub fn lch_butterfly<F: BinaryField>(v: &mut [F::Elem], plan: &ButterflyPlan<F>) -> Result<()> {
    lch_butterfly_blocked(v, plan, DEFAULT_CACHE_ELEMS)
}

/// Inverse butterflies in place with the default cache budget.
pub fn i_lch_butterfly<F: BinaryField>(v: &mut [F::Elem], plan: &ButterflyPlan<F>) -> Result<()> {
    i_lch_butterfly_blocked(v, plan, DEFAULT_CACHE_ELEMS)
}

/// Forward butterflies. Layers whose blocks exceed `budget` elements run
/// across the whole vector; once blocks fit, every remaining layer runs on
/// one `budget`-sized window before moving to the next.
pub fn lch_butterfly_blocked<F: BinaryField>(v: &mut [F::Elem], plan: &ButterflyPlan<F>, budget: usize) -> Result<()> {
    check_len(v, plan)?;
    let budget = budget.max(2).next_power_of_two().min(v.len());
    let mut i = plan.log_len;
    while i > 0 && (2usize << (i - 1)) > budget {
        i -= 1;
        layer_fwd::<F>(v, 0, i, &plan.mults[i as usize]);
    }
    for (w, window) in v.chunks_mut(budget).enumerate() {
        for layer in (0..i).rev() {
            layer_fwd::<F>(window, w * budget, layer, &plan.mults[layer as usize]);
        }
    }
    Ok(())
}

pub fn i_lch_butterfly_blocked<F: BinaryField>(
    v: &mut [F::Elem],
    plan: &ButterflyPlan<F>,
    budget: usize,
) -> Result<()> {
    check_len(v, plan)?;
    let budget = budget.max(2).next_power_of_two().min(v.len());
    let split = (0..plan.log_len).take_while(|&i| (2usize << i) <= budget).count() as u32;
    for (w, window) in v.chunks_mut(budget).enumerate() {
        for layer in 0..split {
            layer_inv::<F>(window, w * budget, layer, &plan.mults[layer as usize]);
        }
    }
    for layer in split..plan.log_len {
        layer_inv::<F>(v, 0, layer, &plan.mults[layer as usize]);
    }
    Ok(())
}

/// Reference schedule: one full layer at a time.
pub fn lch_butterfly_layered<F: BinaryField>(v: &mut [F::Elem], plan: &ButterflyPlan<F>) -> Result<()> {
    check_len(v, plan)?;
    for i in (0..plan.log_len).rev() {
        layer_fwd::<F>(v, 0, i, &plan.mults[i as usize]);
    }
    Ok(())
}

/// Runs only layers `top - 1` down to `stop` (inclusive) of the forward
/// network, leaving the lower layers undone.
pub fn lch_butterfly_partial<F: BinaryField>(v: &mut [F::Elem], plan: &ButterflyPlan<F>, stop: u32) -> Result<()> {
    check_len(v, plan)?;
    for i in (stop..plan.log_len).rev() {
        layer_fwd::<F>(v, 0, i, &plan.mults[i as usize]);
    }
    Ok(())
}

/// Evaluates `sum_k g_k X_k(pt)` term by term, with `X_k(pt)` built from
/// `s_i(pt)` via [`subspace_eval`]. Test oracle for the butterfly.
pub fn direct_eval<F: BinaryField>(params: &FieldParams<F>, g: &[F::Elem], pt: CantorVec) -> F::Elem {
    let bits = usize::BITS - g.len().saturating_sub(1).leading_zeros();
    let s: Vec<F::Elem> = (0..bits as usize).map(|i| params.cantor_to_poly(subspace_eval(i, pt))).collect();
    let mut acc = F::Elem::ZERO;
    for (k, &gk) in g.iter().enumerate() {
        if gk == F::Elem::ZERO {
            continue;
        }
        let mut x = F::Elem::ONE;
        let mut rest = k;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            x = F::mul(x, s[i]);
            rest &= rest - 1;
        }
        acc ^= F::mul(gk, x);
    }
    acc
}
