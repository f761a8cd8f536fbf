//! Slow reference implementations used to check the fast paths.
//!
//! Each one follows a definition directly and shares no code with the
//! routine it checks.

use crate::bitpoly::BitPoly;
use crate::cantor::FieldParams;
use crate::encode::PartitionSpec;
use crate::fft::{lch_butterfly_partial, plan_butterflies};
use crate::field::{BinaryField, FieldWord};
use crate::multiplier::naive_mul;

/// `s_i(x)` over GF(2), from `s_0 = x` and `s_{i+1} = s_i^2 + s_i`.
pub fn subspace_poly(i: usize) -> BitPoly {
    let mut s = BitPoly::monomial(1);
    for _ in 0..i {
        let mut next = naive_mul(&s, &s);
        next ^= &s;
        s = next.trimmed();
    }
    s
}

/// `X_k(x)`: the product of `s_i(x)` over the set bits `i` of `k`.
pub fn novel_basis_poly(k: usize) -> BitPoly {
    let mut x = BitPoly::one();
    for i in 0..usize::BITS as usize {
        if (k >> i) & 1 == 1 {
            x = naive_mul(&x, &subspace_poly(i)).trimmed();
        }
    }
    x
}

/// `sum_k g_k X_k(x)` in the monomial basis, with the length of `g`.
pub fn novel_to_monomial(g: &BitPoly) -> BitPoly {
    let mut f = BitPoly::zero(g.len());
    for k in 0..g.len() {
        if g.bit(k) {
            f ^= &novel_basis_poly(k);
        }
    }
    f.resized(g.len())
}

/// Encode computed the long way: lift every bit of `a` into GF(2^m), run
/// the top `log2(m)` layers of the full-length butterfly at the partition
/// base without truncation, and keep the first `n_p` entries.
pub fn virtual_encode<F: BinaryField>(params: &FieldParams<F>, a: &BitPoly, spec: &PartitionSpec) -> Vec<F::Elem> {
    let log_n = spec.l() + F::LOG_DEGREE;
    let plan = plan_butterflies(params, log_n, spec.base());
    let mut v: Vec<F::Elem> = (0..a.len()).map(|k| if a.bit(k) { F::Elem::ONE } else { F::Elem::ZERO }).collect();
    lch_butterfly_partial(&mut v, &plan, spec.l()).expect("length matches plan");
    v.truncate(spec.n_points());
    v
}

/// Row-by-row `x * M` for a matrix given as field elements.
pub fn naive_mat_vec<F: BinaryField>(rows: &[F::Elem], x: u128) -> F::Elem {
    rows.iter().enumerate().filter(|(j, _)| (x >> j) & 1 == 1).fold(F::Elem::ZERO, |acc, (_, &r)| acc ^ r)
}
