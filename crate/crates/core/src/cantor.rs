//! Cantor basis of GF(2^m) and subspace polynomial evaluation.
//!
//! The basis satisfies `v_0 = 1` and `v_i^2 + v_i = v_{i-1}`. With respect
//! to it the subspace polynomial `s_i(x) = prod_{a in V_i} (x - a)`, where
//! `V_i = span(v_0, .., v_{i-1})`, acts on Cantor coordinates as a right
//! shift by `i` bits.

use std::marker::PhantomData;

use crate::bitmat;
use crate::field::{BinaryField, FieldWord};
use crate::{Error, Result};

/// A field element in Cantor coordinates: bit `j` is the coefficient of `v_j`.
///
/// The integer encoding doubles as the index of the point in `V_m`, so
/// `CantorVec(i)` is the `i`-th evaluation point of a butterfly at base 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CantorVec(pub u128);

impl CantorVec {
    pub const ZERO: Self = Self(0);

    /// The basis vector `v_i`.
    pub fn unit(i: usize) -> Self {
        Self(1u128 << i)
    }
}

impl std::ops::BitXor for CantorVec {
    type Output = Self;
    fn bitxor(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

/// `s_i(a)` in Cantor coordinates: `a` shifted right by `i` bits.
#[inline]
pub fn subspace_eval(i: usize, a: CantorVec) -> CantorVec {
    CantorVec(u32::try_from(i).ok().and_then(|s| a.0.checked_shr(s)).unwrap_or(0))
}

/// Order of `v_i` under the Frobenius map: `2 * 2^floor(log2 i)`.
pub fn frobenius_order_of_basis(i: usize) -> Result<usize> {
    if i == 0 {
        return Err(Error::InvalidBasisIndex(0));
    }
    Ok(2 << i.ilog2())
}

/// Per-field tables: the Cantor basis in polynomial representation and the
/// basis-change matrices between the two representations.
///
/// Immutable once built. Representation changes are only ever applied to
/// constants (butterfly multipliers, encode rows), never to bulk data.
#[derive(Clone, Debug)]
pub struct FieldParams<F: BinaryField> {
    basis: Vec<F::Elem>,
    /// Row `j` is `v_j` in polynomial representation.
    cantor_to_poly: Vec<u128>,
    /// Row `k` is `x^k` in Cantor coordinates.
    poly_to_cantor: Vec<u128>,
    _field: PhantomData<F>,
}

impl<F: BinaryField> FieldParams<F> {
    /// Builds the Cantor basis for `F`.
    ///
    /// Each `v_i` solves `y^2 + y = v_{i-1}`. The map `y -> y^2 + y` is
    /// GF(2)-linear with kernel `{0, 1}`, so the equation is a linear
    /// system; of its two roots `y` and `y + 1` the one with the smaller
    /// integer encoding is kept.
    pub fn new() -> Result<Self> {
        let m = F::DEGREE;
        check_irreducible::<F>()?;

        let artin_schreier: Vec<u128> = (0..m)
            .map(|k| {
                let xk = F::Elem::from_u128(1u128 << k);
                (F::sqr(xk) ^ xk).to_u128()
            })
            .collect();

        let mut basis = Vec::with_capacity(m);
        basis.push(F::Elem::ONE);
        for i in 1..m {
            let prev = basis[i - 1];
            let y = bitmat::solve(&artin_schreier, prev.to_u128()).ok_or(Error::NoCantorContinuation(i - 1))?;
            let y = F::Elem::from_u128(y & !1);
            debug_assert_eq!(F::sqr(y) ^ y, prev);
            basis.push(y);
        }

        let cantor_to_poly: Vec<u128> = basis.iter().map(|v| v.to_u128()).collect();
        let poly_to_cantor =
            bitmat::invert(&cantor_to_poly).ok_or(Error::SingularMatrix("Cantor basis is linearly dependent"))?;

        Ok(Self { basis, cantor_to_poly, poly_to_cantor, _field: PhantomData })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        F::DEGREE
    }

    #[inline]
    pub fn log_degree(&self) -> u32 {
        F::LOG_DEGREE
    }

    /// `v_i` in polynomial representation.
    #[inline]
    pub fn basis(&self, i: usize) -> F::Elem {
        self.basis[i]
    }

    pub fn basis_vectors(&self) -> &[F::Elem] {
        &self.basis
    }

    /// Rows of the Cantor-to-polynomial matrix.
    pub fn cantor_to_poly_matrix(&self) -> &[u128] {
        &self.cantor_to_poly
    }

    /// Rows of the polynomial-to-Cantor matrix.
    pub fn poly_to_cantor_matrix(&self) -> &[u128] {
        &self.poly_to_cantor
    }

    #[inline]
    pub fn cantor_to_poly(&self, c: CantorVec) -> F::Elem {
        F::Elem::from_u128(bitmat::vec_mul(c.0, &self.cantor_to_poly))
    }

    #[inline]
    pub fn poly_to_cantor(&self, a: F::Elem) -> CantorVec {
        CantorVec(bitmat::vec_mul(a.to_u128(), &self.poly_to_cantor))
    }

    /// `s_i(a)` for `a` in polynomial representation.
    pub fn subspace_eval_poly(&self, i: usize, a: F::Elem) -> F::Elem {
        self.cantor_to_poly(subspace_eval(i, self.poly_to_cantor(a)))
    }
}

fn poly_deg(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u128, b: u128) -> u128 {
    let db = poly_deg(b);
    while a != 0 && poly_deg(a) >= db {
        a ^= b << (poly_deg(a) - db);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test for `m` a power of two: the modulus `p` is irreducible iff
/// `x^(2^m) = x (mod p)` and `gcd(x^(2^(m/2)) - x, p) = 1`.
fn check_irreducible<F: BinaryField>() -> Result<()> {
    let m = F::DEGREE;
    let x = F::Elem::from_u128(2);
    if F::frobenius(x, m) != x {
        return Err(Error::ReducibleModulus(m));
    }
    let q = (F::frobenius(x, m / 2) ^ x).to_u128();
    if q == 0 {
        return Err(Error::ReducibleModulus(m));
    }
    // p mod q, computed without materializing the x^m term.
    let mut r = 1u128;
    for _ in 0..m {
        r = poly_rem(r << 1, q);
    }
    r ^= poly_rem(F::MODULUS_TAIL, q);
    if poly_gcd(q, r) != 1 {
        return Err(Error::ReducibleModulus(m));
    }
    Ok(())
}
