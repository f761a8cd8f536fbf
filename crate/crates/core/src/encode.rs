//! The encode step: the first `log2(m)` butterfly layers of a GF(2)
//! polynomial, collapsed into bit-matrix products and truncated.
//!
//! A polynomial with `n = m * n_p` novel-basis coefficients `a_k` in GF(2)
//! is to be evaluated at the `n_p` points `Sigma = v_{l + m/2} + V_l`
//! (`n_p = 2^l`). Running the butterfly over all `n` entries at that base
//! and keeping only the first `n_p` outputs of the first `log2(m)` layers
//! leaves
//!
//! ```text
//! f_i = sum_{j < m} a_{j n_p + i} r_j,    r_j = prod_{k : bit k of j} s_{l+k}(v_{l+m/2})
//! ```
//!
//! and `s_{l+k}(v_{l+m/2}) = v_{m/2-k}` does not depend on `l`. So each
//! `f_i` is an `m`-bit vector times a fixed `m x m` bit matrix, computed
//! here with 4-bit four-Russians tables after a bit transpose gathers the
//! `m` input bits of 64 consecutive indices at once.
//!
//! Decode multiplies by the inverse matrix and scatters back.

use crate::bitmat;
use crate::bitpoly::BitPoly;
use crate::cantor::{CantorVec, FieldParams};
use crate::field::{BinaryField, FieldWord};
use crate::{Error, Result};

/// The evaluation set `Sigma = v_{l+m/2} + V_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    m: usize,
    l: u32,
    base: CantorVec,
}

impl PartitionSpec {
    /// Requires `l < m/2`, so that `Sigma` has full Frobenius order `m`.
    pub fn new(m: usize, l: u32) -> Result<Self> {
        let limit = (m / 2) as u32;
        if l >= limit {
            return Err(Error::PartitionTooLarge { l, m, limit });
        }
        Ok(Self { m, l, base: CantorVec::unit(l as usize + m / 2) })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base(&self) -> CantorVec {
        self.base
    }

    /// `|Sigma| = 2^l`.
    pub fn n_points(&self) -> usize {
        1 << self.l
    }

    /// Number of GF(2) coefficients covered, `m * 2^l`.
    pub fn n_bits(&self) -> usize {
        self.m << self.l
    }
}

/// Four-Russians tables for one `m x m` bit matrix: for each 4-bit chunk
/// `c` of the input, the 16 XOR combinations of rows `4c .. 4c+3`, stored
/// contiguously chunk by chunk.
#[derive(Clone, Debug)]
pub struct M4rTable<F: BinaryField> {
    table: Vec<F::Elem>,
}

impl<F: BinaryField> M4rTable<F> {
    pub fn new(rows: &[F::Elem]) -> Self {
        assert_eq!(rows.len() % 4, 0);
        let mut table = Vec::with_capacity(rows.len() * 4);
        for quad in rows.chunks_exact(4) {
            for idx in 0..16usize {
                let mut acc = F::Elem::ZERO;
                for (bit, &row) in quad.iter().enumerate() {
                    if (idx >> bit) & 1 == 1 {
                        acc ^= row;
                    }
                }
                table.push(acc);
            }
        }
        Self { table }
    }

    pub fn entries(&self) -> &[F::Elem] {
        &self.table
    }

    /// `x * M`, one lookup per 4-bit chunk of `x`.
    #[inline]
    pub fn mul_vec(&self, x: u128) -> F::Elem {
        let mut acc = F::Elem::ZERO;
        for (c, t) in self.table.chunks_exact(16).enumerate() {
            acc ^= t[((x >> (4 * c)) & 15) as usize];
        }
        acc
    }
}

/// The encode matrix with rows `r_j` and its inverse, plus lookup tables.
#[derive(Clone, Debug)]
pub struct EncodeMatrix<F: BinaryField> {
    rows: Vec<F::Elem>,
    inv_rows: Vec<F::Elem>,
    fwd: M4rTable<F>,
    inv: M4rTable<F>,
}

/// The multipliers `s_{l+k}(v_{l+m/2}) = v_{m/2-k}` for `k < log2(m)`, in
/// polynomial representation.
pub fn encode_multipliers<F: BinaryField>(params: &FieldParams<F>) -> Vec<F::Elem> {
    let half = F::DEGREE / 2;
    (0..F::LOG_DEGREE as usize).map(|k| params.basis(half - k)).collect()
}

/// `r_j = prod_{k : bit k of j} mults[k]` for `j < m`.
pub fn encode_rows<F: BinaryField>(mults: &[F::Elem]) -> Vec<F::Elem> {
    (0..F::DEGREE)
        .map(|j| {
            mults
                .iter()
                .enumerate()
                .filter(|(k, _)| (j >> k) & 1 == 1)
                .fold(F::Elem::ONE, |acc, (_, &v)| F::mul(acc, v))
        })
        .collect()
}

pub fn build_encode_matrix<F: BinaryField>(params: &FieldParams<F>) -> Result<EncodeMatrix<F>> {
    let rows = encode_rows::<F>(&encode_multipliers(params));
    let wide: Vec<u128> = rows.iter().map(|r| r.to_u128()).collect();
    let inv_rows: Vec<F::Elem> = bitmat::invert(&wide)
        .ok_or(Error::SingularMatrix("encode rows are linearly dependent"))?
        .into_iter()
        .map(F::Elem::from_u128)
        .collect();
    Ok(EncodeMatrix { fwd: M4rTable::new(&rows), inv: M4rTable::new(&inv_rows), rows, inv_rows })
}

impl<F: BinaryField> EncodeMatrix<F> {
    pub fn rows(&self) -> &[F::Elem] {
        &self.rows
    }

    pub fn inv_rows(&self) -> &[F::Elem] {
        &self.inv_rows
    }

    pub fn forward_table(&self) -> &M4rTable<F> {
        &self.fwd
    }

    pub fn inverse_table(&self) -> &M4rTable<F> {
        &self.inv
    }

    /// Flips one bit of one forward lookup entry. Fault injection for the
    /// self-test; never used by the multiplier.
    #[doc(hidden)]
    pub fn corrupt_forward_table(&mut self) {
        let e = &mut self.fwd.table[17];
        *e ^= F::Elem::ONE;
    }
}

/// `x * E` with four-Russians lookups.
pub fn m4r_mat_vec<F: BinaryField>(e: &EncodeMatrix<F>, x: u128) -> F::Elem {
    e.fwd.mul_vec(x)
}

/// In-place transpose of a 64x64 bit matrix (`block[r]` bit `c` is entry
/// `(r, c)`), by recursively swapping the off-diagonal quadrants.
pub fn bit_transpose_64(block: &mut [u64; 64]) {
    let mut j = 32;
    let mut mask: u64 = 0x0000_0000_ffff_ffff;
    while j != 0 {
        let mut k = 0;
        while k < 64 {
            let t = ((block[k] >> j) ^ block[k + j]) & mask;
            block[k] ^= t << j;
            block[k + j] ^= t;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        mask ^= mask << j;
    }
}

fn check_len(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Encodes `a` (novel-basis coefficients, length `m * n_p`) into the `n_p`
/// field elements consumed by the remaining butterfly layers.
pub fn encode<F: BinaryField>(a: &BitPoly, spec: &PartitionSpec, e: &EncodeMatrix<F>) -> Result<Vec<F::Elem>> {
    check_len(a.len(), spec.n_bits())?;
    let n_p = spec.n_points();
    if n_p < 64 {
        return Ok(encode_scalar(a, spec, e));
    }
    let m = F::DEGREE;
    let words = a.words();
    let stride = n_p / 64;
    let mut out = Vec::with_capacity(n_p);
    let mut lo = [0u64; 64];
    let mut hi = [0u64; 64];
    for w in 0..stride {
        // Row j of the gathered block is bits [j n_p + 64 w, .. + 64).
        lo.fill(0);
        for (j, row) in lo.iter_mut().enumerate().take(m.min(64)) {
            *row = words[j * stride + w];
        }
        bit_transpose_64(&mut lo);
        if m > 64 {
            for (j, row) in hi.iter_mut().enumerate() {
                *row = words[(j + 64) * stride + w];
            }
            bit_transpose_64(&mut hi);
        }
        for i in 0..64 {
            let x = lo[i] as u128 | (hi[i] as u128) << 64;
            out.push(e.fwd.mul_vec(x));
        }
    }
    Ok(out)
}

/// Reference encode: collects the `m` bits of each index one by one.
pub fn encode_scalar<F: BinaryField>(a: &BitPoly, spec: &PartitionSpec, e: &EncodeMatrix<F>) -> Vec<F::Elem> {
    let n_p = spec.n_points();
    (0..n_p)
        .map(|i| {
            let x = (0..F::DEGREE).fold(0u128, |x, j| x | (a.bit(j * n_p + i) as u128) << j);
            e.fwd.mul_vec(x)
        })
        .collect()
}

/// Inverse of [`encode`].
pub fn decode<F: BinaryField>(v: &[F::Elem], spec: &PartitionSpec, e: &EncodeMatrix<F>) -> Result<BitPoly> {
    let n_p = spec.n_points();
    check_len(v.len(), n_p)?;
    let m = F::DEGREE;
    let mut out = BitPoly::zero(spec.n_bits());
    if n_p < 64 {
        for (i, &f) in v.iter().enumerate() {
            let x = e.inv.mul_vec(f.to_u128()).to_u128();
            for j in 0..m {
                if (x >> j) & 1 == 1 {
                    out.set_bit(j * n_p + i, true);
                }
            }
        }
        return Ok(out);
    }
    let stride = n_p / 64;
    let words = out.words_mut();
    let mut lo = [0u64; 64];
    let mut hi = [0u64; 64];
    for (w, chunk) in v.chunks_exact(64).enumerate() {
        for (i, &f) in chunk.iter().enumerate() {
            let x = e.inv.mul_vec(f.to_u128()).to_u128();
            lo[i] = x as u64;
            hi[i] = (x >> 64) as u64;
        }
        bit_transpose_64(&mut lo);
        for (j, &row) in lo.iter().enumerate().take(m.min(64)) {
            words[j * stride + w] = row;
        }
        if m > 64 {
            bit_transpose_64(&mut hi);
            for (j, &row) in hi.iter().enumerate() {
                words[(j + 64) * stride + w] = row;
            }
        }
    }
    Ok(out)
}

/// `Sigma` and its images under repeated squaring, as explicit point sets.
#[derive(Clone, Debug)]
pub struct PartitionSets {
    /// `iterates[j]` is `phi^j(Sigma)`; `iterates[0]` is `Sigma` itself.
    pub iterates: Vec<Vec<CantorVec>>,
}

impl PartitionSets {
    pub fn sigma(&self) -> &[CantorVec] {
        &self.iterates[0]
    }
}

/// Enumerates `Sigma, phi(Sigma), ..., phi^(m-1)(Sigma)`. Only for GF(2^16).
pub fn enumerate_partition<F: BinaryField>(spec: &PartitionSpec, params: &FieldParams<F>) -> Result<PartitionSets> {
    if F::DEGREE > 16 {
        return Err(Error::FieldTooLarge(F::DEGREE));
    }
    let sigma: Vec<CantorVec> = (0..spec.n_points() as u128).map(|u| spec.base() ^ CantorVec(u)).collect();
    let mut iterates = vec![sigma];
    for j in 1..F::DEGREE {
        let next = iterates[j - 1].iter().map(|&c| params.poly_to_cantor(F::sqr(params.cantor_to_poly(c)))).collect();
        iterates.push(next);
    }
    Ok(PartitionSets { iterates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Gf128, Gf16, Gf64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partition_bounds() {
        assert!(PartitionSpec::new(64, 31).is_ok());
        assert!(matches!(PartitionSpec::new(64, 32), Err(Error::PartitionTooLarge { l: 32, .. })));
        let s = PartitionSpec::new(16, 3).unwrap();
        assert_eq!(s.base(), CantorVec::unit(11));
        assert_eq!(s.n_points(), 8);
        assert_eq!(s.n_bits(), 128);
    }

    fn check_rows<F: BinaryField>() {
        let p = FieldParams::<F>::new().unwrap();
        let e = build_encode_matrix(&p).unwrap();
        let half = F::DEGREE / 2;
        assert_eq!(e.rows()[0], F::Elem::ONE);
        assert_eq!(e.rows()[1], p.basis(half));
        assert_eq!(e.rows()[2], p.basis(half - 1));
        assert_eq!(e.rows()[3], F::mul(p.basis(half), p.basis(half - 1)));
        let wide: Vec<u128> = e.rows().iter().map(|r| r.to_u128()).collect();
        let inv: Vec<u128> = e.inv_rows().iter().map(|r| r.to_u128()).collect();
        let id: Vec<u128> = (0..F::DEGREE).map(|k| 1u128 << k).collect();
        assert_eq!(bitmat::mat_mul(&wide, &inv), id);
    }

    #[test]
    fn encode_matrix_rows_and_inverse() {
        check_rows::<Gf16>();
        check_rows::<Gf64>();
        check_rows::<Gf128>();
    }

    #[test]
    fn multipliers_below_half_degree_stay_in_a_subfield() {
        // Products of v_{m/2-1}, .., v_{m/2-log m} all lie in V_{m/2}, a
        // subfield, so rows built from them cannot span GF(2^m).
        let p = FieldParams::<Gf64>::new().unwrap();
        let shifted: Vec<u64> = (0..6).map(|k| p.basis(31 - k)).collect();
        let rows: Vec<u128> = encode_rows::<Gf64>(&shifted).iter().map(|&r| r as u128).collect();
        assert!(bitmat::rank(&rows) <= 32);
    }

    #[test]
    fn m4r_tables_match_row_xor() {
        let p = FieldParams::<Gf128>::new().unwrap();
        let e = build_encode_matrix(&p).unwrap();
        let wide: Vec<u128> = e.rows().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(m4r_mat_vec(&e, 0), 0);
        for j in 0..128 {
            assert_eq!(m4r_mat_vec(&e, 1u128 << j), e.rows()[j]);
        }
        for _ in 0..1000 {
            let x: u128 = rng.gen();
            assert_eq!(m4r_mat_vec(&e, x), bitmat::vec_mul(x, &wide));
        }
        for (c, t) in e.forward_table().entries().chunks(16).enumerate() {
            for (idx, &entry) in t.iter().enumerate() {
                assert_eq!(entry, bitmat::vec_mul((idx as u128) << (4 * c), &wide));
            }
        }
    }

    #[test]
    fn transpose_basics() {
        let mut id = [0u64; 64];
        for (i, row) in id.iter_mut().enumerate() {
            *row = 1 << i;
        }
        let mut t = id;
        bit_transpose_64(&mut t);
        assert_eq!(t, id);

        let mut one = [0u64; 64];
        one[3] = 1 << 50;
        bit_transpose_64(&mut one);
        let mut want = [0u64; 64];
        want[50] = 1 << 3;
        assert_eq!(one, want);
    }

    fn check_round_trip<F: BinaryField>(ls: &[u32]) {
        let p = FieldParams::<F>::new().unwrap();
        let e = build_encode_matrix(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &l in ls {
            let spec = PartitionSpec::new(F::DEGREE, l).unwrap();
            let a = BitPoly::random(spec.n_bits(), &mut rng);
            let f = encode(&a, &spec, &e).unwrap();
            assert_eq!(f, encode_scalar(&a, &spec, &e), "l={l}");
            assert_eq!(decode(&f, &spec, &e).unwrap(), a, "l={l}");
        }
    }

    #[test]
    fn round_trips() {
        check_round_trip::<Gf16>(&[0, 3, 5, 6, 7]);
        check_round_trip::<Gf64>(&[0, 5, 6, 7, 10]);
        check_round_trip::<Gf128>(&[0, 5, 6, 8]);
    }

    #[test]
    fn unit_probe() {
        let p = FieldParams::<Gf64>::new().unwrap();
        let e = build_encode_matrix(&p).unwrap();
        let spec = PartitionSpec::new(64, 7).unwrap();
        let n_p = spec.n_points();
        for (j, i) in [(0usize, 0usize), (5, 100), (63, 127)] {
            let mut a = BitPoly::zero(spec.n_bits());
            a.set_bit(j * n_p + i, true);
            let f = encode(&a, &spec, &e).unwrap();
            for (k, &fk) in f.iter().enumerate() {
                assert_eq!(fk, if k == i { e.rows()[j] } else { 0 });
            }
            assert_eq!(decode(&f, &spec, &e).unwrap(), a);
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let p = FieldParams::<Gf64>::new().unwrap();
        let e = build_encode_matrix(&p).unwrap();
        let spec = PartitionSpec::new(64, 2).unwrap();
        assert!(encode(&BitPoly::zero(100), &spec, &e).is_err());
        assert!(decode(&[0u64; 3], &spec, &e).is_err());
    }

    #[test]
    fn enumerate_rejects_large_fields() {
        let p = FieldParams::<Gf64>::new().unwrap();
        let spec = PartitionSpec::new(64, 1).unwrap();
        assert!(matches!(enumerate_partition(&spec, &p), Err(Error::FieldTooLarge(64))));
    }
}
