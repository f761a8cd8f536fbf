//! Packed GF(2)[x] polynomials.

use std::fmt;
use std::ops::BitXorAssign;

use rand::Rng;

/// A polynomial over GF(2) stored as packed 64-bit words.
///
/// Coefficient `k` lives at bit `k % 64` of word `k / 64`. `n_bits` is the
/// logical length (number of coefficients); bits at or above it are always
/// zero. The length is not the degree: trailing zero coefficients are
/// allowed and preserved until [`BitPoly::trim`] is called.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitPoly {
    words: Vec<u64>,
    n_bits: usize,
}

#[inline]
pub(crate) fn words_for(n_bits: usize) -> usize {
    n_bits.div_ceil(64)
}

impl BitPoly {
    pub fn zero(n_bits: usize) -> Self {
        Self { words: vec![0; words_for(n_bits)], n_bits }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `x^k`, with length `k + 1`.
    pub fn monomial(k: usize) -> Self {
        let mut p = Self::zero(k + 1);
        p.set_bit(k, true);
        p
    }

    /// Builds a polynomial from packed words. Words beyond `n_bits` are
    /// dropped, missing words are zero, and stray high bits are cleared.
    pub fn from_words(mut words: Vec<u64>, n_bits: usize) -> Self {
        words.resize(words_for(n_bits), 0);
        let mut p = Self { words, n_bits };
        p.clear_tail();
        p
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut p = Self::zero(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            p.set_bit(k, b);
        }
        p
    }

    /// Uniformly random coefficients of length `n_bits`.
    pub fn random<R: Rng + ?Sized>(n_bits: usize, rng: &mut R) -> Self {
        let words = (0..words_for(n_bits)).map(|_| rng.gen()).collect();
        Self::from_words(words, n_bits)
    }

    /// Reads the little-endian byte format: coefficient `k` is bit `k % 8`
    /// of byte `k / 8`. The result is trimmed to its degree.
    pub fn from_le_bytes(bytes: &[u8]) -> Self {
        let words = bytes
            .chunks(8)
            .map(|c| {
                let mut buf = [0u8; 8];
                buf[..c.len()].copy_from_slice(c);
                u64::from_le_bytes(buf)
            })
            .collect();
        let mut p = Self::from_words(words, bytes.len() * 8);
        p.trim();
        p
    }

    /// Writes the little-endian byte format with trailing zero bytes removed.
    /// The zero polynomial encodes as an empty payload.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let n_bytes = deg / 8 + 1;
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(n_bytes);
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_bits
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mutable word access. Callers must keep bits at or above `len()` clear.
    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    #[inline]
    pub fn bit(&self, k: usize) -> bool {
        k < self.n_bits && (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    /// Panics if `k >= len()`.
    #[inline]
    pub fn set_bit(&mut self, k: usize, value: bool) {
        assert!(k < self.n_bits, "bit {k} out of range for length {}", self.n_bits);
        let mask = 1u64 << (k % 64);
        if value {
            self.words[k / 64] |= mask;
        } else {
            self.words[k / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the highest nonzero coefficient, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.words.iter().rposition(|&w| w != 0).map(|i| i * 64 + 63 - self.words[i].leading_zeros() as usize)
    }

    /// Shrinks the length to `degree + 1` (0 for the zero polynomial).
    pub fn trim(&mut self) {
        let n = self.degree().map_or(0, |d| d + 1);
        self.resize(n);
    }

    pub fn trimmed(mut self) -> Self {
        self.trim();
        self
    }

    /// Changes the logical length, zero-extending or truncating.
    pub fn resize(&mut self, n_bits: usize) {
        self.words.resize(words_for(n_bits), 0);
        self.n_bits = n_bits;
        self.clear_tail();
    }

    pub fn resized(mut self, n_bits: usize) -> Self {
        self.resize(n_bits);
        self
    }

    fn clear_tail(&mut self) {
        let r = self.n_bits % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl BitXorAssign<&BitPoly> for BitPoly {
    /// Adds `rhs`, growing `self` if `rhs` is longer.
    fn bitxor_assign(&mut self, rhs: &BitPoly) {
        if rhs.n_bits > self.n_bits {
            self.resize(rhs.n_bits);
        }
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({} bits", self.n_bits)?;
        if self.n_bits <= 256 {
            f.write_str(": ")?;
            for k in 0..self.n_bits {
                f.write_str(if self.bit(k) { "1" } else { "0" })?;
            }
        }
        f.write_str(")")
    }
}
