//! Binary field arithmetic in polynomial representation.
//!
//! | field      | reduction polynomial              |
//! |------------|-----------------------------------|
//! | GF(2^16)   | x^16 + x^5 + x^3 + x + 1          |
//! | GF(2^64)   | x^64 + x^4 + x^3 + x + 1          |
//! | GF(2^128)  | x^128 + x^7 + x^2 + x + 1         |
//!
//! GF(2^16) exists so that structural properties can be checked
//! exhaustively; the multiplier itself runs over GF(2^64) or GF(2^128).
//!
//! Multiplication uses the carryless multiply instruction when the CPU has
//! one. The portable path is bit-identical.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{BitAnd, BitXor, BitXorAssign};

/// Unsigned integer backing one field element.
pub trait FieldWord:
    Copy
    + Eq
    + Ord
    + Hash
    + Default
    + Debug
    + Send
    + Sync
    + 'static
    + BitXor<Output = Self>
    + BitXorAssign
    + BitAnd<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;

    fn to_u128(self) -> u128;
    /// Truncates to the width of `Self`.
    fn from_u128(v: u128) -> Self;
}

macro_rules! impl_word {
    ($($t:ty),*) => {$(
        impl FieldWord for $t {
            const ZERO: Self = 0;
            const ONE: Self = 1;
            #[inline(always)]
            fn to_u128(self) -> u128 {
                self as u128
            }
            #[inline(always)]
            fn from_u128(v: u128) -> Self {
                v as $t
            }
        }
    )*};
}
impl_word!(u16, u64, u128);

/// A binary field GF(2^m) with `m` a power of two.
pub trait BinaryField: Copy + Debug + Default + Send + Sync + 'static {
    type Elem: FieldWord;

    const DEGREE: usize;
    const LOG_DEGREE: u32;
    /// The reduction polynomial without its leading `x^m` term.
    const MODULUS_TAIL: u128;

    /// Field product, using hardware carryless multiplication if available.
    fn mul(a: Self::Elem, b: Self::Elem) -> Self::Elem;

    /// Field product without any platform-specific instructions.
    fn mul_portable(a: Self::Elem, b: Self::Elem) -> Self::Elem;

    #[inline(always)]
    fn add(a: Self::Elem, b: Self::Elem) -> Self::Elem {
        a ^ b
    }

    /// The Frobenius map `a -> a^2`.
    #[inline(always)]
    fn sqr(a: Self::Elem) -> Self::Elem {
        Self::mul(a, a)
    }

    /// `a^(2^k)`.
    fn frobenius(mut a: Self::Elem, k: usize) -> Self::Elem {
        for _ in 0..k {
            a = Self::sqr(a);
        }
        a
    }
}

pub fn gf_add<F: BinaryField>(a: F::Elem, b: F::Elem) -> F::Elem {
    F::add(a, b)
}

pub fn gf_mul<F: BinaryField>(a: F::Elem, b: F::Elem) -> F::Elem {
    F::mul(a, b)
}

pub fn gf_sqr<F: BinaryField>(a: F::Elem) -> F::Elem {
    F::sqr(a)
}

/// Carryless 64x64 -> 128 product, portable.
#[inline]
pub fn clmul64_portable(a: u64, b: u64) -> u128 {
    let a = a as u128;
    let mut acc = 0u128;
    for i in 0..64 {
        let mask = 0u128.wrapping_sub(((b >> i) & 1) as u128);
        acc ^= (a << i) & mask;
    }
    acc
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use core::arch::x86_64::{__m128i, _mm_clmulepi64_si128, _mm_set_epi64x};

    #[inline]
    #[target_feature(enable = "pclmulqdq,sse2")]
    pub fn clmul64(a: u64, b: u64) -> u128 {
        let x = _mm_set_epi64x(0, a as i64);
        let y = _mm_set_epi64x(0, b as i64);
        let r = _mm_clmulepi64_si128::<0x00>(x, y);
        // SAFETY: __m128i and u128 have the same size; x86_64 is little endian.
        unsafe { core::mem::transmute::<__m128i, u128>(r) }
    }

    #[target_feature(enable = "pclmulqdq,sse2")]
    pub fn clmul_words_xor(a: &[u64], b: &[u64], out: &mut [u64]) {
        for (i, &x) in a.iter().enumerate() {
            let row = &mut out[i..i + b.len() + 1];
            for (j, &y) in b.iter().enumerate() {
                let p = clmul64(x, y);
                row[j] ^= p as u64;
                row[j + 1] ^= (p >> 64) as u64;
            }
        }
    }
}

/// Whether the hardware carryless multiply path is in use.
#[inline]
pub fn has_hw_clmul() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("pclmulqdq")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// Carryless 64x64 -> 128 product.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    if has_hw_clmul() {
        // SAFETY: the pclmulqdq feature was detected at runtime.
        return unsafe { x86::clmul64(a, b) };
    }
    clmul64_portable(a, b)
}

/// XORs the schoolbook carryless product of two word strings into `out`,
/// which needs at least `a.len() + b.len()` words.
pub(crate) fn clmul_words_xor(a: &[u64], b: &[u64], out: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    if has_hw_clmul() {
        // SAFETY: the pclmulqdq feature was detected at runtime.
        unsafe { x86::clmul_words_xor(a, b, out) };
        return;
    }
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let p = clmul64_portable(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

/// Karatsuba 128x128 -> 256 carryless product as `(hi, lo)`.
#[inline(always)]
fn clmul128_with(a: u128, b: u128, mul: impl Fn(u64, u64) -> u128) -> (u128, u128) {
    let (a0, a1) = (a as u64, (a >> 64) as u64);
    let (b0, b1) = (b as u64, (b >> 64) as u64);
    let lo = mul(a0, b0);
    let hi = mul(a1, b1);
    let mid = mul(a0 ^ a1, b0 ^ b1) ^ lo ^ hi;
    (hi ^ (mid >> 64), lo ^ (mid << 64))
}

/// Reduction modulo x^64 + x^4 + x^3 + x + 1.
#[inline(always)]
fn reduce64(p: u128) -> u64 {
    let lo = p as u64;
    let hi = (p >> 64) as u64;
    let t = hi ^ (hi << 1) ^ (hi << 3) ^ (hi << 4);
    let o = (hi >> 63) ^ (hi >> 61) ^ (hi >> 60);
    lo ^ t ^ o ^ (o << 1) ^ (o << 3) ^ (o << 4)
}

/// Reduction modulo x^128 + x^7 + x^2 + x + 1.
#[inline(always)]
fn reduce128(hi: u128, lo: u128) -> u128 {
    let t = hi ^ (hi << 1) ^ (hi << 2) ^ (hi << 7);
    let o = (hi >> 127) ^ (hi >> 126) ^ (hi >> 121);
    lo ^ t ^ o ^ (o << 1) ^ (o << 2) ^ (o << 7)
}

/// GF(2^16), test scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gf16;

/// GF(2^64).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gf64;

/// GF(2^128).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gf128;

impl Gf16 {
    #[inline(always)]
    fn reduce(p: u128) -> u16 {
        // p has degree <= 30; two folds of x^16 -> tail suffice.
        let mut p = p as u32;
        for _ in 0..2 {
            let hi = p >> 16;
            p = (p & 0xffff) ^ clmul64_portable(hi as u64, Self::MODULUS_TAIL as u64) as u32;
        }
        p as u16
    }
}

impl BinaryField for Gf16 {
    type Elem = u16;
    const DEGREE: usize = 16;
    const LOG_DEGREE: u32 = 4;
    const MODULUS_TAIL: u128 = 0b10_1011;

    #[inline]
    fn mul(a: u16, b: u16) -> u16 {
        Self::reduce(clmul64(a as u64, b as u64))
    }

    fn mul_portable(a: u16, b: u16) -> u16 {
        Self::reduce(clmul64_portable(a as u64, b as u64))
    }
}

impl BinaryField for Gf64 {
    type Elem = u64;
    const DEGREE: usize = 64;
    const LOG_DEGREE: u32 = 6;
    const MODULUS_TAIL: u128 = 0b1_1011;

    #[inline]
    fn mul(a: u64, b: u64) -> u64 {
        reduce64(clmul64(a, b))
    }

    fn mul_portable(a: u64, b: u64) -> u64 {
        reduce64(clmul64_portable(a, b))
    }
}

impl BinaryField for Gf128 {
    type Elem = u128;
    const DEGREE: usize = 128;
    const LOG_DEGREE: u32 = 7;
    const MODULUS_TAIL: u128 = 0b1000_0111;

    #[inline]
    fn mul(a: u128, b: u128) -> u128 {
        #[cfg(target_arch = "x86_64")]
        if has_hw_clmul() {
            // SAFETY: the pclmulqdq feature was detected at runtime.
            let (hi, lo) = clmul128_with(a, b, |x, y| unsafe { x86::clmul64(x, y) });
            return reduce128(hi, lo);
        }
        Self::mul_portable(a, b)
    }

    fn mul_portable(a: u128, b: u128) -> u128 {
        let (hi, lo) = clmul128_with(a, b, clmul64_portable);
        reduce128(hi, lo)
    }
}

/// Bit-serial shift-and-reduce product: the reference all fast paths are
/// checked against. Works for any `m <= 128` given the modulus tail.
pub fn mul_bit_serial(a: u128, b: u128, m: usize, tail: u128) -> u128 {
    let mask = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let top = 1u128 << (m - 1);
    let (mut a, mut b) = (a & mask, b & mask);
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        let carry = a & top != 0;
        a = (a << 1) & mask;
        if carry {
            a ^= tail;
        }
    }
    acc
}
