//! C interface to the `frobpoly` multiplier.
//!
//! Polynomials cross the boundary as arrays of little-endian `uint64_t`
//! words: coefficient `k` is bit `k % 64` of word `k / 64`. Lengths are in
//! bits. Every entry point returns a [`FrobpolyStatus`] and never unwinds
//! into the caller.

use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use frobpoly::{BitPoly, Error, FieldChoice, Multiplier};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobpolyStatus {
    Ok = 0,
    NullPointer = 1,
    BufferTooSmall = 2,
    TooLong = 3,
    InvalidArgument = 4,
    Panic = 5,
}

/// Field selection for [`frobpoly_multiplier_new`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobpolyField {
    Auto = 0,
    Gf64 = 64,
    Gf128 = 128,
}

/// Opaque multiplier handle.
pub struct FrobpolyMultiplier {
    inner: Multiplier,
}

fn status_of(e: &Error) -> FrobpolyStatus {
    match e {
        Error::TooLong { .. } | Error::PartitionTooLarge { .. } => FrobpolyStatus::TooLong,
        _ => FrobpolyStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> FrobpolyStatus) -> FrobpolyStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(FrobpolyStatus::Panic)
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// # Safety
/// `ptr` must point to `words_for(bits)` readable words, or may be null if
/// `bits` is 0.
unsafe fn read_poly(ptr: *const u64, bits: usize) -> Option<BitPoly> {
    if bits == 0 {
        return Some(BitPoly::zero(0));
    }
    if ptr.is_null() {
        return None;
    }
    let words = slice::from_raw_parts(ptr, words_for(bits));
    Some(BitPoly::from_words(words.to_vec(), bits))
}

/// Creates a multiplier. `field` is one of the [`FrobpolyField`] values:
/// 0 picks the field per input size, 64 and 128 force one.
/// On success `*out` receives a handle to release with
/// [`frobpoly_multiplier_free`].
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn frobpoly_multiplier_new(field: u32, out: *mut *mut FrobpolyMultiplier) -> FrobpolyStatus {
    guard(|| {
        if out.is_null() {
            return FrobpolyStatus::NullPointer;
        }
        let choice = match field {
            0 => FieldChoice::Auto,
            64 => FieldChoice::M64,
            128 => FieldChoice::M128,
            _ => return FrobpolyStatus::InvalidArgument,
        };
        let handle = Box::new(FrobpolyMultiplier { inner: Multiplier::new(choice) });
        *out = Box::into_raw(handle);
        FrobpolyStatus::Ok
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must be null or come from [`frobpoly_multiplier_new`], and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn frobpoly_multiplier_free(handle: *mut FrobpolyMultiplier) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of output words [`frobpoly_mul`] needs for operands of the given
/// bit lengths.
#[no_mangle]
pub extern "C" fn frobpoly_product_words(a_bits: usize, b_bits: usize) -> usize {
    if a_bits == 0 || b_bits == 0 {
        0
    } else {
        words_for(a_bits.saturating_add(b_bits) - 1)
    }
}

/// Computes `a * b`.
///
/// The product has `a_bits + b_bits - 1` bits (0 if either operand is
/// empty); that length is stored in `*out_bits` and the words written to
/// `out`. Unused high bits of the last word are zero. If `out_words` is too
/// small, nothing is written to `out`, `*out_bits` still receives the
/// required length, and `FROBPOLY_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `handle` must be a live handle. `a` and `b` must point to enough words
/// for their bit lengths (null is allowed for a length of 0). `out` must be
/// valid for `out_words` writes (null if `out_words` is 0), and `out_bits`
/// must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn frobpoly_mul(
    handle: *const FrobpolyMultiplier,
    a: *const u64,
    a_bits: usize,
    b: *const u64,
    b_bits: usize,
    out: *mut u64,
    out_words: usize,
    out_bits: *mut usize,
) -> FrobpolyStatus {
    guard(|| {
        if handle.is_null() || out_bits.is_null() {
            return FrobpolyStatus::NullPointer;
        }
        let (Some(pa), Some(pb)) = (read_poly(a, a_bits), read_poly(b, b_bits)) else {
            return FrobpolyStatus::NullPointer;
        };
        let need = frobpoly_product_words(a_bits, b_bits);
        if need > 0 && out.is_null() {
            return FrobpolyStatus::NullPointer;
        }
        *out_bits = if need == 0 { 0 } else { a_bits.saturating_add(b_bits) - 1 };
        if out_words < need {
            return FrobpolyStatus::BufferTooSmall;
        }
        let c = match (*handle).inner.mul(&pa, &pb) {
            Ok(c) => c,
            Err(e) => return status_of(&e),
        };
        if need > 0 {
            ptr::copy_nonoverlapping(c.words().as_ptr(), out, need);
        }
        FrobpolyStatus::Ok
    })
}

/// Static, NUL-terminated description of a status code. Unknown codes
/// get a generic message.
#[no_mangle]
pub extern "C" fn frobpoly_status_message(status: c_int) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer argument\0",
        2 => b"output buffer too small\0",
        3 => b"product too long for the selected field\0",
        4 => b"invalid argument\0",
        5 => b"internal error\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}
