//! Conversion between the monomial basis and the novel polynomial basis.
//!
//! The novel polynomial basis element `X_k` is the product of the subspace
//! polynomials `s_i` over the set bits `i` of `k`. Over a Cantor basis,
//! `s_{2^j}(x) = x^(2^(2^j)) + x` has only two terms, so dividing by it
//! (or by any of its `2^r`-th powers, `x^(D 2^r) + x^(2^r)`) is a shifted
//! XOR of one block into another.
//!
//! The recursive conversion expands to a fixed sequence of such division
//! passes. Each pass touches every chunk of the buffer in the same way, so
//! the sequence is computed once per length and then run iteratively over
//! the packed words. Consecutive passes whose chunks fit in one word are
//! fused into a single sweep; passes whose chunks fit in a cache block are
//! run block by block.

use crate::bitpoly::BitPoly;
use crate::{Error, Result};

/// Chunk bound (in bits) under which consecutive passes are run block by
/// block rather than each over the whole buffer.
const CACHE_BLOCK_BITS: usize = 1 << 18;

/// One division of every `2 * d * unit`-bit chunk by `x^(d*unit) + x^unit`,
/// where polynomial coefficients are `stride`-bit blocks and `unit` is
/// already scaled by the stride.
///
/// Within a chunk, with `u = unit` and shift `(d - 1) * u`:
///   1. bits `[(d+1)u, 2du)` XOR into `[2u, (d+1)u)`
///   2. bits `[du, (d+1)u)` XOR into `[u, 2u)`
///
/// Both steps only move higher bits into lower ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pass {
    unit: usize,
    d: usize,
}

impl Pass {
    #[inline]
    fn chunk(self) -> usize {
        2 * self.d * self.unit
    }

    #[inline]
    fn shift(self) -> usize {
        (self.d - 1) * self.unit
    }

    /// Masks for the two source ranges, replicated over a 64-bit word.
    fn word_masks(self) -> (u64, u64) {
        let (u, d, c) = (self.unit, self.d, self.chunk());
        debug_assert!(c <= 64);
        let range = |lo: usize, hi: usize| -> u64 {
            let mut m = 0u64;
            let mut base = 0;
            while base < 64 {
                for b in lo..hi {
                    m |= 1 << (base + b);
                }
                base += c;
            }
            m
        };
        (range((d + 1) * u, 2 * d * u), range(d * u, (d + 1) * u))
    }
}

fn schedule(log_len: u32, stride: usize, out: &mut Vec<Pass>) {
    if log_len <= 1 {
        return;
    }
    // Largest power of two i with 2^i < len, i.e. i <= log_len - 1.
    let i = 1u32 << (log_len - 1).ilog2();
    let d = 1usize << i;
    let log_blocks = log_len - i;
    // Expand in powers of s_i: f = sum_t h_t(x) s_i(x)^t.
    for r in (0..log_blocks).rev() {
        out.push(Pass { unit: (1 << r) * stride, d });
    }
    // Convert the outer polynomial in s_i, whose coefficients are d-bit blocks,
    schedule(log_blocks, stride * d, out);
    // then each block.
    schedule(i, stride, out);
}

fn passes_for(n_bits: usize) -> Result<Vec<Pass>> {
    if !n_bits.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_bits));
    }
    let mut out = Vec::new();
    schedule(n_bits.ilog2(), 1, &mut out);
    Ok(out)
}

#[inline]
fn get_bits(words: &[u64], pos: usize) -> u64 {
    let (q, r) = (pos / 64, pos % 64);
    let lo = words.get(q).copied().unwrap_or(0) >> r;
    if r == 0 {
        lo
    } else {
        lo | words.get(q + 1).copied().unwrap_or(0) << (64 - r)
    }
}

/// Slow path of [`xor_bit_range`] for fewer than 64 bits or a partial word.
fn xor_bits_short(words: &mut [u64], src: usize, dst: usize, len: usize) {
    let mut done = 0;
    while done < len {
        let pos = dst + done;
        let off = pos % 64;
        let take = (64 - off).min(len - done);
        let mask = if take == 64 { u64::MAX } else { ((1u64 << take) - 1) << off };
        let bits = get_bits(words, src + done) << off;
        words[pos / 64] ^= bits & mask;
        done += take;
    }
}

/// XORs bits `[src, src + len)` into `[dst, dst + len)`, with `dst < src`
/// and the two ranges disjoint.
fn xor_bit_range(words: &mut [u64], src: usize, dst: usize, len: usize) {
    debug_assert!(dst + len <= src);
    let head = ((64 - dst % 64) % 64).min(len);
    xor_bits_short(words, src, dst, head);
    let (src, dst, len) = (src + head, dst + head, len - head);
    let full = len / 64;
    let (q, s, r) = (dst / 64, src / 64, src % 64);
    // The destination words end at or before the word holding bit `src`.
    let (lo, hi) = words.split_at_mut(q + full);
    let out = &mut lo[q..];
    let hi = &hi[s - q - full..];
    if r == 0 {
        for (d, x) in out.iter_mut().zip(hi) {
            *d ^= *x;
        }
    } else {
        for (d, x) in out.iter_mut().zip(hi.windows(2)) {
            *d ^= x[0] >> r | x[1] << (64 - r);
        }
    }
    xor_bits_short(words, src + 64 * full, dst + 64 * full, len % 64);
}

/// Largest chunk, in bits, for which a pass is unrolled into word ops.
const UNROLL_CHUNK_BITS: usize = 1 << 12;

/// One word of a pass within a chunk: `w[dst] ^= bits(src_bit..) & mask`,
/// with word indices relative to the chunk.
#[derive(Clone, Copy, Debug)]
struct WordOp {
    dst: usize,
    src_word: usize,
    src_shift: u32,
    mask: u64,
}

fn range_ops(src: usize, dst: usize, len: usize, ops: &mut Vec<WordOp>) {
    let mut done = 0;
    while done < len {
        let pos = dst + done;
        let off = pos % 64;
        let take = (64 - off).min(len - done);
        let mask = if take == 64 { u64::MAX } else { ((1u64 << take) - 1) << off };
        // Bits of the source aligned to word `pos / 64`.
        let from = src + done - off;
        ops.push(WordOp { dst: pos / 64, src_word: from / 64, src_shift: (from % 64) as u32, mask });
        done += take;
    }
}

fn unrolled_ops(p: Pass, inverse: bool) -> Vec<WordOp> {
    let (u, d, sh) = (p.unit, p.d, p.shift());
    let mut step1 = Vec::new();
    let mut step2 = Vec::new();
    range_ops((d + 1) * u, 2 * u, (d - 1) * u, &mut step1);
    range_ops(d * u, d * u - sh, u, &mut step2);
    if inverse {
        step2.extend(step1);
        step2
    } else {
        step1.extend(step2);
        step1
    }
}

fn apply_unrolled(words: &mut [u64], chunk_words: usize, ops: &[WordOp]) {
    for c in words.chunks_exact_mut(chunk_words) {
        for op in ops {
            let lo = c[op.src_word];
            let bits = if op.src_shift == 0 {
                lo
            } else {
                let hi = c.get(op.src_word + 1).copied().unwrap_or(0);
                lo >> op.src_shift | hi << (64 - op.src_shift)
            };
            c[op.dst] ^= bits & op.mask;
        }
    }
}

fn apply_pass(words: &mut [u64], n_bits: usize, p: Pass, inverse: bool) {
    let (u, d, sh) = (p.unit, p.d, p.shift());
    let step1 = |w: &mut [u64], base: usize| xor_bit_range(w, base + (d + 1) * u, base + 2 * u, (d - 1) * u);
    let step2 = |w: &mut [u64], base: usize| xor_bit_range(w, base + d * u, base + d * u - sh, u);
    for base in (0..n_bits).step_by(p.chunk()) {
        if inverse {
            step2(words, base);
            step1(words, base);
        } else {
            step1(words, base);
            step2(words, base);
        }
    }
}

/// Runs a group of sub-word passes, in the given order, on each word.
fn apply_word_group(words: &mut [u64], group: &[Pass], inverse: bool) {
    let ops: Vec<(u64, u64, u32)> = group
        .iter()
        .map(|p| {
            let (m1, m2) = p.word_masks();
            if inverse {
                (m2, m1, p.shift() as u32)
            } else {
                (m1, m2, p.shift() as u32)
            }
        })
        .collect();
    for w in words.iter_mut() {
        let mut x = *w;
        for &(m1, m2, sh) in &ops {
            x ^= (x & m1) >> sh;
            x ^= (x & m2) >> sh;
        }
        *w = x;
    }
}

/// A group of sub-word passes as a GF(2)-linear map on one word, applied
/// byte by byte through lookup tables.
struct WordMap {
    tables: Box<[[u64; 256]; 8]>,
}

impl WordMap {
    fn new(group: &[Pass], inverse: bool) -> Self {
        let mut cols = [0u64; 64];
        for (j, c) in cols.iter_mut().enumerate() {
            let mut w = [1u64 << j];
            apply_word_group(&mut w, group, inverse);
            *c = w[0];
        }
        let mut tables = Box::new([[0u64; 256]; 8]);
        for (k, t) in tables.iter_mut().enumerate() {
            for b in 1..256usize {
                let low = b.trailing_zeros() as usize;
                t[b] = t[b & (b - 1)] ^ cols[8 * k + low];
            }
        }
        Self { tables }
    }

    fn apply(&self, words: &mut [u64]) {
        let t = &*self.tables;
        for w in words.iter_mut() {
            let x = w.to_le_bytes();
            *w = t[0][x[0] as usize]
                ^ t[1][x[1] as usize]
                ^ t[2][x[2] as usize]
                ^ t[3][x[3] as usize]
                ^ t[4][x[4] as usize]
                ^ t[5][x[5] as usize]
                ^ t[6][x[6] as usize]
                ^ t[7][x[7] as usize];
        }
    }
}

fn run(poly: &mut BitPoly, inverse: bool) -> Result<()> {
    let n_bits = poly.len();
    let mut passes = passes_for(n_bits)?;
    if inverse {
        passes.reverse();
    }
    let words = poly.words_mut();
    if n_bits < 64 {
        // A single partial word: run every pass as a word group.
        apply_word_group(words, &passes, inverse);
        return Ok(());
    }

    let block = CACHE_BLOCK_BITS.min(n_bits);
    let mut i = 0;
    while i < passes.len() {
        if passes[i].chunk() > block {
            apply_pass(words, n_bits, passes[i], inverse);
            i += 1;
            continue;
        }
        let j = i + passes[i..].iter().take_while(|p| p.chunk() <= block).count();
        let steps = block_steps(&passes[i..j], inverse);
        for blk in words.chunks_mut(block / 64) {
            for step in &steps {
                match step {
                    BlockStep::Words(map) => map.apply(blk),
                    BlockStep::Unrolled(chunk_words, ops) => apply_unrolled(blk, *chunk_words, ops),
                    BlockStep::Pass(p) => apply_pass(blk, block, *p, inverse),
                }
            }
        }
        i = j;
    }
    Ok(())
}

/// How one pass, or a run of sub-word passes, is executed inside a block.
enum BlockStep {
    Words(WordMap),
    Unrolled(usize, Vec<WordOp>),
    Pass(Pass),
}

fn block_steps(passes: &[Pass], inverse: bool) -> Vec<BlockStep> {
    let mut steps = Vec::new();
    let mut i = 0;
    while i < passes.len() {
        let p = passes[i];
        if p.chunk() <= 64 {
            let j = i + passes[i..].iter().take_while(|q| q.chunk() <= 64).count();
            steps.push(BlockStep::Words(WordMap::new(&passes[i..j], inverse)));
            i = j;
            continue;
        }
        if p.chunk() <= UNROLL_CHUNK_BITS {
            steps.push(BlockStep::Unrolled(p.chunk() / 64, unrolled_ops(p, inverse)));
        } else {
            steps.push(BlockStep::Pass(p));
        }
        i += 1;
    }
    steps
}

/// Monomial basis to novel polynomial basis, in place.
///
/// Afterwards bit `k` holds `g_k` with `f(x) = sum_k g_k X_k(x)`. The length
/// must be a power of two; callers zero-pad.
pub fn basis_cvt(poly: &mut BitPoly) -> Result<()> {
    run(poly, false)
}

/// Novel polynomial basis to monomial basis, in place. Exact inverse of
/// [`basis_cvt`].
pub fn i_basis_cvt(poly: &mut BitPoly) -> Result<()> {
    run(poly, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(bits: &[u8]) -> BitPoly {
        BitPoly::from_bits(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    /// Bit-at-a-time reference: every pass over the whole buffer.
    fn run_unfused(p: &mut BitPoly, inverse: bool) {
        let n = p.len();
        let mut passes = passes_for(n).unwrap();
        if inverse {
            passes.reverse();
        }
        let xor_range = |p: &mut BitPoly, src: usize, dst: usize, len: usize| {
            for k in 0..len {
                let b = p.bit(dst + k) ^ p.bit(src + k);
                p.set_bit(dst + k, b);
            }
        };
        for Pass { unit: u, d } in passes {
            for base in (0..n).step_by(2 * d * u) {
                let step1 = |p: &mut BitPoly| xor_range(p, base + (d + 1) * u, base + 2 * u, (d - 1) * u);
                let step2 = |p: &mut BitPoly| xor_range(p, base + d * u, base + u, u);
                if inverse {
                    step2(p);
                    step1(p);
                } else {
                    step1(p);
                    step2(p);
                }
            }
        }
    }

    #[test]
    fn unaligned_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (src, dst, len) in [(300, 5, 200), (128, 64, 64), (190, 1, 189), (77, 13, 3), (600, 70, 400)] {
            let orig = BitPoly::random(1024, &mut rng);
            let mut fast = orig.clone();
            xor_bit_range(fast.words_mut(), src, dst, len);
            let mut slow = orig.clone();
            for k in 0..len {
                slow.set_bit(dst + k, orig.bit(dst + k) ^ orig.bit(src + k));
            }
            assert_eq!(fast, slow, "{src} {dst} {len}");
        }
    }

    #[test]
    fn length_two_is_identity() {
        let mut p = poly(&[1, 1]);
        basis_cvt(&mut p).unwrap();
        assert_eq!(p, poly(&[1, 1]));
    }

    #[test]
    fn length_four_table() {
        for f in 0u8..16 {
            let bits = [f & 1, (f >> 1) & 1, (f >> 2) & 1, (f >> 3) & 1];
            let mut p = poly(&bits);
            basis_cvt(&mut p).unwrap();
            let [f0, f1, f2, f3] = bits;
            assert_eq!(p, poly(&[f0, f1 ^ f2 ^ f3, f2 ^ f3, f3]));
            i_basis_cvt(&mut p).unwrap();
            assert_eq!(p, poly(&bits));
        }
        let mut p = poly(&[0, 1, 0, 1]);
        basis_cvt(&mut p).unwrap();
        assert_eq!(p, poly(&[0, 0, 1, 1]));
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(basis_cvt(&mut BitPoly::zero(12)), Err(Error::NotPowerOfTwo(12))));
        assert!(i_basis_cvt(&mut BitPoly::zero(0)).is_err());
    }

    #[test]
    fn zero_stays_zero() {
        let mut p = BitPoly::zero(1 << 12);
        basis_cvt(&mut p).unwrap();
        assert!(p.is_zero());
        i_basis_cvt(&mut p).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn fused_schedule_matches_unfused() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for log in 1..=20 {
            let f = BitPoly::random(1 << log, &mut rng);
            let (mut a, mut b) = (f.clone(), f.clone());
            basis_cvt(&mut a).unwrap();
            run_unfused(&mut b, false);
            assert_eq!(a, b, "forward, log {log}");
            i_basis_cvt(&mut a).unwrap();
            run_unfused(&mut b, true);
            assert_eq!(a, f, "inverse, log {log}");
            assert_eq!(b, f);
        }
    }

    #[test]
    fn only_moves_high_bits_down() {
        // The top coefficient is never written, and g_0 = f_0 + (terms above).
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = BitPoly::random(1 << 10, &mut rng);
        let mut g = f.clone();
        basis_cvt(&mut g).unwrap();
        assert_eq!(g.bit(1023), f.bit(1023));
    }
}
