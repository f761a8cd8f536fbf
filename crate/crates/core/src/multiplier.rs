//! End-to-end multiplication in GF(2)[x] and the reference multipliers.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use crate::bitpoly::{words_for, BitPoly};
use crate::cantor::FieldParams;
use crate::encode::{build_encode_matrix, decode, encode, EncodeMatrix, PartitionSpec};
use crate::fft::{i_lch_butterfly, lch_butterfly, plan_butterflies, ButterflyPlan};
use crate::field::{clmul64_portable, clmul_words_xor, BinaryField, FieldWord, Gf128, Gf16, Gf64};
use crate::poly_basis::{basis_cvt, i_basis_cvt};
use crate::{Error, Result};

/// Operands shorter than this many bits skip the FFT and use Karatsuba.
pub const FFT_THRESHOLD_BITS: usize = 1 << 18;

/// Which field the FFT runs over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FieldChoice {
    /// GF(2^64) unless the product is too long for it.
    #[default]
    Auto,
    M64,
    M128,
}

impl FromStr for FieldChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "64" => Ok(Self::M64),
            "128" => Ok(Self::M128),
            other => Err(Error::InvalidArgument(format!("unknown field {other:?}; expected auto, 64 or 128"))),
        }
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::M64 => "64",
            Self::M128 => "128",
        })
    }
}

/// Sizes for one multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MulPlan {
    /// Padded product length in bits, a power of two.
    pub n: usize,
    pub log_n: u32,
    pub m: usize,
    pub log_m: u32,
    /// `log_n - log_m`, the dimension of the evaluation set.
    pub l: u32,
    /// Number of evaluation points, `2^l`.
    pub n_p: usize,
    pub spec: PartitionSpec,
}

impl MulPlan {
    /// Plans a product of operands with `len_a` and `len_b` coefficients
    /// over GF(2^m).
    pub fn for_field(m: usize, len_a: usize, len_b: usize) -> Result<Self> {
        if len_a == 0 || len_b == 0 {
            return Err(Error::InvalidArgument("operand lengths must be at least 1".into()));
        }
        let log_m = m.ilog2();
        let wanted = 2 * len_a.max(len_b) as u128;
        let n = wanted.next_power_of_two().max(m as u128);
        let log_n = n.ilog2();
        let l = log_n - log_m;
        if l >= (m / 2) as u32 {
            return Err(Error::TooLong { n_bits: n, m, max_bits: (m as u128 / 2) << (m / 2) });
        }
        let n = usize::try_from(n).map_err(|_| Error::TooLong { n_bits: n, m, max_bits: usize::MAX as u128 })?;
        Ok(Self { n, log_n, m, log_m, l, n_p: 1 << l, spec: PartitionSpec::new(m, l)? })
    }
}

/// Picks the field and sizes for a product.
pub fn plan_mul(len_a: usize, len_b: usize, field: FieldChoice) -> Result<MulPlan> {
    match field {
        FieldChoice::M64 => MulPlan::for_field(64, len_a, len_b),
        FieldChoice::M128 => MulPlan::for_field(128, len_a, len_b),
        FieldChoice::Auto => match MulPlan::for_field(64, len_a, len_b) {
            Err(Error::TooLong { .. }) => MulPlan::for_field(128, len_a, len_b),
            other => other,
        },
    }
}

/// Immutable per-field tables shared by every multiplication.
pub struct FieldContext<F: BinaryField> {
    params: FieldParams<F>,
    encode: EncodeMatrix<F>,
    plans: Vec<OnceLock<ButterflyPlan<F>>>,
}

impl<F: BinaryField> FieldContext<F> {
    pub fn new() -> Result<Self> {
        let params = FieldParams::new()?;
        let encode = build_encode_matrix(&params)?;
        Ok(Self::from_parts(params, encode))
    }

    pub fn from_parts(params: FieldParams<F>, encode: EncodeMatrix<F>) -> Self {
        let plans = (0..F::DEGREE / 2).map(|_| OnceLock::new()).collect();
        Self { params, encode, plans }
    }

    pub fn params(&self) -> &FieldParams<F> {
        &self.params
    }

    pub fn encode_matrix(&self) -> &EncodeMatrix<F> {
        &self.encode
    }

    /// Butterfly plan for the remaining `l` layers at base `v_{l+m/2}`,
    /// built on first use.
    pub fn butterfly_plan(&self, spec: &PartitionSpec) -> &ButterflyPlan<F> {
        self.plans[spec.l() as usize].get_or_init(|| plan_butterflies(&self.params, spec.l(), spec.base()))
    }
}

/// Process-wide tables for each supported field.
pub trait SharedContext: BinaryField {
    fn shared() -> &'static FieldContext<Self>;
}

macro_rules! shared_context {
    ($($f:ty),*) => {$(
        impl SharedContext for $f {
            fn shared() -> &'static FieldContext<Self> {
                static CTX: OnceLock<FieldContext<$f>> = OnceLock::new();
                CTX.get_or_init(|| FieldContext::new().expect("built-in field tables are valid"))
            }
        }
    )*};
}
shared_context!(Gf16, Gf64, Gf128);

/// Wall-clock time spent in each pipeline stage, summed over both operands
/// where a stage runs twice.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimes {
    pub basiscvt: Duration,
    pub encode: Duration,
    pub butterfly: Duration,
    pub pointwise: Duration,
    pub ibutterfly: Duration,
    pub decode: Duration,
    pub ibasiscvt: Duration,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.basiscvt + self.encode + self.butterfly + self.pointwise + self.ibutterfly + self.decode + self.ibasiscvt
    }
}

impl std::ops::AddAssign for StageTimes {
    fn add_assign(&mut self, o: Self) {
        self.basiscvt += o.basiscvt;
        self.encode += o.encode;
        self.butterfly += o.butterfly;
        self.pointwise += o.pointwise;
        self.ibutterfly += o.ibutterfly;
        self.decode += o.decode;
        self.ibasiscvt += o.ibasiscvt;
    }
}

struct Lap(Instant);

impl Lap {
    fn next(&mut self) -> Duration {
        let now = Instant::now();
        let d = now - self.0;
        self.0 = now;
        d
    }
}

/// Elementwise products.
pub fn pointwise_mul<F: BinaryField>(u: &[F::Elem], v: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let mut out = u.to_vec();
    pointwise_mul_assign::<F>(&mut out, v)?;
    Ok(out)
}

pub fn pointwise_mul_assign<F: BinaryField>(u: &mut [F::Elem], v: &[F::Elem]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { expected: u.len(), actual: v.len() });
    }
    for (a, &b) in u.iter_mut().zip(v) {
        *a = F::mul(*a, b);
    }
    Ok(())
}

/// Evaluates one operand at the partition points: basis conversion,
/// encode and the remaining butterfly layers.
pub fn forward_transform<F: BinaryField>(ctx: &FieldContext<F>, a: &BitPoly, plan: &MulPlan) -> Result<Vec<F::Elem>> {
    let mut times = StageTimes::default();
    forward_timed(ctx, a, plan, &mut times)
}

fn forward_timed<F: BinaryField>(
    ctx: &FieldContext<F>,
    a: &BitPoly,
    plan: &MulPlan,
    times: &mut StageTimes,
) -> Result<Vec<F::Elem>> {
    let mut lap = Lap(Instant::now());
    let mut g = a.clone().resized(plan.n);
    basis_cvt(&mut g)?;
    times.basiscvt += lap.next();
    let mut f = encode(&g, &plan.spec, &ctx.encode)?;
    times.encode += lap.next();
    lch_butterfly(&mut f, ctx.butterfly_plan(&plan.spec))?;
    times.butterfly += lap.next();
    Ok(f)
}

/// Interpolates pointwise values back to a polynomial of length `plan.n`.
pub fn inverse_transform<F: BinaryField>(
    ctx: &FieldContext<F>,
    values: Vec<F::Elem>,
    plan: &MulPlan,
) -> Result<BitPoly> {
    let mut times = StageTimes::default();
    inverse_timed(ctx, values, plan, &mut times)
}

fn inverse_timed<F: BinaryField>(
    ctx: &FieldContext<F>,
    mut values: Vec<F::Elem>,
    plan: &MulPlan,
    times: &mut StageTimes,
) -> Result<BitPoly> {
    let mut lap = Lap(Instant::now());
    i_lch_butterfly(&mut values, ctx.butterfly_plan(&plan.spec))?;
    times.ibutterfly += lap.next();
    let mut c = decode(&values, &plan.spec, &ctx.encode)?;
    times.decode += lap.next();
    i_basis_cvt(&mut c)?;
    times.ibasiscvt += lap.next();
    Ok(c)
}

/// The FFT product over a specific field, with no small-input fallback.
pub fn fp_polymul_in<F: BinaryField>(
    ctx: &FieldContext<F>,
    a: &BitPoly,
    b: &BitPoly,
    times: &mut StageTimes,
) -> Result<BitPoly> {
    if a.is_empty() || b.is_empty() {
        return Ok(BitPoly::zero(0));
    }
    let plan = MulPlan::for_field(F::DEGREE, a.len(), b.len())?;
    let mut fa = forward_timed(ctx, a, &plan, times)?;
    let fb = forward_timed(ctx, b, &plan, times)?;
    let mut lap = Lap(Instant::now());
    pointwise_mul_assign::<F>(&mut fa, &fb)?;
    times.pointwise += lap.next();
    let mut c = inverse_timed(ctx, fa, &plan, times)?;
    c.resize(a.len() + b.len() - 1);
    Ok(c)
}

/// Configurable front end for [`fp_polymul`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Multiplier {
    field: FieldChoice,
    fft_threshold: usize,
}

impl Default for Multiplier {
    fn default() -> Self {
        Self { field: FieldChoice::Auto, fft_threshold: FFT_THRESHOLD_BITS }
    }
}

impl Multiplier {
    pub fn new(field: FieldChoice) -> Self {
        Self { field, ..Self::default() }
    }

    /// Operands shorter than `bits` use Karatsuba; 0 forces the FFT.
    pub fn with_fft_threshold(mut self, bits: usize) -> Self {
        self.fft_threshold = bits;
        self
    }

    pub fn field(&self) -> FieldChoice {
        self.field
    }

    pub fn mul(&self, a: &BitPoly, b: &BitPoly) -> Result<BitPoly> {
        self.mul_profiled(a, b).map(|(c, _)| c)
    }

    /// Product of `a` and `b` with length `len(a) + len(b) - 1` (0 if either
    /// is empty), plus per-stage timings (zero on the Karatsuba path).
    pub fn mul_profiled(&self, a: &BitPoly, b: &BitPoly) -> Result<(BitPoly, StageTimes)> {
        let mut times = StageTimes::default();
        if a.is_empty() || b.is_empty() {
            return Ok((BitPoly::zero(0), times));
        }
        let plan = plan_mul(a.len(), b.len(), self.field)?;
        if a.len().max(b.len()) < self.fft_threshold {
            return Ok((karatsuba_mul(a, b), times));
        }
        let c = match plan.m {
            64 => fp_polymul_in(Gf64::shared(), a, b, &mut times)?,
            _ => fp_polymul_in(Gf128::shared(), a, b, &mut times)?,
        };
        Ok((c, times))
    }
}

/// `a * b` with the default configuration.
pub fn fp_polymul(a: &BitPoly, b: &BitPoly) -> Result<BitPoly> {
    Multiplier::default().mul(a, b)
}

fn product_len(a: &BitPoly, b: &BitPoly) -> usize {
    if a.is_empty() || b.is_empty() {
        0
    } else {
        a.len() + b.len() - 1
    }
}

fn schoolbook(a: &[u64], b: &[u64], out: &mut [u64], mul: impl Fn(u64, u64) -> u128) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let p = mul(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

/// Schoolbook product, one word pair at a time with a portable carryless
/// multiply.
pub fn naive_mul(a: &BitPoly, b: &BitPoly) -> BitPoly {
    let mut out = vec![0u64; a.words().len() + b.words().len()];
    schoolbook(a.words(), b.words(), &mut out, clmul64_portable);
    BitPoly::from_words(out, product_len(a, b))
}

const KARATSUBA_CUTOFF: usize = 16;

/// XORs `a * b` into `out[..a.len() + b.len()]`, using `scratch` for
/// temporaries.
fn karatsuba(a: &[u64], b: &[u64], out: &mut [u64], scratch: &mut [u64]) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.is_empty() {
        return;
    }
    if b.len() < KARATSUBA_CUTOFF {
        clmul_words_xor(a, b, out);
        return;
    }
    if a.len() >= 2 * b.len() {
        for (k, chunk) in a.chunks(b.len()).enumerate() {
            let at = k * b.len();
            karatsuba(chunk, b, &mut out[at..at + chunk.len() + b.len()], scratch);
        }
        return;
    }
    // b.len() >= h here, so b1 may be empty but b0 never is short.
    let h = a.len().div_ceil(2);
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);

    let (z0, rest) = scratch.split_at_mut(2 * h);
    let (z2, rest) = rest.split_at_mut(a1.len() + b1.len());
    let (z1, rest) = rest.split_at_mut(2 * h);
    let (sa, rest) = rest.split_at_mut(h);
    let (sb, rest) = rest.split_at_mut(h);

    z0.fill(0);
    karatsuba(a0, b0, z0, rest);
    z2.fill(0);
    karatsuba(a1, b1, z2, rest);
    sa.copy_from_slice(a0);
    sa.iter_mut().zip(a1).for_each(|(x, y)| *x ^= y);
    sb.copy_from_slice(b0);
    sb.iter_mut().zip(b1).for_each(|(x, y)| *x ^= y);
    z1.fill(0);
    karatsuba(sa, sb, z1, rest);
    z1.iter_mut().zip(z0.iter()).for_each(|(x, y)| *x ^= y);
    z1.iter_mut().zip(z2.iter()).for_each(|(x, y)| *x ^= y);

    out.iter_mut().zip(z0.iter()).for_each(|(x, y)| *x ^= y);
    out[2 * h..].iter_mut().zip(z2.iter()).for_each(|(x, y)| *x ^= y);
    out[h..].iter_mut().zip(z1.iter()).for_each(|(x, y)| *x ^= y);
}

/// Karatsuba over word blocks with a schoolbook base case.
pub fn karatsuba_mul(a: &BitPoly, b: &BitPoly) -> BitPoly {
    let (wa, wb) = (words_for(a.len()), words_for(b.len()));
    let mut out = vec![0u64; wa + wb];
    // A level on an n-word operand takes 4n + 8 words and recurses on n/2.
    let mut scratch = vec![0u64; 8 * wa.max(wb) + 16 * (usize::BITS as usize)];
    karatsuba(a.words(), b.words(), &mut out, &mut scratch);
    BitPoly::from_words(out, product_len(a, b))
}

/// `A(x)` for `x` in GF(2^m), by Horner's rule.
pub fn horner_eval<F: BinaryField>(a: &BitPoly, x: F::Elem) -> F::Elem {
    (0..a.len()).rev().fold(F::Elem::ZERO, |acc, k| {
        let t = F::mul(acc, x);
        if a.bit(k) {
            t ^ F::Elem::ONE
        } else {
            t
        }
    })
}

/// Whether `A(x^2) = A(x)^2`, which holds for every `A` with GF(2)
/// coefficients.
pub fn frobenius_value_check<F: BinaryField>(a: &BitPoly, x: F::Elem) -> bool {
    horner_eval::<F>(a, F::sqr(x)) == F::sqr(horner_eval::<F>(a, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plan_examples() {
        let p = plan_mul(1 << 20, 1 << 20, FieldChoice::Auto).unwrap();
        assert_eq!((p.n, p.m, p.l, p.n_p), (1 << 21, 64, 15, 1 << 15));
        let p = plan_mul(32, 32, FieldChoice::M64).unwrap();
        assert_eq!((p.n, p.l, p.n_p), (64, 0, 1));
        let p = plan_mul(1, 1, FieldChoice::M128).unwrap();
        assert_eq!((p.n, p.l), (128, 0));
        assert!(plan_mul(0, 5, FieldChoice::Auto).is_err());
    }

    #[test]
    fn plan_bounds() {
        // n = 2^40 over GF(2^64): l = 34.
        assert!(matches!(plan_mul(1 << 39, 1, FieldChoice::M64), Err(Error::TooLong { m: 64, .. })));
        // Largest GF(2^64) product: l = 31, n = 2^37.
        assert_eq!(plan_mul(1 << 36, 1, FieldChoice::M64).unwrap().l, 31);
        assert!(plan_mul((1 << 36) + 1, 1, FieldChoice::M64).is_err());
        let p = plan_mul(1 << 39, 1, FieldChoice::Auto).unwrap();
        assert_eq!((p.m, p.l), (128, 33));
    }

    #[test]
    fn field_choice_parse() {
        assert_eq!("auto".parse::<FieldChoice>().unwrap(), FieldChoice::Auto);
        assert_eq!("128".parse::<FieldChoice>().unwrap(), FieldChoice::M128);
        assert!("32".parse::<FieldChoice>().is_err());
    }

    #[test]
    fn oracles_small_cases() {
        let one_plus_x = BitPoly::from_bits(&[true, true]);
        let sq = naive_mul(&one_plus_x, &one_plus_x);
        assert_eq!(sq, BitPoly::from_bits(&[true, false, true]));
        assert_eq!(karatsuba_mul(&one_plus_x, &one_plus_x), sq);
        let zero = BitPoly::zero(10);
        assert!(naive_mul(&one_plus_x, &zero).is_zero());
        assert!(karatsuba_mul(&zero, &one_plus_x).is_zero());
    }

    #[test]
    fn karatsuba_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let la = rng.gen_range(1..=1 << 14);
            let lb = rng.gen_range(1..=1 << 14);
            let a = BitPoly::random(la, &mut rng);
            let b = BitPoly::random(lb, &mut rng);
            assert_eq!(karatsuba_mul(&a, &b), naive_mul(&a, &b), "{la} x {lb}");
        }
    }

    #[test]
    fn pointwise() {
        let u = vec![3u64, 7, 11];
        assert_eq!(pointwise_mul::<Gf64>(&u, &[1, 1, 1]).unwrap(), u);
        assert_eq!(pointwise_mul::<Gf64>(&u, &[0, 0, 0]).unwrap(), [0, 0, 0]);
        assert!(pointwise_mul::<Gf64>(&u, &[1]).is_err());
    }

    #[test]
    fn identity_and_monomials() {
        let m = Multiplier::new(FieldChoice::M64).with_fft_threshold(0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = BitPoly::random(5000, &mut rng);
        assert_eq!(m.mul(&BitPoly::one(), &b).unwrap(), b);
        let c = m.mul(&BitPoly::monomial(1000), &BitPoly::monomial(3000)).unwrap();
        assert_eq!(c, BitPoly::monomial(4000));
    }

    #[test]
    fn fft_matches_karatsuba_all_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &(la, lb) in &[(1usize, 1usize), (63, 64), (500, 3000), (4096, 4096), (10_000, 77)] {
            let a = BitPoly::random(la, &mut rng);
            let b = BitPoly::random(lb, &mut rng);
            let want = karatsuba_mul(&a, &b);
            let mut t = StageTimes::default();
            assert_eq!(fp_polymul_in(Gf64::shared(), &a, &b, &mut t).unwrap(), want);
            assert_eq!(fp_polymul_in(Gf128::shared(), &a, &b, &mut t).unwrap(), want);
            if la.max(lb) <= 1024 {
                assert_eq!(fp_polymul_in(Gf16::shared(), &a, &b, &mut t).unwrap(), want);
            }
        }
    }

    #[test]
    fn empty_operands() {
        let a = BitPoly::random(100, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(fp_polymul(&a, &BitPoly::zero(0)).unwrap().is_empty());
    }

    #[test]
    fn frobenius_check_simple() {
        assert!(frobenius_value_check::<Gf64>(&BitPoly::one(), 12345));
        assert!(frobenius_value_check::<Gf64>(&BitPoly::monomial(1), 999));
    }
}
