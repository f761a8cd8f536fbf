//! Invariant suites run by `frobpoly selftest`.
//!
//! Each check has a stable name so a failure report points at the broken
//! invariant. The quick level samples; the full level adds the exhaustive
//! GF(2^16) structure checks and the slow oracles.

use std::collections::HashSet;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmat;
use crate::bitpoly::BitPoly;
use crate::cantor::{frobenius_order_of_basis, subspace_eval, CantorVec, FieldParams};
use crate::encode::{
    bit_transpose_64, build_encode_matrix, decode, encode, encode_scalar, enumerate_partition, m4r_mat_vec,
    EncodeMatrix, PartitionSpec,
};
use crate::fft::{direct_eval, i_lch_butterfly, lch_butterfly, plan_butterflies};
use crate::field::{mul_bit_serial, BinaryField, FieldWord, Gf128, Gf16, Gf64};
use crate::multiplier::{frobenius_value_check, karatsuba_mul, FieldChoice, Multiplier};
use crate::oracle::{naive_mat_vec, novel_to_monomial, virtual_encode};
use crate::poly_basis::{basis_cvt, i_basis_cvt};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelftestLevel {
    #[default]
    Quick,
    Full,
}

impl FromStr for SelftestLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(Error::InvalidArgument(format!("unknown selftest level {s:?}"))),
        }
    }
}

impl fmt::Display for SelftestLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quick => "quick",
            Self::Full => "full",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SelftestOptions {
    pub level: SelftestLevel,
    /// Fault injection: flip one entry of every forward encode table.
    pub corrupt_encode_table: bool,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rand_elem<F: BinaryField>(rng: &mut ChaCha8Rng) -> F::Elem {
    F::Elem::from_u128(rng.gen())
}

struct Ctx<F: BinaryField> {
    params: FieldParams<F>,
    enc: EncodeMatrix<F>,
}

impl<F: BinaryField> Ctx<F> {
    fn new(corrupt: bool) -> Result<Self> {
        let params = FieldParams::<F>::new()?;
        let mut enc = build_encode_matrix(&params)?;
        if corrupt {
            enc.corrupt_forward_table();
        }
        Ok(Self { params, enc })
    }
}

struct Contexts {
    g16: Ctx<Gf16>,
    g64: Ctx<Gf64>,
    g128: Ctx<Gf128>,
}

macro_rules! each_field {
    ($cx:expr, |$c:ident, $f:ident| $body:expr) => {{
        (|| -> Check {
            {
                type $f = Gf16;
                let $c = &$cx.g16;
                $body?;
            }
            {
                type $f = Gf64;
                let $c = &$cx.g64;
                $body?;
            }
            {
                type $f = Gf128;
                let $c = &$cx.g128;
                $body?;
            }
            Ok(())
        })()
    }};
}

fn check_mul_oracle<F: BinaryField>(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    for _ in 0..samples {
        let (a, b) = (rand_elem::<F>(rng), rand_elem::<F>(rng));
        let want = mul_bit_serial(a.to_u128(), b.to_u128(), F::DEGREE, F::MODULUS_TAIL);
        ensure(F::mul(a, b).to_u128() == want && F::mul_portable(a, b).to_u128() == want, || {
            format!("GF(2^{}): {a:?} * {b:?}", F::DEGREE)
        })?;
    }
    Ok(())
}

fn check_recurrence<F: BinaryField>(p: &FieldParams<F>) -> Check {
    ensure(p.basis(0) == F::Elem::ONE, || format!("GF(2^{}): v_0 != 1", F::DEGREE))?;
    for i in 1..F::DEGREE {
        let v = p.basis(i);
        ensure(F::add(F::sqr(v), v) == p.basis(i - 1), || format!("GF(2^{}): v_{i}", F::DEGREE))?;
    }
    let rows: Vec<u128> = p.basis_vectors().iter().map(|v| v.to_u128()).collect();
    ensure(bitmat::rank(&rows) == F::DEGREE, || format!("GF(2^{}): basis is singular", F::DEGREE))
}

fn check_subspace_shift<F: BinaryField>(p: &FieldParams<F>, rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..8 {
        let a = rand_elem::<F>(rng);
        let mut s = a;
        for i in 0..F::DEGREE {
            let got = p.cantor_to_poly(subspace_eval(i, p.poly_to_cantor(a)));
            ensure(got == s, || format!("GF(2^{}): s_{i}({a:?})", F::DEGREE))?;
            s = F::add(F::sqr(s), s);
        }
        let (b, c) = (p.poly_to_cantor(a), p.poly_to_cantor(rand_elem::<F>(rng)));
        let i = rng.gen_range(0..F::DEGREE);
        ensure(subspace_eval(i, b ^ c) == subspace_eval(i, b) ^ subspace_eval(i, c), || {
            format!("GF(2^{}): s_{i} not linear", F::DEGREE)
        })?;
    }
    Ok(())
}

fn check_basis_order(p: &FieldParams<Gf16>) -> Check {
    for i in 1..16 {
        let v = p.basis(i);
        let j = (1..=16).find(|&j| Gf16::frobenius(v, j) == v).unwrap_or(0);
        let formula = frobenius_order_of_basis(i).map_err(|e| e.to_string())?;
        ensure(j == formula, || format!("v_{i}: order {j}, formula {formula}"))?;
    }
    Ok(())
}

fn check_basis_cvt_round_trip(rng: &mut ChaCha8Rng, max_log: u32) -> Check {
    for log in 0..=max_log {
        for _ in 0..4 {
            let f = BitPoly::random(1 << log, rng);
            let mut g = f.clone();
            basis_cvt(&mut g).map_err(|e| e.to_string())?;
            i_basis_cvt(&mut g).map_err(|e| e.to_string())?;
            ensure(g == f, || format!("n = 2^{log}"))?;
        }
    }
    Ok(())
}

fn check_basis_cvt_oracle(rng: &mut ChaCha8Rng, max_log: u32) -> Check {
    for log in 0..=max_log {
        let f = BitPoly::random(1 << log, rng);
        let mut g = f.clone();
        basis_cvt(&mut g).map_err(|e| e.to_string())?;
        ensure(novel_to_monomial(&g) == f, || format!("n = 2^{log}"))?;
    }
    Ok(())
}

fn check_butterfly_round_trip<F: BinaryField>(c: &Ctx<F>, rng: &mut ChaCha8Rng, max_l: u32) -> Check {
    for l in 0..=max_l.min(F::DEGREE as u32 / 2 - 1) {
        let base = CantorVec::unit(l as usize + F::DEGREE / 2);
        let plan = plan_butterflies(&c.params, l, base);
        let v: Vec<F::Elem> = (0..1usize << l).map(|_| rand_elem::<F>(rng)).collect();
        let mut w = v.clone();
        lch_butterfly(&mut w, &plan).map_err(|e| e.to_string())?;
        i_lch_butterfly(&mut w, &plan).map_err(|e| e.to_string())?;
        ensure(w == v, || format!("GF(2^{}), l = {l}", F::DEGREE))?;
    }
    Ok(())
}

fn check_butterfly_direct<F: BinaryField>(c: &Ctx<F>, rng: &mut ChaCha8Rng, max_l: u32, reps: usize) -> Check {
    for l in 0..=max_l.min(F::DEGREE as u32 / 2 - 1) {
        let base = CantorVec::unit(l as usize + F::DEGREE / 2);
        let plan = plan_butterflies(&c.params, l, base);
        for _ in 0..reps {
            let g: Vec<F::Elem> = (0..1usize << l).map(|_| rand_elem::<F>(rng)).collect();
            let mut v = g.clone();
            lch_butterfly(&mut v, &plan).map_err(|e| e.to_string())?;
            for (u, &got) in v.iter().enumerate() {
                let want = direct_eval(&c.params, &g, base ^ CantorVec(u as u128));
                ensure(got == want, || format!("GF(2^{}), l = {l}, index {u}", F::DEGREE))?;
            }
        }
    }
    Ok(())
}

fn check_encode_round_trip<F: BinaryField>(c: &Ctx<F>, rng: &mut ChaCha8Rng, max_l: u32) -> Check {
    for l in 0..=max_l.min(F::DEGREE as u32 / 2 - 1) {
        let spec = PartitionSpec::new(F::DEGREE, l).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let a = BitPoly::random(spec.n_bits(), rng);
            let v = encode(&a, &spec, &c.enc).map_err(|e| e.to_string())?;
            ensure(v == encode_scalar(&a, &spec, &c.enc), || {
                format!("GF(2^{}), l = {l}: transpose and scalar encode differ", F::DEGREE)
            })?;
            let back = decode(&v, &spec, &c.enc).map_err(|e| e.to_string())?;
            ensure(back == a, || format!("GF(2^{}), l = {l}", F::DEGREE))?;
        }
    }
    Ok(())
}

fn check_m4r<F: BinaryField>(c: &Ctx<F>, rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let mask = if F::DEGREE == 128 { u128::MAX } else { (1u128 << F::DEGREE) - 1 };
    for _ in 0..samples {
        let x = rng.gen::<u128>() & mask;
        ensure(m4r_mat_vec(&c.enc, x) == naive_mat_vec::<F>(c.enc.rows(), x), || {
            format!("GF(2^{}), x = {x:#x}", F::DEGREE)
        })?;
    }
    Ok(())
}

fn check_transpose(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    for _ in 0..samples {
        let mut block = [0u64; 64];
        rng.fill(&mut block[..]);
        let orig = block;
        bit_transpose_64(&mut block);
        for (i, row) in block.iter().enumerate() {
            for (j, col) in orig.iter().enumerate() {
                ensure((row >> j) & 1 == (col >> i) & 1, || format!("bit ({i}, {j})"))?;
            }
        }
        bit_transpose_64(&mut block);
        ensure(block == orig, || "not an involution".into())?;
    }
    Ok(())
}

fn check_frobenius_identity<F: BinaryField>(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    for _ in 0..samples {
        let len = rng.gen_range(1..512);
        let a = BitPoly::random(len, rng);
        let x = rand_elem::<F>(rng);
        ensure(frobenius_value_check::<F>(&a, x), || format!("GF(2^{}), degree < {len}", F::DEGREE))?;
    }
    Ok(())
}

fn check_polymul(rng: &mut ChaCha8Rng, logs: &[u32]) -> Check {
    for field in [FieldChoice::M64, FieldChoice::M128] {
        let mul = Multiplier::new(field).with_fft_threshold(0);
        for &log in logs {
            let n = 1usize << log;
            for (la, lb) in [(n, n), (n, rng.gen_range(1..=n)), (rng.gen_range(1..=n), n / 3 + 1)] {
                let a = BitPoly::random(la, rng);
                let b = BitPoly::random(lb, rng);
                let got = mul.mul(&a, &b).map_err(|e| e.to_string())?;
                ensure(got == karatsuba_mul(&a, &b), || format!("m = {field}, {la} x {lb} bits"))?;
            }
        }
    }
    Ok(())
}

fn check_field_order_exhaustive() -> Check {
    for a in 0..=u16::MAX {
        ensure(Gf16::frobenius(a, 16) == a, || format!("a = {a:#x}"))?;
    }
    Ok(())
}

fn check_partition(p: &FieldParams<Gf16>) -> Check {
    for l in 0..8 {
        let spec = PartitionSpec::new(16, l).map_err(|e| e.to_string())?;
        let sets = enumerate_partition(&spec, p).map_err(|e| e.to_string())?;
        ensure(sets.iterates.len() == 16, || format!("l = {l}: {} iterates", sets.iterates.len()))?;
        let union: HashSet<CantorVec> = sets.iterates.iter().flatten().copied().collect();
        let n = 16 * spec.n_points();
        ensure(union.len() == n, || format!("l = {l}: union has {} points, want {n}", union.len()))?;
        let sigma: HashSet<CantorVec> = sets.sigma().iter().copied().collect();
        let last = sets.iterates.last().expect("16 iterates");
        let wrapped: HashSet<CantorVec> =
            last.iter().map(|&c| p.poly_to_cantor(Gf16::sqr(p.cantor_to_poly(c)))).collect();
        ensure(wrapped == sigma, || format!("l = {l}: phi^16(Sigma) != Sigma"))?;
    }
    Ok(())
}

fn check_subspace_fixed(p: &FieldParams<Gf16>) -> Check {
    for l in 0..8 {
        let v: HashSet<CantorVec> = (0..1u128 << l).map(CantorVec).collect();
        let img: HashSet<CantorVec> = v.iter().map(|&c| p.poly_to_cantor(Gf16::sqr(p.cantor_to_poly(c)))).collect();
        ensure(img == v, || format!("l = {l}"))?;
    }
    Ok(())
}

fn check_virtual_encode(c: &Ctx<Gf16>, rng: &mut ChaCha8Rng, reps: usize) -> Check {
    for l in 0..8 {
        let spec = PartitionSpec::new(16, l).map_err(|e| e.to_string())?;
        for _ in 0..reps {
            let a = BitPoly::random(spec.n_bits(), rng);
            let got = encode(&a, &spec, &c.enc).map_err(|e| e.to_string())?;
            ensure(got == virtual_encode(&c.params, &a, &spec), || format!("l = {l}"))?;
        }
    }
    Ok(())
}

fn panic_message(e: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = e.downcast_ref::<&str>() {
        format!("panicked: {s}")
    } else if let Some(s) = e.downcast_ref::<String>() {
        format!("panicked: {s}")
    } else {
        "panicked".into()
    }
}

/// Runs every check at the requested level, reporting each as it finishes.
pub fn run_selftest(opts: &SelftestOptions, mut on_check: impl FnMut(&CheckResult)) -> Result<Report> {
    let cx = Contexts {
        g16: Ctx::new(opts.corrupt_encode_table)?,
        g64: Ctx::new(opts.corrupt_encode_table)?,
        g128: Ctx::new(opts.corrupt_encode_table)?,
    };
    let full = opts.level == SelftestLevel::Full;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = Report::default();

    let mut run = |name: &'static str, f: &mut dyn FnMut(&mut ChaCha8Rng) -> Check| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut rng))).unwrap_or_else(|e| Err(panic_message(e.as_ref())));
        let res = CheckResult { name, passed: outcome.is_ok(), detail: outcome.err(), elapsed: start.elapsed() };
        on_check(&res);
        report.checks.push(res);
    };

    let samples = if full { 1 << 16 } else { 4096 };
    run("gf_mul matches bit-serial oracle", &mut |r| each_field!(cx, |_c, F| check_mul_oracle::<F>(r, samples)));
    run("Cantor basis recurrence", &mut |_| each_field!(cx, |c, F| check_recurrence::<F>(&c.params)));
    run("subspace polynomial is a shift", &mut |r| each_field!(cx, |c, F| check_subspace_shift::<F>(&c.params, r)));
    run("Frobenius order of basis elements", &mut |_| check_basis_order(&cx.g16.params));
    run("basis_cvt round trip", &mut |r| check_basis_cvt_round_trip(r, if full { 20 } else { 16 }));
    run("basis_cvt matches naive basis expansion", &mut |r| check_basis_cvt_oracle(r, if full { 8 } else { 6 }));
    run("butterfly round trip", &mut |r| {
        each_field!(cx, |c, F| check_butterfly_round_trip::<F>(c, r, if full { 16 } else { 10 }))
    });
    run("butterfly matches direct evaluation", &mut |r| {
        let (l, reps) = if full { (8, 20) } else { (5, 4) };
        each_field!(cx, |c, F| check_butterfly_direct::<F>(c, r, l, reps))
    });
    run("encode/decode round trip", &mut |r| {
        each_field!(cx, |c, F| check_encode_round_trip::<F>(c, r, if full { 12 } else { 8 }))
    });
    run("M4R matches naive matrix product", &mut |r| each_field!(cx, |c, F| check_m4r::<F>(c, r, 1000)));
    run("bit transpose is an involution", &mut |r| check_transpose(r, 200));
    run("Frobenius identity C(a^2) = C(a)^2", &mut |r| each_field!(cx, |_c, F| check_frobenius_identity::<F>(r, 1000)));
    run("fp_polymul matches Karatsuba", &mut |r| {
        let logs: &[u32] = if full { &[4, 8, 12, 16, 20] } else { &[4, 8, 12, 14] };
        check_polymul(r, logs)
    });
    if full {
        run("GF(2^16) Frobenius order divides 16", &mut |_| check_field_order_exhaustive());
        run("partition iterates are disjoint and cover n points", &mut |_| check_partition(&cx.g16.params));
        run("squaring fixes V_l", &mut |_| check_subspace_fixed(&cx.g16.params));
        run("encode matches virtual butterfly", &mut |r| check_virtual_encode(&cx.g16, r, 20));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_passes() {
        let report = run_selftest(&SelftestOptions::default(), |_| {}).unwrap();
        let failed: Vec<_> = report.failures().map(|c| (c.name, c.detail.clone())).collect();
        assert!(report.passed(), "{failed:?}");
    }

    #[test]
    fn corrupted_table_names_round_trip() {
        let opts = SelftestOptions { corrupt_encode_table: true, ..Default::default() };
        let report = run_selftest(&opts, |_| {}).unwrap();
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.name == "encode/decode round trip"));
    }

    #[test]
    fn level_parsing() {
        assert_eq!("quick".parse::<SelftestLevel>().unwrap(), SelftestLevel::Quick);
        assert_eq!("full".parse::<SelftestLevel>().unwrap(), SelftestLevel::Full);
        assert!("fast".parse::<SelftestLevel>().is_err());
    }
}
