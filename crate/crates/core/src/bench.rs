//! Timing harness: per-size means and per-stage profiles as CSV rows.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitpoly::BitPoly;
use crate::multiplier::{karatsuba_mul, plan_mul, FieldChoice, Multiplier, StageTimes};
use crate::{Error, Result};

pub const DEFAULT_REPS: usize = 100;
pub const MIN_REPS: usize = 3;

/// One CSV row. Sizes are for each operand; `log2_size_words` is
/// `log2(n_bits / 64)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    #[serde(rename = "log2_size_words")]
    pub log2_size: u32,
    pub n_bits: usize,
    pub m: usize,
    pub reps: usize,
    #[serde(rename = "mean_s")]
    pub mean_seconds: f64,
    pub basiscvt_s: f64,
    pub encode_s: f64,
    pub butterfly_s: f64,
    pub pointwise_s: f64,
    pub ibutterfly_s: f64,
    pub decode_s: f64,
    pub ibasiscvt_s: f64,
}

impl BenchRecord {
    pub fn stage_sum(&self) -> f64 {
        self.basiscvt_s
            + self.encode_s
            + self.butterfly_s
            + self.pointwise_s
            + self.ibutterfly_s
            + self.decode_s
            + self.ibasiscvt_s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub min_log: u32,
    pub max_log: u32,
    pub reps: usize,
    pub field: FieldChoice,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { min_log: 10, max_log: 16, reps: DEFAULT_REPS, field: FieldChoice::Auto, seed: 0 }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_log > self.max_log {
            return Err(Error::InvalidArgument(format!("min-log {} exceeds max-log {}", self.min_log, self.max_log)));
        }
        if self.reps < MIN_REPS {
            return Err(Error::InvalidArgument(format!("reps must be at least {MIN_REPS}")));
        }
        if self.max_log + 6 >= usize::BITS - 1 {
            return Err(Error::InvalidArgument(format!("max-log {} is too large", self.max_log)));
        }
        for log in self.min_log..=self.max_log {
            let bits = 64usize << log;
            plan_mul(bits, bits, self.field)?;
        }
        Ok(())
    }
}

/// Restricts the calling thread to the CPU it is currently running on.
/// Best effort; failures are ignored.
pub fn pin_to_current_cpu() {
    #[cfg(target_os = "linux")]
    // SAFETY: plain libc calls on a zeroed, locally owned cpu_set_t.
    unsafe {
        let cpu = libc::sched_getcpu();
        if cpu >= 0 {
            let mut set: libc::cpu_set_t = std::mem::zeroed();
            libc::CPU_SET(cpu as usize, &mut set);
            libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set);
        }
    }
}

fn secs(d: Duration, reps: usize) -> f64 {
    d.as_secs_f64() / reps as f64
}

/// Times one size: `reps` products of fresh random operands of `64 << log`
/// bits, always through the FFT.
pub fn bench_size(log: u32, reps: usize, field: FieldChoice, rng: &mut ChaCha8Rng) -> Result<BenchRecord> {
    let n_bits = 64usize << log;
    let plan = plan_mul(n_bits, n_bits, field)?;
    let mul = Multiplier::new(field).with_fft_threshold(0);
    let a = BitPoly::random(n_bits, rng);
    let b = BitPoly::random(n_bits, rng);

    let mut stages = StageTimes::default();
    let mut total = Duration::ZERO;
    for _ in 0..reps {
        let start = Instant::now();
        let (_, t) = mul.mul_profiled(&a, &b)?;
        total += start.elapsed();
        stages += t;
    }
    Ok(BenchRecord {
        log2_size: log,
        n_bits,
        m: plan.m,
        reps,
        mean_seconds: secs(total, reps),
        basiscvt_s: secs(stages.basiscvt, reps),
        encode_s: secs(stages.encode, reps),
        butterfly_s: secs(stages.butterfly, reps),
        pointwise_s: secs(stages.pointwise, reps),
        ibutterfly_s: secs(stages.ibutterfly, reps),
        decode_s: secs(stages.decode, reps),
        ibasiscvt_s: secs(stages.ibasiscvt, reps),
    })
}

/// Runs every size in the configured range. Before timing, one product at
/// the smallest size is checked against Karatsuba; a mismatch aborts with
/// [`Error::Verification`].
pub fn run_bench(cfg: &BenchConfig, mut on_record: impl FnMut(&BenchRecord)) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    pin_to_current_cpu();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let n_bits = 64usize << cfg.min_log;
    let a = BitPoly::random(n_bits, &mut rng);
    let b = BitPoly::random(n_bits, &mut rng);
    let got = Multiplier::new(cfg.field).with_fft_threshold(0).mul(&a, &b)?;
    if got != karatsuba_mul(&a, &b) {
        return Err(Error::Verification(format!("FFT product differs from Karatsuba at {n_bits} bits")));
    }

    let mut out = Vec::new();
    for log in cfg.min_log..=cfg.max_log {
        let rec = bench_size(log, cfg.reps, cfg.field, &mut rng)?;
        on_record(&rec);
        out.push(rec);
    }
    Ok(out)
}

/// Writes records with a header row.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_HEADER: &str =
    "log2_size_words,n_bits,m,reps,mean_s,basiscvt_s,encode_s,butterfly_s,pointwise_s,ibutterfly_s,decode_s,ibasiscvt_s";
