use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frobpoly::bench::{run_bench, write_csv, BenchConfig, DEFAULT_REPS};
use frobpoly::selftest::{run_selftest, SelftestLevel, SelftestOptions};
use frobpoly::{BitPoly, Error, FieldChoice, Multiplier};

/// Multiplication of large binary polynomials.
#[derive(Parser)]
#[command(name = "frobpoly", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Multiply two polynomials stored as little-endian bit strings.
    Mul {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value = "auto")]
        field: FieldChoice,
    },
    /// Run the invariant checks.
    Selftest {
        #[arg(long, default_value = "quick")]
        level: SelftestLevel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        corrupt_encode_table: bool,
    },
    /// Time random products and write one CSV row per size.
    Bench {
        #[arg(long, default_value_t = 10)]
        min_log: u32,
        #[arg(long, default_value_t = 16)]
        max_log: u32,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        /// Output file; stdout if omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        field: FieldChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Verification(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn read_poly(path: &Path) -> Result<BitPoly, Error> {
    Ok(BitPoly::from_le_bytes(&fs::read(path)?))
}

fn cmd_mul(a: &Path, b: &Path, out: &Path, field: FieldChoice) -> Result<(), Error> {
    let (a, b) = (read_poly(a)?, read_poly(b)?);
    let c = Multiplier::new(field).mul(&a, &b)?.trimmed();
    fs::write(out, c.to_le_bytes())?;
    println!("{}", c.degree().map_or(0, |d| d + 1));
    Ok(())
}

fn cmd_selftest(opts: SelftestOptions) -> Result<(), Error> {
    let report = run_selftest(&opts, |c| {
        let status = if c.passed { "ok  " } else { "FAIL" };
        match &c.detail {
            Some(d) => println!("{status} {} ({:.2?}): {d}", c.name, c.elapsed),
            None => println!("{status} {} ({:.2?})", c.name, c.elapsed),
        }
    })?;
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    if failed.is_empty() {
        println!("selftest {}: {} checks passed", opts.level, report.checks.len());
        Ok(())
    } else {
        Err(Error::Verification(format!("failed: {}", failed.join(", "))))
    }
}

fn cmd_bench(cfg: BenchConfig, csv: Option<&Path>) -> Result<(), Error> {
    let records = run_bench(&cfg, |r| {
        eprintln!("log2 size {:>2}: {:.6} s", r.log2_size, r.mean_seconds);
    })?;
    match csv {
        Some(p) => write_csv(&records, fs::File::create(p)?)?,
        None => {
            write_csv(&records, io::stdout().lock())?;
            io::stdout().flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Mul { a, b, out, field } => cmd_mul(&a, &b, &out, field),
        Cmd::Selftest { level, seed, corrupt_encode_table } => {
            cmd_selftest(SelftestOptions { level, corrupt_encode_table, seed })
        }
        Cmd::Bench { min_log, max_log, reps, csv, field, seed } => {
            cmd_bench(BenchConfig { min_log, max_log, reps, field, seed }, csv.as_deref())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
