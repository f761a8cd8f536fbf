use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use frobpoly::{karatsuba_mul, BitPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frobpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobpoly")).args(args).output().expect("run frobpoly")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mul_by_one_trims() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, out) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    fs::write(&a, [0x01]).unwrap();
    fs::write(&b, [0x5a, 0x03, 0x00, 0x00]).unwrap();
    let o = frobpoly(&["mul", s(&a), s(&b), "-o", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&out).unwrap(), vec![0x5a, 0x03]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "10");
}

#[test]
fn mul_empty_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, out) = (dir.path().join("a"), dir.path().join("c"));
    fs::write(&a, []).unwrap();
    let o = frobpoly(&["mul", s(&a), s(&a), "-o", s(&out)]);
    assert!(o.status.success());
    assert!(fs::read(&out).unwrap().is_empty());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "0");
}

#[test]
fn mul_one_mebibyte_matches_karatsuba() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, out) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pa = BitPoly::random(8 << 20, &mut rng);
    let pb = BitPoly::random(8 << 20, &mut rng);
    fs::write(&a, pa.to_le_bytes()).unwrap();
    fs::write(&b, pb.to_le_bytes()).unwrap();
    for field in ["auto", "64", "128"] {
        let o = frobpoly(&["mul", s(&a), s(&b), "-o", s(&out), "--field", field]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let want = karatsuba_mul(&pa, &pb).trimmed();
        assert_eq!(fs::read(&out).unwrap(), want.to_le_bytes(), "field {field}");
    }
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let o = frobpoly(&["mul", s(&missing), s(&missing), "-o", s(&dir.path().join("c"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(frobpoly(&["mul"]).status.code(), Some(2));
    assert_eq!(frobpoly(&["bench", "--field", "32"]).status.code(), Some(2));
    assert_eq!(frobpoly(&["bench", "--min-log", "5", "--max-log", "4"]).status.code(), Some(2));
    assert_eq!(frobpoly(&["bench", "--reps", "2"]).status.code(), Some(2));
}

#[test]
fn selftest_quick_passes() {
    let o = frobpoly(&["selftest", "--level", "quick"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn selftest_corrupt_table_names_invariant() {
    let o = frobpoly(&["selftest", "--corrupt-encode-table"]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().any(|l| l.starts_with("FAIL encode/decode round trip")), "{out}");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("encode/decode round trip"), "{err}");
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = frobpoly(&["bench", "--min-log", "6", "--max-log", "8", "--reps", "3", "--csv", s(&csv), "--seed", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), frobpoly::bench::CSV_HEADER);
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, log) in rows.iter().zip(6..) {
        assert_eq!(row.len(), 12);
        assert_eq!(row[0], log.to_string());
        assert_eq!(row[1], (64usize << log).to_string());
        assert_eq!(row[3], "3");
        for cell in &row[4..] {
            assert!(cell.parse::<f64>().unwrap() >= 0.0);
        }
    }
}
