use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gpat(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpat"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

#[test]
fn sieve_reports_squarefree_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpat(&["sieve", "--X", "1e4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "sieve.csv");
    assert!(csv.starts_with("function,X,sum_re,sum_im,nonzero\n"));
    assert!(csv.contains("mobius,10000,"), "{csv}");
    assert!(csv.trim_end().ends_with(",6083"), "{csv}");
    assert!(read(dir.path(), "manifest.txt").contains("assert.squarefree_count = pass"));
}

#[test]
fn gowers_unit_function_has_norm_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpat(
        &["gowers", "--function", "unit", "--X", "2000", "--q", "5", "--all-residues", "--k", "2,3", "--timings", "false"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "gowers.csv");
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let norm: f64 = f[4].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# lcm run\nQ = 50\nR = 2500\nm0_grid = 1, 2\n").unwrap();
    let out = gpat(&["--config", cfg.to_str().unwrap(), "lcm-stats", "--Q", "40"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read(dir.path(), "lcm_summary.csv");
    assert!(summary.lines().nth(1).unwrap().starts_with("40,2500,"), "{summary}");
    assert_eq!(read(dir.path(), "lcm_tail.csv").lines().count(), 3);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpat(&["bv-scan", "--X", "1e4", "--Q", "40"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("10Q² ≤ X"));
    assert_eq!(gpat(&["gowers", "--k", "7"], dir.path()).status.code(), Some(2));
    assert_eq!(gpat(&["gowers", "--q", "4", "--a", "2"], dir.path()).status.code(), Some(2));
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "colour = red\n").unwrap();
    assert_eq!(gpat(&["--config", bad.to_str().unwrap(), "sieve"], dir.path()).status.code(), Some(2));
}

#[test]
fn ramare_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpat(&["ramare-check", "--X", "1e4", "--Q", "10", "--window", "3,30", "--seed", "7"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(!stdout.contains("FAIL"), "{stdout}");
    for f in ["ramare_identity.csv", "ramare_partition.csv", "ramare_slices.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn custom_multspec_function() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("f.txt");
    fs::write(&spec, "name = chi\ndefault = unit\ncompletely_multiplicative = true\n2 1 -1\n").unwrap();
    let f = format!("custom:{}", spec.display());
    let out = gpat(&["sieve", "--function", &f, "--X", "16"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // Σ_{n ≤ 16} (−1)^{v_2(n)}: odd n give 8, then −4 + 2 − 1 + 1
    let csv = read(dir.path(), "sieve.csv");
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2].parse::<f64>().unwrap(), 6.0);
}

#[test]
fn accept_digests_match_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = gpat(&["accept", "--threads", "1"], a.path());
    let rb = gpat(&["accept", "--threads", "4"], b.path());
    assert_eq!(ra.status.code(), Some(0), "{}", String::from_utf8_lossy(&ra.stdout));
    assert_eq!(rb.status.code(), Some(0));
    let digests = |d: &Path| -> Vec<String> {
        read(d, "manifest.txt")
            .lines()
            .filter(|l| l.starts_with("output."))
            .map(String::from)
            .collect()
    };
    assert!(!digests(a.path()).is_empty());
    assert_eq!(digests(a.path()), digests(b.path()));
}
