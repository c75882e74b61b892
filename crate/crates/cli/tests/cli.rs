//! End-to-end tests of the binary: artifact shape, reproducibility, the
//! documented exit codes, and the config-file contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-ising"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Data rows of a CSV artifact: everything after the column header line,
/// split into cells.
fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip_while(|line| line.starts_with('#'))
        .skip(1)
        .filter(|line| !line.starts_with('#') && !line.is_empty())
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn exact_at_zero_coupling_counts_states() {
    let out = run(&["exact", "--L", "2", "--K", "0"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# torus-ising "), "header first");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1, "L = 2 has only the open mode");
    let row = &rows[0];
    assert_eq!(row[0], "2");
    assert_eq!(row[2], "open-h");
    let log_q: f64 = row[3].parse().unwrap();
    let log_q1: f64 = row[4].parse().unwrap();
    assert!((log_q - 16f64.ln()).abs() < 1e-12, "Q counts all 16 states");
    assert!(
        (log_q1 - 2f64.ln()).abs() < 1e-12,
        "Q1 counts the 2 matched"
    );
    assert_eq!(row[6], "", "free energy is undefined at K = 0");
    assert_eq!(row[9], "false");
}

#[test]
fn onsager_reports_the_critical_temperature() {
    let out = run(&["onsager", "--k-steps", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("# tc_over_j = 2.2691853"),
        "critical temperature in the header: {text}"
    );
    assert!(text.contains("# kc = 4.4068679"));
}

#[test]
fn topo_classifies_the_square_loop_as_contractible() {
    let out = run(&["topo", "--loop", "RRUULLDD", "--L", "4"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows[0][2..5], ["0".to_string(), "0".into(), "true".into()]);

    let wrap = run(&["topo", "--loop", "RRRR", "--L", "4"]);
    let rows = data_rows(&stdout(&wrap));
    assert_eq!(rows[0][2..5], ["1".to_string(), "0".into(), "false".into()]);
}

#[test]
fn mc_reruns_are_byte_identical() {
    let args = [
        "mc",
        "--L",
        "6",
        "--bc",
        "torus",
        "--K",
        "0.42",
        "--algo",
        "wolff",
        "--sweeps",
        "400",
        "--burn-in",
        "100",
        "--thin",
        "2",
        "--seed",
        "11",
        "--chains",
        "2",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");

    // Chains ride fixed RNG streams, so the thread count cannot matter.
    let serial = bin().args(["--threads", "1"]).args(args).output().unwrap();
    assert_eq!(first.stdout, serial.stdout);
}

#[test]
fn unknown_flags_fail_fast_with_exit_2() {
    let out = run(&["exact", "--L", "2", "--K", "0", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn missing_coupling_is_a_usage_error() {
    let out = run(&["exact", "--L", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.starts_with("error: kind=Usage exit=2"),
        "machine-readable error line, got: {err}"
    );
}

#[test]
fn enumeration_guard_exits_3() {
    let out = run(&["exact", "--L", "7", "--K", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("kind=TooLarge"));
}

#[test]
fn selftest_passes_and_prints_check_lines() {
    let out = run(&["--selftest"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[PASS] onsager.critical-point"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "L = 2\nK = 0\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = run(&["exact", "--config", cfg]);
    assert!(from_file.status.success());
    assert!(stdout(&from_file).contains("# K = 0\n"));

    let overridden = run(&["exact", "--config", cfg, "--K", "0.3"]);
    assert!(overridden.status.success());
    let text = stdout(&overridden);
    assert!(text.contains("# K = 0.3\n"), "flag wins over file");
    assert!(!data_rows(&text).is_empty());

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "L = 2\nK = 0\nwhoops = 1\n").unwrap();
    let rejected = run(&["exact", "--config", bad.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(stderr(&rejected).contains("unknown config key 'whoops'"));
}

#[test]
fn out_flag_writes_the_same_artifact_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let piped = run(&["transfer", "--L", "4,6", "--K", "0.44", "--bc", "torus"]);
    let to_file = run(&[
        "transfer",
        "--L",
        "4,6",
        "--K",
        "0.44",
        "--bc",
        "torus",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, piped.stdout);
}

#[test]
fn dos_cache_round_trips_through_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run_cached = |_: &Path| {
        bin()
            .args(["exact", "--L", "3", "--K", "0.3", "--mode", "torus-h"])
            .env("TORUS_ISING_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let cold = run_cached(dir.path());
    assert!(cold.status.success(), "{}", stderr(&cold));
    let cache_file = dir.path().join("dos_L3_torus_full.txt");
    assert!(cache_file.is_file(), "cache populated on first use");
    let warm = run_cached(dir.path());
    assert_eq!(cold.stdout, warm.stdout, "cache hit changes nothing");
}

#[test]
fn deltaf_scan_matches_the_free_ensemble_closed_form() {
    // At K = 0 the gap per site is exactly (2L − 1)·ln2/L² on the open
    // lattice: Q/Q1 counts configurations, 2^(L²)/2^((L−1)²).
    let out = run(&["deltaf-scan", "--L", "4,6,8", "--K", "0", "--bc", "open"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for row in data_rows(&text) {
        let l: f64 = row[0].parse().unwrap();
        let per_site: f64 = row[6].parse().unwrap();
        let exact = (2.0 * l - 1.0) * 2f64.ln() / (l * l);
        assert!((per_site - exact).abs() < 1e-12, "L = {l}");
    }
    assert!(text.contains("# fit bc=open"), "fit line present: {text}");
}

#[test]
fn mc_scan_emits_curves_and_a_crossing_footer() {
    let out = run(&[
        "mc-scan",
        "--L",
        "4,8",
        "--bc",
        "torus",
        "--k-min",
        "0.40",
        "--k-max",
        "0.48",
        "--k-steps",
        "3",
        "--algo",
        "wolff",
        "--sweeps",
        "1500",
        "--burn-in",
        "200",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(data_rows(&text).len(), 6, "two sizes × three couplings");
    assert!(
        text.contains("# binder_kc_hat = ") || text.contains("no cumulant crossing"),
        "scan closes with a crossing verdict: {text}"
    );
}

#[test]
fn rg_flows_a_configuration_file_to_one_site() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cold.cfg");
    std::fs::write(&path, format!("9 torus\n{}", "+++++++++\n".repeat(9))).unwrap();
    let out = run(&["rg", "--spin-config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 3, "9 -> 3 -> 1");
    let last = rows.last().unwrap();
    assert_eq!(last[1], "1");
    let avg: f64 = last[2].parse().unwrap();
    assert_eq!(avg, 1.0);
}
