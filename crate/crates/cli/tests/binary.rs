use std::process::{Command, Output};

fn dlog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlog")).args(args).output().expect("spawn dlog")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generality_instance_prints_six() {
    let o = dlog(&[
        "solve",
        "--p",
        "1040483",
        "--g",
        "340003",
        "--b",
        "50064",
        "--algorithm",
        "dic",
        "--bound",
        "15",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6\n");
}

#[test]
fn probability_one_one() {
    let o = dlog(&["analyze", "--prob", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.5\n");
}

#[test]
fn nice_cases() {
    let o = dlog(&["analyze", "--nice-cases", "3"]);
    assert_eq!(stdout(&o), "30\n");
}

#[test]
fn bsgs_small() {
    let o = dlog(&["solve", "--p", "11", "--g", "2", "--b", "9", "--algorithm", "bsgs"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6\n");
}

#[test]
fn json_schema_and_determinism() {
    let args = ["solve", "--p", "1040483", "--g", "340003", "--b", "50064", "--bound", "15", "--seed", "7", "--json"];
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_str(stdout(o).trim()).unwrap();
        let obj = v.as_object_mut().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["algorithm", "candidates_tested", "elapsed_ms", "matched_prime", "rounds", "smooth_found", "success", "x"]
        );
        obj.remove("elapsed_ms");
        v
    };
    let a = strip(&dlog(&args));
    let b = strip(&dlog(&args));
    assert_eq!(a, b);
    assert_eq!(a["x"], 6);
    assert_eq!(a["algorithm"], "dic");
    assert_eq!(a["success"], true);
}

#[test]
fn parallel_flag_selects_parallel_dic() {
    let o = dlog(&[
        "solve",
        "--p",
        "1040483",
        "--g",
        "340003",
        "--b",
        "50064",
        "--bound",
        "15",
        "--seed",
        "7",
        "--parallel",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["algorithm"], "dic-parallel");
    assert_eq!(v["x"], 6);
}

#[test]
fn budget_failure_exits_one() {
    let o = dlog(&[
        "solve",
        "--p",
        "1000003",
        "--g",
        "2",
        "--b",
        "3",
        "--algorithm",
        "ic",
        "--bound",
        "50",
        "--seed",
        "1",
        "--max-candidates",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["bogus"][..], &["solve", "--p", "11", "--g", "2", "--b", "9", "--frob"], &["analyze", "--prob", "x"]]
    {
        let o = dlog(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let o = dlog(&[
        "sweep",
        "--bits",
        "18-20:2",
        "--multipliers",
        "0.5,1",
        "--algorithms",
        "dic,ic",
        "--trials",
        "2",
        "--seed",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(dlog_core::bench::CSV_HEADER));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2 * 2);

    let o = dlog(&[
        "plot",
        "--in",
        csv.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
        "--x",
        "bits",
        "--y",
        "mean_elapsed",
        "--series",
        "algorithm",
        "--logy",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("data-series=\"dic\"") && svg.contains("data-series=\"ic\""));
}

#[test]
fn selftest_passes() {
    let o = dlog(&["selftest"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 8);
    assert!(!out.contains("FAIL"));
}
