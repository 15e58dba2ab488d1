use std::process::{Command, Output};

use serde_json::Value;

fn monogamy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .args(args)
        .env_clear()
        .output()
        .expect("run monogamy")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn region_tangle_rows() {
    let out = monogamy(&["--samples", "100", "region"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(
        rows[0].join(","),
        "index,seed,measure,e_abc,e_ab,e_ac,residual"
    );
    assert_eq!(rows.len(), 101);
    for (i, row) in rows[1..].iter().enumerate() {
        assert_eq!(row[0], i.to_string());
        assert_eq!(row[2], "tangle");
        assert!(row[6].parse::<f64>().unwrap() >= -1e-9);
    }
}

#[test]
fn region_eof_has_negative_residuals() {
    let out = monogamy(&["--samples", "100", "--measure", "eof", "region"]);
    let rows = csv_rows(&out);
    assert!(rows[1..].iter().any(|r| r[6].parse::<f64>().unwrap() < 0.0));
}

#[test]
fn region_output_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = monogamy(&[
            "--samples",
            "50",
            "--seed",
            "9",
            "--out",
            p.to_str().unwrap(),
            "region",
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(bytes.ends_with(b"\n") && !bytes.contains(&b'\r'));
}

#[test]
fn env_overrides_flags() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .arg("region")
        .env_clear()
        .env("MONOGAMY_SAMPLES", "7")
        .env("MONOGAMY_SEED", "3")
        .output()
        .unwrap();
    let with_flags = monogamy(&["--samples", "7", "--seed", "3", "region"]);
    assert_eq!(with_env.stdout, with_flags.stdout);
    assert_eq!(csv_rows(&with_env).len(), 8);
}

#[test]
fn counterexample_report() {
    let out = monogamy(&["counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert!((v["e_abc"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["e_ab"].as_f64().unwrap() - v["e_ac"].as_f64().unwrap()).abs() < 1e-9);
    assert_eq!(v["violates_sum_inequality"], true);
}

#[test]
fn eof_curve_endpoints() {
    let rows = csv_rows(&monogamy(&["curve", "eof_vs_csq"]));
    assert_eq!(rows[0], ["c_squared", "e_f"]);
    assert_eq!(rows.len(), 1001);
    assert_eq!(rows[1], ["0.0", "0.0"]);
    assert_eq!(rows[1000], ["1.0", "1.0"]);
}

#[test]
fn alpha_curves() {
    let rows = csv_rows(&monogamy(&[
        "curve",
        "alpha-level-set",
        "--alphas",
        "1",
        "--points",
        "11",
    ]));
    assert_eq!(rows[0], ["alpha", "e_ab", "e_ac"]);
    for r in &rows[1..] {
        let (x, y): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((x + y - 1.0).abs() < 1e-12);
    }
    // the diagonal point moves toward the corner (1, 1) as alpha grows
    let rows = csv_rows(&monogamy(&["curve", "alpha-level-set", "--points", "3"]));
    let diag: Vec<f64> = rows[1..]
        .chunks(3)
        .map(|c| c[1][1].parse().unwrap())
        .collect();
    assert_eq!(diag.len(), 4);
    assert!(diag.windows(2).all(|w| w[1] > w[0]), "{diag:?}");
    assert!(diag[3] > 0.98);
}

#[test]
fn alpha_fit_on_tangles() {
    let out = monogamy(&["--samples", "10000", "alpha-fit", "--fresh-samples", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["report"]["alpha_min"].as_f64().unwrap() <= 1.0 + 1e-6);
    assert_eq!(v["report"]["infinite"], false);
    assert_eq!(v["revalidation"]["violations"], 0);
}

#[test]
fn equality_audit_on_tangles_is_clean() {
    let out = monogamy(&["--samples", "10000", "equality-audit"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 0);
    assert_eq!(v["epsilon"], 1e-6);
}

#[test]
fn bounds_with_sample_estimate_have_no_violations() {
    let out = monogamy(&["--samples", "2000", "--c", "empirical", "bounds"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["violations"], 0);
    assert!(v["c"].as_f64().unwrap() > 0.0);
    assert_eq!(v["report"]["exponent"], 8);
}

#[test]
fn bounds_violation_exits_one() {
    let out = monogamy(&["--samples", "2000", "--c", "100", "bounds"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["report"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn bounds_arith_examples() {
    let fail = monogamy(&[
        "--c",
        "1",
        "bounds-arith",
        "--e-abc",
        "0.5",
        "--e-ab",
        "0.5",
        "--e-ac",
        "0.5",
    ]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(json(&fail)["passes"], false);
    let pass = monogamy(&[
        "--c",
        "0",
        "bounds-arith",
        "--e-abc",
        "1",
        "--e-ab",
        "0.5",
        "--e-ac",
        "0.5",
    ]);
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(json(&pass)["slack"], 0.5);
    let neg = monogamy(&[
        "--c",
        "1",
        "bounds-arith",
        "--e-abc",
        "1",
        "--e-ab=-0.5",
        "--e-ac",
        "0",
    ]);
    assert_eq!(neg.status.code(), Some(2));
}

#[test]
fn ckw_pure_and_mixed() {
    let out = monogamy(&["--samples", "50", "ckw"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&out).len(), 51);
    let mixed = monogamy(&[
        "--samples",
        "2",
        "--roof-restarts",
        "2",
        "--format",
        "json",
        "ckw",
        "--rank",
        "2",
    ]);
    assert_eq!(mixed.status.code(), Some(0));
    let v = json(&mixed);
    assert_eq!(v["alarms"], 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
}

#[test]
fn teleport_transcript() {
    let out = monogamy(&["teleport", "--theta", "0.7", "--outcome", "01"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], serde_json::json!([0, 1]));
    assert_eq!(v["correction"], "X");
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["--measure", "entropy", "region"],
        vec!["bounds"],
        vec!["--measure", "tangle", "--c", "1", "bounds"],
        vec!["--samples", "0", "region"],
        vec!["curve", "spiral"],
        vec!["--format", "csv", "counterexample"],
        vec!["teleport", "--outcome", "2"],
        vec![
            "--c",
            "empirical",
            "bounds-arith",
            "--e-abc",
            "1",
            "--e-ab",
            "0",
            "--e-ac",
            "0",
        ],
    ] {
        let out = monogamy(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    let out = monogamy(&[
        "--samples",
        "3",
        "--out",
        missing.to_str().unwrap(),
        "region",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
