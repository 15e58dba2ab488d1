//! Acceptance suite. Each test prints one `criterion N ... PASS|FAIL` line to
//! stderr (bypassing the test harness capture) and then asserts.
//!
//! Seeds are fixed constants below; the fresh samples use different base seeds
//! from the fitting samples.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use monogamy::locc::teleport;
use monogamy::measures::{
    convex_roof, eof_closed_form, eof_from_tangle, RoofConfig, RoofFunctional,
};
use monogamy::monogamy::{
    alpha_fit, ckw_residual, count_power_violations, empirical_c, equality_audit, formation_bound,
    monotonicity_audit, sample_records, triple_eof, BoundKind, Dims, MonogamyRecord, TripleMeasure,
    DEFAULT_ALPHA_CAP,
};
use monogamy::states::{
    derive_seed, ginibre_random_density, haar_random_pure, named_state, NamedState,
};

const FIT_SEED: u64 = 1;
const FRESH_SEED: u64 = 2;
const LARGE: usize = 100_000;
const MEDIUM: usize = 10_000;

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let line = format!(
        "criterion {criterion:>2} {name}: {} ({detail})\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn check(criterion: u32, name: &str, failures: Vec<String>, detail: String) {
    let pass = failures.is_empty();
    let detail = if pass {
        detail
    } else {
        format!("{detail}; {}", failures.join("; "))
    };
    report(criterion, name, pass, &detail);
    assert!(pass, "criterion {criterion} {name}: {detail}");
}

fn require(failures: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

#[test]
fn counterexample_triple() {
    let start = Instant::now();
    let r = triple_eof(&named_state(NamedState::Counterexample)).unwrap();
    let elapsed = start.elapsed();
    let mut f = Vec::new();
    require(
        &mut f,
        (r.e_abc - 1.0).abs() <= 1e-9,
        format!("e_abc = {}", r.e_abc),
    );
    for (name, v) in [("e_ab", r.e_ab), ("e_ac", r.e_ac)] {
        require(&mut f, (v - 0.6009).abs() <= 1e-3, format!("{name} = {v}"));
    }
    require(
        &mut f,
        r.e_ab + r.e_ac > r.e_abc,
        "sum of marginals does not exceed the whole",
    );
    require(
        &mut f,
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    );
    check(
        1,
        "counterexample",
        f,
        format!(
            "e_abc={:.12} e_ab={:.10} e_ac={:.10} residual={:.6} in {elapsed:?}",
            r.e_abc, r.e_ab, r.e_ac, r.residual
        ),
    );
}

#[test]
fn tangle_residuals_nonnegative() {
    let start = Instant::now();
    let records = sample_records(TripleMeasure::Tangle, LARGE, FIT_SEED).unwrap();
    let min = records
        .iter()
        .map(|r| r.residual)
        .fold(f64::INFINITY, f64::min);
    let w = ckw_residual(&named_state(NamedState::W)).unwrap();
    let ghz = ckw_residual(&named_state(NamedState::Ghz)).unwrap();
    let elapsed = start.elapsed();
    let mut f = Vec::new();
    require(&mut f, min >= -1e-9, format!("min residual {min:e}"));
    require(
        &mut f,
        w.residual.abs() < 1e-9,
        format!("W residual {:e}", w.residual),
    );
    let ghz_ok =
        (ghz.e_abc - 1.0).abs() < 1e-12 && ghz.e_ab.abs() < 1e-12 && ghz.e_ac.abs() < 1e-12;
    require(
        &mut f,
        ghz_ok,
        format!("GHZ {:?}", (ghz.e_abc, ghz.e_ab, ghz.e_ac)),
    );
    require(
        &mut f,
        elapsed < Duration::from_secs(60),
        format!("took {elapsed:?}"),
    );
    check(2, "tangle residuals", f, format!(
        "{LARGE} states, min residual {min:.3e}, W residual {:.1e}, GHZ ({}, {}, {}) in {elapsed:?}",
        w.residual, ghz.e_abc, ghz.e_ab, ghz.e_ac
    ));
}

#[test]
fn roof_matches_closed_form() {
    let start = Instant::now();
    let config = RoofConfig::default();
    let mut f = Vec::new();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for rank in [2, 4] {
        for i in 0..200 {
            let seed = derive_seed(3000 + rank as u64, i);
            let rho = ginibre_random_density(4, rank, seed).unwrap();
            let closed = eof_closed_form(&rho).unwrap().value;
            let cfg = RoofConfig {
                seed,
                ..config.clone()
            };
            let roof = convex_roof(RoofFunctional::Entropy, &rho, &cfg)
                .unwrap()
                .value;
            let gap = roof - closed;
            worst = worst.max(gap.abs());
            count += 1;
            if gap.abs() >= 1e-3 || gap < -1e-9 {
                f.push(format!("rank {rank} item {i}: roof {roof} closed {closed}"));
            }
        }
    }
    let elapsed = start.elapsed();
    require(
        &mut f,
        elapsed < Duration::from_secs(600),
        format!("took {elapsed:?}"),
    );
    check(3, "roof vs closed form", f, format!(
        "{count} matrices (200 each of rank 2 and 4), max |roof - closed| {worst:.2e} in {elapsed:?}"
    ));
}

#[test]
fn formation_curve_increasing() {
    let n = 1000;
    let grid: Vec<f64> = (0..n)
        .map(|k| eof_from_tangle(k as f64 / (n - 1) as f64))
        .collect();
    let mut f = Vec::new();
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    require(&mut f, increasing, "not strictly increasing");
    require(
        &mut f,
        grid[0].abs() <= 1e-12,
        format!("E_F(0) = {}", grid[0]),
    );
    require(
        &mut f,
        (grid[n - 1] - 1.0).abs() <= 1e-12,
        format!("E_F(1) = {}", grid[n - 1]),
    );

    // the CLI curve carries the same values
    let out = cli(&["curve", "eof-vs-csq"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    require(
        &mut f,
        rows.len() == n,
        format!("cli curve has {} rows", rows.len()),
    );
    let same = rows.iter().zip(&grid).all(|(r, g)| r.1 == *g);
    require(&mut f, same, "cli curve differs from the library");
    check(
        4,
        "formation curve",
        f,
        format!("{n} points, E_F(0)={} E_F(1)={}", grid[0], grid[n - 1]),
    );
}

#[test]
fn alpha_fit_coherent() {
    let mut f = Vec::new();
    let tangles = sample_records(TripleMeasure::Tangle, LARGE, FIT_SEED).unwrap();
    let t = alpha_fit(&tangles, DEFAULT_ALPHA_CAP).unwrap();
    require(
        &mut f,
        !t.infinite && t.alpha_min <= 1.0 + 1e-6,
        format!("tangle alpha_min {}", t.alpha_min),
    );

    let eofs = sample_records(TripleMeasure::Eof, LARGE, FIT_SEED).unwrap();
    let e = alpha_fit(&eofs, DEFAULT_ALPHA_CAP).unwrap();
    let finite = !e.infinite && e.capped == 0 && e.alpha_min.is_finite();
    require(
        &mut f,
        finite,
        format!(
            "eof fit not finite: {} infinite, {} capped",
            e.infinite_witnesses.len(),
            e.capped
        ),
    );
    require(
        &mut f,
        e.validation_violations == 0,
        format!("{} fitting violations", e.validation_violations),
    );
    let fresh = sample_records(TripleMeasure::Eof, MEDIUM, FRESH_SEED).unwrap();
    let fresh_bad = count_power_violations(&fresh, e.alpha_min);
    require(
        &mut f,
        fresh_bad == 0,
        format!("{fresh_bad} fresh eof violations"),
    );
    check(5, "alpha fit", f, format!(
        "tangle alpha_min {:.6}, eof alpha_min {:.6} on {LARGE}, fresh {MEDIUM} violations {fresh_bad}",
        t.alpha_min, e.alpha_min
    ));
}

#[test]
fn equality_audit_clean() {
    let mut f = Vec::new();
    let mut sizes = Vec::new();
    for m in [TripleMeasure::Tangle, TripleMeasure::Eof] {
        let records = sample_records(m, LARGE, FIT_SEED).unwrap();
        let flagged = equality_audit(&records, 1e-6, 1e-3);
        require(
            &mut f,
            flagged.is_empty(),
            format!("{m}: {} candidates", flagged.len()),
        );
        sizes.push(format!("{m} {}", flagged.len()));
    }
    let mut planted = sample_records(TripleMeasure::Tangle, 100, FIT_SEED).unwrap();
    planted.insert(
        37,
        MonogamyRecord::new(1.0, 1.0, 0.5, TripleMeasure::Tangle),
    );
    let hits: Vec<usize> = equality_audit(&planted, 1e-6, 1e-3)
        .iter()
        .map(|x| x.index)
        .collect();
    require(
        &mut f,
        hits == [37],
        format!("planted violation found at {hits:?}"),
    );
    check(
        6,
        "equality audit",
        f,
        format!(
            "{LARGE} records per measure, candidates: {}; planted record detected",
            sizes.join(", ")
        ),
    );
}

#[test]
fn marginals_never_exceed_whole() {
    let mut f = Vec::new();
    let mut total = 0;
    for m in [TripleMeasure::Tangle, TripleMeasure::Eof] {
        for seed in [FIT_SEED, FRESH_SEED] {
            let n = if seed == FIT_SEED { LARGE } else { MEDIUM };
            let records = sample_records(m, n, seed).unwrap();
            total += records.len();
            let bad = monotonicity_audit(&records);
            require(
                &mut f,
                bad.is_empty(),
                format!("{m} seed {seed}: {} violations", bad.len()),
            );
        }
    }
    check(
        7,
        "monotonicity",
        f,
        format!("{total} records over both measures, zero violations"),
    );
}

#[test]
fn formation_bound_on_fresh_sample() {
    let mut f = Vec::new();
    let dims = Dims::qubits();
    let fit = sample_records(TripleMeasure::Eof, MEDIUM, FIT_SEED).unwrap();
    let c = empirical_c(&fit, dims, BoundKind::Formation)
        .unwrap()
        .c_empirical;
    let c = match c {
        Some(c) if c > 0.0 && c.is_finite() => c,
        other => {
            f.push(format!("c_empirical {other:?}"));
            0.0
        }
    };
    let fresh = sample_records(TripleMeasure::Eof, MEDIUM, FRESH_SEED).unwrap();
    let checks: Vec<f64> = fresh
        .iter()
        .map(|r| formation_bound(r, dims, c).unwrap())
        .filter(|b| !b.passes)
        .map(|b| b.slack)
        .collect();
    let worst = checks.iter().copied().fold(0.0, f64::min);
    require(
        &mut f,
        checks.is_empty(),
        format!(
            "{} fresh violations at c = {c:.6}, worst slack {worst:.4}",
            checks.len()
        ),
    );
    check(
        8,
        "formation bound",
        f,
        format!("c_empirical {c:.6} from {MEDIUM} records, fresh {MEDIUM}"),
    );
}

#[test]
fn teleportation() {
    let mut f = Vec::new();
    let mut worst: f64 = 1.0;
    for i in 0..1000 {
        let psi = haar_random_pure(&[2], derive_seed(90, i)).unwrap();
        for o in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            worst = worst.min(teleport(&psi, Some(o), 0).unwrap().fidelity);
        }
    }
    require(
        &mut f,
        worst >= 1.0 - 1e-12,
        format!("min fidelity {worst}"),
    );

    let runs = 10_000u64;
    let mut counts = [0u64; 4];
    for i in 0..runs {
        let psi = haar_random_pure(&[2], derive_seed(91, 2 * i)).unwrap();
        let t = teleport(&psi, None, derive_seed(91, 2 * i + 1)).unwrap();
        counts[(2 * t.outcome.0 + t.outcome.1) as usize] += 1;
    }
    let mean = runs as f64 / 4.0;
    let sigma = (runs as f64 * 0.25 * 0.75).sqrt();
    for (k, &c) in counts.iter().enumerate() {
        require(
            &mut f,
            (c as f64 - mean).abs() <= 3.0 * sigma,
            format!("outcome {k}: {c}"),
        );
    }
    check(9, "teleportation", f, format!(
        "min fidelity over 4000 branches {worst:.15}, outcome counts {counts:?} (3 sigma = {:.0})", 3.0 * sigma
    ));
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .args(args)
        .env_clear()
        .output()
        .expect("run monogamy")
}

fn cli_to(args: &[&str], out: &Path) -> (Vec<u8>, Option<i32>) {
    let mut full: Vec<&str> = args.to_vec();
    let path = out.to_str().unwrap();
    full.extend(["--out", path]);
    let status = cli(&full).status.code();
    (std::fs::read(out).unwrap_or_default(), status)
}

#[test]
fn subcommands_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["--samples", "200", "region"],
        vec!["--samples", "200", "--measure", "eof", "region"],
        vec!["--samples", "50", "--format", "json", "region"],
        vec!["curve", "eof-vs-csq"],
        vec!["curve", "alpha-level-set"],
        vec!["counterexample"],
        vec!["--samples", "500", "alpha-fit", "--fresh-samples", "200"],
        vec!["--samples", "500", "--measure", "eof", "alpha-fit"],
        vec!["--samples", "500", "equality-audit"],
        vec!["--samples", "500", "--measure", "eof", "monotonicity"],
        vec![
            "--samples",
            "500",
            "--c",
            "empirical",
            "bounds",
            "--fresh-samples",
            "200",
        ],
        vec![
            "--c",
            "1",
            "bounds-arith",
            "--e-abc",
            "0.5",
            "--e-ab",
            "0.5",
            "--e-ac",
            "0.5",
        ],
        vec!["--samples", "200", "ckw"],
        vec![
            "--samples",
            "2",
            "--roof-restarts",
            "2",
            "ckw",
            "--rank",
            "2",
        ],
        vec!["--seed", "5", "teleport", "--random-input"],
        vec![
            "teleport",
            "--theta",
            "1.2",
            "--phi",
            "0.4",
            "--outcome",
            "10",
        ],
    ];
    let mut f = Vec::new();
    for (k, args) in cases.iter().enumerate() {
        let (a, sa) = cli_to(args, &dir.path().join(format!("{k}a")));
        let (b, sb) = cli_to(args, &dir.path().join(format!("{k}b")));
        let label = args.join(" ");
        require(&mut f, !a.is_empty(), format!("`{label}` wrote nothing"));
        require(&mut f, a == b, format!("`{label}` differs between runs"));
        require(
            &mut f,
            sa == sb && matches!(sa, Some(0) | Some(1)),
            format!("`{label}` exit {sa:?}/{sb:?}"),
        );
    }
    check(
        10,
        "determinism",
        f,
        format!("{} subcommand configurations run twice", cases.len()),
    );
}
