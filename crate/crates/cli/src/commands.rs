use std::f64::consts::FRAC_PI_2;

use monogamy::locc::{teleport, TeleportTranscript};
use monogamy::measures::{eof_from_tangle, RoofConfig};
use monogamy::monogamy::{
    alpha_fit, bound_audit, count_power_violations, empirical_c, equality_audit,
    monotonicity_audit, regularised_bound, sample_mixed_records, sample_records, triple_eof,
    AlphaFitReport, BoundAuditReport, BoundCheck, BoundKind, Dims, Flagged, MixedCkw,
    MonogamyRecord, StateTag, TripleMeasure,
};
use monogamy::states::{haar_random_pure, named_state, NamedState, PureState};
use monogamy::Complex64;
use serde::Serialize;

use crate::args::{BoundConstant, Cli, Command, CurveId, Format, RunConfig};
use crate::{CliError, Outcome, RECORD_HEADER, SCHEMA_VERSION};

/// Tangle residuals of pure states below this count as findings.
const PURE_RESIDUAL_TOL: f64 = -1e-9;
const FIDELITY_TOL: f64 = 1e-12;
const EOF_GRID: u64 = 1000;
const ALPHA_GRID: u64 = 200;

type Result<T> = std::result::Result<T, CliError>;

/// Runs the subcommand and returns its output without writing it anywhere.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let run = &cli.run;
    match &cli.command {
        Command::Region => region(run),
        Command::Curve {
            curve,
            alphas,
            points,
        } => curve_data(run, *curve, alphas, *points),
        Command::Counterexample => counterexample(run),
        Command::AlphaFit {
            fresh_samples,
            fresh_seed,
        } => alpha(run, *fresh_samples, *fresh_seed),
        Command::EqualityAudit => equality(run),
        Command::Monotonicity => monotonicity(run),
        Command::Bounds {
            fresh_samples,
            fresh_seed,
        } => bounds(run, *fresh_samples, *fresh_seed),
        Command::BoundsArith {
            e_abc,
            e_ab,
            e_ac,
            dims,
        } => bounds_arith(run, *e_abc, *e_ab, *e_ac, dims),
        Command::Ckw { rank } => ckw(run, *rank),
        Command::Teleport {
            theta,
            phi,
            random_input,
            outcome,
        } => teleport_cmd(run, *theta, *phi, *random_input, outcome.as_deref()),
    }
}

fn measure_or(run: &RunConfig, default: TripleMeasure) -> TripleMeasure {
    run.measure.unwrap_or(default)
}

fn records(run: &RunConfig, measure: TripleMeasure) -> Result<Vec<MonogamyRecord>> {
    Ok(sample_records(measure, run.samples as usize, run.seed)?)
}

fn report_only(run: &RunConfig, command: &str) -> Result<()> {
    match run.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("`{command}` only writes json"))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(command: &str, body: T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&Doc {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn clean(bytes: Vec<u8>) -> Outcome {
    Outcome {
        bytes,
        findings: None,
    }
}

fn finding(bytes: Vec<u8>, msg: Option<String>) -> Outcome {
    Outcome {
        bytes,
        findings: msg,
    }
}

#[derive(Serialize)]
struct RecordRow<'a> {
    index: usize,
    seed: String,
    measure: &'a str,
    e_abc: f64,
    e_ab: f64,
    e_ac: f64,
    residual: f64,
}

fn records_csv<'a>(records: impl IntoIterator<Item = &'a MonogamyRecord>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(RECORD_HEADER)?;
    for (index, r) in records.into_iter().enumerate() {
        let measure = r.measure.to_string();
        w.serialize(RecordRow {
            index,
            seed: r.state.to_string(),
            measure: &measure,
            e_abc: r.e_abc,
            e_ab: r.e_ab,
            e_ac: r.e_ac,
            residual: r.residual,
        })?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

#[derive(Serialize)]
struct Sample {
    measure: TripleMeasure,
    seed: u64,
    samples: u64,
}

fn sample_info(run: &RunConfig, measure: TripleMeasure) -> Sample {
    Sample {
        measure,
        seed: run.seed,
        samples: run.samples,
    }
}

fn region(run: &RunConfig) -> Result<Outcome> {
    let measure = measure_or(run, TripleMeasure::Tangle);
    let recs = records(run, measure)?;
    let bytes = match run.format.unwrap_or(Format::Csv) {
        Format::Csv => records_csv(&recs)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                #[serde(flatten)]
                sample: Sample,
                records: &'a [MonogamyRecord],
            }
            json(
                "region",
                Body {
                    sample: sample_info(run, measure),
                    records: &recs,
                },
            )?
        }
    };
    Ok(clean(bytes))
}

fn curve_data(
    run: &RunConfig,
    curve: CurveId,
    alphas: &[f64],
    points: Option<u64>,
) -> Result<Outcome> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let header: &[&str] = match curve {
        CurveId::EofVsCsq => {
            let n = points.unwrap_or(EOF_GRID);
            for k in 0..n {
                let t = k as f64 / (n - 1) as f64;
                rows.push(vec![t, eof_from_tangle(t)]);
            }
            &["c_squared", "e_f"]
        }
        CurveId::AlphaLevelSet => {
            if alphas.is_empty() || alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(CliError::Usage("alphas must be positive and finite".into()));
            }
            let n = points.unwrap_or(ALPHA_GRID);
            for &a in alphas {
                for k in 0..n {
                    rows.push(level_set_point(a, k, n));
                }
            }
            &["alpha", "e_ab", "e_ac"]
        }
    };
    let bytes = match run.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)?;
            for row in &rows {
                w.serialize(row)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                columns: &'a [&'a str],
                rows: &'a [Vec<f64>],
            }
            json(
                "curve",
                Body {
                    columns: header,
                    rows: &rows,
                },
            )?
        }
    };
    Ok(clean(bytes))
}

/// Point `k` of `n` on `x^a + y^a = 1`, via `x = cos(t)^(2/a)`, `y = sin(t)^(2/a)`.
fn level_set_point(alpha: f64, k: u64, n: u64) -> Vec<f64> {
    let (x, y) = if k == 0 {
        (1.0, 0.0)
    } else if k == n - 1 {
        (0.0, 1.0)
    } else {
        let t = FRAC_PI_2 * k as f64 / (n - 1) as f64;
        let (s, c) = t.sin_cos();
        (c.powf(2.0 / alpha), s.powf(2.0 / alpha))
    };
    vec![alpha, x, y]
}

fn counterexample(run: &RunConfig) -> Result<Outcome> {
    report_only(run, "counterexample")?;
    let state = NamedState::Counterexample;
    let rec = triple_eof(&named_state(state))?.tagged(StateTag::Named(state.to_string()));
    #[derive(Serialize)]
    struct Body {
        state: String,
        e_abc: f64,
        e_ab: f64,
        e_ac: f64,
        residual: f64,
        sum_of_marginals: f64,
        violates_sum_inequality: bool,
    }
    let sum = rec.e_ab + rec.e_ac;
    let bytes = json(
        "counterexample",
        Body {
            state: state.to_string(),
            e_abc: rec.e_abc,
            e_ab: rec.e_ab,
            e_ac: rec.e_ac,
            residual: rec.residual,
            sum_of_marginals: sum,
            violates_sum_inequality: sum > rec.e_abc,
        },
    )?;
    Ok(clean(bytes))
}

#[derive(Serialize)]
struct Revalidation {
    seed: u64,
    samples: u64,
    alpha: f64,
    violations: usize,
}

fn alpha(run: &RunConfig, fresh_samples: u64, fresh_seed: Option<u64>) -> Result<Outcome> {
    report_only(run, "alpha-fit")?;
    let measure = measure_or(run, TripleMeasure::Tangle);
    let recs = records(run, measure)?;
    let report = alpha_fit(&recs, run.alpha_cap)?;
    let revalidation = if fresh_samples > 0 {
        let seed = fresh_seed.unwrap_or(run.seed.wrapping_add(1));
        let fresh = sample_records(measure, fresh_samples as usize, seed)?;
        Some(Revalidation {
            seed,
            samples: fresh_samples,
            alpha: report.alpha_min,
            violations: count_power_violations(&fresh, report.alpha_min),
        })
    } else {
        None
    };
    let mut problems = Vec::new();
    if report.infinite {
        problems.push(format!(
            "{} records admit no finite alpha",
            report.infinite_witnesses.len()
        ));
    }
    if report.capped > 0 {
        problems.push(format!(
            "{} records need alpha above the cap",
            report.capped
        ));
    }
    if report.validation_violations > 0 {
        problems.push(format!(
            "{} fitting records fail at alpha_min",
            report.validation_violations
        ));
    }
    if let Some(r) = revalidation.as_ref().filter(|r| r.violations > 0) {
        problems.push(format!("{} fresh records fail at alpha_min", r.violations));
    }
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        sample: Sample,
        report: AlphaFitReport,
        revalidation: Option<Revalidation>,
    }
    let bytes = json(
        "alpha-fit",
        Body {
            sample: sample_info(run, measure),
            report,
            revalidation,
        },
    )?;
    Ok(finding(bytes, joined(problems)))
}

fn joined(problems: Vec<String>) -> Option<String> {
    (!problems.is_empty()).then(|| problems.join("; "))
}

fn flagged_report(
    run: &RunConfig,
    command: &str,
    audit: impl Fn(&[MonogamyRecord]) -> Vec<Flagged>,
    extra: serde_json::Value,
) -> Result<Outcome> {
    report_only(run, command)?;
    let measure = measure_or(run, TripleMeasure::Tangle);
    let recs = records(run, measure)?;
    let flagged = audit(&recs);
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        sample: Sample,
        #[serde(flatten)]
        thresholds: serde_json::Value,
        count: usize,
        flagged: Vec<Flagged>,
    }
    let count = flagged.len();
    let bytes = json(
        command,
        Body {
            sample: sample_info(run, measure),
            thresholds: extra,
            count,
            flagged,
        },
    )?;
    Ok(finding(
        bytes,
        (count > 0).then(|| format!("{count} records flagged")),
    ))
}

fn equality(run: &RunConfig) -> Result<Outcome> {
    let (eps, delta) = (run.epsilon, run.delta);
    flagged_report(
        run,
        "equality-audit",
        |r| equality_audit(r, eps, delta),
        serde_json::json!({ "epsilon": eps, "delta": delta }),
    )
}

fn monotonicity(run: &RunConfig) -> Result<Outcome> {
    flagged_report(
        run,
        "monotonicity",
        monotonicity_audit,
        serde_json::json!({}),
    )
}

fn bounds(run: &RunConfig, fresh_samples: u64, fresh_seed: Option<u64>) -> Result<Outcome> {
    report_only(run, "bounds")?;
    let measure = measure_or(run, TripleMeasure::Eof);
    if measure != TripleMeasure::Eof {
        return Err(CliError::Usage(
            "the formation bound needs eof records".into(),
        ));
    }
    let dims = Dims::qubits();
    let kind = BoundKind::Formation;
    let recs = records(run, measure)?;
    let c = match run.c {
        None => {
            return Err(CliError::Usage(
                "--c is required (a number or `empirical`)".into(),
            ))
        }
        Some(BoundConstant::Value(c)) => c,
        Some(BoundConstant::Empirical) => empirical_c(&recs, dims, kind)?
            .c_empirical
            .ok_or_else(|| CliError::Usage("no record constrains c".into()))?,
    };
    let sample = bound_audit(&recs, dims, kind, c)?;
    let fresh = if fresh_samples > 0 {
        let seed = fresh_seed.unwrap_or(run.seed.wrapping_add(1));
        let fresh_recs = sample_records(measure, fresh_samples as usize, seed)?;
        Some(FreshBound {
            seed,
            report: bound_audit(&fresh_recs, dims, kind, c)?,
        })
    } else {
        None
    };
    let total = sample.violations + fresh.as_ref().map_or(0, |f| f.report.violations);
    #[derive(Serialize)]
    struct FreshBound {
        seed: u64,
        report: BoundAuditReport,
    }
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        sample: Sample,
        c: f64,
        report: BoundAuditReport,
        fresh: Option<FreshBound>,
    }
    let bytes = json(
        "bounds",
        Body {
            sample: sample_info(run, measure),
            c,
            report: sample,
            fresh,
        },
    )?;
    Ok(finding(
        bytes,
        (total > 0).then(|| format!("{total} records break the bound at c = {c}")),
    ))
}

fn bounds_arith(
    run: &RunConfig,
    e_abc: f64,
    e_ab: f64,
    e_ac: f64,
    dims: &[usize],
) -> Result<Outcome> {
    report_only(run, "bounds-arith")?;
    let c = match run.c {
        Some(BoundConstant::Value(c)) => c,
        _ => return Err(CliError::Usage("--c must be a number here".into())),
    };
    let dims = match *dims {
        [a, b, cc] => Dims::new(a, b, cc)?,
        _ => return Err(CliError::Usage("--dims takes three values".into())),
    };
    let check = regularised_bound(e_abc, e_ab, e_ac, dims, c)?;
    #[derive(Serialize)]
    struct Body {
        e_abc: f64,
        e_ab: f64,
        e_ac: f64,
        dims: Dims,
        c: f64,
        exponent: i32,
        #[serde(flatten)]
        check: BoundCheck,
    }
    let bytes = json(
        "bounds-arith",
        Body {
            e_abc,
            e_ab,
            e_ac,
            dims,
            c,
            exponent: BoundKind::RegularisedRelativeEntropy.exponent(),
            check,
        },
    )?;
    Ok(finding(
        bytes,
        (!check.passes).then(|| format!("bound fails with slack {}", check.slack)),
    ))
}

fn ckw(run: &RunConfig, rank: Option<u64>) -> Result<Outcome> {
    if measure_or(run, TripleMeasure::Tangle) != TripleMeasure::Tangle {
        return Err(CliError::Usage("ckw works with the tangle".into()));
    }
    let format = run.format.unwrap_or(Format::Csv);
    match rank {
        None => {
            let recs = records(run, TripleMeasure::Tangle)?;
            let bad = recs
                .iter()
                .filter(|r| r.residual < PURE_RESIDUAL_TOL)
                .count();
            let bytes = match format {
                Format::Csv => records_csv(&recs)?,
                Format::Json => {
                    let min = recs
                        .iter()
                        .map(|r| r.residual)
                        .fold(f64::INFINITY, f64::min);
                    #[derive(Serialize)]
                    struct Body<'a> {
                        #[serde(flatten)]
                        sample: Sample,
                        min_residual: f64,
                        negative_residuals: usize,
                        records: &'a [MonogamyRecord],
                    }
                    json(
                        "ckw",
                        Body {
                            sample: sample_info(run, TripleMeasure::Tangle),
                            min_residual: min,
                            negative_residuals: bad,
                            records: &recs,
                        },
                    )?
                }
            };
            Ok(finding(
                bytes,
                (bad > 0).then(|| format!("{bad} negative residuals")),
            ))
        }
        Some(rank) => {
            let config = RoofConfig {
                ensemble_size: run.roof_size,
                restarts: run.roof_restarts,
                ..RoofConfig::default()
            };
            let mixed =
                sample_mixed_records(rank as usize, run.samples as usize, run.seed, &config)?;
            let alarms = mixed.iter().filter(|m| m.alarm).count();
            let bytes = match format {
                Format::Csv => records_csv(mixed.iter().map(|m| &m.record))?,
                Format::Json => {
                    #[derive(Serialize)]
                    struct Body<'a> {
                        #[serde(flatten)]
                        sample: Sample,
                        rank: u64,
                        roof: &'a RoofConfig,
                        alarms: usize,
                        records: &'a [MixedCkw],
                    }
                    json(
                        "ckw",
                        Body {
                            sample: sample_info(run, TripleMeasure::Tangle),
                            rank,
                            roof: &config,
                            alarms,
                            records: &mixed,
                        },
                    )?
                }
            };
            Ok(finding(
                bytes,
                (alarms > 0).then(|| format!("{alarms} residual alarms")),
            ))
        }
    }
}

fn parse_outcome(s: &str) -> Result<(u8, u8)> {
    match s.as_bytes() {
        [i @ (b'0' | b'1'), j @ (b'0' | b'1')] => Ok((i - b'0', j - b'0')),
        _ => Err(CliError::Usage(format!(
            "outcome must be two bits like `01`, got `{s}`"
        ))),
    }
}

fn teleport_cmd(
    run: &RunConfig,
    theta: f64,
    phi: f64,
    random_input: bool,
    outcome: Option<&str>,
) -> Result<Outcome> {
    report_only(run, "teleport")?;
    let forced = outcome.map(parse_outcome).transpose()?;
    let input = if random_input {
        haar_random_pure(&[2], run.seed)?
    } else {
        let (s, c) = (0.5 * theta).sin_cos();
        PureState::normalized(
            vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
            vec![2],
        )?
    };
    let transcript: TeleportTranscript = teleport(&input, forced, run.seed)?;
    let low = transcript.fidelity < 1.0 - FIDELITY_TOL;
    let fidelity = transcript.fidelity;
    let bytes = json("teleport", transcript)?;
    Ok(finding(bytes, low.then(|| format!("fidelity {fidelity}"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_bits() {
        assert_eq!(parse_outcome("10").unwrap(), (1, 0));
        assert!(parse_outcome("2").is_err());
        assert!(parse_outcome("012").is_err());
    }

    #[test]
    fn level_set_is_on_curve() {
        for a in [1.0, 2.0, 15.0] {
            for k in 0..50 {
                let p = level_set_point(a, k, 50);
                let lhs = p[1].powf(a) + p[2].powf(a);
                assert!((lhs - 1.0).abs() < 1e-12, "{a} {k}: {lhs}");
            }
        }
    }
}
