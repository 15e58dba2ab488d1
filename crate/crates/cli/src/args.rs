use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monogamy::monogamy::{TripleMeasure, DEFAULT_ALPHA_CAP};

/// Entanglement measures and monogamy audits over sampled three-qubit states.
///
/// Every flag can also be set through an environment variable named
/// `MONOGAMY_<FLAG>` (for example `MONOGAMY_SEED`).
#[derive(Debug, Parser)]
#[command(name = "monogamy", version)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Number of sampled states.
    #[arg(long, global = true, env = "MONOGAMY_SAMPLES", default_value_t = 1000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Base seed; item `i` uses a seed derived from this and `i`.
    #[arg(long, global = true, env = "MONOGAMY_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Measure for record triples: tangle or eof (default tangle; eof for `bounds`).
    #[arg(long, global = true, env = "MONOGAMY_MEASURE", value_parser = TripleMeasure::from_str)]
    pub measure: Option<TripleMeasure>,
    #[arg(long, global = true, env = "MONOGAMY_ALPHA_CAP", default_value_t = DEFAULT_ALPHA_CAP)]
    pub alpha_cap: f64,
    /// Bound constant: a number, or `empirical` to use the sample estimate.
    #[arg(long = "c", global = true, env = "MONOGAMY_C")]
    pub c: Option<BoundConstant>,
    #[arg(long, global = true, env = "MONOGAMY_EPSILON", default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, global = true, env = "MONOGAMY_DELTA", default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(
        long,
        global = true,
        env = "MONOGAMY_ROOF_RESTARTS",
        default_value_t = 32
    )]
    pub roof_restarts: usize,
    /// Ensemble size for the roof optimizer (default `max(4, rank^2)`).
    #[arg(long, global = true, env = "MONOGAMY_ROOF_SIZE")]
    pub roof_size: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "MONOGAMY_OUT")]
    pub out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, env = "MONOGAMY_FORMAT", value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundConstant {
    Value(f64),
    Empirical,
}

impl FromStr for BoundConstant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("empirical") {
            return Ok(BoundConstant::Empirical);
        }
        match s.parse::<f64>() {
            Ok(c) if c.is_finite() && c >= 0.0 => Ok(BoundConstant::Value(c)),
            _ => Err(format!(
                "expected a nonnegative number or `empirical`, got `{s}`"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveId {
    /// Entanglement of formation against squared concurrence.
    #[value(name = "eof-vs-csq", alias = "eof_vs_csq")]
    EofVsCsq,
    /// Level sets `(x^a + y^a)^(1/a) = 1` for each alpha.
    #[value(name = "alpha-level-set", alias = "alpha_level_set")]
    AlphaLevelSet,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled record triples, one CSV row per state.
    Region,
    /// Plot-ready curve data.
    Curve {
        #[arg(value_enum)]
        curve: CurveId,
        #[arg(long, value_delimiter = ',', default_value = "2,10,15,50")]
        alphas: Vec<f64>,
        /// Grid size (default 1000 for eof-vs-csq, 200 per alpha otherwise).
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        points: Option<u64>,
    },
    /// Entanglement-of-formation triple of the additivity counterexample.
    Counterexample,
    /// Smallest alpha for the power inequality, with optional revalidation.
    AlphaFit {
        /// Size of an independent sample to revalidate the fitted alpha on.
        #[arg(long, default_value_t = 0)]
        fresh_samples: u64,
        /// Base seed of the revalidation sample (default: seed + 1).
        #[arg(long)]
        fresh_seed: Option<u64>,
    },
    /// Records where one marginal saturates the whole while the other stays entangled.
    EqualityAudit,
    /// Records where a marginal exceeds the whole.
    Monotonicity,
    /// Dimension-dependent formation bound (exponent 8) on sampled eof records.
    Bounds {
        #[arg(long, default_value_t = 0)]
        fresh_samples: u64,
        #[arg(long)]
        fresh_seed: Option<u64>,
    },
    /// Exponent-4 bound on externally supplied values.
    BoundsArith {
        #[arg(long)]
        e_abc: f64,
        #[arg(long)]
        e_ab: f64,
        #[arg(long)]
        e_ac: f64,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        dims: Vec<usize>,
    },
    /// Tangle triples of pure states, or of random mixed states via the convex roof.
    Ckw {
        /// Rank of random mixed three-qubit states; pure states when absent.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8))]
        rank: Option<u64>,
    },
    /// Teleports one qubit and prints the transcript.
    Teleport {
        /// Polar angle of the input on the Bloch sphere.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        /// Draw a Haar-random input from the seed instead.
        #[arg(long)]
        random_input: bool,
        /// Force the measurement outcome, written as two bits (`00`, `01`, `10`, `11`).
        #[arg(long)]
        outcome: Option<String>,
    },
}
