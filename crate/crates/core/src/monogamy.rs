//! Monogamy audits over tripartite records.
//!
//! A [`MonogamyRecord`] holds `E_A(BC)`, `E_AB`, `E_AC` for one three-qubit
//! state. Records come from pure states ([`ckw_residual`], [`triple_eof`]) or,
//! for the tangle, from mixed states through the convex roof ([`ckw_mixed`]).
//! The audits below are sequential reductions over record lists.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    concurrence, convex_roof, entropy_of_entanglement, eof_from_tangle, marginal_tangles,
    tangle_pure, MeasureId, RoofConfig, RoofFunctional,
};
use crate::states::{
    derive_seed, ginibre_random_density, haar_random_pure, Cut, DensityMatrix, PureState,
};

/// Slack allowed when checking `E_A(BC) >= max(E_AB, E_AC)`.
pub const MONOTONICITY_TOL: f64 = 1e-8;
/// Mixed-state tangle residuals below this are reported as alarms.
pub const MIXED_RESIDUAL_ALARM: f64 = -1e-6;
/// Lower end of the alpha bracket.
pub const ALPHA_FLOOR: f64 = 1e-3;
pub const DEFAULT_ALPHA_CAP: f64 = 512.0;
/// Bisection tolerance on alpha.
pub const ALPHA_TOL: f64 = 1e-9;
/// Slack allowed when re-checking the power inequality at a fitted alpha.
pub const ALPHA_CHECK_TOL: f64 = 1e-9;
/// A record whose larger marginal is this close to `E_A(BC)` admits no finite alpha.
pub const SATURATION_TOL: f64 = 1e-9;
/// Fraction of `E_A(BC)` where the piecewise bound switches branch.
pub const PIECEWISE_KNEE: f64 = 0.8;

const THREE_QUBITS: [usize; 3] = [2, 2, 2];

/// Measure used to build a record triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleMeasure {
    /// Squared concurrence; `E_A(BC)` is the pure-state tangle.
    Tangle,
    /// Entanglement of formation; `E_A(BC)` is the entropy of entanglement.
    Eof,
}

impl TripleMeasure {
    pub fn measure_id(self) -> MeasureId {
        match self {
            TripleMeasure::Tangle => MeasureId::Tangle,
            TripleMeasure::Eof => MeasureId::EntanglementOfFormation,
        }
    }
}

impl fmt::Display for TripleMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TripleMeasure::Tangle => "tangle",
            TripleMeasure::Eof => "eof",
        })
    }
}

impl FromStr for TripleMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tangle" => Ok(TripleMeasure::Tangle),
            "eof" => Ok(TripleMeasure::Eof),
            _ => Err(Error::InvalidFunctional(s.to_string())),
        }
    }
}

/// Where a record's state came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateTag {
    Seed(u64),
    Named(String),
    Unlabelled,
}

impl fmt::Display for StateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateTag::Seed(s) => write!(f, "{s}"),
            StateTag::Named(n) => f.write_str(n),
            StateTag::Unlabelled => Ok(()),
        }
    }
}

/// One state's triple `(E_A(BC), E_AB, E_AC)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyRecord {
    pub e_abc: f64,
    pub e_ab: f64,
    pub e_ac: f64,
    /// `e_abc - e_ab - e_ac`
    pub residual: f64,
    pub measure: TripleMeasure,
    pub state: StateTag,
}

impl MonogamyRecord {
    pub fn new(e_abc: f64, e_ab: f64, e_ac: f64, measure: TripleMeasure) -> Self {
        Self {
            e_abc,
            e_ab,
            e_ac,
            residual: e_abc - e_ab - e_ac,
            measure,
            state: StateTag::Unlabelled,
        }
    }

    pub fn tagged(mut self, tag: StateTag) -> Self {
        self.state = tag;
        self
    }

    pub fn max_pair(&self) -> f64 {
        self.e_ab.max(self.e_ac)
    }

    pub fn min_pair(&self) -> f64 {
        self.e_ab.min(self.e_ac)
    }
}

/// A record picked out by an audit, with its position in the input list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub index: usize,
    pub record: MonogamyRecord,
}

fn require_three_qubits(dims: &[usize]) -> Result<()> {
    if dims != THREE_QUBITS {
        return Err(Error::WrongDims {
            expected: THREE_QUBITS.to_vec(),
            got: dims.to_vec(),
        });
    }
    Ok(())
}

/// Tangle triple of a pure three-qubit state.
pub fn ckw_residual(state: &PureState) -> Result<MonogamyRecord> {
    require_three_qubits(state.dims())?;
    let e_abc = tangle_pure(state, &Cut::first())?.value;
    let (e_ab, e_ac) = marginal_tangles(state)?;
    Ok(MonogamyRecord::new(
        e_abc,
        e_ab,
        e_ac,
        TripleMeasure::Tangle,
    ))
}

/// Entanglement-of-formation triple of a pure three-qubit state.
pub fn triple_eof(state: &PureState) -> Result<MonogamyRecord> {
    require_three_qubits(state.dims())?;
    let e_abc = entropy_of_entanglement(state, &Cut::first())?.value;
    let (t_ab, t_ac) = marginal_tangles(state)?;
    Ok(MonogamyRecord::new(
        e_abc,
        eof_from_tangle(t_ab),
        eof_from_tangle(t_ac),
        TripleMeasure::Eof,
    ))
}

/// Record for `measure` built from a pure three-qubit state.
pub fn pure_record(state: &PureState, measure: TripleMeasure) -> Result<MonogamyRecord> {
    match measure {
        TripleMeasure::Tangle => ckw_residual(state),
        TripleMeasure::Eof => triple_eof(state),
    }
}

/// Mixed-state tangle triple. `record.e_abc` is the best roof value found,
/// an upper bound on the true roof, so the residual is evidence only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedCkw {
    pub record: MonogamyRecord,
    pub roof_converged: bool,
    pub roof_iterations: usize,
    /// Residual below [`MIXED_RESIDUAL_ALARM`].
    pub alarm: bool,
}

pub fn ckw_mixed(rho: &DensityMatrix, config: &RoofConfig) -> Result<MixedCkw> {
    require_three_qubits(rho.dims())?;
    let roof = convex_roof(RoofFunctional::Tangle, rho, config)?;
    let c_ab = concurrence(&rho.reduced(&[0, 1])?)?.value;
    let c_ac = concurrence(&rho.reduced(&[0, 2])?)?.value;
    let record = MonogamyRecord::new(roof.value, c_ab * c_ab, c_ac * c_ac, TripleMeasure::Tangle);
    Ok(MixedCkw {
        alarm: record.residual < MIXED_RESIDUAL_ALARM,
        record,
        roof_converged: roof.converged,
        roof_iterations: roof.iterations,
    })
}

/// Records for `count` Haar-random pure three-qubit states. Item `i` uses the
/// seed `derive_seed(base_seed, i)`, which is stored in its tag.
pub fn sample_records(
    measure: TripleMeasure,
    count: usize,
    base_seed: u64,
) -> Result<Vec<MonogamyRecord>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base_seed, i);
            let state = haar_random_pure(&THREE_QUBITS, seed)?;
            Ok(pure_record(&state, measure)?.tagged(StateTag::Seed(seed)))
        })
        .collect()
}

/// [`ckw_mixed`] on `count` random rank-`rank` three-qubit density matrices.
/// Item `i` uses the seed `derive_seed(base_seed, i)` for both the state and
/// the roof restarts; `config.seed` is ignored.
pub fn sample_mixed_records(
    rank: usize,
    count: usize,
    base_seed: u64,
    config: &RoofConfig,
) -> Result<Vec<MixedCkw>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base_seed, i);
            let rho = ginibre_random_density(8, rank, seed)?;
            let cfg = RoofConfig {
                seed,
                ..config.clone()
            };
            let mut mixed = ckw_mixed(&rho, &cfg)?;
            mixed.record.state = StateTag::Seed(seed);
            Ok(mixed)
        })
        .collect()
}

/// Records whose larger marginal exceeds `E_A(BC)` by more than [`MONOTONICITY_TOL`].
pub fn monotonicity_audit(records: &[MonogamyRecord]) -> Vec<Flagged> {
    flag(records, |r| r.max_pair() > r.e_abc + MONOTONICITY_TOL)
}

/// Records with `E_A(BC) - max < epsilon` while `min > delta`: a marginal
/// saturates the whole while the other marginal stays entangled.
pub fn equality_audit(records: &[MonogamyRecord], epsilon: f64, delta: f64) -> Vec<Flagged> {
    flag(records, |r| {
        r.e_abc - r.max_pair() < epsilon && r.min_pair() > delta
    })
}

fn flag(records: &[MonogamyRecord], pred: impl Fn(&MonogamyRecord) -> bool) -> Vec<Flagged> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| pred(r))
        .map(|(index, r)| Flagged {
            index,
            record: r.clone(),
        })
        .collect()
}

/// Per-record outcome of the alpha fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum RecordAlpha {
    /// Smallest alpha (within [`ALPHA_TOL`]) for which the record satisfies the power inequality.
    Finite(f64),
    /// The requirement exceeds the cap; the cap is used.
    Capped(f64),
    /// A zero marginal; any positive alpha works.
    Skipped,
    /// Both marginals positive and one saturates `E_A(BC)`: no finite alpha.
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFitReport {
    /// Largest finite per-record alpha (the cap if any record was capped);
    /// [`ALPHA_FLOOR`] when no record constrains alpha.
    pub alpha_min: f64,
    /// Some record admits no finite alpha.
    pub infinite: bool,
    pub alpha_cap: f64,
    pub per_record: Vec<RecordAlpha>,
    pub sample_size: usize,
    pub skipped: usize,
    pub capped: usize,
    /// Indices of the records behind `infinite`.
    pub infinite_witnesses: Vec<usize>,
    /// Records of the fitting sample that fail the inequality at `alpha_min`.
    pub validation_violations: usize,
}

/// `(x^alpha + y^alpha)^(1/alpha)`, evaluated as `m (1 + r^alpha)^(1/alpha)`
/// with `m = max`, `r = min/max` so large alphas neither overflow nor underflow.
pub fn power_mean(x: f64, y: f64, alpha: f64) -> f64 {
    let (m, r) = ratio_form(x, y);
    if m == 0.0 {
        return 0.0;
    }
    m * (r.powf(alpha).ln_1p() / alpha).exp()
}

fn ratio_form(x: f64, y: f64) -> (f64, f64) {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi <= 0.0 {
        (0.0, 0.0)
    } else {
        (hi, lo.max(0.0) / hi)
    }
}

/// Whether a record satisfies the power inequality at `alpha` within [`ALPHA_CHECK_TOL`].
pub fn satisfies_power_inequality(record: &MonogamyRecord, alpha: f64) -> bool {
    power_mean(record.e_ab, record.e_ac, alpha) <= record.e_abc + ALPHA_CHECK_TOL
}

/// Smallest alpha in `[ALPHA_FLOOR, cap]` for one record.
pub fn record_alpha(record: &MonogamyRecord, cap: f64) -> RecordAlpha {
    if record.e_ab <= 0.0 || record.e_ac <= 0.0 {
        return RecordAlpha::Skipped;
    }
    if record.max_pair() >= record.e_abc - SATURATION_TOL {
        return RecordAlpha::Infinite;
    }
    let (m, r) = ratio_form(record.e_ab, record.e_ac);
    // ln(1 + r^a)/a <= ln(E/m), the left side decreasing in a
    let budget = (record.e_abc / m).ln();
    let excess = |a: f64| r.powf(a).ln_1p() / a - budget;
    if excess(ALPHA_FLOOR) <= 0.0 {
        return RecordAlpha::Finite(ALPHA_FLOOR);
    }
    if excess(cap) > 0.0 {
        return RecordAlpha::Capped(cap);
    }
    let (mut lo, mut hi) = (ALPHA_FLOOR, cap);
    while hi - lo > ALPHA_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RecordAlpha::Finite(hi)
}

/// Fits the smallest alpha making `(E_AB^a + E_AC^a)^(1/a) <= E_A(BC)` hold
/// for every record that admits one.
pub fn alpha_fit(records: &[MonogamyRecord], alpha_cap: f64) -> Result<AlphaFitReport> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if !(alpha_cap.is_finite() && alpha_cap > ALPHA_FLOOR) {
        return Err(Error::OutOfRange(format!(
            "alpha cap {alpha_cap} must be finite and above {ALPHA_FLOOR}"
        )));
    }
    let per_record: Vec<RecordAlpha> = records.iter().map(|r| record_alpha(r, alpha_cap)).collect();
    let mut alpha_min = ALPHA_FLOOR;
    let (mut skipped, mut capped) = (0, 0);
    let mut infinite_witnesses = Vec::new();
    for (i, a) in per_record.iter().enumerate() {
        match *a {
            RecordAlpha::Finite(x) => alpha_min = alpha_min.max(x),
            RecordAlpha::Capped(x) => {
                alpha_min = alpha_min.max(x);
                capped += 1;
            }
            RecordAlpha::Skipped => skipped += 1,
            RecordAlpha::Infinite => infinite_witnesses.push(i),
        }
    }
    Ok(AlphaFitReport {
        alpha_min,
        infinite: !infinite_witnesses.is_empty(),
        alpha_cap,
        sample_size: records.len(),
        skipped,
        capped,
        infinite_witnesses,
        validation_violations: count_power_violations(records, alpha_min),
        per_record,
    })
}

/// Number of records failing the power inequality at `alpha`.
pub fn count_power_violations(records: &[MonogamyRecord], alpha: f64) -> usize {
    records
        .iter()
        .filter(|r| !satisfies_power_inequality(r, alpha))
        .count()
}

/// Local dimensions of a tripartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        if a < 2 || b < 2 || c < 2 {
            return Err(Error::InvalidDims(vec![a, b, c]));
        }
        Ok(Self { a, b, c })
    }

    pub fn qubits() -> Self {
        Self { a: 2, b: 2, c: 2 }
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.a, self.b, self.c).map(|_| ())
    }
}

/// Exponent on the weaker marginal in the dimension-dependent bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Entanglement of formation, exponent 8.
    Formation,
    /// Regularised relative entropy of entanglement, exponent 4.
    RegularisedRelativeEntropy,
}

impl BoundKind {
    pub fn exponent(self) -> i32 {
        match self {
            BoundKind::Formation => 8,
            BoundKind::RegularisedRelativeEntropy => 4,
        }
    }
}

/// `d1 d2 log2(min(d1, d2))^k`
fn dimension_factor(d1: usize, d2: usize, k: i32) -> f64 {
    (d1 * d2) as f64 * (d1.min(d2) as f64).log2().powi(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub passes: bool,
    /// `E_A(BC)` minus the larger of the two branch bounds.
    pub slack: f64,
}

/// `E_A(BC) >= max(E_AB + c E_AC^k / (dA dC log2(min(dA,dC))^k),
///                 E_AC + c E_AB^k / (dA dB log2(min(dA,dB))^k))`,
/// passing within [`MONOTONICITY_TOL`].
pub fn dimension_bound(
    e_abc: f64,
    e_ab: f64,
    e_ac: f64,
    dims: Dims,
    c: f64,
    kind: BoundKind,
) -> Result<BoundCheck> {
    dims.validate()?;
    let k = kind.exponent();
    let via_ac = e_ab + c / dimension_factor(dims.a, dims.c, k) * e_ac.powi(k);
    let via_ab = e_ac + c / dimension_factor(dims.a, dims.b, k) * e_ab.powi(k);
    let slack = e_abc - via_ac.max(via_ab);
    Ok(BoundCheck {
        passes: slack >= -MONOTONICITY_TOL,
        slack,
    })
}

/// Formation bound (exponent 8) for an entanglement-of-formation record.
pub fn formation_bound(record: &MonogamyRecord, dims: Dims, c: f64) -> Result<BoundCheck> {
    dimension_bound(
        record.e_abc,
        record.e_ab,
        record.e_ac,
        dims,
        c,
        BoundKind::Formation,
    )
}

/// Exponent-4 bound on externally supplied regularised relative entropies.
pub fn regularised_bound(
    e_abc: f64,
    e_ab: f64,
    e_ac: f64,
    dims: Dims,
    c: f64,
) -> Result<BoundCheck> {
    for (name, v) in [("e_abc", e_abc), ("e_ab", e_ab), ("e_ac", e_ac)] {
        if v.is_nan() || v < 0.0 {
            return Err(Error::OutOfRange(format!(
                "{name} = {v} must be nonnegative"
            )));
        }
    }
    dimension_bound(
        e_abc,
        e_ab,
        e_ac,
        dims,
        c,
        BoundKind::RegularisedRelativeEntropy,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundAuditReport {
    /// Largest `c` consistent with every usable branch; `None` when every
    /// branch has a zero marginal and nothing constrains `c`.
    pub c_empirical: Option<f64>,
    /// The `c` the violation count refers to, if one was supplied.
    pub c_supplied: Option<f64>,
    pub violations: usize,
    pub dims: Dims,
    pub exponent: i32,
    pub records: usize,
    /// Branches dropped because their weaker marginal was zero.
    pub excluded_branches: usize,
}

/// Smallest `c` ratio over all branches with a positive weaker marginal.
pub fn empirical_c(
    records: &[MonogamyRecord],
    dims: Dims,
    kind: BoundKind,
) -> Result<BoundAuditReport> {
    if records.is_empty() {
        return Err(Error::EmptySample("no records for the bound audit".into()));
    }
    dims.validate()?;
    let k = kind.exponent();
    let f_ac = dimension_factor(dims.a, dims.c, k);
    let f_ab = dimension_factor(dims.a, dims.b, k);
    let mut c_min: Option<f64> = None;
    let mut excluded = 0;
    for r in records {
        for (gap, weak, factor) in [
            (r.e_abc - r.e_ab, r.e_ac, f_ac),
            (r.e_abc - r.e_ac, r.e_ab, f_ab),
        ] {
            let denom = weak.powi(k);
            if denom.is_nan() || denom <= 0.0 {
                excluded += 1;
                continue;
            }
            let ratio = (gap * factor / denom).max(0.0);
            c_min = Some(c_min.map_or(ratio, |c| c.min(ratio)));
        }
    }
    Ok(BoundAuditReport {
        c_empirical: c_min,
        c_supplied: None,
        violations: 0,
        dims,
        exponent: k,
        records: records.len(),
        excluded_branches: excluded,
    })
}

/// [`empirical_c`] plus the number of records failing the bound at `c`.
pub fn bound_audit(
    records: &[MonogamyRecord],
    dims: Dims,
    kind: BoundKind,
    c: f64,
) -> Result<BoundAuditReport> {
    let mut report = empirical_c(records, dims, kind)?;
    let mut violations = 0;
    for r in records {
        if !dimension_bound(r.e_abc, r.e_ab, r.e_ac, dims, c, kind)?.passes {
            violations += 1;
        }
    }
    report.c_supplied = Some(c);
    report.violations = violations;
    Ok(report)
}

/// Piecewise candidate for the monogamy function: `max(E_AB, E_AC)` unless
/// both marginals lie above `0.8 E_A(BC)`, where it is `E_AB + E_AC - 0.8 E_A(BC)`.
/// When only one marginal lies above the knee the max branch is used.
pub fn piecewise_f(e_ab: f64, e_ac: f64, e_abc: f64) -> Result<f64> {
    let in_range = |x: f64| (0.0..=e_abc).contains(&x);
    if !in_range(e_ab) || !in_range(e_ac) {
        return Err(Error::OutOfRange(format!(
            "marginals ({e_ab}, {e_ac}) must lie in [0, {e_abc}]"
        )));
    }
    let knee = PIECEWISE_KNEE * e_abc;
    if e_ab > knee && e_ac > knee {
        Ok(e_ab + e_ac - knee)
    } else {
        Ok(e_ab.max(e_ac))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{named_state, NamedState};

    const COUNTEREXAMPLE_EOF: f64 = 0.6008760367;

    fn rec(e_abc: f64, e_ab: f64, e_ac: f64) -> MonogamyRecord {
        MonogamyRecord::new(e_abc, e_ab, e_ac, TripleMeasure::Eof)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn ckw_named_states() {
        let ghz = ckw_residual(&named_state(NamedState::Ghz)).unwrap();
        assert!(close(ghz.e_abc, 1.0, 1e-12) && ghz.e_ab.abs() < 1e-12 && ghz.e_ac.abs() < 1e-12);
        assert!(close(ghz.residual, 1.0, 1e-12));

        let w = ckw_residual(&named_state(NamedState::W)).unwrap();
        assert!(close(w.e_abc, 8.0 / 9.0, 1e-12));
        assert!(close(w.e_ab, 4.0 / 9.0, 1e-12) && close(w.e_ac, 4.0 / 9.0, 1e-12));
        assert!(w.residual.abs() < 1e-9);

        let prod = PureState::basis(vec![2, 2, 2], 0).unwrap();
        let p = ckw_residual(&prod).unwrap();
        assert!(p.e_abc.abs() < 1e-12 && p.e_ab.abs() < 1e-12 && p.e_ac.abs() < 1e-12);
    }

    #[test]
    fn ckw_rejects_wrong_dims() {
        let bell = named_state(NamedState::Bell);
        assert!(matches!(ckw_residual(&bell), Err(Error::WrongDims { .. })));
        assert!(matches!(triple_eof(&bell), Err(Error::WrongDims { .. })));
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(ckw_mixed(&rho, &RoofConfig::default()).is_err());
    }

    #[test]
    fn marginals_match_reduced_concurrence() {
        for seed in 0..50 {
            let psi = haar_random_pure(&THREE_QUBITS, seed).unwrap();
            let r = ckw_residual(&psi).unwrap();
            let c_ab = concurrence(&psi.reduced(&[0, 1]).unwrap()).unwrap().value;
            let c_ac = concurrence(&psi.reduced(&[0, 2]).unwrap()).unwrap().value;
            assert!(close(r.e_ab, c_ab * c_ab, 1e-6));
            assert!(close(r.e_ac, c_ac * c_ac, 1e-6));
        }
    }

    #[test]
    fn eof_triples() {
        let ce = triple_eof(&named_state(NamedState::Counterexample)).unwrap();
        assert!(close(ce.e_abc, 1.0, 1e-12));
        assert!(close(ce.e_ab, COUNTEREXAMPLE_EOF, 1e-9));
        assert!(close(ce.e_ac, ce.e_ab, 1e-12));
        assert!(close(ce.residual, 1.0 - 2.0 * COUNTEREXAMPLE_EOF, 1e-9));

        let ghz = triple_eof(&named_state(NamedState::Ghz)).unwrap();
        assert!(close(ghz.e_abc, 1.0, 1e-12) && ghz.e_ab.abs() < 1e-12 && ghz.e_ac.abs() < 1e-12);

        let prod = triple_eof(&PureState::basis(vec![2, 2, 2], 5).unwrap()).unwrap();
        assert!(prod.e_abc.abs() < 1e-12 && prod.e_ab.abs() < 1e-12);
    }

    #[test]
    fn mixed_pure_input_matches_pure_record() {
        let w = named_state(NamedState::W);
        let mixed = ckw_mixed(&w.to_density(), &RoofConfig::default()).unwrap();
        let pure = ckw_residual(&w).unwrap();
        assert!(close(mixed.record.e_abc, pure.e_abc, 1e-6));
        assert!(close(mixed.record.e_ab, pure.e_ab, 1e-6));
        assert!(!mixed.alarm);
    }

    #[test]
    fn mixed_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2]);
        let cfg = RoofConfig {
            restarts: 2,
            ..RoofConfig::default()
        };
        let m = ckw_mixed(&rho, &cfg).unwrap();
        assert!(m.record.e_abc.abs() < 1e-6);
        assert!(m.record.e_ab.abs() < 1e-6 && m.record.e_ac.abs() < 1e-6);
    }

    #[test]
    fn mixed_ghz_w_residual_nonnegative() {
        let ghz = named_state(NamedState::Ghz).to_density();
        let w = named_state(NamedState::W).to_density();
        let rho = ghz.mix_with(&w, 0.5).unwrap();
        let cfg = RoofConfig {
            restarts: 4,
            ..RoofConfig::default()
        };
        let m = ckw_mixed(&rho, &cfg).unwrap();
        assert!(m.record.residual >= MIXED_RESIDUAL_ALARM, "{:?}", m.record);
        assert!(!m.alarm);
    }

    #[test]
    fn mixed_samples_are_seeded() {
        let cfg = RoofConfig {
            restarts: 2,
            ..RoofConfig::default()
        };
        let a = sample_mixed_records(2, 3, 7, &cfg).unwrap();
        assert_eq!(a, sample_mixed_records(2, 3, 7, &cfg).unwrap());
        for m in &a {
            assert!(!m.alarm, "{:?}", m.record);
            assert!(m.record.e_abc >= m.record.max_pair() - MONOTONICITY_TOL);
        }
        assert!(sample_mixed_records(9, 1, 0, &cfg).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_tagged() {
        let a = sample_records(TripleMeasure::Tangle, 20, 3).unwrap();
        let b = sample_records(TripleMeasure::Tangle, 20, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[4].state, StateTag::Seed(derive_seed(3, 4)));
        let psi = haar_random_pure(&THREE_QUBITS, derive_seed(3, 4)).unwrap();
        assert_eq!(ckw_residual(&psi).unwrap().e_abc, a[4].e_abc);
    }

    #[test]
    fn monotonicity_flags_synthetic_violation() {
        let records = vec![
            rec(1.0, 0.5, 0.5),
            rec(0.5, 0.9, 0.0),
            rec(0.5, 0.5 + 5e-9, 0.1),
        ];
        let flagged = monotonicity_audit(&records);
        assert_eq!(flagged.len(), 1);
        assert_eq!(flagged[0].index, 1);
    }

    #[test]
    fn sampled_records_are_monotone() {
        for m in [TripleMeasure::Tangle, TripleMeasure::Eof] {
            let records = sample_records(m, 2000, 11).unwrap();
            assert!(monotonicity_audit(&records).is_empty());
        }
    }

    #[test]
    fn equality_audit_examples() {
        let records = vec![rec(1.0, 1.0, 0.5), rec(1.0, 0.0, 0.0), rec(1.0, 0.5, 0.5)];
        let flagged = equality_audit(&records, 1e-6, 1e-3);
        assert_eq!(flagged.iter().map(|f| f.index).collect::<Vec<_>>(), vec![0]);
        let tangles = sample_records(TripleMeasure::Tangle, 2000, 5).unwrap();
        assert!(equality_audit(&tangles, 1e-6, 1e-3).is_empty());
    }

    #[test]
    fn alpha_single_records() {
        let a = record_alpha(&rec(1.0, 0.5, 0.5), DEFAULT_ALPHA_CAP);
        match a {
            RecordAlpha::Finite(x) => assert!(close(x, 1.0, 2e-9), "{x}"),
            other => panic!("{other:?}"),
        }
        let e = 0.6009_f64;
        let want = 2f64.ln() / -e.ln();
        match record_alpha(&rec(1.0, e, e), DEFAULT_ALPHA_CAP) {
            RecordAlpha::Finite(x) => assert!(close(x, want, 2e-9), "{x} vs {want}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            record_alpha(&rec(1.0, 0.0, 0.7), 512.0),
            RecordAlpha::Skipped
        );
        assert_eq!(
            record_alpha(&rec(1.0, 1.0, 0.5), 512.0),
            RecordAlpha::Infinite
        );
        match record_alpha(&rec(1.0, 0.1, 0.1), 512.0) {
            RecordAlpha::Finite(x) => assert!(close(x, 2f64.log10(), 2e-9), "{x}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alpha_fit_on_tangles_is_at_most_one() {
        let records = sample_records(TripleMeasure::Tangle, 2000, 21).unwrap();
        let report = alpha_fit(&records, DEFAULT_ALPHA_CAP).unwrap();
        assert!(!report.infinite);
        assert!(report.alpha_min <= 1.0 + 1e-6, "{}", report.alpha_min);
        assert_eq!(report.validation_violations, 0);
        assert_eq!(report.sample_size, 2000);
    }

    #[test]
    fn alpha_fit_reports() {
        assert!(matches!(alpha_fit(&[], 512.0), Err(Error::EmptyRecords)));
        let report = alpha_fit(&[rec(1.0, 1.0, 0.5), rec(1.0, 0.5, 0.5)], 512.0).unwrap();
        assert!(report.infinite);
        assert_eq!(report.infinite_witnesses, vec![0]);
        assert!(close(report.alpha_min, 1.0, 2e-9));
        assert_eq!(report.validation_violations, 1);
        let capped = alpha_fit(&[rec(1.0, 0.999_999, 0.999_999)], 2.0).unwrap();
        assert_eq!(capped.capped, 1);
        assert_eq!(capped.alpha_min, 2.0);
    }

    #[test]
    fn power_mean_limits() {
        assert!(close(power_mean(0.3, 0.4, 1.0), 0.7, 1e-15));
        assert!(close(power_mean(0.3, 0.4, 2.0), 0.5, 1e-15));
        assert!(close(power_mean(0.3, 0.4, 500.0), 0.4, 1e-9));
        assert_eq!(power_mean(0.0, 0.0, 3.0), 0.0);
        assert!(power_mean(0.9, 0.8, 1e-3).is_finite());
    }

    #[test]
    fn formation_bound_counterexample() {
        let e = 0.6009;
        let check = formation_bound(&rec(1.0, e, e), Dims::qubits(), 0.1).unwrap();
        assert!(check.passes);
        assert!(close(check.slack, 1.0 - (e + 0.1 / 4.0 * e.powi(8)), 1e-15));
        // e_ac = 0 leaves only the monotonicity check
        let c = formation_bound(&rec(0.7, 0.6, 0.0), Dims::qubits(), 5.0).unwrap();
        assert!(close(
            c.slack,
            0.7 - (0.6f64).max(5.0 / 4.0 * 0.6f64.powi(8)),
            1e-15
        ));
        assert!(
            formation_bound(&rec(1.0, 0.9, 0.9), Dims::qubits(), 0.0)
                .unwrap()
                .passes
        );
        assert!(Dims::new(1, 2, 2).is_err());
        let bad = Dims { a: 2, b: 1, c: 2 };
        assert!(formation_bound(&rec(1.0, 0.1, 0.1), bad, 1.0).is_err());
    }

    #[test]
    fn regularised_bound_examples() {
        let d = Dims::qubits();
        assert!(regularised_bound(1.0, 0.0, 0.0, d, 123.0).unwrap().passes);
        let half = regularised_bound(1.0, 0.5, 0.5, d, 0.0).unwrap();
        assert!(half.passes && close(half.slack, 0.5, 1e-15));
        let fail = regularised_bound(0.5, 0.5, 0.5, d, 1.0).unwrap();
        assert!(!fail.passes);
        assert!(close(fail.slack, -0.25 * 0.0625, 1e-15));
        assert!(regularised_bound(1.0, -0.1, 0.0, d, 1.0).is_err());
    }

    #[test]
    fn empirical_c_examples() {
        let d = Dims::qubits();
        assert!(matches!(
            empirical_c(&[], d, BoundKind::Formation),
            Err(Error::EmptySample(_))
        ));
        let ghz = empirical_c(&[rec(1.0, 0.0, 0.0)], d, BoundKind::Formation).unwrap();
        assert_eq!(ghz.c_empirical, None);
        assert_eq!(ghz.excluded_branches, 2);
        let edge = empirical_c(&[rec(0.8, 0.8, 0.3)], d, BoundKind::Formation).unwrap();
        assert_eq!(edge.c_empirical, Some(0.0));

        let records = sample_records(TripleMeasure::Eof, 2000, 8).unwrap();
        let report = empirical_c(&records, d, BoundKind::Formation).unwrap();
        let c = report.c_empirical.unwrap();
        assert!(c > 0.0 && c.is_finite());
        let audit = bound_audit(&records, d, BoundKind::Formation, c).unwrap();
        assert_eq!(audit.violations, 0);
        assert_eq!(audit.c_supplied, Some(c));
        assert!(
            bound_audit(&records, d, BoundKind::Formation, 2.0 * c + 1.0)
                .unwrap()
                .violations
                > 0
        );
    }

    #[test]
    fn bell_times_product_caps_c_at_four() {
        // (|000> + |110>)/sqrt2: A and B share a Bell pair, C is untouched
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![0.0; 8];
        a[0b000] = h;
        a[0b110] = h;
        let psi = PureState::from_real(&a, vec![2, 2, 2]).unwrap();
        let r = triple_eof(&psi).unwrap();
        assert!(close(r.e_abc, 1.0, 1e-12) && close(r.e_ab, 1.0, 1e-12) && r.e_ac.abs() < 1e-12);
        let report = empirical_c(&[r], Dims::qubits(), BoundKind::Formation).unwrap();
        assert!(close(report.c_empirical.unwrap(), 4.0, 1e-10));
        assert_eq!(report.excluded_branches, 1);
    }

    #[test]
    fn piecewise_examples() {
        assert_eq!(piecewise_f(0.1, 0.2, 1.0).unwrap(), 0.2);
        assert!(close(piecewise_f(0.9, 0.9, 1.0).unwrap(), 1.0, 1e-15));
        for e in [0.0, 0.3, 0.85, 1.0] {
            assert_eq!(piecewise_f(0.0, e, 1.0).unwrap(), e);
        }
        assert_eq!(piecewise_f(0.9, 0.5, 1.0).unwrap(), 0.9);
        assert!(piecewise_f(1.1, 0.5, 1.0).is_err());
        assert!(piecewise_f(-0.1, 0.5, 1.0).is_err());
    }

    #[test]
    fn measure_names_round_trip() {
        for m in [TripleMeasure::Tangle, TripleMeasure::Eof] {
            assert_eq!(m.to_string().parse::<TripleMeasure>().unwrap(), m);
        }
        assert!("entropy".parse::<TripleMeasure>().is_err());
    }
}
