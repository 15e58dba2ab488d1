//! Entanglement measures.
//!
//! Entropies are in bits, with `0 log 0 = 0`. Concurrence and tangle are
//! dimensionless and live in `[0, 1]` for two qubits.

mod roof;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, eigenvalues_general, spin_flip, sqrt_psd};
use crate::states::{Cut, DensityMatrix, PureState};

pub use roof::{convex_roof, RoofConfig, RoofFunctional, RoofResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureId {
    EntropyOfEntanglement,
    Concurrence,
    EntanglementOfFormation,
    Tangle,
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MeasureId::EntropyOfEntanglement => "entropy",
            MeasureId::Concurrence => "concurrence",
            MeasureId::EntanglementOfFormation => "eof",
            MeasureId::Tangle => "tangle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: f64,
    pub measure: MeasureId,
}

impl MeasureValue {
    fn new(value: f64, measure: MeasureId) -> Self {
        Self { value, measure }
    }
}

/// `-p log2 p - (1-p) log2 (1-p)`
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    xlog2x(p) + xlog2x(1.0 - p)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Von Neumann entropy (bits) of a spectrum; entries below zero are clipped.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().map(|&x| xlog2x(x)).sum::<f64>().max(0.0)
}

/// Smaller eigenvalue of a 2x2 PSD matrix with trace `tr` and determinant `det`,
/// computed without cancellation.
fn small_eigenvalue_2x2(tr: f64, det: f64) -> f64 {
    let det = det.max(0.0);
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let big = 0.5 * (tr + disc);
    if big <= 0.0 {
        0.0
    } else {
        det / big
    }
}

/// Determinant of `M M^dagger` for a `2 x cols` row-major `M`, as
/// `sum_{k<l} |m_0k m_1l - m_0l m_1k|^2` (never negative).
pub(crate) fn gram_det_2(m: &[Complex64], cols: usize) -> f64 {
    let mut det = 0.0;
    for k in 0..cols {
        for l in k + 1..cols {
            det += (m[k] * m[cols + l] - m[l] * m[cols + k]).norm_sqr();
        }
    }
    det
}

fn qubit_side(state_dims: &[usize], cut: &Cut) -> Result<()> {
    cut.validate(state_dims.len())?;
    if cut.side().len() != 1 || state_dims[cut.side()[0]] != 2 {
        return Err(Error::CutNotQubit(cut.side().to_vec()));
    }
    Ok(())
}

/// Entropy of the reduced state on the cut side of a pure state.
pub fn entropy_of_entanglement(state: &PureState, cut: &Cut) -> Result<MeasureValue> {
    cut.validate(state.dims().len())?;
    let (m, rows, cols) = state.reshape(cut.side());
    let value = if rows == 2 {
        let small = small_eigenvalue_2x2(1.0, gram_det_2(&m, cols));
        binary_entropy(small)
    } else {
        let red = state.reduced(cut.side())?;
        spectrum_entropy(&red.spectrum()?.eigenvalues)
    };
    Ok(MeasureValue::new(value, MeasureId::EntropyOfEntanglement))
}

/// `4 det(rho_A)` for the single qubit on the cut side of a pure state.
pub fn tangle_pure(state: &PureState, cut: &Cut) -> Result<MeasureValue> {
    qubit_side(state.dims(), cut)?;
    let (m, _, cols) = state.reshape(cut.side());
    let value = (4.0 * gram_det_2(&m, cols)).min(1.0);
    Ok(MeasureValue::new(value, MeasureId::Tangle))
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: vec![2, 2],
            got: rho.dims().to_vec(),
        });
    }
    Ok(())
}

fn concurrence_from_roots(mut lambdas: Vec<f64>) -> f64 {
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = lambdas[1..].iter().sum();
    (lambdas[0] - rest).clamp(0.0, 1.0)
}

/// Concurrence from the spectrum of the non-Hermitian product `rho * rho~`.
///
/// Eigenvalues of `rho * rho~` below `16 eps |rho rho~|_F` are rounding noise
/// and count as zero; otherwise the square root would turn 1e-16 into 1e-8.
pub fn concurrence(rho: &DensityMatrix) -> Result<MeasureValue> {
    require_two_qubits(rho)?;
    let flipped = spin_flip(rho.matrix())?;
    let product = rho.matrix() * &flipped;
    let frob = product
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let floor = 16.0 * f64::EPSILON * frob;
    let lambdas = eigenvalues_general(&product)?
        .into_iter()
        .map(|z| if z.re <= floor { 0.0 } else { z.re.sqrt() })
        .collect();
    Ok(MeasureValue::new(
        concurrence_from_roots(lambdas),
        MeasureId::Concurrence,
    ))
}

/// Concurrence via the Hermitian sandwich `sqrt(sqrt(rho) rho~ sqrt(rho))`.
/// Algebraically equal to [`concurrence`]; kept as an independent route.
pub fn concurrence_via_sqrt(rho: &DensityMatrix) -> Result<MeasureValue> {
    require_two_qubits(rho)?;
    let root = sqrt_psd(rho.matrix())?;
    let sandwich = &(&root * &spin_flip(rho.matrix())?) * &root;
    let r = sqrt_psd(&sandwich.hermitian_part())?;
    let lambdas = eig_hermitian(&r)?
        .eigenvalues
        .into_iter()
        .map(|x| x.max(0.0))
        .collect();
    Ok(MeasureValue::new(
        concurrence_from_roots(lambdas),
        MeasureId::Concurrence,
    ))
}

/// `tau = V^T (sigma_y x sigma_y) V` for a two-qubit factor `rho = sum_i v_i v_i^dagger`.
fn flip_overlaps(vectors: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    // (sigma_y x sigma_y)|ab> = -(-1)^(a+b) |~a ~b>
    let flip = |v: &[Complex64]| [-v[3], v[2], v[1], -v[0]];
    vectors
        .iter()
        .map(|vi| {
            vectors
                .iter()
                .map(|vj| {
                    let f = flip(vj);
                    (0..4).map(|k| vi[k] * f[k]).sum()
                })
                .collect()
        })
        .collect()
}

/// Squared concurrence of the (possibly unnormalized) two-qubit operator
/// `sum_i v_i v_i^dagger`, from the singular values of the symmetric overlap
/// matrix `tau`. With one or two vectors the result is exact to rounding.
pub fn tangle_from_factor(vectors: &[&[Complex64]]) -> Result<f64> {
    if vectors.is_empty() || vectors.iter().any(|v| v.len() != 4) {
        return Err(Error::WrongDimension {
            expected: 4,
            got: vectors.first().map_or(0, |v| v.len()),
        });
    }
    let tau = flip_overlaps(vectors);
    let c2 = match vectors.len() {
        1 => tau[0][0].norm_sqr(),
        2 => {
            let frob: f64 = tau.iter().flatten().map(|z| z.norm_sqr()).sum();
            let det = (tau[0][0] * tau[1][1] - tau[0][1] * tau[1][0]).norm();
            (frob - 2.0 * det).max(0.0)
        }
        r => {
            // singular values from the spectrum of tau^dagger tau
            let mut g = crate::linalg::ComplexMatrix::zeros(r);
            for i in 0..r {
                for j in 0..r {
                    g[(i, j)] = (0..r).map(|k| tau[k][i].conj() * tau[k][j]).sum();
                }
            }
            let svals = eig_hermitian(&g.hermitian_part())?
                .eigenvalues
                .into_iter()
                .map(|x| x.max(0.0).sqrt())
                .collect();
            let c = concurrence_from_roots(svals);
            c * c
        }
    };
    Ok(c2.min(1.0))
}

/// Squared concurrences `(C^2_AB, C^2_AC)` of the two-qubit marginals of a
/// pure three-qubit state, through [`tangle_from_factor`].
pub fn marginal_tangles(state: &PureState) -> Result<(f64, f64)> {
    if state.dims() != [2, 2, 2] {
        return Err(Error::WrongDims {
            expected: vec![2, 2, 2],
            got: state.dims().to_vec(),
        });
    }
    let a = state.amplitudes();
    // index 4a + 2b + c
    let ab: [Vec<Complex64>; 2] = [0, 1].map(|c| (0..4).map(|ab| a[2 * ab + c]).collect());
    let ac: [Vec<Complex64>; 2] = [0, 1].map(|b| {
        (0..4)
            .map(|ac| {
                let (x, c) = (ac >> 1, ac & 1);
                a[4 * x + 2 * b + c]
            })
            .collect()
    });
    let t_ab = tangle_from_factor(&[&ab[0], &ab[1]])?;
    let t_ac = tangle_from_factor(&[&ac[0], &ac[1]])?;
    Ok((t_ab, t_ac))
}

/// Entanglement of formation of two qubits as a function of concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    let root = (1.0 - c * c).max(0.0).sqrt();
    binary_entropy(0.5 * (1.0 + root))
}

/// Same as [`eof_from_concurrence`] taking `C^2`; avoids a square root round trip.
pub fn eof_from_tangle(c_squared: f64) -> f64 {
    let t = c_squared.clamp(0.0, 1.0);
    let root = (1.0 - t).sqrt();
    // smaller branch (1 - root)/2 = t / (2 (1 + root)) without cancellation
    binary_entropy(t / (2.0 * (1.0 + root)))
}

/// Closed-form entanglement of formation of a two-qubit state.
pub fn eof_closed_form(rho: &DensityMatrix) -> Result<MeasureValue> {
    let c = concurrence(rho)?.value;
    Ok(MeasureValue::new(
        eof_from_concurrence(c),
        MeasureId::EntanglementOfFormation,
    ))
}
