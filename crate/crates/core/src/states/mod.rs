//! Quantum states: pure vectors, density matrices and ensembles.
//!
//! Basis convention: subsystem 0 is the most significant digit, so for three
//! qubits `|abc>` sits at index `4a + 2b + c`.

mod named;
mod sampling;
mod schmidt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_dims, eig_hermitian, norm_sqr, split_indices, ComplexMatrix, HermitianSpectrum,
    HERMITIAN_TOL, PSD_TOL, ZERO,
};

pub use named::{named_state, NamedState};
pub use sampling::{
    derive_seed, ginibre_random_density, haar_random_isometry, haar_random_pure,
    haar_random_unitary, rng_from_seed, StateRng,
};
pub use schmidt::{schmidt, SchmidtDecomposition};

/// Normalization tolerance for pure states and traces.
pub const NORM_TOL: f64 = 1e-10;

/// A bipartition of the subsystems: `side` lists the subsystems on the first
/// side, the rest form the complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    side: Vec<usize>,
}

impl Cut {
    pub fn new(side: Vec<usize>) -> Self {
        Self { side }
    }

    /// Subsystem 0 against everything else.
    pub fn first() -> Self {
        Self { side: vec![0] }
    }

    pub fn side(&self) -> &[usize] {
        &self.side
    }

    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|s| !self.side.contains(s)).collect()
    }

    /// Checks that the side is a strictly increasing, nonempty, proper subset of `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = !self.side.is_empty()
            && self.side.len() < n
            && self.side.windows(2).all(|w| w[0] < w[1])
            && self.side.iter().all(|&s| s < n);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCut {
                side: self.side.clone(),
                n,
            })
        }
    }
}

/// Unit-norm amplitude vector over a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Validates the dimension list and the norm (within [`NORM_TOL`]).
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let n2 = norm_sqr(&amplitudes);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(mut amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for z in amplitudes.iter_mut() {
            *z /= n;
        }
        Self::new(amplitudes, dims)
    }

    pub fn from_real(amplitudes: &[f64], dims: Vec<usize>) -> Result<Self> {
        Self::new(
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            dims,
        )
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::OutOfRange(format!("basis index {index} >= {total}")));
        }
        let mut amps = vec![ZERO; total];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps, dims)
    }

    pub(crate) fn from_parts_unchecked(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Self {
        Self { amplitudes, dims }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `|psi><psi|`
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes),
            dims: self.dims.clone(),
        }
    }

    /// Amplitudes reshaped into a `(rows x cols)` matrix with the subsystems in
    /// `side` indexing rows and the complement indexing columns.
    pub fn reshape(&self, side: &[usize]) -> (Vec<Complex64>, usize, usize) {
        let rows: usize = side.iter().map(|&s| self.dims[s]).product();
        let cols = self.dim() / rows;
        let mut out = vec![ZERO; rows * cols];
        for (idx, (r, c)) in split_indices(&self.dims, side).into_iter().enumerate() {
            out[r * cols + c] = self.amplitudes[idx];
        }
        (out, rows, cols)
    }

    /// Reduced density matrix on `keep` (strictly increasing), computed as `M M^dagger`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        crate::linalg::check_keep(keep, self.dims.len())?;
        let (m, rows, cols) = self.reshape(keep);
        let mut out = ComplexMatrix::zeros(rows);
        for i in 0..rows {
            for j in i..rows {
                let z: Complex64 = (0..cols)
                    .map(|k| m[i * cols + k] * m[j * cols + k].conj())
                    .sum();
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Ok(DensityMatrix {
            matrix: out,
            dims: keep.iter().map(|&s| self.dims[s]).collect(),
        })
    }
}

/// Hermitian, PSD, unit-trace operator tagged with subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity (symmetrizing within tolerance), positivity and unit trace.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, matrix.dim())?;
        let defect = matrix.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotUnitTrace(tr));
        }
        let spec = eig_hermitian(&matrix)?;
        if let Some(&low) = spec.eigenvalues.last() {
            if low < -PSD_TOL {
                return Err(Error::NegativeEigenvalue(low));
            }
        }
        Ok(Self { matrix, dims })
    }

    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        self.matrix
            .as_slice()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
    }

    pub fn spectrum(&self) -> Result<HermitianSpectrum> {
        eig_hermitian(&self.matrix)
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = crate::linalg::partial_trace(&self.matrix, &self.dims, keep)?;
        Ok(Self {
            matrix: m,
            dims: keep.iter().map(|&s| self.dims[s]).collect(),
        })
    }

    /// `p * self + (1 - p) * other`
    pub fn mix_with(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(Error::WrongDims {
                expected: self.dims.clone(),
                got: other.dims.clone(),
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("mixing weight {p}")));
        }
        let m = &self.matrix.scale_real(p) + &other.matrix.scale_real(1.0 - p);
        Ok(Self {
            matrix: m,
            dims: self.dims.clone(),
        })
    }

    /// `U rho U^dagger`
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::WrongDimension {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        Ok(Self {
            matrix: &(u * &self.matrix) * &u.dagger(),
            dims: self.dims.clone(),
        })
    }
}

/// Probability-weighted list of pure states sharing one dimension list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<PureState>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<PureState>) -> Result<Self> {
        if members.is_empty() || weights.len() != members.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} members",
                weights.len(),
                members.len()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::InvalidEnsemble("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        let dims = members[0].dims();
        if let Some(bad) = members.iter().find(|m| m.dims() != dims) {
            return Err(Error::WrongDims {
                expected: dims.to_vec(),
                got: bad.dims().to_vec(),
            });
        }
        Ok(Self { weights, members })
    }

    pub fn singleton(state: PureState) -> Self {
        Self {
            weights: vec![1.0],
            members: vec![state],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.weights.iter().copied().zip(&self.members)
    }
}

/// `sum_i p_i |psi_i><psi_i|`
pub fn mix(e: &Ensemble) -> Result<DensityMatrix> {
    let dims = e.members[0].dims().to_vec();
    let d = e.members[0].dim();
    let mut m = ComplexMatrix::zeros(d);
    for (p, psi) in e.iter() {
        if psi.dims() != dims {
            return Err(Error::WrongDims {
                expected: dims,
                got: psi.dims().to_vec(),
            });
        }
        let a = psi.amplitudes();
        for i in 0..d {
            let ai = a[i] * p;
            for j in 0..d {
                m[(i, j)] += ai * a[j].conj();
            }
        }
    }
    DensityMatrix::new(m, dims)
}

/// `|psi><psi|` as a free function.
pub fn to_density(state: &PureState) -> DensityMatrix {
    state.to_density()
}
