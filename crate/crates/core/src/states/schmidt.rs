use num_complex::Complex64;

use super::sampling::complete_basis;
use super::{Cut, PureState};
use crate::error::Result;
use crate::linalg::{eig_hermitian, split_indices, ComplexMatrix};

/// `|psi> = sum_k s_k |left_k>|right_k>` across a bipartition.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonnegative, descending; `min(d_side, d_rest)` entries.
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<Complex64>>,
    pub right: Vec<Vec<Complex64>>,
    dims: Vec<usize>,
    cut: Cut,
}

impl SchmidtDecomposition {
    pub fn cut(&self) -> &Cut {
        &self.cut
    }

    /// Rebuilds the amplitude vector in the original subsystem ordering.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let map = split_indices(&self.dims, self.cut.side());
        map.iter()
            .map(|&(r, c)| {
                self.coefficients
                    .iter()
                    .zip(self.left.iter().zip(&self.right))
                    .map(|(&s, (u, v))| u[r] * v[c] * s)
                    .sum()
            })
            .collect()
    }
}

/// Schmidt decomposition via the spectrum of the reduced state on the cut side.
///
/// Coefficients are computed as `|M^dagger u_k|` rather than square roots of
/// eigenvalues, which keeps tiny coefficients accurate. The first component
/// above 1e-12 of each left vector is made real positive.
pub fn schmidt(state: &PureState, cut: &Cut) -> Result<SchmidtDecomposition> {
    let dims = state.dims();
    cut.validate(dims.len())?;
    let (m, rows, cols) = state.reshape(cut.side());

    let mut rho = ComplexMatrix::zeros(rows);
    for i in 0..rows {
        for j in 0..rows {
            rho[(i, j)] = (0..cols)
                .map(|k| m[i * cols + k] * m[j * cols + k].conj())
                .sum();
        }
    }
    let spec = eig_hermitian(&rho.hermitian_part())?;

    // right_k = M^T conj(u_k) / s_k
    let mut terms: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = spec
        .eigenvectors
        .iter()
        .map(|u| {
            let w: Vec<Complex64> = (0..cols)
                .map(|c| (0..rows).map(|r| m[r * cols + c] * u[r].conj()).sum())
                .collect();
            let s = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (s, u.clone(), w)
        })
        .collect();
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));
    terms.truncate(rows.min(cols));

    let mut coefficients = Vec::with_capacity(terms.len());
    let mut left = Vec::with_capacity(terms.len());
    let mut right: Vec<Vec<Complex64>> = Vec::with_capacity(terms.len());
    let mut pending_zero = 0;
    for (s, mut u, mut w) in terms {
        let phase = u
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        for z in u.iter_mut() {
            *z *= phase;
        }
        left.push(u);
        if s > 1e-14 {
            let scale = phase.conj() / s;
            for z in w.iter_mut() {
                *z *= scale;
            }
            coefficients.push(s);
            right.push(w);
        } else {
            coefficients.push(0.0);
            pending_zero += 1;
        }
    }
    if pending_zero > 0 {
        let want = right.len() + pending_zero;
        complete_basis(&mut right, cols, want);
    }
    debug_assert!(right.iter().all(|v| v.len() == cols) && right.len() == left.len());
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
        dims: dims.to_vec(),
        cut: cut.clone(),
    })
}
