//! Seeded sampling of random states and unitaries.
//!
//! All randomness flows through [`StateRng`] (ChaCha8). Batch samplers derive
//! one seed per item with [`derive_seed`], so item `i` of a batch can be
//! regenerated on its own from the recorded seed.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// The generator behind every sampler in the crate.
pub type StateRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-item seed for item `index` of a batch seeded with `base` (SplitMix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn complex_gaussian(rng: &mut StateRng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn haar_random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDims(dims.to_vec()));
    }
    let mut rng = rng_from_seed(seed);
    let total: usize = dims.iter().product();
    let amps: Vec<Complex64> = (0..total).map(|_| complex_gaussian(&mut rng)).collect();
    PureState::normalized(amps, dims.to_vec())
}

/// `G G^dagger / Tr(G G^dagger)` with `G` a `dim x rank` complex Gaussian matrix.
pub fn ginibre_random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let mut rng = rng_from_seed(seed);
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = (0..rank)
                .map(|k| g[i * rank + k] * g[j * rank + k].conj())
                .sum();
        }
    }
    let tr = m.trace().re;
    let dims = qubit_dims(dim).unwrap_or_else(|| vec![dim]);
    Ok(DensityMatrix::from_parts_unchecked(
        m.scale_real(1.0 / tr),
        dims,
    ))
}

/// `[2, 2, ...]` when `dim` is a power of two (at least 2).
fn qubit_dims(dim: usize) -> Option<Vec<usize>> {
    if dim >= 2 && dim.is_power_of_two() {
        Some(vec![2; dim.trailing_zeros() as usize])
    } else {
        None
    }
}

/// Haar-random `n x n` unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
pub fn haar_random_unitary(n: usize, rng: &mut StateRng) -> ComplexMatrix {
    let cols = gram_schmidt_columns(n, n, rng);
    let mut u = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            u[(i, j)] = col[i];
        }
    }
    u
}

/// Haar-random isometry as `k` orthonormal columns of length `n` (`k <= n`).
pub fn haar_random_isometry(n: usize, k: usize, rng: &mut StateRng) -> Vec<Vec<Complex64>> {
    gram_schmidt_columns(n, k, rng)
}

// Modified Gram-Schmidt on Gaussian columns. Normalizing each column by its
// (positive) norm is the same as fixing R's diagonal to be positive.
fn gram_schmidt_columns(n: usize, k: usize, rng: &mut StateRng) -> Vec<Vec<Complex64>> {
    assert!(k <= n, "isometry needs k <= n");
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        cols.push(v);
    }
    cols
}

/// Orthonormal completion of `vectors` within `C^n` (Gram-Schmidt over the standard basis).
pub(crate) fn complete_basis(vectors: &mut Vec<Vec<Complex64>>, n: usize, want: usize) {
    let mut e = 0;
    while vectors.len() < want && e < n {
        let mut v = vec![ZERO; n];
        v[e] = Complex64::new(1.0, 0.0);
        e += 1;
        for _ in 0..2 {
            for q in vectors.iter() {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for z in v.iter_mut() {
                *z /= norm;
            }
            vectors.push(v);
        }
    }
}
