//! Convex-roof extension of a pure-state functional.
//!
//! Every decomposition of a rank-`k` state into `n >= k` pure states has the
//! form `|psi~_j> = sum_i V_ji sqrt(lambda_i) |e_i>` with `V` an `n x k`
//! isometry. The optimizer keeps the `n` unnormalized members directly and
//! mixes them pairwise with 2x2 unitaries (Givens rotations with a phase),
//! which moves `V` along the unitary group while leaving `sum_j |psi~_j><psi~_j|`
//! unchanged. Each restart starts from the eigen-ensemble (restart 0) or a
//! Haar-random isometry and is refined by sweeps over all member pairs.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{binary_entropy, gram_det_2, small_eigenvalue_2x2, spectrum_entropy};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, norm_sqr, ComplexMatrix, ZERO};
use crate::states::{
    derive_seed, haar_random_unitary, rng_from_seed, DensityMatrix, Ensemble, PureState,
};

/// Rank cutoff for the eigen-ensemble.
const RANK_CUTOFF: f64 = 1e-13;
/// Members lighter than this are dropped from the reported ensemble.
const WEIGHT_CUTOFF: f64 = 1e-15;
const MIN_STEP: f64 = 1e-9;
const MAX_STEP: f64 = 0.5;

/// Pure-state functional whose convex roof is taken. Both act on the cut
/// between subsystem 0 and the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoofFunctional {
    /// Entropy of entanglement; its roof is the entanglement of formation.
    Entropy,
    /// `4 det rho_A`; requires subsystem 0 to be a qubit.
    Tangle,
}

impl FromStr for RoofFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" | "eof" => Ok(RoofFunctional::Entropy),
            "tangle" => Ok(RoofFunctional::Tangle),
            other => Err(Error::InvalidFunctional(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofConfig {
    /// Number of ensemble members; `None` means `max(4, rank^2)`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// A restart stops once a full sweep improves the value by less than this.
    pub tolerance: f64,
    /// Sweep cap per restart.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 32,
            tolerance: 1e-8,
            max_iterations: 5000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    /// Best ensemble average found; an upper bound on the roof.
    pub value: f64,
    pub ensemble: Ensemble,
    /// Total sweeps across all restarts.
    pub iterations: usize,
    /// Whether the restart that produced `value` met the tolerance before the cap.
    pub converged: bool,
    /// Best-so-far value after each sweep, across restarts in order.
    pub history: Vec<f64>,
}

/// Evaluates `p * f(psi~ / sqrt p)` for unnormalized members.
struct Weighted {
    functional: RoofFunctional,
    dims: Vec<usize>,
    side_dim: usize,
    rest_dim: usize,
}

impl Weighted {
    fn new(functional: RoofFunctional, dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidDims(dims.to_vec()));
        }
        if functional == RoofFunctional::Tangle && dims[0] != 2 {
            return Err(Error::CutNotQubit(vec![0]));
        }
        let side_dim = dims[0];
        let rest_dim = dims[1..].iter().product();
        Ok(Self {
            functional,
            dims: dims.to_vec(),
            side_dim,
            rest_dim,
        })
    }

    /// Subsystem 0 is the most significant digit, so the amplitude vector is
    /// already the row-major `side_dim x rest_dim` matrix.
    fn eval(&self, v: &[Complex64]) -> f64 {
        let p = norm_sqr(v);
        if p <= WEIGHT_CUTOFF {
            return 0.0;
        }
        if self.side_dim == 2 {
            let det = gram_det_2(v, self.rest_dim) / (p * p);
            match self.functional {
                RoofFunctional::Tangle => p * (4.0 * det).min(1.0),
                RoofFunctional::Entropy => p * binary_entropy(small_eigenvalue_2x2(1.0, det)),
            }
        } else {
            let (r, c) = (self.side_dim, self.rest_dim);
            let mut m = ComplexMatrix::zeros(r);
            for i in 0..r {
                for j in 0..r {
                    m[(i, j)] = (0..c)
                        .map(|k| v[i * c + k] * v[j * c + k].conj())
                        .sum::<Complex64>()
                        / p;
                }
            }
            let eig = eig_hermitian(&m.hermitian_part())
                .map(|s| s.eigenvalues)
                .unwrap_or_default();
            p * spectrum_entropy(&eig)
        }
    }
}

/// Applies `[[c, -e^{i phi} s], [e^{-i phi} s, c]]` to the pair `(x, y)`.
fn mix_pair(
    x: &[Complex64],
    y: &[Complex64],
    theta: f64,
    phase: Complex64,
    out_x: &mut [Complex64],
    out_y: &mut [Complex64],
) {
    let (s, c) = theta.sin_cos();
    let a = phase * s;
    let b = phase.conj() * s;
    for k in 0..x.len() {
        out_x[k] = x[k] * c - y[k] * a;
        out_y[k] = x[k] * b + y[k] * c;
    }
}

struct Restart<'a> {
    f: &'a Weighted,
    members: Vec<Vec<Complex64>>,
    contrib: Vec<f64>,
    steps: Vec<f64>,
    scratch_x: Vec<Complex64>,
    scratch_y: Vec<Complex64>,
}

impl<'a> Restart<'a> {
    fn new(f: &'a Weighted, members: Vec<Vec<Complex64>>) -> Self {
        let n = members.len();
        let d = members[0].len();
        let contrib = members.iter().map(|m| f.eval(m)).collect();
        Self {
            f,
            members,
            contrib,
            steps: vec![0.1; n * n],
            scratch_x: vec![ZERO; d],
            scratch_y: vec![ZERO; d],
        }
    }

    fn value(&self) -> f64 {
        self.contrib.iter().sum()
    }

    fn trial(&mut self, a: usize, b: usize, theta: f64, phase: Complex64) -> f64 {
        let (x, y) = (&self.members[a], &self.members[b]);
        mix_pair(x, y, theta, phase, &mut self.scratch_x, &mut self.scratch_y);
        self.f.eval(&self.scratch_x) + self.f.eval(&self.scratch_y)
    }

    fn commit(&mut self, a: usize, b: usize, theta: f64, phase: Complex64) {
        mix_pair(
            &self.members[a],
            &self.members[b],
            theta,
            phase,
            &mut self.scratch_x,
            &mut self.scratch_y,
        );
        self.members[a].copy_from_slice(&self.scratch_x);
        self.members[b].copy_from_slice(&self.scratch_y);
        self.contrib[a] = self.f.eval(&self.members[a]);
        self.contrib[b] = self.f.eval(&self.members[b]);
    }

    /// Line search along the real and the imaginary rotation generator of one
    /// pair: probe `+-step`, jump to the parabola's vertex when it is better.
    fn refine_pair(&mut self, a: usize, b: usize) -> f64 {
        let mut gained = 0.0;
        let idx = a * self.members.len() + b;
        for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let h = self.steps[idx];
            let f0 = self.contrib[a] + self.contrib[b];
            let fp = self.trial(a, b, h, phase);
            let fm = self.trial(a, b, -h, phase);
            let (mut best_t, mut best_f) = (0.0, f0);
            if fp < best_f {
                (best_t, best_f) = (h, fp);
            }
            if fm < best_f {
                (best_t, best_f) = (-h, fm);
            }
            let curvature = fp + fm - 2.0 * f0;
            if curvature > 0.0 {
                let t = (0.5 * h * (fm - fp) / curvature).clamp(-4.0 * h, 4.0 * h);
                if t != 0.0 && t.abs() <= std::f64::consts::FRAC_PI_2 {
                    let ft = self.trial(a, b, t, phase);
                    if ft < best_f {
                        (best_t, best_f) = (t, ft);
                    }
                }
            }
            if best_t != 0.0 && best_f < f0 {
                self.commit(a, b, best_t, phase);
                gained += f0 - (self.contrib[a] + self.contrib[b]);
                self.steps[idx] = (best_t.abs() * 1.5).clamp(MIN_STEP, MAX_STEP);
            } else {
                self.steps[idx] = (h * 0.3).max(MIN_STEP);
            }
        }
        gained
    }

    /// One pass over all pairs; returns the improvement.
    fn sweep(&mut self) -> f64 {
        let before = self.value();
        let n = self.members.len();
        for a in 0..n {
            for b in a + 1..n {
                self.refine_pair(a, b);
            }
        }
        // recompute from scratch so rounding in the running gains never accumulates
        before - self.value()
    }
}

/// Minimizes the ensemble average of `functional` over decompositions of `rho`.
pub fn convex_roof(
    functional: RoofFunctional,
    rho: &DensityMatrix,
    config: &RoofConfig,
) -> Result<RoofResult> {
    let f = Weighted::new(functional, rho.dims())?;
    let spec = rho.spectrum()?;
    let basis: Vec<Vec<Complex64>> = spec
        .eigenvalues
        .iter()
        .zip(&spec.eigenvectors)
        .filter(|(&lam, _)| lam > RANK_CUTOFF)
        .map(|(&lam, v)| v.iter().map(|z| z * lam.sqrt()).collect())
        .collect();
    let rank = basis.len();
    if rank == 0 {
        return Err(Error::NotUnitTrace(rho.trace()));
    }
    let d = rho.dim();

    if rank == 1 {
        let state = PureState::normalized(basis[0].clone(), f.dims.clone())?;
        let value = f.eval(state.amplitudes());
        return Ok(RoofResult {
            value,
            ensemble: Ensemble::singleton(state),
            iterations: 0,
            converged: true,
            history: vec![value],
        });
    }

    let n = config
        .ensemble_size
        .unwrap_or((rank * rank).max(4))
        .max(rank);
    let restarts = config.restarts.max(1);

    let mut best: Option<(f64, Vec<Vec<Complex64>>, bool)> = None;
    let mut history = Vec::new();
    let mut iterations = 0;
    for r in 0..restarts {
        let members = if r == 0 {
            let mut m = basis.clone();
            m.resize(n, vec![ZERO; d]);
            m
        } else {
            let mut rng = rng_from_seed(derive_seed(config.seed, r as u64));
            let u = haar_random_unitary(n, &mut rng);
            (0..n)
                .map(|j| {
                    let mut v = vec![ZERO; d];
                    for (i, b) in basis.iter().enumerate() {
                        let c = u[(j, i)];
                        for (vk, bk) in v.iter_mut().zip(b) {
                            *vk += c * bk;
                        }
                    }
                    v
                })
                .collect()
        };
        let mut run = Restart::new(&f, members);
        let mut converged = false;
        for _ in 0..config.max_iterations {
            let gain = run.sweep();
            iterations += 1;
            let current = run.value();
            let so_far = best.as_ref().map_or(current, |b| b.0.min(current));
            history.push(so_far);
            if gain < config.tolerance {
                converged = true;
                break;
            }
        }
        let value = run.value();
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, run.members, converged));
        }
    }

    let (_, members, converged) = best.expect("at least one restart");
    let kept: Vec<(f64, Vec<Complex64>)> = members
        .into_iter()
        .map(|v| (norm_sqr(&v), v))
        .filter(|(p, _)| *p > WEIGHT_CUTOFF)
        .collect();
    let total: f64 = kept.iter().map(|(p, _)| p).sum();
    let mut weights = Vec::with_capacity(kept.len());
    let mut states = Vec::with_capacity(kept.len());
    for (p, v) in kept {
        weights.push(p / total);
        states.push(PureState::normalized(v, f.dims.clone())?);
    }
    let ensemble = Ensemble::new(weights, states)?;
    let value = ensemble
        .iter()
        .map(|(p, s)| p * f.eval(s.amplitudes()))
        .sum();
    Ok(RoofResult {
        value,
        ensemble,
        iterations,
        converged,
        history,
    })
}
