use num_complex::Complex64;

use super::{ComplexMatrix, HERMITIAN_TOL, PSD_TOL, ZERO};
use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl HermitianSpectrum {
    /// `sum_k g(lambda_k) v_k v_k^dagger`
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n);
        for (&lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = g(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Cyclic complex Jacobi eigensolver. Inputs within [`HERMITIAN_TOL`] of
/// Hermitian are symmetrized first.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let mut converged = n < 2 || scale == 0.0;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        converged = off <= 1e-15 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    Ok(HermitianSpectrum {
        eigenvalues: order.iter().map(|&k| a[(k, k)].re).collect(),
        eigenvectors: order.iter().map(|&k| v.column(k)).collect(),
    })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q); A <- J^dagger A J.
    let eph = phase.conj();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * eph * s;
        a[(k, q)] = akp * s + akq * eph * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * eph * s;
        v[(k, q)] = vkp * s + vkq * eph * c;
    }
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-1e-10, 0)` are clipped.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(m)?;
    if let Some(&low) = spec.eigenvalues.last() {
        if low < -PSD_TOL {
            return Err(Error::NegativeEigenvalue(low));
        }
    }
    Ok(spec.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Eigenvalues of a general complex matrix (Hessenberg reduction followed by
/// single-shift QR with Wilkinson shifts). Order is unspecified.
pub fn eigenvalues_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    let mut h = m.clone();
    hessenberg(&mut h);

    let norm = h.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut eig = vec![ZERO; n];
    if norm == 0.0 {
        return Ok(eig);
    }
    let max_iter = 100 * n.max(1);
    let mut hi = n;
    let mut iter = 0;
    let mut since_deflation = 0;
    while hi > 0 {
        if hi == 1 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Find the start of the active unreduced block ending at hi - 1.
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * diag.max(norm * 1e-3) {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eig[hi - 1] = h[(hi - 1, hi - 1)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if iter == max_iter {
            return Err(Error::NoConvergence(max_iter));
        }
        iter += 1;
        since_deflation += 1;
        let shift = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi - 1, hi - 1)] + Complex64::new(h[(hi - 1, hi - 2)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 2, hi - 2)];
    let b = h[(hi - 2, hi - 1)];
    let c = h[(hi - 1, hi - 2)];
    let d = h[(hi - 1, hi - 1)];
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.dim();
    for k in lo..hi {
        h[(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..n {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = lo + off;
        let top = (k + 2).min(hi);
        for i in 0..top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..hi {
        h[(k, k)] += shift;
    }
}

/// In-place Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut u = x;
        u[0] += phase * xnorm;
        let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if unorm == 0.0 {
            continue;
        }
        for z in u.iter_mut() {
            *z /= unorm;
        }
        // H <- (I - 2uu^dagger) H (I - 2uu^dagger) on the trailing block.
        for j in 0..n {
            let dot: Complex64 = u
                .iter()
                .enumerate()
                .map(|(t, ut)| ut.conj() * h[(k + 1 + t, j)])
                .sum();
            for (t, ut) in u.iter().enumerate() {
                h[(k + 1 + t, j)] -= ut * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot: Complex64 = u
                .iter()
                .enumerate()
                .map(|(t, ut)| h[(i, k + 1 + t)] * ut)
                .sum();
            for (t, ut) in u.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * ut.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}
