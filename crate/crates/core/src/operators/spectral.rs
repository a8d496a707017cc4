//! Spectral analysis of Ulam matrices.
//!
//! Small problems go through a dense Schur decomposition; larger ones use
//! restarted Arnoldi iteration (power iteration with deflation through a
//! Krylov basis), falling back to one shift-invert refinement of the leading
//! pair when the Ritz residual stalls. Tolerance is 1e-12 on the residual of
//! the leading eigenpair with a hard cap of 1e5 matrix-vector products.

use super::ulam::UlamMatrix;
use crate::error::{Error, Result};
use crate::Complex64;
use nalgebra::{DMatrix, DVector};

/// Residual tolerance on the leading eigenpair.
pub const EIGEN_TOL: f64 = 1e-12;
/// Matrix-vector product budget.
pub const MATVEC_CAP: usize = 100_000;
/// Largest dimension the dense path accepts.
pub const DENSE_LIMIT: usize = 4096;
/// Below this the dense path is used unconditionally.
const DENSE_PREFERRED: usize = 160;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    Dense,
    PowerIteration,
}

impl SpectralMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            SpectralMethod::Dense => "dense",
            SpectralMethod::PowerIteration => "power-iteration",
        }
    }
}

/// Top of the spectrum of an Ulam matrix.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Top-k eigenvalues sorted by modulus, descending.
    pub eigenvalues: Vec<Complex64>,
    /// Leading (Perron) eigenvector, nonnegative, ℓ¹-normalized.
    pub leading_vector: Vec<f64>,
    pub spectral_radius: f64,
    pub method: SpectralMethod,
    /// Matrix-vector products (iterative) or 0 (dense).
    pub iterations: usize,
    /// Final residual ‖Mv - λv‖₂ of the leading pair.
    pub residual: f64,
}

impl SpectrumReport {
    /// Fraction of leading-vector mass carried by bins within `frac` of ±p.
    pub fn edge_mass_fraction(&self, frac: f64) -> f64 {
        let n = self.leading_vector.len();
        let total: f64 = self.leading_vector.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = self
            .leading_vector
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let mid = (*k as f64 + 0.5) / n as f64 * 2.0 - 1.0; // in (-1, 1)
                mid.abs() >= 1.0 - frac
            })
            .map(|(_, &v)| v)
            .sum();
        edge / total
    }
}

fn sort_by_modulus(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
}

struct Csr {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    n: usize,
}

impl Csr {
    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for k in 0..self.n {
            let mut acc = 0.0;
            for idx in self.row_ptr[k]..self.row_ptr[k + 1] {
                acc += self.vals[idx] * x[self.cols[idx] as usize];
            }
            out[k] = acc;
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual_of_pair(csr: &Csr, v: &[f64], lambda: f64) -> f64 {
    let mut av = vec![0.0; v.len()];
    csr.matvec(v, &mut av);
    let nv = norm2(v);
    let r: f64 = av
        .iter()
        .zip(v)
        .map(|(&a, &x)| (a - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt();
    r / nv
}

/// One Arnoldi cycle of dimension `m` with full reorthogonalization.
/// Returns the basis, the (m+1)×m Hessenberg, and the reached dimension.
fn arnoldi_cycle(
    csr: &Csr,
    v0: &[f64],
    m: usize,
    matvecs: &mut usize,
) -> (Vec<Vec<f64>>, DMatrix<f64>, usize) {
    let n = csr.n;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h = DMatrix::<f64>::zeros(m + 1, m);
    let mut v = v0.to_vec();
    let nv = norm2(&v);
    for x in &mut v {
        *x /= nv;
    }
    basis.push(v);
    let mut reached = m;
    for i in 0..m {
        let mut w = vec![0.0; n];
        csr.matvec(&basis[i], &mut w);
        *matvecs += 1;
        for _pass in 0..2 {
            for (k, vk) in basis.iter().enumerate() {
                let dot: f64 = vk.iter().zip(&w).map(|(a, b)| a * b).sum();
                if _pass == 0 {
                    h[(k, i)] = dot;
                } else {
                    h[(k, i)] += dot;
                }
                for (wj, vj) in w.iter_mut().zip(vk) {
                    *wj -= dot * vj;
                }
            }
        }
        let nw = norm2(&w);
        h[(i + 1, i)] = nw;
        if nw < 1e-14 {
            reached = i + 1;
            break;
        }
        for x in &mut w {
            *x /= nw;
        }
        basis.push(w);
    }
    (basis, h, reached)
}

/// Leading eigenvector of a small real matrix by shifted inverse iteration.
fn small_leading_vector(h: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let m = h.nrows();
    let shift = lambda + lambda.abs().max(1.0) * 1e-10;
    let a = h.clone() - DMatrix::identity(m, m) * shift;
    let lu = a.lu();
    let mut y = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    for _ in 0..4 {
        if let Some(sol) = lu.solve(&y) {
            let n = sol.norm();
            if n > 0.0 && n.is_finite() {
                y = sol / n;
            } else {
                break;
            }
        } else {
            break;
        }
    }
    y
}

fn iterative_top(m: &UlamMatrix, k: usize) -> Result<SpectrumReport> {
    let n = m.n_bins();
    let (row_ptr, cols, vals) = m.to_csr();
    let csr = Csr {
        row_ptr,
        cols,
        vals,
        n,
    };
    let subspace = (4 * k + 36).min(n - 1).max(8);
    let mut matvecs = 0usize;
    let mut v0 = vec![1.0; n];
    let mut best: Option<(f64, Vec<f64>, Vec<Complex64>, f64)> = None;

    while matvecs + subspace <= MATVEC_CAP {
        let (basis, h, reached) = arnoldi_cycle(&csr, &v0, subspace, &mut matvecs);
        let hm = h.view((0, 0), (reached, reached)).into_owned();
        let mut ritz: Vec<Complex64> = hm.complex_eigenvalues().iter().copied().collect();
        sort_by_modulus(&mut ritz);
        let lambda = ritz[0].re;
        let y = small_leading_vector(&hm, lambda);
        let mut v = vec![0.0; n];
        for (i, vb) in basis.iter().take(reached).enumerate() {
            let yi = y[i];
            for (vj, bj) in v.iter_mut().zip(vb) {
                *vj += yi * bj;
            }
        }
        let res = residual_of_pair(&csr, &v, lambda);
        matvecs += 1;
        let improved = best.as_ref().map_or(true, |(_, _, _, r)| res < *r);
        if improved {
            best = Some((lambda, v.clone(), ritz, res));
        }
        if res <= EIGEN_TOL || reached < subspace {
            break;
        }
        v0 = v;
    }

    let (mut lambda, mut v, ritz, mut res) =
        best.ok_or_else(|| Error::EigenConvergence {
            iterations: matvecs,
            residual: f64::NAN,
        })?;

    // Shift-invert refinement of the leading pair when Arnoldi stalls.
    if res > EIGEN_TOL && n <= DENSE_LIMIT {
        let dense = DMatrix::from_row_slice(n, n, m.entries());
        let shift = lambda + lambda.abs().max(1.0) * 1e-8;
        let lu = (dense - DMatrix::<f64>::identity(n, n) * shift).lu();
        let mut x = DVector::from_column_slice(&v);
        for _ in 0..60 {
            if let Some(sol) = lu.solve(&x) {
                let nn = sol.norm();
                if !(nn.is_finite() && nn > 0.0) {
                    break;
                }
                x = sol / nn;
                // Rayleigh quotient through the sparse product.
                let xv: Vec<f64> = x.iter().copied().collect();
                let mut ax = vec![0.0; n];
                csr.matvec(&xv, &mut ax);
                matvecs += 1;
                lambda = xv.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>()
                    / xv.iter().map(|a| a * a).sum::<f64>();
                let r: f64 = ax
                    .iter()
                    .zip(&xv)
                    .map(|(&a, &b)| (a - lambda * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                res = r;
                if res <= EIGEN_TOL || matvecs >= MATVEC_CAP {
                    break;
                }
            } else {
                break;
            }
        }
        v = x.iter().copied().collect();
    }

    if res > EIGEN_TOL.max(1e-10) {
        return Err(Error::EigenConvergence {
            iterations: matvecs,
            residual: res,
        });
    }

    // Sign-fix and clamp the Perron vector.
    let s: f64 = v.iter().sum();
    if s < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    for x in &mut v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let l1: f64 = v.iter().sum();
    if l1 > 0.0 {
        for x in &mut v {
            *x /= l1;
        }
    }

    let mut eigenvalues: Vec<Complex64> = ritz.into_iter().take(k).collect();
    if let Some(first) = eigenvalues.first_mut() {
        *first = Complex64::new(lambda, 0.0);
    }
    Ok(SpectrumReport {
        spectral_radius: eigenvalues
            .first()
            .map(|e| e.norm())
            .unwrap_or(lambda.abs()),
        eigenvalues,
        leading_vector: v,
        method: SpectralMethod::PowerIteration,
        iterations: matvecs,
        residual: res,
    })
}

fn dense_top(m: &UlamMatrix, k: usize) -> Result<SpectrumReport> {
    let n = m.n_bins();
    let dense = DMatrix::from_row_slice(n, n, m.entries());
    let mut vals: Vec<Complex64> = dense.complex_eigenvalues().iter().copied().collect();
    sort_by_modulus(&mut vals);
    let lambda = vals[0].re;

    // Leading vector by shifted inverse iteration on the real matrix.
    let shift = lambda + lambda.abs().max(1.0) * 1e-9;
    let lu = (dense.clone() - DMatrix::<f64>::identity(n, n) * shift).lu();
    let mut x = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    for _ in 0..8 {
        match lu.solve(&x) {
            Some(sol) => {
                let nn = sol.norm();
                if !(nn.is_finite() && nn > 0.0) {
                    break;
                }
                x = sol / nn;
            }
            None => break,
        }
    }
    let ax = &dense * &x;
    let lam = x.dot(&ax) / x.dot(&x);
    let residual = (ax - x.clone() * lam).norm();

    let mut v: Vec<f64> = x.iter().copied().collect();
    let s: f64 = v.iter().sum();
    if s < 0.0 {
        for e in &mut v {
            *e = -*e;
        }
    }
    for e in &mut v {
        if *e < 0.0 {
            *e = 0.0;
        }
    }
    let l1: f64 = v.iter().sum();
    if l1 > 0.0 {
        for e in &mut v {
            *e /= l1;
        }
    }

    let eigenvalues: Vec<Complex64> = vals.into_iter().take(k).collect();
    Ok(SpectrumReport {
        spectral_radius: eigenvalues[0].norm(),
        eigenvalues,
        leading_vector: v,
        method: SpectralMethod::Dense,
        iterations: 0,
        residual,
    })
}

/// Top-`k` eigenvalues (by modulus) and the leading eigenvector of `M`.
///
/// Dense Schur for small matrices or when many eigenvalues are requested
/// (permitted up to `n_bins = 4096`); Arnoldi above.
pub fn spectral_top(m: &UlamMatrix, k: usize) -> Result<SpectrumReport> {
    if k < 1 {
        return Err(Error::Parameter("k must be ≥ 1".into()));
    }
    let n = m.n_bins();
    let k = k.min(n);
    if n <= DENSE_PREFERRED || (k > 24 && n <= DENSE_LIMIT) {
        dense_top(m, k)
    } else if k > 24 {
        Err(Error::Parameter(format!(
            "k = {k} eigenvalues beyond the dense limit (n = {n} > {DENSE_LIMIT})"
        )))
    } else {
        iterative_top(m, k)
    }
}
