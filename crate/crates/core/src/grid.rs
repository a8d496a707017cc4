//! Sampled test functions and densities on `(-p, p]`.
//!
//! Both types are piecewise constant over `n` equal half-open bins
//! `(-p + kw, -p + (k+1)w]`, `w = 2p/n`. Sample points are bin midpoints,
//! nudged off the countable set `{x : β/x ∈ ℤ}` (branch endpoints and
//! preimages of 0) so pointwise operator evaluation is unambiguous.

use crate::error::{Error, Result};
use crate::params::MapParams;
use crate::Complex64;

/// True when `β/x` is exactly an integer in floating point — the union of
/// branch endpoints (odd quotients) and preimages of 0 (even quotients).
pub fn collides_with_branch_set(x: f64, params: &MapParams) -> bool {
    if x == 0.0 {
        return true;
    }
    let y = params.beta() / x;
    y.abs() < 9.0e15 && y == y.round()
}

/// Midpoints of the `n`-bin partition, perturbed off the branch set.
pub fn operator_grid(params: &MapParams, n: usize) -> Vec<f64> {
    let p = params.p_f64();
    let w = 2.0 * p / n as f64;
    (0..n)
        .map(|k| {
            let mut x = -p + (k as f64 + 0.5) * w;
            while collides_with_branch_set(x, params) {
                x += 1e-9 * w;
            }
            x
        })
        .collect()
}

fn bin_of(x: f64, p: f64, n: usize) -> usize {
    let w = 2.0 * p / n as f64;
    let r = ((x + p) / w).ceil() as isize - 1;
    r.clamp(0, n as isize - 1) as usize
}

/// A pseudo-continuous test function sampled on the bin partition.
#[derive(Debug, Clone)]
pub struct GridFunction {
    params: MapParams,
    n_bins: usize,
    samples: Vec<f64>,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Sample `f` at (perturbed) bin midpoints.
    pub fn from_fn<F: Fn(f64) -> Complex64>(params: &MapParams, n_bins: usize, f: F) -> Result<Self> {
        if n_bins < 1 {
            return Err(Error::Parameter("n_bins must be ≥ 1".into()));
        }
        let samples = operator_grid(params, n_bins);
        let values = samples.iter().map(|&x| f(x)).collect();
        Ok(Self {
            params: *params,
            n_bins,
            samples,
            values,
        })
    }

    /// Use the given per-bin values directly.
    pub fn from_values(params: &MapParams, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("values must be nonempty".into()));
        }
        let n_bins = values.len();
        Ok(Self {
            params: *params,
            n_bins,
            samples: operator_grid(params, n_bins),
            values,
        })
    }

    /// Indicator of the half-open interval `(a, b]` (must align with bins to
    /// be represented exactly).
    pub fn indicator(params: &MapParams, n_bins: usize, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(params, n_bins, |x| {
            if x > a && x <= b {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Piecewise-constant evaluation: the value of the bin containing `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.values[bin_of(x, self.params.p_f64(), self.n_bins)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Borrow as a plain evaluation closure.
    pub fn as_fn(&self) -> impl Fn(f64) -> Complex64 + '_ {
        move |x| self.eval(x)
    }
}

/// A complex density w.r.t. length on `(-p, p]` plus an optional atom at 0.
///
/// The atom is kept separate because the invariance identities treat
/// `ν({0})δ₀` specially.
#[derive(Debug, Clone)]
pub struct GridDensity {
    params: MapParams,
    n_bins: usize,
    values: Vec<Complex64>,
    atom0: Complex64,
}

impl GridDensity {
    pub fn from_fn<F: Fn(f64) -> Complex64>(
        params: &MapParams,
        n_bins: usize,
        atom0: Complex64,
        f: F,
    ) -> Result<Self> {
        if n_bins < 1 {
            return Err(Error::Parameter("n_bins must be ≥ 1".into()));
        }
        let samples = operator_grid(params, n_bins);
        Ok(Self {
            params: *params,
            n_bins,
            values: samples.iter().map(|&x| f(x)).collect(),
            atom0,
        })
    }

    pub fn from_values(params: &MapParams, values: Vec<Complex64>, atom0: Complex64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("values must be nonempty".into()));
        }
        let n_bins = values.len();
        Ok(Self {
            params: *params,
            n_bins,
            values,
            atom0,
        })
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn atom0(&self) -> Complex64 {
        self.atom0
    }

    pub fn bin_width(&self) -> f64 {
        2.0 * self.params.p_f64() / self.n_bins as f64
    }

    /// Density of the absolutely continuous part at `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.values[bin_of(x, self.params.p_f64(), self.n_bins)]
    }

    /// Total variation `Σ|values|·w + |atom₀|`.
    pub fn total_variation(&self) -> f64 {
        let w = self.bin_width();
        self.values.iter().map(|v| v.norm() * w).sum::<f64>() + self.atom0.norm()
    }

    /// `∫ density` over the bins plus the atom.
    pub fn integral(&self) -> Complex64 {
        let w = self.bin_width();
        self.values.iter().sum::<Complex64>() * w + self.atom0
    }

    pub fn as_fn(&self) -> impl Fn(f64) -> Complex64 + '_ {
        move |x| self.eval(x)
    }
}
