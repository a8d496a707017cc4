//! Fourier transforms of measures carried by the hyperbola `xy = 1`,
//! evaluated anywhere in the plane and on lattice-crosses.
//!
//! The convention is `μ̂(ξ₁, ξ₂) = ∫ e^{πi(ξ₁ t + ξ₂/t)} g(t) dt` (note the
//! bare `π`); all lattice arithmetic depends on it. Densities integrate over
//! a window `[-T, T]` with a declared decay envelope bounding the remainder;
//! the region `0 < |t| < 1` is handled by substituting `t ↦ 1/s`, which turns
//! the `ξ₂/t` oscillation into a linear phase.

use crate::error::{Error, Result};
use crate::quad::{adaptive, geometric_breaks, uniform_breaks};
use crate::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Tail bound `∫_T^∞ |g|` declared with a density.
#[derive(Debug, Clone, Copy)]
pub enum DecayEnvelope {
    /// `|g(t)| ≤ a·e^{-(t/s)²}`; tail mass bounded by `a·s²·e^{-(T/s)²}/(2T)`.
    Gaussian { amplitude: f64, scale: f64 },
    /// `|g(t)| ≤ a·e^{-r|t|}`; tail mass `a·e^{-rT}/r`.
    Exponential { amplitude: f64, rate: f64 },
    /// `|g(t)| ≤ c·|t|^{-k}`, `k ≥ 2`; tail mass `c·T^{1-k}/(k-1)`.
    Power { coefficient: f64, exponent: f64 },
    /// `g` vanishes outside the window.
    Compact,
}

impl DecayEnvelope {
    pub fn tail_mass(&self, t_window: f64) -> f64 {
        match *self {
            DecayEnvelope::Gaussian { amplitude, scale } => {
                let r = t_window / scale;
                amplitude * scale * scale * (-r * r).exp() / (2.0 * t_window)
            }
            DecayEnvelope::Exponential { amplitude, rate } => {
                amplitude * (-rate * t_window).exp() / rate
            }
            DecayEnvelope::Power {
                coefficient,
                exponent,
            } => coefficient * t_window.powf(1.0 - exponent) / (exponent - 1.0),
            DecayEnvelope::Compact => 0.0,
        }
    }
}

type DensityFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A measure in `X(Γ)`: either a density `g` against `dt` (pushed from the
/// arc-length density by [`arc_density_to_g`]) or a finite list of point
/// masses.
#[derive(Clone)]
pub enum HyperbolaMeasure {
    Density {
        g: DensityFn,
        /// Quadrature window `[-T, T]`.
        window: f64,
        envelope: DecayEnvelope,
        /// `sup |g|` near 0 (used by inner-region tail bounds); estimated by
        /// sampling when not supplied.
        near_zero_sup: f64,
        /// Support translation `(u₁, u₂)`: contributes the exact phase
        /// `e^{πi(ξ₁u₁ + ξ₂u₂)}`.
        shift: (f64, f64),
    },
    /// Point masses at arbitrary plane points (on Γ they are `(t, 1/t)`).
    Atoms {
        atoms: Vec<(f64, f64, Complex64)>,
        shift: (f64, f64),
    },
}

impl std::fmt::Debug for HyperbolaMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HyperbolaMeasure::Density { window, shift, .. } => f
                .debug_struct("Density")
                .field("window", window)
                .field("shift", shift)
                .finish_non_exhaustive(),
            HyperbolaMeasure::Atoms { atoms, shift } => f
                .debug_struct("Atoms")
                .field("atoms", atoms)
                .field("shift", shift)
                .finish(),
        }
    }
}

impl HyperbolaMeasure {
    pub fn density<F: Fn(f64) -> Complex64 + Send + Sync + 'static>(
        g: F,
        window: f64,
        envelope: DecayEnvelope,
    ) -> Result<Self> {
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::Parameter("window must be positive".into()));
        }
        let g: DensityFn = Arc::new(g);
        // Estimated sup of |g| on 0 < |t| ≤ 1 (log-spaced samples).
        let mut sup: f64 = 0.0;
        for k in 0..=160 {
            let t = (2.0f64).powf(-(k as f64) / 8.0);
            sup = sup.max(g(t).norm()).max(g(-t).norm());
        }
        Ok(HyperbolaMeasure::Density {
            g,
            window,
            envelope,
            near_zero_sup: 1.5 * sup.max(1e-300),
            shift: (0.0, 0.0),
        })
    }

    /// The reference Gaussian density `g(t) = e^{-t²}`.
    pub fn gaussian() -> Self {
        Self::density(
            |t: f64| Complex64::new((-t * t).exp(), 0.0),
            8.0,
            DecayEnvelope::Gaussian {
                amplitude: 1.0,
                scale: 1.0,
            },
        )
        .expect("static parameters")
    }

    pub fn zero() -> Self {
        HyperbolaMeasure::Atoms {
            atoms: Vec::new(),
            shift: (0.0, 0.0),
        }
    }

    /// Point masses `w_k·δ_{(t_k, 1/t_k)}` on the hyperbola.
    pub fn hyperbola_atoms(atoms: &[(f64, Complex64)]) -> Result<Self> {
        let mut pts = Vec::with_capacity(atoms.len());
        for &(t, w) in atoms {
            if t == 0.0 || !t.is_finite() {
                return Err(Error::Parameter(format!("atom abscissa t = {t} invalid")));
            }
            pts.push((t, 1.0 / t, w));
        }
        Ok(HyperbolaMeasure::Atoms {
            atoms: pts,
            shift: (0.0, 0.0),
        })
    }

    /// `δ_{(u₀, 1/u₀)} - δ_{(v₀, 1/v₀)}`.
    pub fn singular_pair(u0: f64, v0: f64) -> Result<Self> {
        Self::hyperbola_atoms(&[
            (u0, Complex64::new(1.0, 0.0)),
            (v0, Complex64::new(-1.0, 0.0)),
        ])
    }

    /// Total variation: `∫|g|` (numeric, over the window, plus envelope tail)
    /// or `Σ|w_k|`.
    pub fn total_variation(&self) -> f64 {
        match self {
            HyperbolaMeasure::Atoms { atoms, .. } => {
                atoms.iter().map(|&(_, _, w)| w.norm()).sum()
            }
            HyperbolaMeasure::Density {
                g,
                window,
                envelope,
                ..
            } => {
                let f = |t: f64| Complex64::new(g(t).norm(), 0.0);
                let mut segs = geometric_breaks(1e-9, 1.0, 1e-9, 1.6);
                segs.extend(uniform_breaks(1.0, *window, 0.5));
                let pos = adaptive(&f, &segs, 1e-10, 4000).value.re;
                let mut nsegs = geometric_breaks(-1.0, -1e-9, 1e-9, 1.6);
                nsegs.extend(uniform_breaks(-*window, -1.0, 0.5));
                let neg = adaptive(&f, &nsegs, 1e-10, 4000).value.re;
                pos + neg + envelope.tail_mass(*window)
            }
        }
    }
}

/// Convert an arc-length density `f` on Γ to the `dt` density
/// `g(t) = f(t)·√(1 + 1/t⁴)`.
pub fn arc_density_to_g<F: Fn(f64) -> Complex64>(f: F, t: f64) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "arc-length conversion undefined at t = {t}"
        )));
    }
    Ok(f(t) * (1.0 + 1.0 / (t * t * t * t)).sqrt())
}

/// A Fourier transform value with its quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct FtValue {
    pub value: Complex64,
    pub error: f64,
}

const MAX_PANELS: usize = 400_000;

/// Evaluate `μ̂(ξ₁, ξ₂)`.
///
/// Atom measures are summed exactly. Densities are integrated adaptively:
/// directly in `t` on `1 ≤ |t| ≤ T` and, after the substitution `t = 1/s`,
/// with linear phase `πξ₂s` on `|t| < 1`. Truncation of the substituted
/// integral at `S` is controlled by the integration-by-parts bound
/// `(2/π|ξ₂|)·3·sup|g| / S²`.
pub fn ft_eval(mu: &HyperbolaMeasure, xi1: f64, xi2: f64, tol: f64) -> Result<FtValue> {
    if !(xi1.is_finite() && xi2.is_finite()) {
        return Err(Error::Domain("ξ must be finite".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    match mu {
        HyperbolaMeasure::Atoms { atoms, shift } => {
            let mut v = Complex64::new(0.0, 0.0);
            for &(x, y, w) in atoms {
                v += w * Complex64::from_polar(1.0, PI * (xi1 * x + xi2 * y));
            }
            v *= Complex64::from_polar(1.0, PI * (xi1 * shift.0 + xi2 * shift.1));
            Ok(FtValue { value: v, error: 0.0 })
        }
        HyperbolaMeasure::Density {
            g,
            window,
            envelope,
            near_zero_sup,
            shift,
        } => {
            let mut value = Complex64::new(0.0, 0.0);
            let mut error = envelope.tail_mass(*window);
            let budget = tol / 4.0;

            // Outer region 1 ≤ |t| ≤ T: phase rate ≤ π(|ξ₁| + |ξ₂|).
            if *window > 1.0 {
                let rate = 1.0 + xi1.abs() + xi2.abs();
                let width = (2.0 / rate).min(1.0);
                let f = |t: f64| g(t) * Complex64::from_polar(1.0, PI * (xi1 * t + xi2 / t));
                let mut segs = uniform_breaks(1.0, *window, width);
                segs.extend(uniform_breaks(-*window, -1.0, width));
                let out = adaptive(&f, &segs, budget, MAX_PANELS);
                value += out.value;
                error += out.error;
            }

            // Inner region |t| ≤ min(1, T).
            let t1 = window.min(1.0);
            if xi2 == 0.0 {
                // No 1/t oscillation: integrate in t with panels shrinking
                // geometrically into 0 (the rule never samples the endpoint).
                let f = |t: f64| g(t) * Complex64::from_polar(1.0, PI * xi1 * t);
                let first = (0.25 / (1.0 + xi1.abs())).min(0.25 * t1);
                let mut segs = geometric_breaks(1e-14, t1, 1e-14, 1.7);
                segs.insert(0, (0.0, 1e-14));
                let mut nsegs = geometric_breaks(-t1, -1e-14, 1e-14, 1.7);
                nsegs.push((-1e-14, 0.0));
                segs.extend(nsegs);
                let _ = first;
                let out = adaptive(&f, &segs, budget, MAX_PANELS);
                value += out.value;
                error += out.error;
            } else {
                // t = 1/s: ∫_{|t|≤t1} g e^{πi(ξ₁t + ξ₂/t)} dt
                //        = ∫_{|s|≥1/t1} a(s)·e^{iφ(s)} ds,
                // a(s) = g(1/s)/s², φ(s) = π(ξ₂s + ξ₁/s). The truncated
                // remainder gets one integration-by-parts correction
                // ±a(±S)e^{iφ(±S)}/(iφ'(±S)), leaving a residual of order
                // (Ĝ/S²)·(2/π|ξ₂|)·O(1/(|ξ₂|S)).
                let s0 = 1.0 / t1;
                let sup = *near_zero_sup;
                let resid = |s: f64| {
                    6.0 * sup / (PI * xi2.abs() * s * s)
                        * (4.0 / (PI * xi2.abs() * s) + 2.0 * xi1.abs() / (xi2.abs() * s * s))
                            .min(1.0)
                };
                // Stay beyond any stationary point of φ so φ'(±S) is bounded
                // below by π|ξ₂|·3/4 at the truncation ends.
                let mut s_max = (s0 + 4.0).max(2.0 * (xi1 / xi2).abs().sqrt());
                while resid(s_max) > budget && s_max < 2.0e6 {
                    s_max *= 2.0;
                }
                let tail = resid(s_max);
                let a = |s: f64| g(1.0 / s) / (s * s);
                let phase = |s: f64| PI * (xi2 * s + xi1 / s);
                let f = |s: f64| a(s) * Complex64::from_polar(1.0, phase(s));
                let rate = 1.0 + xi2.abs() + xi1.abs() / (s0 * s0);
                let width = 4.0 / rate;
                let mut segs = uniform_breaks(s0, s_max, width);
                segs.extend(uniform_breaks(-s_max, -s0, width));
                let out = adaptive(&f, &segs, budget, MAX_PANELS);
                let dphase = |s: f64| PI * (xi2 - xi1 / (s * s));
                let correction = a(-s_max)
                    * Complex64::from_polar(1.0, phase(-s_max))
                    / (Complex64::i() * dphase(-s_max))
                    - a(s_max) * Complex64::from_polar(1.0, phase(s_max))
                        / (Complex64::i() * dphase(s_max));
                value += out.value + correction;
                error += out.error + tail;
            }

            if shift.0 != 0.0 || shift.1 != 0.0 {
                value *= Complex64::from_polar(1.0, PI * (xi1 * shift.0 + xi2 * shift.1));
            }
            if error > tol {
                return Err(Error::QuadratureConvergence {
                    requested: tol,
                    achieved: error,
                    best_re: value.re,
                    best_im: value.im,
                });
            }
            Ok(FtValue { value, error })
        }
    }
}

/// Which axis of the cross a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossAxis {
    Horizontal,
    Vertical,
}

impl CrossAxis {
    pub fn tag(&self) -> &'static str {
        match self {
            CrossAxis::Horizontal => "horizontal",
            CrossAxis::Vertical => "vertical",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CrossPoint {
    pub axis: CrossAxis,
    pub index: i64,
    pub xi1: f64,
    pub xi2: f64,
}

/// The lattice-cross `Λ_β^{q/p} = ((ℤ + q/p) × {0}) ∪ ({0} × βℤ)` truncated
/// to indices `|n|, |m| ≤ N`.
#[derive(Debug, Clone)]
pub struct LatticeCross {
    p: u32,
    q: i64,
    beta: f64,
    n_window: usize,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl LatticeCross {
    pub fn new(p: u32, q: i64, beta: f64, n_window: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::Parameter("p must be ≥ 1".into()));
        }
        if gcd(p as u64, q.unsigned_abs()) != 1 {
            return Err(Error::Parameter(format!("gcd(p, q) must be 1, got p={p}, q={q}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Parameter("beta must be positive".into()));
        }
        Ok(Self {
            p,
            q,
            beta,
            n_window,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_window(&self) -> usize {
        self.n_window
    }

    /// Enumerate the cross points. Horizontal abscissae are computed as
    /// `(n·p + q)/p` so the rational shift never drifts. When a horizontal
    /// point coincides with the origin (p = 1, n = -q) it is dropped in
    /// favor of the vertical `m = 0` copy.
    pub fn points(&self) -> Vec<CrossPoint> {
        let n = self.n_window as i64;
        let mut pts = Vec::with_capacity(2 * (2 * self.n_window + 1));
        for idx in -n..=n {
            let numerator = idx * self.p as i64 + self.q;
            if numerator == 0 {
                continue;
            }
            pts.push(CrossPoint {
                axis: CrossAxis::Horizontal,
                index: idx,
                xi1: numerator as f64 / self.p as f64,
                xi2: 0.0,
            });
        }
        for idx in -n..=n {
            pts.push(CrossPoint {
                axis: CrossAxis::Vertical,
                index: idx,
                xi1: 0.0,
                xi2: self.beta * idx as f64,
            });
        }
        pts
    }
}

/// `μ̂` evaluated at one cross point.
#[derive(Debug, Clone, Copy)]
pub struct CrossResidual {
    pub point: CrossPoint,
    pub value: Complex64,
    pub quad_error: f64,
}

#[derive(Debug, Clone)]
pub struct CrossReport {
    pub residuals: Vec<CrossResidual>,
    /// The uniqueness diagnostic: `max |μ̂|` over the cross.
    pub max_modulus: f64,
    pub max_quad_error: f64,
}

/// Evaluate `μ̂` at every point of the cross.
pub fn ft_on_cross(
    mu: &HyperbolaMeasure,
    points: &[CrossPoint],
    tol: f64,
) -> Result<CrossReport> {
    let mut residuals = Vec::with_capacity(points.len());
    let mut max_modulus = 0.0f64;
    let mut max_quad_error = 0.0f64;
    for &pt in points {
        let v = ft_eval(mu, pt.xi1, pt.xi2, tol)?;
        max_modulus = max_modulus.max(v.value.norm());
        max_quad_error = max_quad_error.max(v.error);
        residuals.push(CrossResidual {
            point: pt,
            value: v.value,
            quad_error: v.error,
        });
    }
    Ok(CrossReport {
        residuals,
        max_modulus,
        max_quad_error,
    })
}

/// Write a cross report as CSV rows
/// `axis,index,xi1,xi2,re,im,abs,quad_error`.
pub fn cross_report_to_csv<W: std::io::Write>(report: &CrossReport, mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writeln!(w, "axis,index,xi1,xi2,re,im,abs,quad_error").map_err(io)?;
    for r in &report.residuals {
        writeln!(
            w,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.point.axis.tag(),
            r.point.index,
            r.point.xi1,
            r.point.xi2,
            r.value.re,
            r.value.im,
            r.value.norm(),
            r.quad_error
        )
        .map_err(io)?;
    }
    Ok(())
}

/// A rectangle of `(ξ, η)` nodes with spacing `h`.
#[derive(Debug, Clone, Copy)]
pub struct KgRect {
    pub xi0: f64,
    pub eta0: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone)]
pub struct KgReport {
    pub max_residual: f64,
    pub interior_nodes: usize,
}

/// Finite-difference residual of the Klein–Gordon equation
/// `(∂_ξ∂_η + π²)μ̂ = 0` satisfied by every `μ̂`, using the centered mixed
/// difference on the given grid. Converges as `O(h²)` for smooth data.
pub fn klein_gordon_residual(
    mu: &HyperbolaMeasure,
    rect: &KgRect,
    h: f64,
    tol: f64,
) -> Result<KgReport> {
    if rect.nx < 3 || rect.ny < 3 {
        return Err(Error::Parameter(
            "grid must be at least 3×3 for centered differences".into(),
        ));
    }
    if !(h > 0.0) {
        return Err(Error::Parameter("step h must be positive".into()));
    }
    let nx = rect.nx;
    let ny = rect.ny;
    let mut field = vec![Complex64::new(0.0, 0.0); nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let xi = rect.xi0 + i as f64 * h;
            let eta = rect.eta0 + j as f64 * h;
            field[i * ny + j] = ft_eval(mu, xi, eta, tol)?.value;
        }
    }
    let mut max_residual = 0.0f64;
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let mixed = (field[(i + 1) * ny + j + 1] - field[(i + 1) * ny + j - 1]
                - field[(i - 1) * ny + j + 1]
                + field[(i - 1) * ny + j - 1])
                / (4.0 * h * h);
            let r = mixed + PI * PI * field[i * ny + j];
            max_residual = max_residual.max(r.norm());
        }
    }
    Ok(KgReport {
        max_residual,
        interior_nodes: (nx - 2) * (ny - 2),
    })
}

/// Plane transforms under which the uniqueness property is invariant.
#[derive(Debug, Clone, Copy)]
pub enum PlaneTransform {
    /// `Γ ↦ Γ + u`, `Λ ↦ Λ + v`.
    Translation { u: (f64, f64), v: (f64, f64) },
    /// `T = diag(a, 1/a)`: the pair becomes `(T⁻¹Γ, TᵀΛ)`; the hyperbola is
    /// preserved and atoms `(t, 1/t)` map to `(t/a, a/t)`.
    DiagScale { a: f64 },
}

/// Apply a transform to a measure/cross pair.
pub fn transform_pair(
    mu: &HyperbolaMeasure,
    points: &[CrossPoint],
    transform: &PlaneTransform,
) -> Result<(HyperbolaMeasure, Vec<CrossPoint>)> {
    match *transform {
        PlaneTransform::Translation { u, v } => {
            let new_mu = match mu {
                HyperbolaMeasure::Atoms { atoms, shift } => HyperbolaMeasure::Atoms {
                    atoms: atoms.clone(),
                    shift: (shift.0 + u.0, shift.1 + u.1),
                },
                HyperbolaMeasure::Density {
                    g,
                    window,
                    envelope,
                    near_zero_sup,
                    shift,
                } => HyperbolaMeasure::Density {
                    g: g.clone(),
                    window: *window,
                    envelope: *envelope,
                    near_zero_sup: *near_zero_sup,
                    shift: (shift.0 + u.0, shift.1 + u.1),
                },
            };
            let new_pts = points
                .iter()
                .map(|&pt| CrossPoint {
                    xi1: pt.xi1 + v.0,
                    xi2: pt.xi2 + v.1,
                    ..pt
                })
                .collect();
            Ok((new_mu, new_pts))
        }
        PlaneTransform::DiagScale { a } => {
            if a == 0.0 || !a.is_finite() {
                return Err(Error::Domain(format!("diag(a, 1/a) needs a ≠ 0, got {a}")));
            }
            let new_mu = match mu {
                HyperbolaMeasure::Atoms { atoms, shift } => {
                    if shift.0 != 0.0 || shift.1 != 0.0 {
                        return Err(Error::Parameter(
                            "scale a translated measure by composing transforms explicitly".into(),
                        ));
                    }
                    HyperbolaMeasure::Atoms {
                        atoms: atoms.iter().map(|&(x, y, w)| (x / a, a * y, w)).collect(),
                        shift: (0.0, 0.0),
                    }
                }
                HyperbolaMeasure::Density {
                    g,
                    window,
                    envelope,
                    near_zero_sup,
                    shift,
                } => {
                    if shift.0 != 0.0 || shift.1 != 0.0 {
                        return Err(Error::Parameter(
                            "scale a translated measure by composing transforms explicitly".into(),
                        ));
                    }
                    // Pushforward of g dt under t ↦ t/a: density a·g(a·t).
                    let g2 = g.clone();
                    let scaled: DensityFn = Arc::new(move |t: f64| a.abs() * g2(a * t));
                    HyperbolaMeasure::Density {
                        g: scaled,
                        window: *window / a.abs(),
                        envelope: *envelope,
                        near_zero_sup: near_zero_sup * a.abs(),
                        shift: (0.0, 0.0),
                    }
                }
            };
            let new_pts = points
                .iter()
                .map(|&pt| CrossPoint {
                    xi1: a * pt.xi1,
                    xi2: pt.xi2 / a,
                    ..pt
                })
                .collect();
            Ok((new_mu, new_pts))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn arc_density_examples() {
        let one = |_: f64| Complex64::new(1.0, 0.0);
        assert!((arc_density_to_g(one, 1.0).unwrap().re - 2.0f64.sqrt()).abs() < 1e-15);
        let far = arc_density_to_g(one, 100.0).unwrap().re;
        assert!((far - 1.0).abs() < 1e-8 && far > 1.0);
        assert!(arc_density_to_g(one, 0.0).is_err());
    }

    #[test]
    fn gaussian_mass() {
        let mu = HyperbolaMeasure::gaussian();
        let v = ft_eval(&mu, 0.0, 0.0, 1e-10).unwrap();
        assert!((v.value.re - SQRT_PI).abs() < 1e-9, "{}", v.value.re);
        assert!(v.value.im.abs() < 1e-12);
    }

    #[test]
    fn gaussian_closed_form_on_horizontal_axis() {
        let mu = HyperbolaMeasure::gaussian();
        for &xi in &[0.25, 0.5, 1.0, 2.0, 3.5] {
            let v = ft_eval(&mu, xi, 0.0, 1e-10).unwrap();
            let want = SQRT_PI * (-PI * PI * xi * xi / 4.0).exp();
            assert!(
                (v.value.re - want).abs() < 1e-9,
                "ξ = {xi}: {} vs {want}",
                v.value.re
            );
        }
    }

    #[test]
    fn single_atom_phase() {
        let mu = HyperbolaMeasure::hyperbola_atoms(&[(1.0, Complex64::new(1.0, 0.0))]).unwrap();
        let v = ft_eval(&mu, 0.3, 0.7, 1e-12).unwrap();
        let want = Complex64::from_polar(1.0, PI * (0.3 + 0.7));
        assert!((v.value - want).norm() < 1e-15);
        assert_eq!(v.error, 0.0);
    }

    #[test]
    fn vertical_axis_oscillatory_values_converge() {
        // Halving the tolerance must not move the value beyond the coarser
        // error estimate.
        let mu = HyperbolaMeasure::gaussian();
        for &eta in &[1.0, 4.0, 17.0] {
            let coarse = ft_eval(&mu, 0.0, eta, 1e-6).unwrap();
            let fine = ft_eval(&mu, 0.0, eta, 1e-9).unwrap();
            assert!(
                (coarse.value - fine.value).norm() <= coarse.error + fine.error + 1e-12,
                "η = {eta}"
            );
            // μ̂(0, η) is real for even real g.
            assert!(fine.value.im.abs() < 1e-9, "η = {eta}: {}", fine.value.im);
        }
    }

    #[test]
    fn conjugate_symmetry_for_real_densities() {
        let mu = HyperbolaMeasure::gaussian();
        for &(xi1, xi2) in &[(0.7, 0.0), (1.3, 2.4), (0.0, 5.0), (2.2, -0.6)] {
            let a = ft_eval(&mu, xi1, xi2, 1e-9).unwrap().value;
            let b = ft_eval(&mu, -xi1, -xi2, 1e-9).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-12, "ξ = ({xi1}, {xi2})");
        }
    }

    #[test]
    fn modulus_bounded_by_total_variation() {
        let mu = HyperbolaMeasure::gaussian();
        let tv = mu.total_variation();
        assert!((tv - SQRT_PI).abs() < 1e-6);
        for &(xi1, xi2) in &[(0.0, 0.0), (3.0, 1.0), (0.5, 9.0)] {
            let v = ft_eval(&mu, xi1, xi2, 1e-8).unwrap();
            assert!(v.value.norm() <= tv + 1e-6);
        }
    }

    #[test]
    fn cross_points_geometry() {
        let cross = LatticeCross::new(2, 1, 0.75, 3).unwrap();
        let pts = cross.points();
        assert_eq!(pts.len(), 2 * 7);
        assert!(pts
            .iter()
            .filter(|p| p.axis == CrossAxis::Horizontal)
            .all(|p| p.xi2 == 0.0));
        assert!(pts
            .iter()
            .filter(|p| p.axis == CrossAxis::Vertical)
            .all(|p| p.xi1 == 0.0));
        // contains the origin exactly once, through the vertical axis
        assert_eq!(
            pts.iter().filter(|p| p.xi1 == 0.0 && p.xi2 == 0.0).count(),
            1
        );
        // gcd filter
        assert!(LatticeCross::new(2, 4, 1.0, 3).is_err());
        // θ = q/p abscissae are exact rationals
        let h: Vec<f64> = pts
            .iter()
            .filter(|p| p.axis == CrossAxis::Horizontal)
            .map(|p| p.xi1)
            .collect();
        assert!(h.contains(&0.5) && h.contains(&-2.5) && h.contains(&3.5));
    }

    #[test]
    fn zero_measure_vanishes_on_cross() {
        let cross = LatticeCross::new(1, 0, 1.0, 5).unwrap();
        let rep = ft_on_cross(&HyperbolaMeasure::zero(), &cross.points(), 1e-12).unwrap();
        assert_eq!(rep.max_modulus, 0.0);
    }

    #[test]
    fn cross_report_csv_shape() {
        let mu = HyperbolaMeasure::hyperbola_atoms(&[(1.5, Complex64::new(1.0, -0.5))]).unwrap();
        let cross = LatticeCross::new(2, 1, 0.5, 2).unwrap();
        let rep = ft_on_cross(&mu, &cross.points(), 1e-12).unwrap();
        let mut buf = Vec::new();
        cross_report_to_csv(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "axis,index,xi1,xi2,re,im,abs,quad_error"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), cross.points().len());
        // round-trip a modulus cell
        let abs: f64 = rows[0].split(',').nth(6).unwrap().parse().unwrap();
        assert!((abs - rep.residuals[0].value.norm()).abs() < 1e-15);
    }

    #[test]
    fn translation_re_evaluates_at_shifted_points() {
        let mu = HyperbolaMeasure::hyperbola_atoms(&[
            (0.8, Complex64::new(1.0, 0.0)),
            (-1.7, Complex64::new(0.5, 0.2)),
        ])
        .unwrap();
        let cross = LatticeCross::new(1, 0, 1.0, 2).unwrap();
        let pts = cross.points();
        let v = (0.3, -0.9);
        let (same_mu, moved) = transform_pair(
            &mu,
            &pts,
            &PlaneTransform::Translation { u: (0.0, 0.0), v },
        )
        .unwrap();
        for (old, new) in pts.iter().zip(&moved) {
            let lhs = ft_eval(&same_mu, new.xi1, new.xi2, 1e-12).unwrap().value;
            let rhs = ft_eval(&mu, old.xi1 + v.0, old.xi2 + v.1, 1e-12)
                .unwrap()
                .value;
            assert!((lhs - rhs).norm() < 1e-15);
        }
    }

    #[test]
    fn diag_scale_preserves_residuals_on_atoms() {
        let mu = HyperbolaMeasure::singular_pair(2.0 + 2.0f64.sqrt(), -2.0 + 2.0f64.sqrt())
            .unwrap();
        let cross = LatticeCross::new(2, 1, 1.0, 10).unwrap();
        let pts = cross.points();
        let before = ft_on_cross(&mu, &pts, 1e-12).unwrap();
        let (mu2, pts2) =
            transform_pair(&mu, &pts, &PlaneTransform::DiagScale { a: 2.0 }).unwrap();
        let after = ft_on_cross(&mu2, &pts2, 1e-12).unwrap();
        for (x, y) in before.residuals.iter().zip(&after.residuals) {
            assert!((x.value - y.value).norm() < 1e-10);
        }
        // vertical spacing scaled by 1/a, horizontal by a
        assert!((pts2[0].xi1 - 2.0 * pts[0].xi1).abs() < 1e-15);
    }

    #[test]
    fn identity_transform_is_identity() {
        let mu = HyperbolaMeasure::gaussian();
        let cross = LatticeCross::new(1, 0, 2.0, 2).unwrap();
        let pts = cross.points();
        let (mu2, pts2) =
            transform_pair(&mu, &pts, &PlaneTransform::DiagScale { a: 1.0 }).unwrap();
        for (a, b) in pts.iter().zip(&pts2) {
            assert_eq!(a.xi1, b.xi1);
            assert_eq!(a.xi2, b.xi2);
        }
        let v1 = ft_eval(&mu, 0.4, 0.0, 1e-10).unwrap().value;
        let v2 = ft_eval(&mu2, 0.4, 0.0, 1e-10).unwrap().value;
        assert!((v1 - v2).norm() < 1e-12);
    }

    #[test]
    fn klein_gordon_atom_second_order() {
        let mu = HyperbolaMeasure::hyperbola_atoms(&[(1.0, Complex64::new(1.0, 0.0))]).unwrap();
        let rect = KgRect {
            xi0: 0.3,
            eta0: 0.2,
            nx: 6,
            ny: 6,
        };
        let r1 = klein_gordon_residual(&mu, &rect, 0.02, 1e-10).unwrap();
        let r2 = klein_gordon_residual(&mu, &rect, 0.01, 1e-10).unwrap();
        let ratio = r1.max_residual / r2.max_residual;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        // analytic residual is zero; FD residual is O(h²)
        assert!(r1.max_residual < 0.02);
    }

    #[test]
    fn klein_gordon_zero_measure() {
        let rect = KgRect {
            xi0: 0.0,
            eta0: 0.0,
            nx: 4,
            ny: 4,
        };
        let r = klein_gordon_residual(&HyperbolaMeasure::zero(), &rect, 0.05, 1e-10).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }
}
