//! The necessity direction: bounded harmonic extensions to the upper
//! half-plane, Poisson-kernel evaluation, the closed-form solution of the
//! separation system, and singular annihilating pairs.
//!
//! The boundary families are `e_n^p(t) = e^{πi(n+1/p)t}` and
//! `e_n^β(t) = e^{πinβ/t}`; both extend to bounded harmonic functions on
//! `ℂ₊` by a case split on the sign of `n`. Bounded harmonic functions
//! separate points of `ℂ₊`, so if a pair `z₁ ≠ z₂` satisfies
//! `z₁ - z₂ ∈ 2pℤ` and `1/z₁ - 1/z₂ ∈ (2/β)ℤ`, the family cannot span a
//! weak-star dense subspace. Such a pair exists iff `β > p`:
//! `z₁ = p(1 + i√(β/p - 1))`, `z₂ = p(-1 + i√(β/p - 1))`.

use crate::error::{Error, Result};
use crate::hyperbola_ft::{ft_on_cross, HyperbolaMeasure, LatticeCross};
use crate::quad::{adaptive, geometric_breaks, uniform_breaks};
use crate::Complex64;
use std::f64::consts::PI;

fn require_upper(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!(
            "point {z} is not in the open upper half-plane"
        )));
    }
    Ok(())
}

/// Bounded harmonic extension of `e_n^p`:
/// `e^{πi(n+1/p)z}` for `n ≥ 0`, `e^{πi(n+1/p)z̄}` for `n < 0`.
pub fn ext_ep(n: i64, p: u32, z: Complex64) -> Result<Complex64> {
    require_upper(z)?;
    let c = n as f64 + 1.0 / p as f64;
    let arg = if n >= 0 { z } else { z.conj() };
    Ok((Complex64::i() * PI * c * arg).exp())
}

/// Bounded harmonic extension of `e_n^β`:
/// `e^{πinβ/z̄}` for `n ≥ 0`, `e^{πinβ/z}` for `n < 0`.
pub fn ext_ebeta(n: i64, beta: f64, z: Complex64) -> Result<Complex64> {
    require_upper(z)?;
    let arg = if n >= 0 { z.conj() } else { z };
    Ok((Complex64::i() * PI * n as f64 * beta / arg).exp())
}

/// Tagged boundary data for the Poisson integral.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryFunction {
    /// `t ↦ v` (extends to the constant).
    Const { value: Complex64 },
    /// `t ↦ e^{πict}` — oscillation dies at 0, persists at ∞.
    Frequency { c: f64 },
    /// `t ↦ e^{πic/t}` — oscillation dies at ∞, persists at 0.
    InverseFrequency { c: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct PoissonValue {
    pub value: Complex64,
    pub error: f64,
}

const MAX_PANELS: usize = 300_000;

/// Poisson extension `f(z) = (1/π) ∫ f(t)·y/((x-t)² + y²) dt`.
///
/// Window sizes come from family-specific tail bounds: integration by parts
/// against the surviving oscillation for [`BoundaryFunction::Frequency`], and
/// a constant-split (`f = 1 + (f - 1)` with `|f - 1| ≤ π|c|/|t|`) plus the
/// substitution `u = 1/t` near the origin for
/// [`BoundaryFunction::InverseFrequency`].
pub fn poisson_extend(f: &BoundaryFunction, z: Complex64, tol: f64) -> Result<PoissonValue> {
    require_upper(z)?;
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let (x, y) = (z.re, z.im);
    let kernel = move |t: f64| y / ((x - t) * (x - t) + y * y) / PI;

    match *f {
        BoundaryFunction::Const { value } => Ok(PoissonValue { value, error: 0.0 }),
        BoundaryFunction::Frequency { c } => {
            if c == 0.0 {
                return Ok(PoissonValue {
                    value: Complex64::new(1.0, 0.0),
                    error: 0.0,
                });
            }
            // Tail after [x-D, x+D]: |∫| ≤ 8y/(π²|c|D²) per both sides.
            let d = (16.0 * y / (PI * PI * c.abs() * (0.5 * tol)))
                .sqrt()
                .max(12.0 * y);
            let tail = 8.0 * y / (PI * PI * c.abs() * d * d);
            let width = (2.0 / (0.2 + c.abs())).min(d / 8.0).max(2.0 * d / 80_000.0);
            let segs = uniform_breaks(x - d, x + d, width);
            let g = move |t: f64| Complex64::from_polar(1.0, PI * c * t) * kernel(t);
            let out = adaptive(&g, &segs, 0.5 * tol, MAX_PANELS);
            let error = out.error + tail;
            if error > tol {
                return Err(Error::QuadratureConvergence {
                    requested: tol,
                    achieved: error,
                    best_re: out.value.re,
                    best_im: out.value.im,
                });
            }
            Ok(PoissonValue {
                value: out.value,
                error,
            })
        }
        BoundaryFunction::InverseFrequency { c } => {
            if c == 0.0 {
                return Ok(PoissonValue {
                    value: Complex64::new(1.0, 0.0),
                    error: 0.0,
                });
            }
            let mut value = Complex64::new(1.0, 0.0); // Poisson extension of 1
            let mut error = 0.0;

            // Outer |t| ∈ [1, W]: integrate (f - 1)·P/π; |f-1| ≤ π|c|/|t|.
            let w_outer = (16.0 * c.abs() * y / (0.25 * tol)).sqrt() + 2.0 * x.abs() + 2.0 * y + 2.0;
            let tail_outer = 4.0 * c.abs() * y / (w_outer - 2.0 * x.abs() - 2.0 * y).powi(2).max(1.0);
            let g_out = move |t: f64| {
                (Complex64::from_polar(1.0, PI * c / t) - Complex64::new(1.0, 0.0)) * kernel(t)
            };
            let first = (1.0 / (1.0 + c.abs())).min(0.5 * y.max(0.05));
            let mut segs = geometric_breaks(1.0, w_outer, first, 1.12);
            segs.extend(geometric_breaks(-w_outer, -1.0, first, 1.12));
            let out = adaptive(&g_out, &segs, 0.25 * tol, MAX_PANELS);
            value += out.value;
            error += out.error + tail_outer;

            // Inner |t| < 1 via u = 1/t: ∫ (e^{πicu} - 1)·P(1/u)/(πu²) du.
            let u_max = (96.0 / (PI * PI * c.abs() * y * (0.125 * tol)))
                .sqrt()
                .max(4.0);
            let osc_tail = 12.0 / (PI * PI * c.abs() * y * u_max * u_max);
            // Constant part beyond U has the exact closed form
            // ∫_{|t| < 1/U} P/π = (1/π)[atan((1/U - x)/y) - atan((-1/U - x)/y)].
            let const_tail =
                ((1.0 / u_max - x).atan2(y) - (-1.0 / u_max - x).atan2(y)) / PI;
            let g_in = move |u: f64| {
                (Complex64::from_polar(1.0, PI * c * u) - Complex64::new(1.0, 0.0))
                    * (kernel(1.0 / u) / (u * u))
            };
            let width = 2.0 / (1.0 + c.abs());
            let mut isegs = uniform_breaks(1.0, u_max, width);
            isegs.extend(uniform_breaks(-u_max, -1.0, width));
            let inn = adaptive(&g_in, &isegs, 0.125 * tol, MAX_PANELS);
            value += inn.value - Complex64::new(const_tail, 0.0);
            error += inn.error + osc_tail;

            if error > tol {
                return Err(Error::QuadratureConvergence {
                    requested: tol,
                    achieved: error,
                    best_re: value.re,
                    best_im: value.im,
                });
            }
            Ok(PoissonValue { value, error })
        }
    }
}

/// Closed-form solution of the separation system, when it exists.
#[derive(Debug, Clone, Copy)]
pub struct SeparationSolution {
    pub p: u32,
    pub beta: f64,
    /// `(z₁, z₂)` with `z₁ - z₂ = 2p` and `1/z₁ - 1/z₂ = 2/β`; present iff
    /// `β > p`.
    pub points: Option<(Complex64, Complex64)>,
}

impl SeparationSolution {
    pub fn exists(&self) -> bool {
        self.points.is_some()
    }
}

/// Solve `z₁ - z₂ ∈ 2pℤ`, `1/z₁ - 1/z₂ ∈ (2/β)ℤ` for two distinct points of
/// `ℂ₊`; solvable iff `p < β`.
pub fn solve_separation(p: u32, beta: f64) -> SeparationSolution {
    let pf = p as f64;
    if beta <= pf {
        return SeparationSolution {
            p,
            beta,
            points: None,
        };
    }
    let s = (beta / pf - 1.0).sqrt();
    let z1 = Complex64::new(pf, pf * s);
    let z2 = Complex64::new(-pf, pf * s);
    SeparationSolution {
        p,
        beta,
        points: Some((z1, z2)),
    }
}

/// Real points `u₀ ≠ v₀` with `u₀ - v₀ = 2pk` and `1/u₀ - 1/v₀ = 2m/β`, so
/// that `μ = δ_{(u₀,1/u₀)} - δ_{(v₀,1/v₀)}` annihilates `Λ_β^{q/p}` for every
/// `q`. Solves `v² + 2pk·v + pkβ/m = 0`; no real solution when the
/// discriminant `(pk)² - pkβ/m` is negative.
pub fn singular_pair(p: u32, beta: f64, k: i64, m: i64) -> Result<Option<(f64, f64)>> {
    if k == 0 || m == 0 {
        return Err(Error::Parameter("k and m must be nonzero integers".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter("beta must be positive".into()));
    }
    let pk = p as f64 * k as f64;
    let disc = pk * pk - pk * beta / m as f64;
    if disc < 0.0 {
        return Ok(None);
    }
    let v0 = -pk + disc.sqrt();
    let u0 = v0 + 2.0 * pk;
    if u0 == 0.0 || v0 == 0.0 || u0 == v0 {
        return Ok(None);
    }
    Ok(Some((u0, v0)))
}

/// What [`verify_separation_or_annihilation`] checks.
#[derive(Debug, Clone)]
pub enum VerifySubject {
    /// Max over `|n| ≤ N` of the extension mismatches at `(z₁, z₂)`.
    Separation(SeparationSolution),
    /// Max of `|μ̂|` over the lattice-cross for the atom pair.
    Annihilation { u0: f64, v0: f64 },
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub max_residual: f64,
    /// Per-`n` residuals: `(label, index, residual)`.
    pub rows: Vec<(String, i64, f64)>,
    pub degenerate: bool,
}

pub fn verify_separation_or_annihilation(
    subject: &VerifySubject,
    p: u32,
    beta: f64,
    q: i64,
    n_window: usize,
) -> Result<VerifyReport> {
    match subject {
        VerifySubject::Separation(sol) => {
            let Some((z1, z2)) = sol.points else {
                return Err(Error::Parameter(
                    "no separation solution to verify (β ≤ p)".into(),
                ));
            };
            let n = n_window as i64;
            let mut rows = Vec::with_capacity(2 * (2 * n_window + 1));
            let mut max_residual = 0.0f64;
            for idx in -n..=n {
                let dp = (ext_ep(idx, p, z1)? - ext_ep(idx, p, z2)?).norm();
                let db = (ext_ebeta(idx, beta, z1)? - ext_ebeta(idx, beta, z2)?).norm();
                max_residual = max_residual.max(dp).max(db);
                rows.push(("e_n^p".to_string(), idx, dp));
                rows.push(("e_n^beta".to_string(), idx, db));
            }
            Ok(VerifyReport {
                max_residual,
                rows,
                degenerate: false,
            })
        }
        VerifySubject::Annihilation { u0, v0 } => {
            if u0 == v0 {
                return Ok(VerifyReport {
                    max_residual: 0.0,
                    rows: Vec::new(),
                    degenerate: true,
                });
            }
            let mu = HyperbolaMeasure::singular_pair(*u0, *v0)?;
            let cross = LatticeCross::new(p, q, beta, n_window)?;
            let report = ft_on_cross(&mu, &cross.points(), 1e-12)?;
            let rows = report
                .residuals
                .iter()
                .map(|r| {
                    (
                        r.point.axis.tag().to_string(),
                        r.point.index,
                        r.value.norm(),
                    )
                })
                .collect();
            Ok(VerifyReport {
                max_residual: report.max_modulus,
                rows,
                degenerate: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ext_ep_examples() {
        let i = c(0.0, 1.0);
        assert!((ext_ep(0, 1, i).unwrap().re - (-PI).exp()).abs() < 1e-15);
        // n = -1, p = 1: coefficient 0, identically 1
        assert_eq!(ext_ep(-1, 1, c(3.7, 0.2)).unwrap(), c(1.0, 0.0));
        assert!((ext_ep(-1, 2, i).unwrap().re - (-PI / 2.0).exp()).abs() < 1e-15);
        assert!(ext_ep(0, 1, c(0.0, -1.0)).is_err());
    }

    #[test]
    fn ext_ebeta_examples() {
        let i = c(0.0, 1.0);
        assert_eq!(ext_ebeta(0, 2.0, c(1.0, 5.0)).unwrap(), c(1.0, 0.0));
        assert!((ext_ebeta(1, 2.0, i).unwrap().re - (-2.0 * PI).exp()).abs() < 1e-15);
        assert!(ext_ebeta(1, 1.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn extensions_are_bounded_by_one() {
        for n in -7..=7 {
            for &(re, im) in &[(0.0, 0.1), (2.5, 1.0), (-3.0, 0.01), (0.3, 10.0)] {
                let z = c(re, im);
                assert!(ext_ep(n, 3, z).unwrap().norm() <= 1.0 + 1e-14);
                assert!(ext_ebeta(n, 1.7, z).unwrap().norm() <= 1.0 + 1e-14);
            }
        }
    }

    #[test]
    fn boundary_values_recovered_in_the_limit() {
        // |ext(x + iε) - boundary(x)| decreases as ε = 10^{-k}, k = 1..4.
        let x = 0.73;
        let mut prev_p = f64::INFINITY;
        let mut prev_b = f64::INFINITY;
        for k in 1..=4 {
            let z = c(x, 10f64.powi(-k));
            let bp = Complex64::from_polar(1.0, PI * (2.0 + 0.5) * x);
            let ep = (ext_ep(2, 2, z).unwrap() - bp).norm();
            let bb = Complex64::from_polar(1.0, PI * 3.0 * 1.5 / x);
            let eb = (ext_ebeta(3, 1.5, z).unwrap() - bb).norm();
            assert!(ep < prev_p && eb < prev_b, "k = {k}");
            prev_p = ep;
            prev_b = eb;
        }
        assert!(prev_p < 1e-3 && prev_b < 1e-2);
    }

    #[test]
    fn kernel_normalizes_to_one() {
        // (1/π)∫ y/((x-t)²+y²) dt = 1, checked on a wide window plus the
        // arctangent closed form for the tails.
        let (x, y) = (0.4, 0.8);
        let f = |t: f64| c(y / ((x - t) * (x - t) + y * y) / PI, 0.0);
        let w = 5000.0;
        let segs = crate::quad::centered_breaks(x, w, y / 4.0, 1.2);
        let out = adaptive(&f, &segs, 1e-10, 100_000);
        let tails = 1.0 - (((x + w) - x).atan2(y) - ((x - w) - x).atan2(y)) / PI;
        assert!((out.value.re + tails - 1.0).abs() < 1e-8);
    }

    #[test]
    fn poisson_constant() {
        let v = poisson_extend(
            &BoundaryFunction::Const {
                value: c(1.0, 0.0),
            },
            c(1.0, 2.0),
            1e-8,
        )
        .unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
    }

    #[test]
    fn poisson_matches_case_split_extensions() {
        let zs = [c(0.0, 1.0), c(1.0, 2.0)];
        for &z in &zs {
            for n in -2..=2 {
                let cfreq = n as f64 + 0.5; // p = 2
                let got = poisson_extend(&BoundaryFunction::Frequency { c: cfreq }, z, 1e-7)
                    .unwrap();
                let want = ext_ep(n, 2, z).unwrap();
                assert!(
                    (got.value - want).norm() < 1e-6,
                    "e_{n}^p at {z}: {} vs {want}",
                    got.value
                );

                let cb = n as f64 * 1.5; // β = 3/2
                let got = poisson_extend(&BoundaryFunction::InverseFrequency { c: cb }, z, 1e-7)
                    .unwrap();
                let want = ext_ebeta(n, 1.5, z).unwrap();
                assert!(
                    (got.value - want).norm() < 1e-6,
                    "e_{n}^β at {z}: {} vs {want}",
                    got.value
                );
            }
        }
    }

    #[test]
    fn separation_exists_iff_beta_exceeds_p() {
        let sol = solve_separation(1, 2.0);
        let (z1, z2) = sol.points.unwrap();
        assert!((z1 - c(1.0, 1.0)).norm() < 1e-15);
        assert!((z2 - c(-1.0, 1.0)).norm() < 1e-15);

        assert!(!solve_separation(1, 1.0).exists());
        assert!(!solve_separation(3, 2.0).exists());

        let sol = solve_separation(2, 4.0);
        let (z1, z2) = sol.points.unwrap();
        assert!((z1 - c(2.0, 2.0)).norm() < 1e-15);
        // 1/z₁ - 1/z₂ = 2/β via z₁z₂ = -pβ
        let d = Complex64::new(1.0, 0.0) / z1 - Complex64::new(1.0, 0.0) / z2;
        assert!((d - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn separation_congruences_hold() {
        for &(p, beta) in &[(1u32, 2.0f64), (2, 4.0), (2, 9.5), (3, 3.0001)] {
            let sol = solve_separation(p, beta);
            let (z1, z2) = sol.points.unwrap();
            assert!(z1.im > 0.0 && z2.im > 0.0);
            assert!(((z1 - z2) - c(2.0 * p as f64, 0.0)).norm() < 1e-12);
            let d = Complex64::new(1.0, 0.0) / z1 - Complex64::new(1.0, 0.0) / z2;
            assert!((d - c(2.0 / beta, 0.0)).norm() < 1e-12, "p={p}, β={beta}");
        }
    }

    #[test]
    fn singular_pair_examples() {
        let (u0, v0) = singular_pair(2, 1.0, 1, 1).unwrap().unwrap();
        assert!((u0 - (2.0 + 2.0f64.sqrt())).abs() < 1e-14);
        assert!((v0 - (-2.0 + 2.0f64.sqrt())).abs() < 1e-14);

        assert!(singular_pair(1, 8.0, 1, 1).unwrap().is_none()); // disc < 0

        let (u0, v0) = singular_pair(1, 1.0, 1, 2).unwrap().unwrap();
        let r = 0.5f64.sqrt();
        assert!((v0 - (-1.0 + r)).abs() < 1e-14);
        assert!((u0 - (1.0 + r)).abs() < 1e-14);

        assert!(singular_pair(1, 1.0, 0, 1).is_err());
    }

    #[test]
    fn closed_form_pair_separates_to_machine_precision() {
        let sol = solve_separation(1, 2.0);
        let rep = verify_separation_or_annihilation(
            &VerifySubject::Separation(sol),
            1,
            2.0,
            0,
            50,
        )
        .unwrap();
        assert!(rep.max_residual < 1e-12, "residual {}", rep.max_residual);
    }

    #[test]
    fn generic_pair_fails_to_separate() {
        // moderate heights keep the extensions from decaying away
        let fake = SeparationSolution {
            p: 1,
            beta: 2.0,
            points: Some((c(0.9, 0.3), c(-1.1, 0.25))),
        };
        let rep = verify_separation_or_annihilation(
            &VerifySubject::Separation(fake),
            1,
            2.0,
            0,
            10,
        )
        .unwrap();
        assert!(rep.max_residual > 0.1);
    }

    #[test]
    fn annihilation_residual_and_degenerate_flag() {
        let (u0, v0) = singular_pair(2, 1.0, 1, 1).unwrap().unwrap();
        let rep = verify_separation_or_annihilation(
            &VerifySubject::Annihilation { u0, v0 },
            2,
            1.0,
            1,
            100,
        )
        .unwrap();
        assert!(rep.max_residual < 1e-12, "residual {}", rep.max_residual);
        assert!(!rep.degenerate);

        let rep = verify_separation_or_annihilation(
            &VerifySubject::Annihilation { u0: 1.5, v0: 1.5 },
            2,
            1.0,
            1,
            5,
        )
        .unwrap();
        assert!(rep.degenerate && rep.max_residual == 0.0);
    }

    #[test]
    fn singular_pair_phases_are_even_integers() {
        // (n + q/p)(u₀ - v₀) = 2k(np + q) and βm'(1/u₀ - 1/v₀) = 2mm' are
        // even integers by construction, for every n, m', q.
        let (p, k, m, q) = (2i64, 1i64, 1i64, 1i64);
        for n in -50..=50i64 {
            let horiz = 2 * k * (n * p + q);
            assert_eq!(horiz % 2, 0);
            let vert = 2 * m * n;
            assert_eq!(vert % 2, 0);
        }
    }
}
