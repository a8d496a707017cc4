//! Transfer, Koopman, and composition operators for `U_β`.
//!
//! * `C_β[φ](x) = φ(U_β(x))·χ_{(-β,β]}(x)` — weighted Koopman operator;
//! * `P_β[f](x) = Σ_{j∈ℤ*} pβ/(2pj-x)² · f(pβ/(2pj-x))` — its predual, the
//!   Perron-Frobenius operator on densities;
//! * `S[φ](x) = φ(p{x/p}₂)·χ_{ℝ∖(-p,p]}(x)` and
//!   `T_β[ψ](x) = ψ(β/{β/x}₂)·χ_{(-β,β]}(x)` — the periodization operators
//!   whose composition satisfies `T_βS = C_β²` and hence
//!   `I - T_βS = (I + C_β)(I - C_β)`.
//!
//! All pointwise identities hold off the countable set
//! `{x : β/x ∈ ℤ} ∪ {0}` (branch endpoints and preimages of 0); evaluation on
//! that set returns a structured error instead of an arbitrary convention.

mod escape;
mod spectral;
mod ulam;

pub use escape::{escape_measure, escape_series, EscapeMethod, EscapeRow};
pub use spectral::{spectral_top, SpectralMethod, SpectrumReport};
pub use ulam::{ulam_assemble, UlamMatrix};

pub use crate::grid::GridFunction;

use crate::error::{Error, Result};
use crate::gaussmap::{gauss_u, mod2};
use crate::params::MapParams;
use crate::special::trigamma;
use crate::Complex64;

fn check_phase_space(x: f64, params: &MapParams) -> Result<()> {
    if !params.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} outside the phase space (-{p}, {p}]",
            p = params.p()
        )));
    }
    Ok(())
}

fn check_not_branch_endpoint(x: f64, params: &MapParams) -> Result<()> {
    if x != 0.0 {
        let y = params.beta() / x;
        if y.abs() < 9.0e15 && y == y.round() && (y.round() as i64) % 2 != 0 {
            return Err(Error::BranchEndpoint { x });
        }
    }
    Ok(())
}

/// Weighted Koopman operator `C_β[φ](x) = φ(U_β(x))·χ_{(-β,β]}(x)`.
pub fn koopman_apply<F: Fn(f64) -> Complex64>(
    phi: F,
    x: f64,
    params: &MapParams,
) -> Result<Complex64> {
    check_phase_space(x, params)?;
    check_not_branch_endpoint(x, params)?;
    if !params.in_window(x) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(phi(gauss_u(x, params)?))
}

/// Periodic extension operator `S[φ](x) = φ(p{x/p}₂)·χ_{ℝ∖(-p,p]}(x)`.
pub fn s_apply<F: Fn(f64) -> Complex64>(phi: F, x: f64, params: &MapParams) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("s_apply requires finite x, got {x}")));
    }
    if params.contains(x) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = params.p_f64();
    Ok(phi(p * mod2(x / p)?))
}

/// `T_β[ψ](x) = ψ(β/{β/x}₂)·χ_{(-β,β]}(x)`.
///
/// `ψ` lives on `ℝ∖(-β, β]`; when composed with [`s_apply`] it is implicitly
/// zero-extended on `(-p, p]∖(-β, β]`.
pub fn t_beta_apply<F: Fn(f64) -> Complex64>(
    psi: F,
    x: f64,
    params: &MapParams,
) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "t_beta_apply requires finite x, got {x}"
        )));
    }
    if !(x > -params.beta() && x <= params.beta()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if x == 0.0 {
        return Err(Error::Singularity {
            x,
            what: "{β/x}₂ undefined at x = 0".into(),
        });
    }
    let r = mod2(params.beta() / x)?;
    if r == 0.0 {
        return Err(Error::Singularity {
            x,
            what: "{β/x}₂ = 0 (x is a preimage of 0)".into(),
        });
    }
    Ok(psi(params.beta() / r))
}

/// Composition `T_βS[φ](x) = φ(p{β₀/{β/x}₂}₂)·χ_{E_β}(x)`, where `E_β` is the
/// set of `x ∈ (-β, β]∖{0}` with `β₀/{β/x}₂ ∉ (-1, 1]`.
///
/// Off branch endpoints and preimages of 0 this coincides with `C_β²`.
pub fn ts_apply<F: Fn(f64) -> Complex64>(
    phi: F,
    x: f64,
    params: &MapParams,
) -> Result<Complex64> {
    check_phase_space(x, params)?;
    check_not_branch_endpoint(x, params)?;
    if !params.in_window(x) || x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = mod2(params.beta() / x)?;
    if r == 0.0 {
        return Err(Error::Singularity {
            x,
            what: "{β/x}₂ = 0 (x is a preimage of 0)".into(),
        });
    }
    let inner = params.beta0() / r;
    if inner > -1.0 && inner <= 1.0 {
        // β/{β/x}₂ fell back into (-p, p]: outside E_β, the cutoff kills it.
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(phi(params.p_f64() * mod2(inner)?))
}

/// Max over `grid` of `|(I - T_βS)[φ] - (I + C_β)(I - C_β)[φ]|`.
///
/// The right-hand side is evaluated operator by operator, so this genuinely
/// exercises the factorization rather than an algebraic simplification of it.
pub fn factorization_residual<F: Fn(f64) -> Complex64>(
    phi: F,
    grid: &[f64],
    params: &MapParams,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in grid {
        let lhs = phi(x) - ts_apply(&phi, x, params)?;
        // ψ = (I - C_β)φ, then (I + C_β)ψ.
        let psi = |y: f64| -> Complex64 {
            phi(y)
                - koopman_apply(&phi, y, params).unwrap_or_else(|_| Complex64::new(f64::NAN, 0.0))
        };
        let rhs = psi(x) + koopman_apply(&psi, x, params)?;
        let d = (lhs - rhs).norm();
        if d.is_nan() {
            return Err(Error::Singularity {
                x,
                what: "factorization grid touched the singular set".into(),
            });
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Result of a pointwise Perron-Frobenius application.
#[derive(Debug, Clone, Copy)]
pub struct PfValue {
    pub value: Complex64,
    /// Bound on the error of the analytic tail completion (see below).
    pub tail_bound: f64,
}

/// Apply `P_β` to `f` at `x`, summing branches `0 < |j| ≤ J` explicitly and
/// completing the `|j| > J` tail analytically.
///
/// The omitted branch weights sum exactly to
/// `Σ_{j>J} pβ/(2pj∓x)² = (β/4p)·ψ'(J+1∓x/(2p))` per side (trigamma), and the
/// omitted sample points all lie in `(-z, z]`, `z = β/(2J+1)`. The completion
/// adds `f(±z/2)` times those exact weights; `tail_bound` is the residual
/// error bound `Σ W± · osc(f)` where the oscillation of `f` over each omitted
/// zone is estimated by sampling.
pub fn pf_apply<F: Fn(f64) -> Complex64>(
    f: F,
    x: f64,
    params: &MapParams,
    j_cutoff: usize,
) -> Result<PfValue> {
    check_phase_space(x, params)?;
    if j_cutoff < 2 {
        return Err(Error::Parameter("branch cutoff J must be ≥ 2".into()));
    }
    let p = params.p_f64();
    let beta = params.beta();
    let pb = p * beta;
    let mut value = Complex64::new(0.0, 0.0);
    // Fixed descending index order: small weights first.
    for j in (1..=j_cutoff).rev() {
        let dp = 2.0 * p * j as f64 - x;
        let dm = 2.0 * p * j as f64 + x;
        value += pb / (dp * dp) * f(pb / dp);
        value += pb / (dm * dm) * f(-pb / dm);
    }

    let s = x / (2.0 * p);
    let jf = j_cutoff as f64;
    let w_pos = beta / (4.0 * p) * trigamma(jf + 1.0 - s);
    let w_neg = beta / (4.0 * p) * trigamma(jf + 1.0 + s);
    let z = beta / (2.0 * jf + 1.0);
    let c_pos = f(0.5 * z);
    let c_neg = f(-0.5 * z);
    value += w_pos * c_pos + w_neg * c_neg;

    let mut osc_pos = 0.0f64;
    let mut osc_neg = 0.0f64;
    for i in 1..=9 {
        let t = i as f64 * 0.1 * z;
        osc_pos = osc_pos.max((f(t) - c_pos).norm());
        osc_neg = osc_neg.max((f(-t) - c_neg).norm());
    }
    let slop = 64.0 * f64::EPSILON * (w_pos * c_pos.norm() + w_neg * c_neg.norm() + value.norm());
    Ok(PfValue {
        value,
        tail_bound: w_pos * osc_pos + w_neg * osc_neg + slop,
    })
}
