//! The Gauss-type maps `τ_β`, `U_β` and their branch structure.
//!
//! `{u}₂` denotes the unique representative of `u` modulo `2ℤ` in `(-1, 1]`.
//! The map `τ_β` on `(-p, p]` is `τ_β(x) = {-β/x}₂` with `τ_β(0) = 0`, and
//! `U_β(x) = p·τ_β(x)`. On the branch interval `(β/(2j+1), β/(2j-1)]`,
//! `j ∈ ℤ*`, the map is the Möbius piece `τ_β(x) = -β/x + 2j` with inverse
//! `h_j(t) = pβ/(2pj - t)` (as a branch of `U_β`).
//!
//! All interval conventions are half-open `(a, b]`; ties at endpoints belong
//! to the branch on whose closed right end they sit.

use crate::error::{Error, Result};
use crate::params::MapParams;

/// Reduce `u` modulo `2ℤ` into `(-1, 1]`.
///
/// Computed through `k = ⌈(u-1)/2⌉` so that boundary cases are exact: both
/// `u - 1` and the halving are exact in binary floating point for `|u| < 2⁵³`,
/// hence `mod2` is exact wherever `u` is representable.
pub fn mod2(u: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("mod2 requires finite input, got {u}")));
    }
    let k = ((u - 1.0) / 2.0).ceil();
    Ok(u - 2.0 * k)
}

/// `τ_β(x) = {-β/x}₂`, with the fixed point `τ_β(0) = 0`.
pub fn gauss_tau(x: f64, params: &MapParams) -> Result<f64> {
    if !params.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} outside the phase space (-{p}, {p}]",
            p = params.p()
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let u = -params.beta() / x;
    if !u.is_finite() {
        return Err(Error::Domain(format!("-β/x overflows at x = {x}")));
    }
    mod2(u)
}

/// `U_β(x) = p·τ_β(x)`, a self-map of `(-p, p]`.
pub fn gauss_u(x: f64, params: &MapParams) -> Result<f64> {
    Ok(params.p_f64() * gauss_tau(x, params)?)
}

/// Index `j ∈ ℤ*` of the branch interval `(β/(2j+1), β/(2j-1)]` containing `x`.
///
/// Consistent with [`gauss_tau`]: on branch `j`, `τ_β(x) = -β/x + 2j`.
pub fn branch_index(x: f64, params: &MapParams) -> Result<i64> {
    let beta = params.beta();
    if x == 0.0 || x == -beta || x.abs() > beta || !x.is_finite() {
        return Err(Error::Domain(format!(
            "branch index defined on (-β, β] \\ {{0}}, got x = {x}"
        )));
    }
    // x ∈ (β/(2j+1), β/(2j-1)]  ⟺  2j-1 ≤ β/x < 2j+1 (both signs of x).
    let y = beta / x;
    let j = ((y + 1.0) / 2.0).floor() as i64;
    debug_assert!(j != 0);
    Ok(j)
}

/// Inverse branch `h_j(t) = pβ/(2pj - t)` of `U_β`, mapping `(-p, p]` into
/// branch `j`'s interval.
pub fn branch_inverse(t: f64, j: i64, params: &MapParams) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("branch index j must be nonzero".into()));
    }
    if !params.contains(t) {
        return Err(Error::Domain(format!(
            "t = {t} outside the phase space (-{p}, {p}]",
            p = params.p()
        )));
    }
    let p = params.p_f64();
    Ok(p * params.beta() / (2.0 * p * j as f64 - t))
}

/// Derivative `τ_β'(x) = β/x²` (away from branch endpoints).
///
/// The pushforward weights of the transfer operator come from
/// `1/|U_β'(h_j(t))| = pβ/(2pj - t)²`.
pub fn gauss_deriv(x: f64, params: &MapParams) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Domain("derivative singular at x = 0".into()));
    }
    Ok(params.beta() / (x * x))
}

/// A finite forward orbit of `U_β`.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// `points[k] = U_β^{(k)}(x₀)` for `k = 0..=n`.
    pub points: Vec<f64>,
    /// Largest `m ≤ n` such that `points[k] ∈ (-β, β]` for all `k < m`.
    pub survivor_steps: usize,
    /// Whether the orbit reached the fixed point 0 (it then stays there).
    pub hit_zero: bool,
}

/// Iterate `U_β` for `n` steps from `x₀`.
pub fn orbit(x0: f64, n: usize, params: &MapParams) -> Result<Orbit> {
    if n < 1 {
        return Err(Error::Parameter("orbit length n must be ≥ 1".into()));
    }
    if !params.contains(x0) {
        return Err(Error::Domain(format!(
            "x₀ = {x0} outside the phase space (-{p}, {p}]",
            p = params.p()
        )));
    }
    let mut points = Vec::with_capacity(n + 1);
    points.push(x0);
    let mut x = x0;
    let mut hit_zero = x == 0.0;
    for _ in 0..n {
        x = gauss_u(x, params)?;
        if x == 0.0 {
            hit_zero = true;
        }
        points.push(x);
    }
    let mut survivor_steps = 0;
    for &pt in points.iter().take(n) {
        if params.in_window(pt) {
            survivor_steps += 1;
        } else {
            break;
        }
    }
    Ok(Orbit {
        points,
        survivor_steps,
        hit_zero,
    })
}
