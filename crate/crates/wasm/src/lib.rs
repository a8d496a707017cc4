//! wasm-bindgen exports for the browser demo.
//!
//! Three interactive operations back the static page in `www/`:
//! orbit / escape exploration of the Gauss-type map, Ulam spectra, and the
//! separation / annihilation constructions. Results cross the boundary as
//! JSON strings; failures come back as `{"error": "..."}` objects so the
//! page can render them inline.

use huplab_core::hyperbola_ft::{ft_on_cross, HyperbolaMeasure, LatticeCross};
use huplab_core::operators::{escape_series, spectral_top, ulam_assemble, EscapeMethod};
use huplab_core::separation::{
    singular_pair, solve_separation, verify_separation_or_annihilation, VerifySubject,
};
use huplab_core::{gaussmap, MapParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!(r#"{{"error":"{e}"}}"#))
}

fn err_json(msg: impl std::fmt::Display) -> String {
    to_json(&serde_json::json!({ "error": msg.to_string() }))
}

#[derive(Serialize)]
struct OrbitOut {
    points: Vec<f64>,
    survivor_steps: usize,
    hit_zero: bool,
    exploratory: bool,
}

/// Forward orbit of `U_β` from `x0`, with the survivor count for the window
/// `(-β, β]`.
#[wasm_bindgen]
pub fn map_orbit(p: u32, beta: f64, x0: f64, n: usize) -> String {
    let run = || -> huplab_core::Result<OrbitOut> {
        let params = MapParams::new(p, beta)?;
        let o = gaussmap::orbit(x0, n.clamp(1, 5000), &params)?;
        Ok(OrbitOut {
            points: o.points,
            survivor_steps: o.survivor_steps,
            hit_zero: o.hit_zero,
            exploratory: params.exploratory(),
        })
    };
    match run() {
        Ok(out) => to_json(&out),
        Err(e) => err_json(e),
    }
}

/// Values of `U_β` at `samples` midpoints of `(-p, p]`, for plotting.
/// NaN marks points where the map is undefined at floating-point resolution.
#[wasm_bindgen]
pub fn map_graph(p: u32, beta: f64, samples: usize) -> Vec<f64> {
    let Ok(params) = MapParams::new(p, beta) else {
        return Vec::new();
    };
    let n = samples.clamp(2, 20_000);
    let pf = params.p_f64();
    (0..n)
        .map(|i| {
            let x = -pf + (i as f64 + 0.5) / n as f64 * 2.0 * pf;
            gaussmap::gauss_u(x, &params).unwrap_or(f64::NAN)
        })
        .collect()
}

#[derive(Serialize)]
struct EscapeOut {
    rows: Vec<(usize, f64, f64)>,
    window: f64,
}

/// `|E_β(n)|` series by exact interval pullback (browser-sized caps).
#[wasm_bindgen]
pub fn escape_decay(p: u32, beta: f64, n_steps: usize) -> String {
    let run = || -> huplab_core::Result<EscapeOut> {
        let params = MapParams::new(p, beta)?;
        let rows = escape_series(
            n_steps.clamp(1, 40),
            &params,
            EscapeMethod::ExactIntervals {
                max_intervals: 120_000,
                min_length: 1e-13,
            },
        )?;
        Ok(EscapeOut {
            rows: rows.iter().map(|r| (r.n, r.measure, r.error_bound)).collect(),
            window: 2.0 * params.window_radius(),
        })
    };
    match run() {
        Ok(out) => to_json(&out),
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct SpectrumOut {
    eigenvalues: Vec<(f64, f64)>,
    spectral_radius: f64,
    leading_vector: Vec<f64>,
    edge_mass_fraction: f64,
    method: String,
    tail_mass_bound: f64,
}

/// Top-k Ulam eigenvalues and the leading vector (downsampled for plotting).
#[wasm_bindgen]
pub fn ulam_spectrum(p: u32, beta: f64, n_bins: usize, branch_cutoff: usize, k: usize) -> String {
    let run = || -> huplab_core::Result<SpectrumOut> {
        let params = MapParams::new(p, beta)?;
        let n = n_bins.clamp(2, 512);
        let u = ulam_assemble(n, &params, branch_cutoff.clamp(2, 100_000))?;
        let rep = spectral_top(&u, k.clamp(1, 12))?;
        let stride = (rep.leading_vector.len() / 256).max(1);
        Ok(SpectrumOut {
            eigenvalues: rep.eigenvalues.iter().map(|e| (e.re, e.im)).collect(),
            spectral_radius: rep.spectral_radius,
            leading_vector: rep
                .leading_vector
                .iter()
                .step_by(stride)
                .copied()
                .collect(),
            edge_mass_fraction: rep.edge_mass_fraction(0.05),
            method: rep.method.tag().to_string(),
            tail_mass_bound: u.tail_mass_bound(),
        })
    };
    match run() {
        Ok(out) => to_json(&out),
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct SeparationOut {
    exists: bool,
    z1: Option<(f64, f64)>,
    z2: Option<(f64, f64)>,
    separation_residual: Option<f64>,
    pair: Option<(f64, f64)>,
    cross_max_modulus: Option<f64>,
    cross_points: usize,
}

/// Separation points for (p, β) plus the (k, m) singular annihilating pair
/// and its residual on `Λ_β^{q/p}`.
#[wasm_bindgen]
pub fn separation_report(p: u32, beta: f64, q: i64, k: i64, m: i64, n_window: usize) -> String {
    let run = || -> huplab_core::Result<SeparationOut> {
        let n_window = n_window.clamp(1, 500);
        let sol = solve_separation(p, beta);
        let (z1, z2, sep_res) = match sol.points {
            Some((z1, z2)) => {
                let rep = verify_separation_or_annihilation(
                    &VerifySubject::Separation(sol),
                    p,
                    beta,
                    q,
                    n_window,
                )?;
                (
                    Some((z1.re, z1.im)),
                    Some((z2.re, z2.im)),
                    Some(rep.max_residual),
                )
            }
            None => (None, None, None),
        };
        let pair = singular_pair(p, beta, k, m)?;
        let (pair_out, cross_max, n_pts) = match pair {
            Some((u0, v0)) => {
                let mu = HyperbolaMeasure::singular_pair(u0, v0)?;
                let cross = LatticeCross::new(p, q, beta, n_window)?;
                let pts = cross.points();
                let rep = ft_on_cross(&mu, &pts, 1e-12)?;
                (Some((u0, v0)), Some(rep.max_modulus), pts.len())
            }
            None => (None, None, 0),
        };
        Ok(SeparationOut {
            exists: sol.exists(),
            z1,
            z2,
            separation_residual: sep_res,
            pair: pair_out,
            cross_max_modulus: cross_max,
            cross_points: n_pts,
        })
    };
    match run() {
        Ok(out) => to_json(&out),
        Err(e) => err_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_json_roundtrip() {
        let s = map_orbit(1, 1.0, 0.6666666666666666, 3);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["points"].as_array().unwrap().len() == 4);
        assert!(v.get("error").is_none());

        let bad = map_orbit(1, 1.0, 5.0, 3);
        let v: serde_json::Value = serde_json::from_str(&bad).unwrap();
        assert!(v.get("error").is_some());
    }

    #[test]
    fn escape_json() {
        let s = escape_decay(1, 0.5, 8);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0][1].as_f64().unwrap(), 1.0);
    }

    #[test]
    fn spectrum_json() {
        let s = ulam_spectrum(1, 0.5, 64, 400, 3);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let radius = v["spectral_radius"].as_f64().unwrap();
        assert!(radius > 0.3 && radius < 0.55);
    }

    #[test]
    fn separation_json() {
        let s = separation_report(2, 1.0, 1, 1, 1, 50);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["exists"], false);
        assert!(v["cross_max_modulus"].as_f64().unwrap() < 1e-12);

        let s = separation_report(1, 2.0, 0, 1, 1, 20);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["exists"], true);
        assert_eq!(v["z1"][0].as_f64().unwrap(), 1.0);
    }
}
