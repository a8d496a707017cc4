//! The experiment commands. Each returns the rendered document body; scans
//! parallelize across parameter points but always emit rows in parameter
//! order.

use crate::config::ExperimentConfig;
use crate::output::{render_json, CsvCell, CsvDoc, OutputFormat};
use huplab_core::grid::operator_grid;
use huplab_core::hyperbola_ft::{ft_on_cross, HyperbolaMeasure, LatticeCross};
use huplab_core::operators::{
    escape_series, factorization_residual, koopman_apply, spectral_top, ts_apply, ulam_assemble,
    EscapeMethod,
};
use huplab_core::separation::{
    ext_ebeta, ext_ep, poisson_extend, singular_pair, solve_separation, BoundaryFunction,
    VerifySubject,
};
use huplab_core::{Complex64, Error as CoreError, MapParams};
use rayon::prelude::*;
use serde::Serialize;

pub enum CmdError {
    Config(String),
    Numerical(String),
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parameter(m) | CoreError::Domain(m) => CmdError::Config(m),
            other => CmdError::Numerical(other.to_string()),
        }
    }
}

type CmdResult = Result<String, CmdError>;

struct ScanRow {
    beta: f64,
    radius: Option<f64>,
    second: Option<f64>,
    tail: f64,
    status: String,
}

/// One row per β: spectral radius and second eigenvalue of the Ulam matrix.
/// Eigensolver failures are recorded in the row and the scan continues.
pub fn cmd_spectrum_scan(cfg: &ExperimentConfig, format: OutputFormat) -> CmdResult {
    let betas = cfg.beta_values();
    let rows: Vec<ScanRow> = betas
        .par_iter()
        .map(|&beta| {
            let run = || -> Result<(f64, f64, f64), CoreError> {
                let params = MapParams::new(cfg.p, beta)?;
                let u = ulam_assemble(cfg.n_bins, &params, cfg.branch_cutoff)?;
                let rep = spectral_top(&u, cfg.top_k.max(2))?;
                Ok((
                    rep.spectral_radius,
                    rep.eigenvalues.get(1).map(|e| e.norm()).unwrap_or(f64::NAN),
                    u.tail_mass_bound(),
                ))
            };
            match run() {
                Ok((radius, second, tail)) => ScanRow {
                    beta,
                    radius: Some(radius),
                    second: Some(second),
                    tail,
                    status: "ok".to_string(),
                },
                Err(e) => ScanRow {
                    beta,
                    radius: None,
                    second: None,
                    tail: f64::NAN,
                    status: format!("error: {e}"),
                },
            }
        })
        .collect();

    match format {
        OutputFormat::Csv => {
            let mut doc = CsvDoc::new(
                "spectrum-scan",
                cfg,
                "beta,n_bins,branch_cutoff,spectral_radius,second_eigenvalue,tail_mass_bound,status",
            );
            for r in &rows {
                doc.row(&[
                    CsvCell::Num(r.beta),
                    CsvCell::Int(cfg.n_bins as i64),
                    CsvCell::Int(cfg.branch_cutoff as i64),
                    CsvCell::Num(r.radius.unwrap_or(f64::NAN)),
                    CsvCell::Num(r.second.unwrap_or(f64::NAN)),
                    CsvCell::Num(r.tail),
                    CsvCell::Text(r.status.clone()),
                ]);
            }
            Ok(doc.finish())
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                beta: f64,
                n_bins: usize,
                branch_cutoff: usize,
                spectral_radius: Option<f64>,
                second_eigenvalue: Option<f64>,
                tail_mass_bound: f64,
                status: String,
            }
            let rows: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    beta: r.beta,
                    n_bins: cfg.n_bins,
                    branch_cutoff: cfg.branch_cutoff,
                    spectral_radius: r.radius,
                    second_eigenvalue: r.second,
                    tail_mass_bound: r.tail,
                    status: r.status.clone(),
                })
                .collect();
            Ok(render_json("spectrum-scan", cfg, rows))
        }
    }
}

/// Escape-set measures `|E_β(n)|` for n = 1..n_steps, by exact intervals and
/// by seeded Monte Carlo.
pub fn cmd_escape(cfg: &ExperimentConfig, format: OutputFormat) -> CmdResult {
    let params = MapParams::new(cfg.p, cfg.beta)?;
    let exact = escape_series(cfg.n_steps, &params, EscapeMethod::exact_default())?;
    let mc = escape_series(
        cfg.n_steps,
        &params,
        EscapeMethod::MonteCarlo {
            samples: cfg.mc_samples,
            seed: cfg.seed,
        },
    )?;

    match format {
        OutputFormat::Csv => {
            let mut doc = CsvDoc::new(
                "escape",
                cfg,
                "n,measure,error_bound,mc_measure,mc_sigma",
            );
            for (e, s) in exact.iter().zip(&mc) {
                doc.row(&[
                    CsvCell::Int(e.n as i64),
                    CsvCell::Num(e.measure),
                    CsvCell::Num(e.error_bound),
                    CsvCell::Num(s.measure),
                    CsvCell::Num(s.error_bound),
                ]);
            }
            Ok(doc.finish())
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                measure: f64,
                error_bound: f64,
                mc_measure: f64,
                mc_sigma: f64,
            }
            let rows: Vec<Row> = exact
                .iter()
                .zip(&mc)
                .map(|(e, s)| Row {
                    n: e.n,
                    measure: e.measure,
                    error_bound: e.error_bound,
                    mc_measure: s.measure,
                    mc_sigma: s.error_bound,
                })
                .collect();
            Ok(render_json("escape", cfg, rows))
        }
    }
}

fn build_measure(cfg: &ExperimentConfig) -> Result<(HyperbolaMeasure, String), CmdError> {
    match cfg.measure.as_str() {
        "gaussian" => Ok((HyperbolaMeasure::gaussian(), "gaussian g(t)=exp(-t^2)".into())),
        "zero" => Ok((HyperbolaMeasure::zero(), "zero measure".into())),
        "singular-pair" => {
            let pair = singular_pair(cfg.p, cfg.beta, cfg.k, cfg.m).map_err(CmdError::from)?;
            let (u0, v0) = pair.ok_or_else(|| {
                CmdError::Config(format!(
                    "no real singular pair for p={}, beta={}, k={}, m={}",
                    cfg.p, cfg.beta, cfg.k, cfg.m
                ))
            })?;
            Ok((
                HyperbolaMeasure::singular_pair(u0, v0).map_err(CmdError::from)?,
                format!("delta pair u0={u0:.16e}, v0={v0:.16e}"),
            ))
        }
        other => Err(CmdError::Config(format!("unknown measure '{other}'"))),
    }
}

/// Evaluate `μ̂` on the lattice-cross and classify the result.
pub fn cmd_cross_residual(cfg: &ExperimentConfig, format: OutputFormat) -> CmdResult {
    let (mu, label) = build_measure(cfg)?;
    let cross = LatticeCross::new(cfg.p, cfg.q, cfg.beta, cfg.index_window)?;
    let report = ft_on_cross(&mu, &cross.points(), cfg.tol)?;
    let verdict = if report.max_modulus <= 1e-10_f64.max(10.0 * report.max_quad_error) {
        "annihilating"
    } else {
        "non-vanishing"
    };

    #[derive(Serialize)]
    struct Row {
        axis: &'static str,
        index: i64,
        xi1: f64,
        xi2: f64,
        re: f64,
        im: f64,
        abs: f64,
        quad_error: f64,
    }
    #[derive(Serialize)]
    struct Report {
        measure: String,
        verdict: String,
        max_modulus: f64,
        max_quad_error: f64,
        points: usize,
        rows: Vec<Row>,
    }
    let rows: Vec<Row> = report
        .residuals
        .iter()
        .map(|r| Row {
            axis: r.point.axis.tag(),
            index: r.point.index,
            xi1: r.point.xi1,
            xi2: r.point.xi2,
            re: r.value.re,
            im: r.value.im,
            abs: r.value.norm(),
            quad_error: r.quad_error,
        })
        .collect();

    match format {
        OutputFormat::Json => Ok(render_json(
            "cross-residual",
            cfg,
            Report {
                measure: label,
                verdict: verdict.to_string(),
                max_modulus: report.max_modulus,
                max_quad_error: report.max_quad_error,
                points: rows.len(),
                rows,
            },
        )),
        OutputFormat::Csv => {
            let mut doc = CsvDoc::new(
                "cross-residual",
                cfg,
                "axis,index,xi1,xi2,re,im,abs,quad_error",
            );
            for r in &rows {
                doc.row(&[
                    CsvCell::Text(r.axis.to_string()),
                    CsvCell::Int(r.index),
                    CsvCell::Num(r.xi1),
                    CsvCell::Num(r.xi2),
                    CsvCell::Num(r.re),
                    CsvCell::Num(r.im),
                    CsvCell::Num(r.abs),
                    CsvCell::Num(r.quad_error),
                ]);
            }
            Ok(doc.finish())
        }
    }
}

/// Closed-form separation solution with its residual table.
pub fn cmd_separate(cfg: &ExperimentConfig, _format: OutputFormat) -> CmdResult {
    let sol = solve_separation(cfg.p, cfg.beta);

    #[derive(Serialize)]
    struct Row {
        family: String,
        n: i64,
        residual: f64,
    }
    #[derive(Serialize)]
    struct Report {
        exists: bool,
        z1: Option<(f64, f64)>,
        z2: Option<(f64, f64)>,
        max_residual: Option<f64>,
        pass_1e_12: Option<bool>,
        rows: Vec<Row>,
    }

    let report = if sol.exists() {
        let (z1, z2) = sol.points.unwrap();
        let verify = huplab_core::separation::verify_separation_or_annihilation(
            &VerifySubject::Separation(sol),
            cfg.p,
            cfg.beta,
            cfg.q,
            cfg.index_window,
        )?;
        Report {
            exists: true,
            z1: Some((z1.re, z1.im)),
            z2: Some((z2.re, z2.im)),
            max_residual: Some(verify.max_residual),
            pass_1e_12: Some(verify.max_residual < 1e-12),
            rows: verify
                .rows
                .into_iter()
                .map(|(family, n, residual)| Row {
                    family,
                    n,
                    residual,
                })
                .collect(),
        }
    } else {
        Report {
            exists: false,
            z1: None,
            z2: None,
            max_residual: None,
            pass_1e_12: None,
            rows: Vec::new(),
        }
    };
    Ok(render_json("separate", cfg, report))
}

/// The `T_βS = C_β²` and factorization residual suites on random
/// piecewise-linear test functions.
pub fn cmd_identity_check(cfg: &ExperimentConfig, _format: OutputFormat) -> CmdResult {
    use rand::distributions::{Distribution, Uniform};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let params = MapParams::new(cfg.p, cfg.beta)?;
    let pf = cfg.p as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let unit = Uniform::new(-pf, pf);
    let coef = Uniform::new(-1.0f64, 1.0);

    let mut points = Vec::with_capacity(cfg.n_points);
    while points.len() < cfg.n_points {
        let x = unit.sample(&mut rng);
        if x == 0.0 {
            continue;
        }
        let y = cfg.beta / x;
        if y == y.round() {
            continue; // branch endpoint or preimage of 0
        }
        // the second Koopman application must not hit an endpoint either
        let u1 = huplab_core::gaussmap::gauss_u(x, &params).map_err(CmdError::from)?;
        if u1 != 0.0 {
            let y1 = cfg.beta / u1;
            if y1 == y1.round() {
                continue;
            }
        }
        points.push(x);
    }
    let grid = operator_grid(&params, 512);

    let mut max_ts = 0.0f64;
    let mut max_fact = 0.0f64;
    for _ in 0..cfg.n_funcs {
        let a: Vec<f64> = (0..6).map(|_| coef.sample(&mut rng)).collect();
        let phi = move |x: f64| {
            let s = std::f64::consts::PI * x / a.len() as f64;
            Complex64::new(
                a[0] + a[1] * s.sin() + a[2] * (2.0 * s).cos(),
                a[3] + a[4] * (3.0 * s).sin() + a[5] * s.cos(),
            )
        };
        for &x in &points {
            let ts = ts_apply(&phi, x, &params)?;
            let c2 = koopman_apply(|y| koopman_apply(&phi, y, &params).unwrap(), x, &params)?;
            max_ts = max_ts.max((ts - c2).norm());
        }
        max_fact = max_fact.max(factorization_residual(&phi, &grid, &params)?);
    }

    #[derive(Serialize)]
    struct Report {
        max_ts_vs_koopman_squared: f64,
        max_factorization_residual: f64,
        n_funcs: usize,
        n_points: usize,
        pass_1e_12: bool,
    }
    Ok(render_json(
        "identity-check",
        cfg,
        Report {
            max_ts_vs_koopman_squared: max_ts,
            max_factorization_residual: max_fact,
            n_funcs: cfg.n_funcs,
            n_points: cfg.n_points,
            pass_1e_12: max_ts < 1e-12 && max_fact < 1e-12,
        },
    ))
}

/// Poisson integrals against the case-split extensions for both families.
pub fn cmd_poisson_check(cfg: &ExperimentConfig, _format: OutputFormat) -> CmdResult {
    #[derive(Serialize)]
    struct Row {
        family: String,
        n: i64,
        z: (f64, f64),
        poisson: (f64, f64),
        case_split: (f64, f64),
        abs_diff: f64,
    }

    let n_half = cfg.index_window.min(25) as i64;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &(re, im) in &cfg.zs {
        let z = Complex64::new(re, im);
        if !(im > 0.0) {
            return Err(CmdError::Config(format!(
                "poisson-check points must lie in the upper half-plane, got {re}+{im}i"
            )));
        }
        for n in -n_half..=n_half {
            let c = n as f64 + 1.0 / cfg.p as f64;
            let got = poisson_extend(&BoundaryFunction::Frequency { c }, z, cfg.tol.max(1e-9))?;
            let want = ext_ep(n, cfg.p, z)?;
            let d = (got.value - want).norm();
            worst = worst.max(d);
            rows.push(Row {
                family: "e_n^p".into(),
                n,
                z: (re, im),
                poisson: (got.value.re, got.value.im),
                case_split: (want.re, want.im),
                abs_diff: d,
            });

            let got = poisson_extend(
                &BoundaryFunction::InverseFrequency {
                    c: n as f64 * cfg.beta,
                },
                z,
                cfg.tol.max(1e-9),
            )?;
            let want = ext_ebeta(n, cfg.beta, z)?;
            let d = (got.value - want).norm();
            worst = worst.max(d);
            rows.push(Row {
                family: "e_n^beta".into(),
                n,
                z: (re, im),
                poisson: (got.value.re, got.value.im),
                case_split: (want.re, want.im),
                abs_diff: d,
            });
        }
    }

    #[derive(Serialize)]
    struct Report {
        max_abs_diff: f64,
        pass_1e_6: bool,
        rows: Vec<Row>,
    }
    Ok(render_json(
        "poisson-check",
        cfg,
        Report {
            max_abs_diff: worst,
            pass_1e_6: worst < 1e-6,
            rows,
        },
    ))
}
