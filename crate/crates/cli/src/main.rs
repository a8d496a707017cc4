//! `huplab` — batch experiments over the hyperbola uniqueness laboratory.
//!
//! Configuration comes from an optional JSON file (`--config`) overridden by
//! command-line flags; flags win. Every output embeds the resolved
//! configuration and the RNG seed, and reruns with an identical
//! configuration are byte-identical apart from the timestamp line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence, 4 i/o error. `HUPLAB_THREADS` caps the worker pool.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::CmdError;
use config::{ExperimentConfig, FileConfig};
use output::{write_out, OutputFormat};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "huplab", version, about = "Gauss-type maps, transfer operators, and Fourier uniqueness on the hyperbola")]
struct Cli {
    /// JSON configuration file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Clone)]
struct Overrides {
    /// Lattice shift denominator (θ = q/p).
    #[arg(long)]
    p: Option<u32>,
    /// Lattice shift numerator, coprime to p.
    #[arg(long)]
    q: Option<i64>,
    /// Vertical spacing β of the cross / hole half-width of the map.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long)]
    beta_steps: Option<usize>,
    /// Ulam partition size.
    #[arg(long)]
    n_bins: Option<usize>,
    /// Branch cutoff J for truncated branch sums.
    #[arg(long)]
    branch_cutoff: Option<usize>,
    /// Escape horizon.
    #[arg(long)]
    n_steps: Option<usize>,
    /// Index window N for cross points and residual tables.
    #[arg(long)]
    index_window: Option<usize>,
    /// Quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// RNG seed (recorded in all outputs).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Measure spec for cross-residual: gaussian | singular-pair | zero.
    #[arg(long)]
    measure: Option<String>,
    /// Horizontal congruence index of the singular pair.
    #[arg(long)]
    k: Option<i64>,
    /// Vertical congruence index of the singular pair.
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    n_funcs: Option<usize>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Evaluation points for poisson-check, e.g. "0,1;1,2".
    #[arg(long)]
    zs: Option<String>,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral radius and second eigenvalue of the Ulam matrix across β.
    SpectrumScan(Overrides),
    /// Escape-set measures |E_β(n)|, exact intervals vs Monte Carlo.
    Escape(Overrides),
    /// Fourier transform of a measure on the lattice-cross Λ_β^{q/p}.
    CrossResidual(Overrides),
    /// Closed-form separation points in the upper half-plane, when they exist.
    Separate(Overrides),
    /// T_βS = C_β² and factorization residual suites.
    IdentityCheck(Overrides),
    /// Poisson integrals against the case-split harmonic extensions.
    PoissonCheck(Overrides),
}

fn parse_zs(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(';')
        .map(|pair| {
            let mut it = pair.split(',');
            let re = it
                .next()
                .ok_or("missing re")?
                .trim()
                .parse::<f64>()
                .map_err(|e| e.to_string())?;
            let im = it
                .next()
                .ok_or("missing im")?
                .trim()
                .parse::<f64>()
                .map_err(|e| e.to_string())?;
            if it.next().is_some() {
                return Err("too many components".to_string());
            }
            Ok((re, im))
        })
        .collect()
}

fn resolve(cli_config: Option<&PathBuf>, ov: &Overrides) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = cli_config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let file: FileConfig =
            serde_json::from_str(&text).map_err(|e| format!("bad config JSON: {e}"))?;
        cfg.merge_file(&file);
    }
    macro_rules! set {
        ($($f:ident),+) => { $(if let Some(v) = ov.$f.clone() { cfg.$f = v; })+ };
    }
    set!(p, q, beta, n_bins, branch_cutoff, n_steps, index_window, tol, seed, mc_samples, measure, k, m, n_funcs, n_points, top_k);
    if ov.beta_min.is_some() {
        cfg.beta_min = ov.beta_min;
    }
    if ov.beta_max.is_some() {
        cfg.beta_max = ov.beta_max;
    }
    if ov.beta_steps.is_some() {
        cfg.beta_steps = ov.beta_steps;
    }
    if let Some(zs) = &ov.zs {
        cfg.zs = parse_zs(zs)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("HUPLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();

    let format = match cli.format.parse::<OutputFormat>() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("huplab: {e}");
            return ExitCode::from(2);
        }
    };

    let (ov, runner): (
        &Overrides,
        fn(&ExperimentConfig, OutputFormat) -> Result<String, CmdError>,
    ) = match &cli.command {
        Command::SpectrumScan(ov) => (ov, commands::cmd_spectrum_scan),
        Command::Escape(ov) => (ov, commands::cmd_escape),
        Command::CrossResidual(ov) => (ov, commands::cmd_cross_residual),
        Command::Separate(ov) => (ov, commands::cmd_separate),
        Command::IdentityCheck(ov) => (ov, commands::cmd_identity_check),
        Command::PoissonCheck(ov) => (ov, commands::cmd_poisson_check),
    };

    let cfg = match resolve(cli.config.as_ref(), ov) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("huplab: configuration error: {e}");
            return ExitCode::from(2);
        }
    };

    let body = match runner(&cfg, format) {
        Ok(body) => body,
        Err(CmdError::Config(e)) => {
            eprintln!("huplab: configuration error: {e}");
            return ExitCode::from(2);
        }
        Err(CmdError::Numerical(e)) => {
            eprintln!("huplab: numerical non-convergence: {e}");
            return ExitCode::from(3);
        }
    };

    if let Err(e) = write_out(cli.out.as_deref(), &body) {
        eprintln!("huplab: i/o error: {e}");
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}
