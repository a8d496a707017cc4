//! Experiment configuration: JSON file plus flag overrides; flags win.

use serde::{Deserialize, Serialize};

/// Fully resolved configuration, embedded verbatim in every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub p: u32,
    pub q: i64,
    pub beta: f64,
    /// Optional scan range; when present the scan commands sweep
    /// `beta_steps` evenly spaced values in `[beta_min, beta_max]`.
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub beta_steps: Option<usize>,
    pub n_bins: usize,
    pub branch_cutoff: usize,
    pub n_steps: usize,
    pub index_window: usize,
    pub tol: f64,
    pub seed: u64,
    pub mc_samples: usize,
    pub measure: String,
    pub k: i64,
    pub m: i64,
    pub n_funcs: usize,
    pub n_points: usize,
    /// Evaluation points for poisson-check as (re, im) pairs.
    pub zs: Vec<(f64, f64)>,
    pub top_k: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: 1,
            q: 0,
            beta: 1.0,
            beta_min: None,
            beta_max: None,
            beta_steps: None,
            n_bins: 256,
            branch_cutoff: 10_000,
            n_steps: 20,
            index_window: 50,
            tol: 1e-8,
            seed: 42,
            mc_samples: 1_000_000,
            measure: "gaussian".to_string(),
            k: 1,
            m: 1,
            n_funcs: 20,
            n_points: 2000,
            zs: vec![(0.0, 1.0), (1.0, 2.0)],
            top_k: 2,
        }
    }
}

/// Partial configuration as read from the JSON file (all fields optional).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<u32>,
    pub q: Option<i64>,
    pub beta: Option<f64>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub beta_steps: Option<usize>,
    pub n_bins: Option<usize>,
    pub branch_cutoff: Option<usize>,
    pub n_steps: Option<usize>,
    pub index_window: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
    pub measure: Option<String>,
    pub k: Option<i64>,
    pub m: Option<i64>,
    pub n_funcs: Option<usize>,
    pub n_points: Option<usize>,
    pub zs: Option<Vec<(f64, f64)>>,
    pub top_k: Option<usize>,
}

macro_rules! merge {
    ($cfg:expr, $src:expr, $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $src.$field.clone() { $cfg.$field = v; })+
    };
}

impl ExperimentConfig {
    pub fn merge_file(&mut self, file: &FileConfig) {
        merge!(
            self, file, p, q, beta, n_bins, branch_cutoff, n_steps, index_window, tol, seed,
            mc_samples, measure, k, m, n_funcs, n_points, zs, top_k
        );
        if file.beta_min.is_some() {
            self.beta_min = file.beta_min;
        }
        if file.beta_max.is_some() {
            self.beta_max = file.beta_max;
        }
        if file.beta_steps.is_some() {
            self.beta_steps = file.beta_steps;
        }
    }

    /// Documented bounds; violations are configuration errors (exit code 2).
    pub fn validate(&self) -> Result<(), String> {
        if self.p < 1 || self.p > 1_000_000 {
            return Err(format!("p must be in [1, 1e6], got {}", self.p));
        }
        if !(self.beta.is_finite() && self.beta > 0.0 && self.beta <= 1e6) {
            return Err(format!("beta must be in (0, 1e6], got {}", self.beta));
        }
        if self.n_bins < 2 || self.n_bins > 8192 {
            return Err(format!("n_bins must be in [2, 8192], got {}", self.n_bins));
        }
        if self.branch_cutoff < 2 || self.branch_cutoff > 100_000_000 {
            return Err(format!(
                "branch_cutoff must be in [2, 1e8], got {}",
                self.branch_cutoff
            ));
        }
        if self.n_steps < 1 || self.n_steps > 10_000 {
            return Err(format!("n_steps must be in [1, 1e4], got {}", self.n_steps));
        }
        if self.index_window > 1_000_000 {
            return Err("index_window must be at most 1e6".to_string());
        }
        if !(self.tol > 0.0 && self.tol <= 1.0) {
            return Err(format!("tol must be in (0, 1], got {}", self.tol));
        }
        if self.mc_samples < 100 || self.mc_samples > 1_000_000_000 {
            return Err("mc_samples must be in [100, 1e9]".to_string());
        }
        if self.k == 0 || self.m == 0 {
            return Err("k and m must be nonzero".to_string());
        }
        if self.top_k < 1 || self.top_k > 24 {
            return Err("top_k must be in [1, 24]".to_string());
        }
        if let (Some(lo), Some(hi)) = (self.beta_min, self.beta_max) {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                return Err(format!("invalid beta range [{lo}, {hi}]"));
            }
        }
        match self.measure.as_str() {
            "gaussian" | "singular-pair" | "zero" => {}
            other => return Err(format!("unknown measure spec '{other}'")),
        }
        Ok(())
    }

    /// The β values a scan command sweeps: the range when given, otherwise
    /// the single configured β.
    pub fn beta_values(&self) -> Vec<f64> {
        match (self.beta_min, self.beta_max, self.beta_steps) {
            (Some(lo), Some(hi), Some(steps)) => {
                if steps == 0 {
                    Vec::new()
                } else if steps == 1 {
                    vec![lo]
                } else {
                    (0..steps)
                        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                        .collect()
                }
            }
            _ => vec![self.beta],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let mut cfg = ExperimentConfig::default();
        let file: FileConfig =
            serde_json::from_str(r#"{"p": 3, "beta": 0.25, "seed": 7}"#).unwrap();
        cfg.merge_file(&file);
        assert_eq!(cfg.p, 3);
        assert_eq!(cfg.beta, 0.25);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_bins, 256); // untouched default
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"pp": 3}"#).is_err());
    }

    #[test]
    fn beta_range() {
        let mut cfg = ExperimentConfig::default();
        cfg.beta_min = Some(0.5);
        cfg.beta_max = Some(2.0);
        cfg.beta_steps = Some(4);
        assert_eq!(cfg.beta_values(), vec![0.5, 1.0, 1.5, 2.0]);
        cfg.beta_steps = Some(0);
        assert!(cfg.beta_values().is_empty());
    }

    #[test]
    fn validation_bounds() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.tol = -1.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-8;
        cfg.measure = "nope".into();
        assert!(cfg.validate().is_err());
    }
}
