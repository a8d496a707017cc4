//! Lebesgue measure of the survivor sets
//! `E_β(n) = {x ∈ (-p, p] : U_β^{(k)}(x) ∈ (-β, β] for k = 0..n-1}`.
//!
//! For `β < p` the sets are nested with measure decreasing to zero. The
//! exact-interval method pulls the window back through the monotone branch
//! inverses, pruning sub-threshold intervals with full loss accounting; the
//! Monte Carlo method iterates a seeded sample.

use crate::error::{Error, Result};
use crate::gaussmap::gauss_u;
use crate::params::MapParams;
use crate::special::digamma;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub enum EscapeMethod {
    /// Pull `(-β, β]` back through branch inverses. The pruning threshold
    /// adapts each step to keep roughly `max_intervals / 2` intervals alive
    /// (never below `min_length`); all dropped mass is accumulated into the
    /// reported error bound.
    ExactIntervals {
        max_intervals: usize,
        min_length: f64,
    },
    /// Survival frequencies of `samples` seeded uniform points in `(-β, β]`.
    /// The error bound reported is one standard error.
    MonteCarlo { samples: usize, seed: u64 },
}

impl EscapeMethod {
    pub fn exact_default() -> Self {
        EscapeMethod::ExactIntervals {
            max_intervals: 1_000_000,
            min_length: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeRow {
    pub n: usize,
    pub measure: f64,
    pub error_bound: f64,
}

/// `|E_β(n)|` for `n = 1..=n_steps`.
pub fn escape_series(
    n_steps: usize,
    params: &MapParams,
    method: EscapeMethod,
) -> Result<Vec<EscapeRow>> {
    if n_steps < 1 {
        return Err(Error::Parameter("n_steps must be ≥ 1".into()));
    }
    let p = params.p_f64();
    if params.beta() >= p {
        // No hole: the window is the whole phase space.
        return Ok((1..=n_steps)
            .map(|n| EscapeRow {
                n,
                measure: 2.0 * p,
                error_bound: 0.0,
            })
            .collect());
    }
    match method {
        EscapeMethod::ExactIntervals {
            max_intervals,
            min_length,
        } => exact_series(n_steps, params, max_intervals, min_length),
        EscapeMethod::MonteCarlo { samples, seed } => mc_series(n_steps, params, samples, seed),
    }
}

/// `(measure, error_bound)` of `E_β(n_steps)`.
pub fn escape_measure(
    n_steps: usize,
    params: &MapParams,
    method: EscapeMethod,
) -> Result<(f64, f64)> {
    let rows = escape_series(n_steps, params, method)?;
    let last = rows.last().expect("n_steps ≥ 1");
    Ok((last.measure, last.error_bound))
}

fn exact_series(
    n_steps: usize,
    params: &MapParams,
    max_intervals: usize,
    min_length: f64,
) -> Result<Vec<EscapeRow>> {
    if max_intervals < 16 {
        return Err(Error::Resource(
            "interval cap too small; use the monte-carlo method".into(),
        ));
    }
    let p = params.p_f64();
    let beta = params.beta();
    let pb = p * beta;
    // One pullback step expands a lost set by at most
    // κ = sup_t Σ_j |h_j'(t)| = (β/p)(π²/4 - 1).
    let kappa = beta / p * (PI * PI / 4.0 - 1.0);

    let mut rows = Vec::with_capacity(n_steps);
    let mut intervals: Vec<(f64, f64)> = vec![(-beta, beta)];
    let mut measure = 2.0 * beta;
    let mut err = 0.0f64;
    rows.push(EscapeRow {
        n: 1,
        measure,
        error_bound: 0.0,
    });

    for n in 2..=n_steps {
        // A source interval of length L spawns ≈ √(βL/(4pδ)) branch images
        // per side above the pruning threshold δ, so the next population is
        // ≈ √(β/(pδ))·Σ√L. Pick δ to keep it near half the cap.
        let sqrt_sum: f64 = intervals.iter().map(|(a, b)| (b - a).sqrt()).sum();
        let target = (max_intervals / 2).max(8) as f64;
        let delta = (sqrt_sum * (beta / p).sqrt() / target)
            .powi(2)
            .max(min_length);
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(intervals.len() * 8);
        let mut loss = 0.0f64;
        for &(a, b) in &intervals {
            // Positive branches j = 1, 2, ... until the image drops below
            // the pruning threshold; the remaining tail has the exact
            // digamma form Σ_{j'>j-1} |h_{j'}((a,b])|.
            let mut j = 1.0f64;
            loop {
                let lo = pb / (2.0 * p * j - a);
                let hi = pb / (2.0 * p * j - b);
                let (lo, hi) = (lo.min(hi), lo.max(hi));
                if hi - lo < delta {
                    loss += 0.5
                        * beta
                        * (digamma(j - a / (2.0 * p)) - digamma(j - b / (2.0 * p)));
                    break;
                }
                next.push((lo, hi));
                j += 1.0;
            }
            let mut j = 1.0f64;
            loop {
                let lo = -pb / (2.0 * p * j + a);
                let hi = -pb / (2.0 * p * j + b);
                let (lo, hi) = (lo.min(hi), lo.max(hi));
                if hi - lo < delta {
                    loss += 0.5
                        * beta
                        * (digamma(j + b / (2.0 * p)) - digamma(j + a / (2.0 * p)));
                    break;
                }
                next.push((lo, hi));
                j += 1.0;
            }
        }
        next.sort_by(|x, y| x.0.total_cmp(&y.0));
        // Merge abutting half-open intervals.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(next.len());
        for (a, b) in next {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        if merged.len() > max_intervals {
            // Drop the shortest intervals, moving their mass into the loss.
            let mut lengths: Vec<f64> = merged.iter().map(|(a, b)| b - a).collect();
            lengths.sort_by(f64::total_cmp);
            let cutoff = lengths[merged.len() - max_intervals - 1];
            let mut dropped = 0.0;
            merged.retain(|&(a, b)| {
                if b - a <= cutoff {
                    dropped += b - a;
                    false
                } else {
                    true
                }
            });
            loss += dropped;
            if merged.is_empty() {
                return Err(Error::Resource(format!(
                    "exact-interval pullback degenerated at step {n}; use the monte-carlo method"
                )));
            }
        }
        let new_measure: f64 = merged.iter().map(|(a, b)| b - a).sum::<f64>().max(0.0);
        // Two rigorous propagations of the accumulated loss; keep the smaller.
        let propagated = (kappa * err + loss).min(measure + err - new_measure);
        err = propagated.max(0.0);
        measure = new_measure;
        intervals = merged;
        rows.push(EscapeRow {
            n,
            measure,
            error_bound: err,
        });
    }
    Ok(rows)
}

fn mc_series(
    n_steps: usize,
    params: &MapParams,
    samples: usize,
    seed: u64,
) -> Result<Vec<EscapeRow>> {
    if samples < 100 {
        return Err(Error::Parameter("need at least 100 samples".into()));
    }
    let beta = params.beta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new(-beta, beta);
    // survivors[k] = number of samples still inside the window after k more
    // applications of U_β beyond the initial membership test.
    let mut survivors = vec![0usize; n_steps];
    for _ in 0..samples {
        let mut x = dist.sample(&mut rng);
        if x == -beta {
            x = beta; // fold the excluded endpoint onto the included one
        }
        survivors[0] += 1;
        for s in survivors.iter_mut().take(n_steps).skip(1) {
            x = gauss_u(x, params)?;
            if !params.in_window(x) {
                break;
            }
            *s += 1;
        }
    }
    Ok((1..=n_steps)
        .map(|n| {
            let frac = survivors[n - 1] as f64 / samples as f64;
            EscapeRow {
                n,
                measure: 2.0 * beta * frac,
                error_bound: 2.0 * beta * (frac * (1.0 - frac) / samples as f64).sqrt(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_the_window() {
        let m = MapParams::new(1, 0.5).unwrap();
        let rows = escape_series(1, &m, EscapeMethod::exact_default()).unwrap();
        assert_eq!(rows[0].measure, 1.0);
        assert_eq!(rows[0].error_bound, 0.0);
    }

    #[test]
    fn no_hole_at_beta_equals_p() {
        let m = MapParams::new(2, 2.0).unwrap();
        for rows in [
            escape_series(5, &m, EscapeMethod::exact_default()).unwrap(),
            escape_series(
                5,
                &m,
                EscapeMethod::MonteCarlo {
                    samples: 1000,
                    seed: 1,
                },
            )
            .unwrap(),
        ] {
            assert!(rows.iter().all(|r| r.measure == 4.0));
        }
    }

    #[test]
    fn exact_series_decreases() {
        let m = MapParams::new(1, 0.5).unwrap();
        let rows = escape_series(12, &m, EscapeMethod::exact_default()).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].measure <= w[0].measure + 1e-15);
        }
        // second step has the closed form Σ_j 2pβ²·2/((2pj)²-β²)
        let closed: f64 = (1..200_000)
            .map(|j| 4.0 * 0.25 / ((2.0 * j as f64).powi(2) - 0.25))
            .sum();
        assert!(
            (rows[1].measure - closed).abs() < rows[1].error_bound + 1e-6,
            "{} vs {closed}",
            rows[1].measure
        );
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let m = MapParams::new(1, 0.5).unwrap();
        let exact = escape_series(8, &m, EscapeMethod::exact_default()).unwrap();
        let mc = escape_series(
            8,
            &m,
            EscapeMethod::MonteCarlo {
                samples: 200_000,
                seed: 42,
            },
        )
        .unwrap();
        for (e, s) in exact.iter().zip(&mc) {
            let sigma = s.error_bound.max(1e-4);
            assert!(
                (e.measure - s.measure).abs() <= 4.0 * sigma + e.error_bound,
                "n = {}: exact {} vs mc {}",
                e.n,
                e.measure,
                s.measure
            );
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let m = MapParams::new(1, 0.5).unwrap();
        let method = EscapeMethod::MonteCarlo {
            samples: 10_000,
            seed: 7,
        };
        let a = escape_series(6, &m, method).unwrap();
        let b = escape_series(6, &m, method).unwrap();
        assert_eq!(a, b);
    }
}
