use crate::error::{Error, Result};

/// Parameters `(p, β)` of the Gauss-type dynamics on `(-p, p]`.
///
/// `p` is the denominator of the lattice shift `θ = 1/p`, `β` the vertical
/// spacing of the cross. The derived value `β₀ = β/p` appears in the
/// composition operator. The theorems concern `β ≤ p`; larger `β` is accepted
/// for exploration and flagged [`MapParams::exploratory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    p: u32,
    beta: f64,
    beta0: f64,
}

impl MapParams {
    pub fn new(p: u32, beta: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::Parameter("p must be a positive integer".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Parameter(format!(
                "beta must be a positive finite real, got {beta}"
            )));
        }
        Ok(Self {
            p,
            beta,
            beta0: beta / p as f64,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn p_f64(&self) -> f64 {
        self.p as f64
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `β₀ = β/p`.
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// True when `β > p` (outside the uniqueness regime).
    pub fn exploratory(&self) -> bool {
        self.beta > self.p as f64
    }

    /// Membership in the phase space `(-p, p]`.
    pub fn contains(&self, x: f64) -> bool {
        let p = self.p_f64();
        x > -p && x <= p
    }

    /// Membership in the survivor window `(-β, β] ∩ (-p, p]`.
    pub fn in_window(&self, x: f64) -> bool {
        self.contains(x) && x > -self.beta && x <= self.beta
    }

    /// Window half-width clipped to the phase space: `min(β, p)`.
    pub fn window_radius(&self) -> f64 {
        self.beta.min(self.p_f64())
    }
}
