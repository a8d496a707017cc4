//! Numerical laboratory for Heisenberg uniqueness experiments on the hyperbola.
//!
//! The crate implements the computable objects behind the uniqueness question
//! for the pair (hyperbola `xy = 1`, lattice-cross `Λ_β^θ` with rational shift
//! `θ = q/p`):
//!
//! * the Gauss-type interval maps `τ_β`, `U_β` on `(-p, p]` with their branch
//!   structure ([`gaussmap`]),
//! * the σ-finite invariant measure `dω = dx/(p² - x²)` and the
//!   partial-fraction identity behind its invariance ([`measures`]),
//! * Perron-Frobenius / Koopman / composition operators, Ulam discretization,
//!   spectra, and escape-set measures ([`operators`]),
//! * Fourier transforms `μ̂(ξ₁, ξ₂) = ∫ e^{πi(ξ₁t + ξ₂/t)} g(t) dt` of measures
//!   carried by the hyperbola, evaluated on lattice-crosses ([`hyperbola_ft`]),
//! * bounded harmonic extensions to the upper half-plane and the closed-form
//!   separation / annihilation constructions ([`separation`]).
//!
//! Everything is deterministic: Monte Carlo paths take explicit seeds and all
//! reductions run in a fixed index order, so results are independent of thread
//! count.

pub mod error;
pub mod gaussmap;
pub mod grid;
pub mod hyperbola_ft;
pub mod measures;
pub mod operators;
pub mod params;
pub mod separation;

pub(crate) mod quad;
pub(crate) mod special;

pub use error::{Error, Result};
pub use params::MapParams;

pub type Complex64 = num_complex::Complex<f64>;
