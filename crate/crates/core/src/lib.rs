//! Achievable rate regions for two-user Gaussian interference channels whose
//! transmitters overhear each other (conferencing).
//!
//! The crate evaluates a superposition block-Markov / dirty-paper coding
//! inner bound on an explicit jointly Gaussian signal model, projects its
//! auxiliary-rate polytope onto the (R1, R2) plane by Fourier-Motzkin
//! elimination and convexifies over a parameter sweep. Baselines (Han-Kobayashi
//! in compact form, degraded relay capacity, and the Gaussian vector
//! broadcast capacity region) are provided for comparison.
//!
//! The crate is `no_std` (with `alloc`); enable the `std` feature for
//! `std::error::Error` impls.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod fme;
pub mod gaussian;
pub mod geom;
pub mod icc;
mod linalg;
pub mod parametric;

pub use fme::{FmeError, LinearInequality, LinearSystem, PolygonOutcome, RateVar, Rational};
pub use gaussian::{GaussianError, LinearGaussianModel, Var, VariableId};
pub use geom::{Polygon2D, RatePair, Region2D};

/// `½·log2(x)`, the Gaussian capacity kernel.
#[inline]
pub fn half_log2(x: f64) -> f64 {
    0.5 * libm::log2(x)
}
