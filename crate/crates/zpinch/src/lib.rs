//! Linear ideal-MHD stability of the z-pinch.
//!
//! The crate builds cylindrical pinch equilibria from a pressure profile,
//! evaluates the per-Fourier-mode potential energy `E_{m,k}` and kinetic
//! normalisation `J`, and computes growth rates `μ = √(−λ)` where
//! `λ = inf E/J` is obtained from a finite-element generalized eigenproblem.
//!
//! Module overview:
//!
//! * [`equilibrium`] — pressure profiles, force-balance equilibria, pointwise
//!   stability criteria and admissibility checks.
//! * [`energy`] — quadratic energy functionals, the constraint functional and
//!   the weighted norms on radial trial fields.
//! * [`spectrum`] — vacuum condensation, banded/dense eigensolvers, mode
//!   sweeps and Euler–Lagrange residual diagnostics.
//! * [`dynamics`] — leapfrog time integration of the linearized system and
//!   growth-rate fitting.
//! * [`scaling`] — localized test families demonstrating unbounded growth
//!   rates as the axial wavenumber grows, and their log–log fits.
//!
//! All quantities are in normalized units (`A = 1`, `r₀ = 1`, `r_w = 2` by
//! default); the common factor `2π²` is kept in both `E` and `J`.

pub mod dynamics;
pub mod energy;
pub mod equilibrium;
mod error;
pub mod quadrature;
pub mod regression;
pub mod scaling;
pub mod spectrum;

pub use error::{Error, Result};

/// `2π²`, the angular/axial normalisation shared by every energy integral.
pub const TWO_PI_SQ: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
