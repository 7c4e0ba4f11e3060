//! Spectral methods and eigenvalue-sum bounds for the one-dimensional
//! perturbed harmonic oscillator
//!
//! ```text
//!     -u''(x) + [x^2 + q(x)] u(x) = lambda u(x),   x in R.
//! ```
//!
//! The unperturbed operator (`q = 0`) has eigenvalues `2k + 1` with Hermite
//! eigenfunctions. For an integrable perturbation `q` the library computes the
//! perturbed eigenvalues by a Hermite-Galerkin (Rayleigh-Ritz) projection,
//! evaluates the explicit bound sequences that control regularized eigenvalue
//! sums, and checks every inequality both ways: closed-form right-hand sides
//! against solver output, solver output against an independent
//! finite-difference oracle.
//!
//! Module map:
//!
//! * [`special`] - log-gamma, gamma ratios, Riemann zeta and the spectral
//!   zeta value `Z0(s) = (1 - 2^-s) zeta(s)`.
//! * [`hermite`] - Hermite polynomials, normalized oscillator eigenfunctions,
//!   Gauss-Hermite quadrature (Golub-Welsch), moment identities.
//! * [`eigen`] - dense and tridiagonal symmetric eigensolvers used by the
//!   quadrature builder, the Galerkin solver and the finite-difference oracle.
//! * [`sequences`] - the bound sequences `omega_n`, `chi_n`, `epsilon_n`,
//!   `tau_n` and their monotonicity/asymptotics.
//! * [`potentials`] - perturbation presets, L1 data, the offset constant
//!   `q_m`, Hermite expansion coefficients, and the CLI mini-grammar parser.
//! * [`solver`] - Galerkin assembly, Ritz eigenvalues with convergence
//!   estimates, finite-difference cross-validation.
//! * [`bounds`] - both sides of every eigenvalue-sum inequality, slack
//!   reports, and the spike-potential counterexample generator.

pub mod bounds;
pub mod eigen;
mod error;
pub mod hermite;
pub mod potentials;
pub mod sequences;
pub mod solver;
pub mod special;
mod util;

pub use error::{Error, Result};
