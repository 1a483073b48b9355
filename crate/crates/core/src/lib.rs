//! Interface iteration matrices of the one-level parallel Schwarz method for
//! absorptive Helmholtz and transverse-electric Maxwell wave-guide problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: complex polynomial roots (Aberth), dense LU, power
//!   iteration and right-preconditioned GMRES.
//! - [`toeplitz`]: the block tridiagonal Toeplitz family with 2×2 blocks, its
//!   characteristic-polynomial recurrence, generating function, q-polynomial
//!   and limiting spectrum.
//! - [`schwarz1d`]: Schwarz coefficients `(a, b)` of the 1D absorptive
//!   problem, scaled variables and the convergence criteria.
//! - [`schwarz2d`]: Fourier-mode reduction for the 2D Helmholtz and TE
//!   Maxwell wave-guides and mode suprema of the convergence factor.
//! - [`iteration`]: the global interface iteration matrix and stationary
//!   iteration experiments.
//! - [`discrete`]: finite-difference 2D Helmholtz with an ORAS preconditioner
//!   and GMRES iteration-count scans.

pub mod discrete;
pub mod error;
pub mod iteration;
pub mod numerics;
pub mod schwarz1d;
pub mod schwarz2d;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;
