//! Coupling conditions for the linearized BGK equation on networks.
//!
//! The crate computes node coupling coefficients from a Gauss-Hermite
//! spectral half-space solver and validates them with a discrete-velocity
//! network simulator and a composite asymptotic solution.

pub mod acoustic;
pub mod coupler;
pub mod error;
pub mod hermite;
pub mod kinetic;
pub mod layer;
pub mod presets;
pub mod tridiag;

pub use error::{Error, Result};
