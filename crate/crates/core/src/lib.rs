//! Numerics for the quartic external-source random matrix model.
//!
//! Finite-n biorthogonal kernels are built from multiprecision bimoments and
//! cross-checked three ways (direct sum, Christoffel-Darboux, matrix RH
//! solution). Around them sit the Pearcey functions and their folded
//! kernels, the explicit equilibrium density, and residual evaluators for the
//! Boussinesq/Chazy structure.

pub mod biorth;
pub mod equilibrium;
pub mod error;
pub mod integrable;
pub mod kernels_finite;
pub mod kernels_limit;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};
