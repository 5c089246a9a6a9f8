//! Parareal with spatial coarsening for linear initial value problems.
//!
//! The crate builds semi-discrete operators ([`model`]), materializes one-step
//! time integrators as dense matrices ([`propagator`]), couples fine and
//! coarse spaces ([`transfer`]), runs the iteration ([`parareal`]) and
//! analyzes its error-propagation matrix ([`analysis`]). [`toy`] is a
//! two-mode closed-form problem and [`experiments`] drives parameter sweeps.

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod parareal;
pub mod propagator;
pub mod toy;
pub mod transfer;
pub mod analysis;

pub use error::{Error, Result};
pub use faer::c64;
