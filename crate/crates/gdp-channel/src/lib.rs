//! Generalized depolarizing channel toolkit for a single qubit coupled to a
//! thermal bath.
//!
//! The crate covers the full chain from microscopic bath parameters to
//! channel-level observables:
//!
//! - [`operator_algebra`]: 2x2 complex matrices, Hermitian basis, eigensolver
//!   wrappers, density-matrix invariants.
//! - [`me2kraus`]: local-in-time generator -> propagator -> Choi matrix ->
//!   Kraus operators.
//! - [`gdp_model`]: microscopic damping rates, Lamb shift, closed-form
//!   propagator/Choi/Kraus families, comparison depolarizing channel.
//! - [`channel_metrics`]: Bloch-ellipsoid volume, volume rate, entropy,
//!   trace distance.
//! - [`entanglement`]: two-qubit local channels, concurrence, entanglement
//!   of formation, sudden-death detection.
//! - [`experiments`]: config handling and CSV/SVG emission for the `gdp` CLI.

pub mod channel_metrics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod gdp_model;
pub mod me2kraus;
pub mod operator_algebra;

pub use error::{Error, Result};
