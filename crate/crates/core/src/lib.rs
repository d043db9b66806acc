//! Lattice renormalisation-group workbench.
//!
//! The crate is organised around a discrete torus ([`lattice`]), exact
//! finite-range decompositions of the lattice Green function
//! ([`covariance`]), a sparse polynomial algebra in commuting and
//! anticommuting field generators ([`algebra`]), a Taylor-localisation
//! operator and the space of local interactions ([`localpoly`]), the
//! scale-indexed flow objects ([`flow`]), weighted test-function and
//! field seminorms with regulators ([`norms`]), and a measurement
//! harness ([`verify`]) that turns exact identities and scaling
//! estimates into machine-checkable reports.

pub mod algebra;
pub mod covariance;
pub mod error;
pub mod flow;
pub mod lattice;
pub mod localpoly;
pub mod norms;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
