//! Feasibility modeling for photonic quantum channels over interstellar
//! distances: scattering opacity, gravitational fidelity loss, and exact
//! density-matrix simulation of teleportation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod environments;
pub mod error;
pub mod gravity;
pub mod propagation;
pub mod qstate;
pub mod quadrature;
pub mod quantities;
pub mod scenario;
pub mod teleport;
pub mod xsec;

pub use error::{Error, Result};
pub use quantities::{Quantity, Unit};
