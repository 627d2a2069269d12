//! Band structure and quantized transverse conductivity of a spin-orbit
//! coupled electron on a square lattice with an in-plane electric field.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod conductivity;
pub mod config;
pub mod eigensolve;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod run;
pub mod scattering;
pub mod verify;

pub use error::{Error, Result};
pub use model::{derive_geometry, Geometry, ModelParams, Spin, ValidationReport};
