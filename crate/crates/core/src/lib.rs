//! Newton-Raphson flow tracking control for differentially flat systems.
//!
//! The crate is layered bottom-up:
//!
//! * [`poly_core`] dense numerics (polynomials, characteristic polynomials,
//!   matrix exponentials, Routh-Hurwitz, Aberth-Ehrlich roots);
//! * [`stability`] α-stability certificates for linear closed loops;
//! * [`trivial_flat`] controllers for chains of integrators;
//! * [`vehicle_models`] kinematic unicycle and dynamic bicycle;
//! * [`simulator`] fixed-step closed-loop runs, traces and metrics.

// `!(x <= y)` is used on purpose so NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod poly_core;
pub mod stability;
pub mod trivial_flat;
pub mod vehicle_models;
pub mod simulator;

pub use error::{Error, Result};
