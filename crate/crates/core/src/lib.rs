//! Dynamics of an n-dimensional rigid body under left-invariant nonholonomic
//! constraints (the Suslov problem): the constrained equations of motion on
//! `so(n) x S^{n-1}`, a catalog of integrable cases with their first
//! integrals, an ODE layer with diagnostics, and closed-form analysis of the
//! Kharlamova and Klebsh–Tisserand cases.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod batch;
pub mod cases;
pub mod clebsch;
mod error;
pub mod integrate;
pub mod kharlamova;
pub mod model;

pub use error::{Error, Result};
