//! Interpolation of quadrilateral meshes of arbitrary topology by composite
//! parametric surfaces with per-edge (augmented) parametrization.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod gregory;
pub mod jet;
pub mod mesh;
pub mod network;
pub mod patch;
pub mod spline;
pub mod surface;

pub use error::{Error, Result};
