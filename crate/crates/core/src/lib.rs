//! Numerics for the Gaussian entropy of low-dimensional submanifolds:
//! entropy and Gaussian density estimation, Reifenberg planar distance,
//! smooth mean curvature flow of curves, graphs and surfaces of revolution,
//! and self-expander asymptotics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod expanders;
pub mod gaussian;
pub mod geom;
pub mod mcf;
pub mod reifenberg;
pub mod spec;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
