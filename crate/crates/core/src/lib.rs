//! Microstrip beamforming networks: Butler matrices, Rotman lenses and
//! linear-array patterns.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod butler;
pub mod error;
pub mod io;
pub mod network;
pub mod pattern;
pub mod rotman;
pub mod substrate;

pub use error::{Error, ErrorCategory, Result};
