//! Hyperbolic lattice flakes, their tight-binding spectra, and the
//! resonator circuits that emulate them.

// Validation uses `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod hypgeo;
pub mod lattice;
pub mod spectrum;
