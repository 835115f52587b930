//! Resurgence analysis of holonomic equations.
//!
//! The crate builds linear differential operators in θ-form, reads off their
//! Newton polygons and formal exponential-series solutions exactly, moves to
//! the Borel plane, resums numerically (Borel–Padé–Laplace) and measures
//! Stokes jumps. The [`models`] module supplies the zero-dimensional
//! `φ^{2k}` partition functions and the Airy example.

pub mod borelnum;
pub mod diffop;
pub mod error;
pub mod exactnum;
pub mod formal;
pub mod models;
pub mod newton;
pub mod pipeline;

pub use error::{Error, Result};
