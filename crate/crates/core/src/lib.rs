//! Landscape analysis for black-box optimization problems.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! parts: search spaces and benchmark problems, initial designs, the
//! normalization/encoding pipeline, the invariant ELA feature sets,
//! fitness-map construction and the algorithm-selection harness. File
//! formats and the command-line front end live in the `landscape` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aas;
pub mod ela;
pub mod error;
pub mod fitmap;
pub mod linalg;
mod math;
pub mod preprocess;
pub mod sampling;
pub mod sobol;
pub mod space;

pub use error::{Error, Result};
