//! Numerical tools for separated real sequences: Beurling–Malliavin type
//! densities, the gap characteristic, the completeness radius of exponential
//! systems, and transport of gap measures under small positive perturbations.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the set DSL and
//! the command-line front end live in the `gapkit` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod completeness;
pub mod density;
pub mod error;
pub mod fft;
pub mod gap;
pub mod measure;
pub mod numeric;
pub mod sets;
pub mod transport;

pub use error::{Error, Result};
pub use measure::{Atom, AtomicMeasure};
pub use num_complex::Complex64;
pub use sets::{DiscreteSet, Generator, PerturbMode, Removal, Window};

/// Absolute tolerance for comparing points and weights.
pub const TOL: f64 = 1e-12;
