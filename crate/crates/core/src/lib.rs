//! Identifiability of MIMO active sensing on a grid.
//!
//! Transmit and receive arrays combine into a sum co-array; the waveform
//! matrix `S` decides how much of it survives in the sensing matrix
//! `B = (S⊗I)·Υ·A`, and the Kruskal rank of `B` decides how many scatterers
//! can be recovered uniquely. The crate builds every object in that chain,
//! checks the rank conditions exactly at desk scale, and runs exhaustive
//! ℓ0 recovery end to end.
//!
//! The runnable programs under `examples/` walk through each piece:
//!
//! ```text
//! cargo run --release --example geometry
//! cargo run --release --example matched_waveform
//! cargo run --release --example sparse_recovery
//! ```
//!
//! The `coarray` binary wraps the same functionality as subcommands.

pub mod config;
pub mod error;
pub mod geometry;
pub mod identifiability;
pub mod linalg;
pub mod manifold;
pub mod recovery;
pub mod reproduce;
pub mod sensing;
pub mod subsets;
pub mod waveform;

pub use num_complex::Complex64;

pub type CMatrix = nalgebra::DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

pub use error::{Error, Result};
