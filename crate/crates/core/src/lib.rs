//! Multi-encoding data-reuploading quantum classifier.
//!
//! The crate simulates small circuits exactly on a dense statevector, builds
//! the MEDQ stack (Rot, QAOA and angle embedding blocks) and the
//! single-encoding reuploading baseline, and trains both with a weighted
//! fidelity loss. Dataset generators, PCA and a grid-search benchmark
//! harness are included.

pub mod benchmark;
pub mod circuit;
pub mod data;
pub mod embedding;
pub mod error;
pub mod model;
pub mod sim;
pub mod training;

pub use error::{Error, Result};
