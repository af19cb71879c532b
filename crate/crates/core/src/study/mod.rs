//! Experiment protocols built on the permutation test: pairwise MMD matrices
//! with same-label negative controls, rejection-rate curves over small sample
//! sizes, and synthetic data for self-contained validation.

mod matrix;
mod power;
pub mod presets;
mod synth;

pub use matrix::{mmd_matrix, MmdMatrixResult};
pub use power::{power_curves, PowerCurveResult};
pub use synth::{generate_synthetic, SynthFamily, SynthSpec};

// Stream tags mixed into derived seeds so that different protocols never share draws.
pub(crate) const MATRIX_SAMPLE_STREAM: u64 = 0x4d41_5452; // "MATR"
pub(crate) const MATRIX_PERM_STREAM: u64 = 0x4d50_4552; // "MPER"
pub(crate) const POWER_SAMPLE_STREAM: u64 = 0x504f_5752; // "POWR"
pub(crate) const POWER_PERM_STREAM: u64 = 0x5050_4552; // "PPER"
