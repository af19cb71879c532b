//! Two-sample testing for sets of embedding vectors.
//!
//! The statistic is the unbiased estimate of the squared maximum mean
//! discrepancy (MMD) under an RBF or linear kernel; significance comes from a
//! seeded permutation test whose output does not depend on the thread count.
//! On top of that sit the study protocols (pairwise MMD matrices with
//! negative controls, rejection-rate curves) and the file formats used to feed
//! them (NPY, CSV, label manifests).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! name the `f64` instantiations that the file loaders produce.

pub mod error;
pub mod kernels;
pub mod matrix;
pub mod mmd;
pub mod report;
pub mod rng;
mod scalar;
pub mod study;
mod sum;
pub mod tensor_io;

pub use error::{Error, Result};
pub use kernels::{
    gram_blocks, median_heuristic_sigma, Bandwidth, GramBlocks, KernelFamily, KernelSpec,
};
pub use matrix::{EmbeddingMatrix, LabeledCorpus};
pub use mmd::{mmd2_oracle, mmd2_unbiased, MmdValue};
pub use perm_test::{permutation_test, resolve_sigma_once, TestConfig, TestResult, Workers};
pub use scalar::Scalar;
pub use study::{
    generate_synthetic, mmd_matrix, power_curves, MmdMatrixResult, PowerCurveResult, SynthFamily,
    SynthSpec,
};
pub use tensor_io::{load_corpus, read_matrix, write_matrix, MatrixFormat, Subsample};

pub type EmbeddingsF64 = EmbeddingMatrix<f64>;
pub type EmbeddingsF32 = EmbeddingMatrix<f32>;
pub type CorpusF64 = LabeledCorpus<f64>;
pub type CorpusF32 = LabeledCorpus<f32>;
pub type GramBlocksF64 = GramBlocks<f64>;
pub type MmdValueF64 = MmdValue<f64>;
