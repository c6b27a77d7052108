//! Randomized sparse linear algebra for numerically sparse matrices.
//!
//! The crate provides entrywise spectral-norm sparsifiers, approximate
//! matrix multiplication built on outer-product sampling, ridge regression
//! preconditioned by a sparsifier, and a generator for the circulant ⊗
//! Hadamard family that shows row-sparsity lower bounds are tight.

pub mod amm;
pub mod calibrate;
pub mod error;
pub mod hard;
pub mod matrix;
pub mod montecarlo;
pub mod mtx;
pub mod numeric;
pub mod oracle;
pub mod power;
pub mod ridge;
pub mod rng;
pub mod sparsify;
pub mod stats;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, MatrixLike, SparseMatrix};
pub use power::{spectral_norm_estimate, PowerOptions, SpectralEstimate};
pub use sparsify::SampleConfig;
pub use stats::{matrix_ns, numerical_sparsity, profile, MatrixProfile};
