//! Dense kernels and the classical NMF / layer-wise hierarchical NMF
//! baselines the autoencoder is compared against.

mod dense;
mod nmf;

pub use dense::{frobenius_norm, rmse, DenseMatrix};
pub use nmf::{hnmf, nmf, HnmfResult, NmfResult, DENOM_FLOOR, INIT_EPS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FactorError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("negative entry at ({row}, {col})")]
    Negative { row: usize, col: usize },
    #[error("rank {k} out of range, must be in 1..={limit}")]
    Rank { k: usize, limit: usize },
    #[error("invalid layer dims: {0}")]
    LayerDims(String),
}
