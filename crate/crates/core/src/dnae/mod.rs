//! Deep non-negative autoencoder: a linear encoder/decoder chain with
//! non-negative weights whose encoder product acts as a topic-term matrix.

mod checkpoint;
mod model;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use model::{
    extract_topic_term, forward, init_model, warm_start, DnaeConfig, DnaeModel, ForwardTrace,
    Provenance,
};
pub use train::{gradient_check, reconstruction_gradients, rmse_sparse, train, TrainReport};

use thiserror::Error;

use crate::factorization::FactorError;

#[derive(Debug, Error)]
pub enum DnaeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("vocabulary size mismatch: model has {model} terms, data has {data}")]
    VocabMismatch { model: usize, data: usize },
    #[error(
        "training diverged in epoch {epoch} (learning_rate {learning_rate}); try a smaller learning_rate"
    )]
    Divergence { epoch: usize, learning_rate: f64 },
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
}
