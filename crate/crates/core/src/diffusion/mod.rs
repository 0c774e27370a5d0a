//! Term diffusion across topics: term-wise normalisation of topic-term
//! matrices, k-ary entropy and generalised Jensen–Shannon divergence, the
//! chi-square significance threshold, term classification and topic
//! alignment between windows.

mod chisq;
mod entropy;
mod hungarian;
mod series;
mod topic_matrix;

pub use chisq::{chi2_cdf, chi2_quantile, gamma_p, ln_gamma, QUANTILE_TOLERANCE};
pub use entropy::{entropy_kary, gjs, SUM_TOLERANCE};
pub use hungarian::{align_topics, cosine_cost, hungarian, TopicAlignment};
pub use series::{
    classify_term, default_tau_mass, diffusion_series, history_divergence, least_squares_slope,
    normalize_termwise, significance_threshold, CellCount, DiffusionParams, DiffusionSeries,
    TermClass, TermTopicDistribution, ThresholdParams, DEGENERATE_MASS,
};
pub use topic_matrix::{
    decode_topic_binary, decode_topic_csv, encode_topic_binary, encode_topic_csv, TopicTermMatrix,
    DENSE_CSV_MAX_TERMS, TOPIC_MATRIX_MAGIC, TOPIC_MATRIX_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DiffusionError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("term index {0} out of range")]
    UnknownTerm(usize),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("malformed topic matrix: {0}")]
    Format(String),
}
