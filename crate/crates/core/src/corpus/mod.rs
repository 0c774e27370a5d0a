//! Corpus ingestion: JSONL documents, time slicing, dictionary matching and
//! tf-idf weighted document-term matrices.

mod document;
mod matrix;
pub mod triplet;
mod vocab;

pub use document::{
    assign_documents, load_corpus, parse_corpus, parse_timestamp, validate_slices, Corpus,
    Document, Rejection, RejectionReport, TimeSlice,
};
pub use matrix::{
    count_matrix, tfidf, window_stack, CellValue, SparseDocTermMatrix, SparseMatrix, WeightedMatrix,
};
pub use vocab::{
    build_vocabulary, canonical_term, parse_alias_csv, parse_dictionary, tokenize, TermMatch,
    Vocabulary,
};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dictionary contains no terms")]
    EmptyVocabulary,
    #[error("alias {surface:?} targets {canonical:?}, which is not a dictionary term")]
    AliasTarget { surface: String, canonical: String },
    #[error("bad alias rule: {0}")]
    AliasRule(String),
    #[error("invalid time slice: {0}")]
    InvalidSlice(String),
    #[error("window {window} needs at least that many slices, have {slices}")]
    Window { window: usize, slices: usize },
    #[error("matrix: {0}")]
    Matrix(String),
    #[error("triplet csv line {line}: {message}")]
    Triplet { line: usize, message: String },
    #[error("matrix header: {0}")]
    Header(String),
}
