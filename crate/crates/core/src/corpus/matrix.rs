use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use rayon::prelude::*;

use super::vocab::Vocabulary;
use super::{CorpusError, Document};
use crate::factorization::DenseMatrix;

/// Cell type of a sparse document-term matrix.
pub trait CellValue: Copy + Debug + Display + FromStr + PartialOrd + Send + Sync + 'static {
    const KIND: &'static str;
    fn to_f64(self) -> f64;
    /// Stored cells must be strictly positive and finite.
    fn is_storable(self) -> bool;
}

impl CellValue for u32 {
    const KIND: &'static str = "count";
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
    fn is_storable(self) -> bool {
        self > 0
    }
}

impl CellValue for f64 {
    const KIND: &'static str = "weight";
    fn to_f64(self) -> f64 {
        self
    }
    fn is_storable(self) -> bool {
        self.is_finite() && self > 0.0
    }
}

/// Compressed sparse row document-term matrix. Absent cells are zero and
/// stored cells are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
    row_labels: Vec<String>,
}

/// Raw term counts.
pub type SparseDocTermMatrix = SparseMatrix<u32>;
/// tf-idf weights.
pub type WeightedMatrix = SparseMatrix<f64>;

impl<T: CellValue> SparseMatrix<T> {
    pub fn empty(n_cols: usize) -> Self {
        Self {
            n_rows: 0,
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
            row_labels: Vec::new(),
        }
    }

    /// Builds from per-row `(col, value)` lists. Zero cells are dropped.
    pub fn from_rows(
        n_cols: usize,
        rows: Vec<Vec<(usize, T)>>,
        row_labels: Vec<String>,
    ) -> Result<Self, CorpusError> {
        if rows.len() != row_labels.len() {
            return Err(CorpusError::Matrix(format!(
                "{} rows but {} row labels",
                rows.len(),
                row_labels.len()
            )));
        }
        let mut m = Self::empty(n_cols);
        for (r, mut cells) in rows.into_iter().enumerate() {
            cells.sort_by_key(|&(c, _)| c);
            let mut prev = None;
            for (c, v) in cells {
                if c >= n_cols {
                    return Err(CorpusError::Matrix(format!(
                        "row {r}: column {c} out of range for {n_cols} columns"
                    )));
                }
                if prev == Some(c) {
                    return Err(CorpusError::Matrix(format!(
                        "row {r}: duplicate column {c}"
                    )));
                }
                prev = Some(c);
                if v.is_storable() {
                    m.indices.push(c);
                    m.values.push(v);
                } else if v.partial_cmp(&zero_of::<T>()) != Some(std::cmp::Ordering::Equal) {
                    return Err(CorpusError::Matrix(format!(
                        "row {r}, column {c}: value {v} is negative or non-finite"
                    )));
                }
            }
            m.indptr.push(m.indices.len());
            m.n_rows += 1;
        }
        m.row_labels = row_labels;
        Ok(m)
    }

    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
        row_labels: Vec<String>,
    ) -> Result<Self, CorpusError> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_rows];
        for (r, c, v) in triplets {
            let row = rows.get_mut(r).ok_or_else(|| {
                CorpusError::Matrix(format!("row {r} out of range for {n_rows} rows"))
            })?;
            row.push((c, v));
        }
        Self::from_rows(n_cols, rows, row_labels)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    /// `(col, value)` pairs of one row, ascending by column.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<T> {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .binary_search(&c)
            .ok()
            .map(|i| self.values[span.start + i])
    }

    /// Row-major `(row, col, value)` triplets of the stored cells.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Densifies the selected rows only, in the given order.
    pub fn rows_dense(&self, rows: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), self.n_cols);
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                out.set(i, c, v.to_f64());
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let all: Vec<usize> = (0..self.n_rows).collect();
        self.rows_dense(&all)
    }

    /// Stacks `parts` vertically; all must share the column space.
    pub fn vstack(parts: &[&Self]) -> Result<Self, CorpusError> {
        let n_cols = parts.first().map_or(0, |p| p.n_cols);
        let mut out = Self::empty(n_cols);
        for p in parts {
            if p.n_cols != n_cols {
                return Err(CorpusError::Matrix(format!(
                    "cannot stack matrices with {} and {} columns",
                    n_cols, p.n_cols
                )));
            }
            let offset = out.indices.len();
            out.indices.extend_from_slice(&p.indices);
            out.values.extend_from_slice(&p.values);
            out.indptr.extend(p.indptr[1..].iter().map(|&i| i + offset));
            out.row_labels.extend(p.row_labels.iter().cloned());
            out.n_rows += p.n_rows;
        }
        Ok(out)
    }
}

fn zero_of<T: CellValue>() -> T {
    "0".parse().ok().expect("cell types parse zero")
}

/// Counts vocabulary matches per document. Rows follow `docs` order and
/// documents without matches stay as empty rows.
pub fn count_matrix<'a, I>(docs: I, vocab: &Vocabulary) -> SparseDocTermMatrix
where
    I: IntoIterator<Item = &'a Document>,
{
    let docs: Vec<&Document> = docs.into_iter().collect();
    let rows: Vec<Vec<(usize, u32)>> = docs
        .par_iter()
        .map(|doc| {
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for m in vocab.match_text(&doc.text) {
                *counts.entry(m.term).or_default() += 1;
            }
            counts.into_iter().collect()
        })
        .collect();
    let labels = docs.iter().map(|d| d.id.clone()).collect();
    SparseMatrix::from_rows(vocab.len(), rows, labels).expect("matcher yields valid columns")
}

/// `tf · ln(n / df)` with raw counts as tf and no smoothing. Columns present
/// in every row get idf 0 and drop out of storage.
pub fn tfidf(counts: &SparseDocTermMatrix) -> WeightedMatrix {
    let n = counts.n_rows();
    let mut df = vec![0usize; counts.n_cols()];
    for &c in &counts.indices {
        df[c] += 1;
    }
    let idf: Vec<f64> = df
        .iter()
        .map(|&d| {
            if d == 0 {
                0.0
            } else {
                (n as f64 / d as f64).ln()
            }
        })
        .collect();
    let rows = (0..n)
        .map(|r| {
            counts
                .row(r)
                .map(|(c, tf)| (c, f64::from(tf) * idf[c]))
                .collect()
        })
        .collect();
    SparseMatrix::from_rows(counts.n_cols(), rows, counts.row_labels.clone())
        .expect("tf-idf weights are finite and non-negative")
}

/// Training inputs for a sliding window: window `t` stacks the counts of
/// slices `t−window+1 ..= t` and re-weights the stack with tf-idf. Each
/// window carries the label of its terminal slice.
pub fn window_stack(
    slices: &[(String, SparseDocTermMatrix)],
    window: usize,
) -> Result<Vec<(String, WeightedMatrix)>, CorpusError> {
    if window == 0 || window > slices.len() {
        return Err(CorpusError::Window {
            window,
            slices: slices.len(),
        });
    }
    (window - 1..slices.len())
        .map(|t| {
            let parts: Vec<&SparseDocTermMatrix> =
                slices[t + 1 - window..=t].iter().map(|(_, m)| m).collect();
            let stacked = SparseMatrix::vstack(&parts)?;
            Ok((slices[t].0.clone(), tfidf(&stacked)))
        })
        .collect()
}

impl SparseMatrix<f64> {
    /// Sparse copy of a dense matrix, rows labelled `r0, r1, …`.
    pub fn from_dense(x: &DenseMatrix) -> Result<Self, CorpusError> {
        let rows = (0..x.rows())
            .map(|i| x.row(i).iter().copied().enumerate().collect())
            .collect();
        let labels = (0..x.rows()).map(|i| format!("r{i}")).collect();
        Self::from_rows(x.cols(), rows, labels)
    }
}
