//! Sparse triplet CSV (`row,col,value`, row-major, 0-based) plus a sidecar
//! JSON header carrying shape and labels.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::matrix::{CellValue, SparseMatrix};
use super::CorpusError;

pub const TRIPLET_FORMAT: &str = "sparse-triplet";
pub const TRIPLET_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletHeader {
    pub format: String,
    pub version: u32,
    /// `count` or `weight`.
    pub value_type: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_labels: Vec<String>,
    #[serde(default)]
    pub col_labels: Vec<String>,
}

/// Renders the CSV body and header for `m`.
pub fn encode_triplets<T: CellValue>(
    m: &SparseMatrix<T>,
    col_labels: &[String],
) -> (String, TripletHeader) {
    let mut csv = String::from("row,col,value\n");
    for (r, c, v) in m.triplets() {
        csv.push_str(&format!("{r},{c},{v}\n"));
    }
    let header = TripletHeader {
        format: TRIPLET_FORMAT.into(),
        version: TRIPLET_VERSION,
        value_type: T::KIND.into(),
        n_rows: m.n_rows(),
        n_cols: m.n_cols(),
        row_labels: m.row_labels().to_vec(),
        col_labels: col_labels.to_vec(),
    };
    (csv, header)
}

pub fn parse_header(bytes: &[u8]) -> Result<TripletHeader, CorpusError> {
    let header: TripletHeader = serde_json::from_slice(bytes)
        .map_err(|e| CorpusError::Header(format!("invalid header json: {e}")))?;
    if header.format != TRIPLET_FORMAT {
        return Err(CorpusError::Header(format!(
            "unknown format {:?}",
            header.format
        )));
    }
    if header.version != TRIPLET_VERSION {
        return Err(CorpusError::Header(format!(
            "unsupported version {}",
            header.version
        )));
    }
    if header.row_labels.len() != header.n_rows {
        return Err(CorpusError::Header(format!(
            "{} row labels for {} rows",
            header.row_labels.len(),
            header.n_rows
        )));
    }
    if !header.col_labels.is_empty() && header.col_labels.len() != header.n_cols {
        return Err(CorpusError::Header(format!(
            "{} column labels for {} columns",
            header.col_labels.len(),
            header.n_cols
        )));
    }
    Ok(header)
}

/// Decodes a triplet CSV against an already parsed header.
pub fn decode_triplets<T: CellValue>(
    csv_bytes: &[u8],
    header: &TripletHeader,
) -> Result<SparseMatrix<T>, CorpusError> {
    if header.value_type != T::KIND {
        return Err(CorpusError::Header(format!(
            "expected value_type {:?}, found {:?}",
            T::KIND,
            header.value_type
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(csv_bytes);
    let cols = reader.headers().map_err(|e| CorpusError::Triplet {
        line: 1,
        message: e.to_string(),
    })?;
    if cols.iter().collect::<Vec<_>>() != ["row", "col", "value"] {
        return Err(CorpusError::Triplet {
            line: 1,
            message: "header must be row,col,value".into(),
        });
    }
    let mut triplets = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CorpusError::Triplet {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != 3 {
            return Err(CorpusError::Triplet {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let bad = |what: &str| CorpusError::Triplet {
            line,
            message: format!("invalid {what}"),
        };
        let r: usize = rec[0].parse().map_err(|_| bad("row"))?;
        let c: usize = rec[1].parse().map_err(|_| bad("col"))?;
        let v: T = rec[2].parse().map_err(|_| bad("value"))?;
        if !v.is_storable() {
            return Err(bad("value (must be positive and finite)"));
        }
        triplets.push((r, c, v));
    }
    SparseMatrix::from_triplets(
        header.n_rows,
        header.n_cols,
        triplets,
        header.row_labels.clone(),
    )
}

fn sidecar_paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("csv"), stem.with_extension("json"))
}

/// Writes `<stem>.csv` and `<stem>.json`.
pub fn save_triplets<T: CellValue>(
    stem: &Path,
    m: &SparseMatrix<T>,
    col_labels: &[String],
) -> Result<(), CorpusError> {
    let (csv_path, json_path) = sidecar_paths(stem);
    let (csv, header) = encode_triplets(m, col_labels);
    let json = serde_json::to_string_pretty(&header).expect("header serialises");
    fs::write(&csv_path, csv).map_err(|source| CorpusError::Io {
        path: csv_path,
        source,
    })?;
    fs::write(&json_path, json).map_err(|source| CorpusError::Io {
        path: json_path,
        source,
    })?;
    Ok(())
}

pub fn load_triplets<T: CellValue>(
    stem: &Path,
) -> Result<(SparseMatrix<T>, TripletHeader), CorpusError> {
    let (csv_path, json_path) = sidecar_paths(stem);
    let header_bytes = fs::read(&json_path).map_err(|source| CorpusError::Io {
        path: json_path,
        source,
    })?;
    let header = parse_header(&header_bytes)?;
    let csv = fs::read(&csv_path).map_err(|source| CorpusError::Io {
        path: csv_path,
        source,
    })?;
    Ok((decode_triplets(&csv, &header)?, header))
}
