use std::collections::HashSet;
use std::fs;
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CorpusError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// UTC calendar day.
    pub timestamp: NaiveDate,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }
}

/// One record that could not be ingested. `line` is 1-based; records that
/// were parsed but fell outside every slice carry line 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub line: usize,
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub rejects: Vec<Rejection>,
}

impl RejectionReport {
    pub fn count(&self) -> usize {
        self.rejects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejects.is_empty()
    }

    fn push(&mut self, line: usize, id: Option<String>, reason: impl Into<String>) {
        self.rejects.push(Rejection {
            line,
            id,
            reason: reason.into(),
        });
    }

    pub fn extend(&mut self, other: RejectionReport) {
        self.rejects.extend(other.rejects);
    }
}

/// Reads a JSONL corpus. I/O failure is fatal; malformed records are
/// skipped and listed in the returned report.
pub fn load_corpus(path: &Path) -> Result<(Corpus, RejectionReport), CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_corpus(&bytes))
}

/// Parses JSONL bytes, one `{id, timestamp, text}` object per line. Blank
/// lines are not records and are skipped.
pub fn parse_corpus(bytes: &[u8]) -> (Corpus, RejectionReport) {
    let mut corpus = Corpus::default();
    let mut report = RejectionReport::default();
    let mut seen = HashSet::new();

    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let Ok(line) = std::str::from_utf8(raw) else {
            report.push(line_no, None, "invalid utf-8");
            continue;
        };
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok(doc) => {
                if seen.insert(doc.id.clone()) {
                    corpus.documents.push(doc);
                } else {
                    report.push(line_no, Some(doc.id), "duplicate id");
                }
            }
            Err((id, reason)) => report.push(line_no, id, reason),
        }
    }
    (corpus, report)
}

fn parse_record(line: &str) -> Result<Document, (Option<String>, String)> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| (None, format!("invalid json: {e}")))?;
    let Value::Object(obj) = value else {
        return Err((None, "record is not a json object".into()));
    };

    let id = match obj.get("id") {
        None | Some(Value::Null) => return Err((None, "missing id".into())),
        Some(Value::String(s)) if !s.is_empty() => s.clone(),
        Some(_) => return Err((None, "id must be a non-empty string".into())),
    };
    let with_id = |reason: &str| (Some(id.clone()), reason.to_string());

    let timestamp = match obj.get("timestamp") {
        None | Some(Value::Null) => return Err(with_id("missing timestamp")),
        Some(Value::String(s)) => {
            parse_timestamp(s).ok_or_else(|| with_id(&format!("invalid timestamp {s:?}")))?
        }
        Some(_) => return Err(with_id("timestamp must be a string")),
    };
    let text = match obj.get("text") {
        None | Some(Value::Null) => return Err(with_id("missing text")),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(with_id("text must be a string")),
    };
    Ok(Document {
        id,
        timestamp,
        text,
    })
}

/// Accepts `YYYY-MM-DD` or an RFC 3339 instant (reduced to its UTC day).
pub fn parse_timestamp(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d);
    }
    DateTime::parse_from_rfc3339(s)
        .ok()
        .map(|dt| dt.with_timezone(&Utc).date_naive())
}

/// A labelled half-open date range `[start, end)` and the documents in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    #[serde(default)]
    pub doc_ids: Vec<String>,
}

impl TimeSlice {
    pub fn new(label: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Self {
        Self {
            label: label.into(),
            start,
            end,
            doc_ids: Vec::new(),
        }
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day < self.end
    }
}

/// Checks that slices are non-empty ranges, uniquely labelled, ordered and
/// non-overlapping.
pub fn validate_slices(slices: &[TimeSlice]) -> Result<(), CorpusError> {
    let mut labels = HashSet::new();
    for s in slices {
        if s.start >= s.end {
            return Err(CorpusError::InvalidSlice(format!(
                "slice {:?}: start {} is not before end {}",
                s.label, s.start, s.end
            )));
        }
        if s.label.is_empty() || !labels.insert(s.label.as_str()) {
            return Err(CorpusError::InvalidSlice(format!(
                "slice label {:?} is empty or repeated",
                s.label
            )));
        }
    }
    for pair in slices.windows(2) {
        if pair[1].start < pair[0].end {
            return Err(CorpusError::InvalidSlice(format!(
                "slice {:?} overlaps or precedes {:?}",
                pair[1].label, pair[0].label
            )));
        }
    }
    Ok(())
}

/// Distributes corpus documents over `slices` (filling `doc_ids` in corpus
/// order). Documents dated outside every slice are reported.
pub fn assign_documents(
    corpus: &Corpus,
    slices: &mut [TimeSlice],
) -> Result<RejectionReport, CorpusError> {
    validate_slices(slices)?;
    for s in slices.iter_mut() {
        s.doc_ids.clear();
    }
    let mut report = RejectionReport::default();
    for doc in &corpus.documents {
        let idx = slices.partition_point(|s| s.end <= doc.timestamp);
        match slices.get_mut(idx) {
            Some(s) if s.contains(doc.timestamp) => s.doc_ids.push(doc.id.clone()),
            _ => report.push(
                0,
                Some(doc.id.clone()),
                format!("timestamp {} outside all slices", doc.timestamp),
            ),
        }
    }
    Ok(report)
}
