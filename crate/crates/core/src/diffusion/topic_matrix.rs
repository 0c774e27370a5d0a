//! The k×m topic-term matrix and its two on-disk forms: a dense CSV with a
//! header row of terms, and a compact binary layout for large vocabularies.

use serde::{Deserialize, Serialize};

use super::DiffusionError;
use crate::factorization::DenseMatrix;

/// Vocabularies larger than this are written in the binary form only.
pub const DENSE_CSV_MAX_TERMS: usize = 10_000;

pub const TOPIC_MATRIX_MAGIC: &[u8; 4] = b"UMAT";
pub const TOPIC_MATRIX_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicTermMatrix {
    window_label: String,
    values: DenseMatrix,
}

impl TopicTermMatrix {
    pub fn new(
        window_label: impl Into<String>,
        values: DenseMatrix,
    ) -> Result<Self, DiffusionError> {
        if !values.is_finite() || !values.is_nonnegative() {
            return Err(DiffusionError::Invalid(
                "topic-term matrix must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            window_label: window_label.into(),
            values,
        })
    }

    pub fn window_label(&self) -> &str {
        &self.window_label
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.rows()
    }

    pub fn m(&self) -> usize {
        self.values.cols()
    }

    /// Up to `n` term indices of `topic`, heaviest first; ties go to the
    /// lower index.
    pub fn top_terms(&self, topic: usize, n: usize) -> Vec<usize> {
        let row = self.values.row(topic);
        let mut idx: Vec<usize> = (0..row.len()).collect();
        idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
        idx.truncate(n);
        idx
    }
}

/// `topic,<term…>` header, then one row per topic.
pub fn encode_topic_csv(u: &TopicTermMatrix, terms: &[String]) -> Result<String, DiffusionError> {
    if terms.len() != u.m() {
        return Err(DiffusionError::Invalid(format!(
            "{} term labels for {} columns",
            terms.len(),
            u.m()
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| DiffusionError::Format(e.to_string());
    w.write_record(std::iter::once("topic").chain(terms.iter().map(String::as_str)))
        .map_err(io)?;
    for t in 0..u.k() {
        let mut rec = vec![t.to_string()];
        rec.extend(u.values.row(t).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| DiffusionError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 input is utf-8"))
}

pub fn decode_topic_csv(
    bytes: &[u8],
    window_label: &str,
) -> Result<(TopicTermMatrix, Vec<String>), DiffusionError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let fmt = |msg: String| DiffusionError::Format(msg);
    let header = reader.headers().map_err(|e| fmt(e.to_string()))?.clone();
    if header.get(0) != Some("topic") {
        return Err(fmt("first header column must be `topic`".into()));
    }
    let terms: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut data = Vec::new();
    let mut k = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| fmt(format!("row {}: {e}", i + 1)))?;
        if rec.get(0) != Some(k.to_string().as_str()) {
            return Err(fmt(format!("row {}: expected topic index {k}", i + 1)));
        }
        if rec.len() != terms.len() + 1 {
            return Err(fmt(format!("row {}: wrong number of fields", i + 1)));
        }
        for field in rec.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| fmt(format!("row {}: bad number {field:?}", i + 1)))?;
            data.push(v);
        }
        k += 1;
    }
    let values = DenseMatrix::from_vec(k, terms.len(), data).map_err(|e| fmt(e.to_string()))?;
    Ok((TopicTermMatrix::new(window_label, values)?, terms))
}

/// `b"UMAT" | version u32 | k u64 | m u64 | label_len u32 | label | f64 × k·m`,
/// little-endian, row-major.
pub fn encode_topic_binary(u: &TopicTermMatrix) -> Vec<u8> {
    let label = u.window_label.as_bytes();
    let mut out = Vec::with_capacity(28 + label.len() + 8 * u.k() * u.m());
    out.extend_from_slice(TOPIC_MATRIX_MAGIC);
    out.extend_from_slice(&TOPIC_MATRIX_VERSION.to_le_bytes());
    out.extend_from_slice(&(u.k() as u64).to_le_bytes());
    out.extend_from_slice(&(u.m() as u64).to_le_bytes());
    out.extend_from_slice(&(label.len() as u32).to_le_bytes());
    out.extend_from_slice(label);
    for v in u.values.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_topic_binary(bytes: &[u8]) -> Result<TopicTermMatrix, DiffusionError> {
    let fmt = |msg: &str| DiffusionError::Format(msg.to_string());
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8], DiffusionError> {
        let end = pos
            .checked_add(n)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| fmt("truncated topic matrix"))?;
        let s = &bytes[pos..end];
        pos = end;
        Ok(s)
    };
    if take(4)? != TOPIC_MATRIX_MAGIC {
        return Err(fmt("bad magic"));
    }
    if u32::from_le_bytes(take(4)?.try_into().unwrap()) != TOPIC_MATRIX_VERSION {
        return Err(fmt("unsupported version"));
    }
    let k = u64::from_le_bytes(take(8)?.try_into().unwrap());
    let m = u64::from_le_bytes(take(8)?.try_into().unwrap());
    let label_len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    let label = std::str::from_utf8(take(label_len)?)
        .map_err(|_| fmt("label is not utf-8"))?
        .to_string();
    let (k, m) = (
        usize::try_from(k).map_err(|_| fmt("k too large"))?,
        usize::try_from(m).map_err(|_| fmt("m too large"))?,
    );
    let len = k
        .checked_mul(m)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| fmt("matrix size overflows"))?;
    let raw = take(len)?;
    if pos != bytes.len() {
        return Err(fmt("trailing bytes"));
    }
    let data = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let values = DenseMatrix::from_vec(k, m, data).map_err(|e| fmt(&e.to_string()))?;
    TopicTermMatrix::new(label, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TopicTermMatrix {
        let v = DenseMatrix::from_rows(&[vec![0.5, 0.0, 1.25], vec![3.0, 1e-300, 0.1]]).unwrap();
        TopicTermMatrix::new("2016", v).unwrap()
    }

    fn terms() -> Vec<String> {
        vec!["graph".into(), "graph kernel".into(), "kernel".into()]
    }

    #[test]
    fn csv_round_trip() {
        let u = sample();
        let csv = encode_topic_csv(&u, &terms()).unwrap();
        assert!(csv.starts_with("topic,graph,graph kernel,kernel\n0,0.5,0,1.25\n"));
        let (back, t) = decode_topic_csv(csv.as_bytes(), "2016").unwrap();
        assert_eq!(back, u);
        assert_eq!(t, terms());
    }

    #[test]
    fn binary_round_trip_and_truncation() {
        let u = sample();
        let bytes = encode_topic_binary(&u);
        assert_eq!(decode_topic_binary(&bytes).unwrap(), u);
        for cut in 0..bytes.len() {
            assert!(decode_topic_binary(&bytes[..cut]).is_err());
        }
    }

    #[test]
    fn rejects_negative_entries() {
        assert!(decode_topic_csv(b"topic,a\n0,-1\n", "x").is_err());
        assert!(TopicTermMatrix::new("x", DenseMatrix::from_fn(1, 1, |_, _| -0.5)).is_err());
    }

    #[test]
    fn top_terms_ranking() {
        let u = sample();
        assert_eq!(u.top_terms(0, 2), [2, 0]);
        assert_eq!(u.top_terms(1, 10), [0, 2, 1]);
        let tied = TopicTermMatrix::new("t", DenseMatrix::from_fn(1, 3, |_, _| 1.0)).unwrap();
        assert_eq!(tied.top_terms(0, 3), [0, 1, 2]);
    }
}
