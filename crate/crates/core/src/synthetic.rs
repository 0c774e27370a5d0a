//! Synthetic data with known structure: exactly low-rank non-negative
//! matrices and a sliced document stream with a planted term migration.

use chrono::{Days, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{Document, TimeSlice};
use crate::factorization::{DenseMatrix, FactorError};

/// `rows × cols` non-negative matrix of exact rank `rank`, `X = W H` with
/// `W, H ~ U[0, 1)` except that the first `rank` columns of `H` are the
/// identity (anchor terms), so an exact non-negative factorisation exists.
pub fn separable_low_rank(
    rows: usize,
    cols: usize,
    rank: usize,
    seed: u64,
) -> Result<DenseMatrix, FactorError> {
    if rank == 0 || rank > rows.min(cols) {
        return Err(FactorError::Rank {
            k: rank,
            limit: rows.min(cols),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = DenseMatrix::random_uniform(rows, rank, 0.0, 1.0, &mut rng);
    let mut h = DenseMatrix::random_uniform(rank, cols, 0.0, 1.0, &mut rng);
    for i in 0..rank {
        for j in 0..rank {
            h.set(i, j, if i == j { 1.0 } else { 0.0 });
        }
    }
    w.matmul(&h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedDriftConfig {
    pub slices: usize,
    pub terms: usize,
    pub topics: usize,
    pub docs_per_topic: usize,
    pub tokens_per_doc: usize,
    pub migrating_term: usize,
    pub from_topic: usize,
    pub to_topic: usize,
    /// 0-based slice from which the migrating term belongs to `to_topic`.
    pub migrate_at: usize,
    pub first_year: i32,
    pub seed: u64,
}

impl Default for PlantedDriftConfig {
    fn default() -> Self {
        Self {
            slices: 4,
            terms: 50,
            topics: 4,
            docs_per_topic: 40,
            tokens_per_doc: 30,
            migrating_term: 0,
            from_topic: 0,
            to_topic: 2,
            migrate_at: 2,
            first_year: 2020,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedStream {
    pub config: PlantedDriftConfig,
    pub keywords: Vec<String>,
    /// `term_topic[s][term]`: owning topic of each term in slice `s`.
    pub term_topic: Vec<Vec<usize>>,
    pub slices: Vec<TimeSlice>,
    pub documents: Vec<Document>,
}

impl PlantedStream {
    /// The corpus as JSON Lines.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for d in &self.documents {
            let line = serde_json::json!({
                "id": d.id,
                "timestamp": d.timestamp.format("%Y-%m-%d").to_string(),
                "text": d.text,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }

    pub fn dictionary(&self) -> String {
        let mut out = self.keywords.join("\n");
        out.push('\n');
        out
    }
}

pub fn term_name(i: usize) -> String {
    format!("term{i:02}")
}

/// Each term belongs to topic `term % topics`, apart from the migrating
/// term, which moves from `from_topic` to `to_topic` at slice `migrate_at`.
/// Every document is about one topic and draws its tokens uniformly from
/// that topic's terms. Slice `s` covers calendar year `first_year + s`.
pub fn planted_drift(config: &PlantedDriftConfig) -> Result<PlantedStream, String> {
    let c = config;
    if c.topics < 2 || c.terms < 2 * c.topics || c.slices < 2 {
        return Err("need ≥ 2 topics, ≥ 2 terms per topic and ≥ 2 slices".into());
    }
    if c.migrating_term >= c.terms
        || c.from_topic >= c.topics
        || c.to_topic >= c.topics
        || c.migrate_at >= c.slices
        || c.migrating_term % c.topics != c.from_topic
    {
        return Err("migration parameters out of range".into());
    }
    if c.docs_per_topic == 0 || c.tokens_per_doc == 0 {
        return Err("documents need at least one token".into());
    }
    let keywords: Vec<String> = (0..c.terms).map(term_name).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut term_topic = Vec::with_capacity(c.slices);
    let mut slices = Vec::with_capacity(c.slices);
    let mut documents = Vec::new();

    for s in 0..c.slices {
        let owner: Vec<usize> = (0..c.terms)
            .map(|t| {
                if t == c.migrating_term && s >= c.migrate_at {
                    c.to_topic
                } else {
                    t % c.topics
                }
            })
            .collect();
        let year = c.first_year + s as i32;
        let start = NaiveDate::from_ymd_opt(year, 1, 1).ok_or("year out of range")?;
        let end = NaiveDate::from_ymd_opt(year + 1, 1, 1).ok_or("year out of range")?;
        let mut slice = TimeSlice::new(format!("s{}", s + 1), start, end);

        for topic in 0..c.topics {
            let pool: Vec<usize> = (0..c.terms).filter(|&t| owner[t] == topic).collect();
            for d in 0..c.docs_per_topic {
                let tokens: Vec<&str> = (0..c.tokens_per_doc)
                    .map(|_| keywords[*pool.choose(&mut rng).expect("non-empty pool")].as_str())
                    .collect();
                let day = start + Days::new(rng.random_range(0..365));
                let id = format!("s{}-t{}-d{:03}", s + 1, topic, d);
                slice.doc_ids.push(id.clone());
                documents.push(Document {
                    id,
                    timestamp: day,
                    text: tokens.join(" "),
                });
            }
        }
        term_topic.push(owner);
        slices.push(slice);
    }
    Ok(PlantedStream {
        config: c.clone(),
        keywords,
        term_topic,
        slices,
        documents,
    })
}
