use std::fmt;

use serde::{Deserialize, Serialize};

use super::chisq::chi2_quantile;
use super::entropy::gjs;
use super::topic_matrix::TopicTermMatrix;
use super::DiffusionError;
use crate::factorization::DenseMatrix;

/// Columns whose mass is below this are treated as empty.
pub const DEGENERATE_MASS: f64 = 1e-12;

/// `P(topic | term)` for every term of one window: the topic-term matrix
/// with each column scaled to sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermTopicDistribution {
    pub window_label: String,
    values: DenseMatrix,
    /// Terms with no topic mass, given the uniform distribution instead.
    pub degenerate_terms: Vec<usize>,
}

impl TermTopicDistribution {
    pub fn k(&self) -> usize {
        self.values.rows()
    }

    pub fn m(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    /// Length-k distribution of one term over topics.
    pub fn column(&self, term: usize) -> Vec<f64> {
        (0..self.k()).map(|t| self.values.get(t, term)).collect()
    }
}

pub fn normalize_termwise(u: &TopicTermMatrix) -> TermTopicDistribution {
    let (k, m) = (u.k(), u.m());
    let src = u.values();
    let mut values = DenseMatrix::zeros(k, m);
    let mut degenerate_terms = Vec::new();
    for term in 0..m {
        let mass: f64 = (0..k).map(|t| src.get(t, term)).sum();
        if mass < DEGENERATE_MASS {
            degenerate_terms.push(term);
            for t in 0..k {
                values.set(t, term, 1.0 / k as f64);
            }
        } else {
            for t in 0..k {
                values.set(t, term, src.get(t, term) / mass);
            }
        }
    }
    TermTopicDistribution {
        window_label: u.window_label().to_string(),
        values,
        degenerate_terms,
    }
}

/// How many cells the chi-square statistic behind the threshold counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CellCount {
    /// `N = k · t`.
    #[default]
    TopicsTimesSlices,
    /// A caller-supplied `N`, e.g. a sample size.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    /// Topic count.
    pub k: usize,
    /// Number of compared windows.
    pub t: usize,
    pub alpha: f64,
    #[serde(default)]
    pub cells: CellCount,
}

impl ThresholdParams {
    pub fn new(k: usize, t: usize, alpha: f64) -> Self {
        Self {
            k,
            t,
            alpha,
            cells: CellCount::TopicsTimesSlices,
        }
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.k.saturating_sub(1) * self.t.saturating_sub(1)
    }

    pub fn n_cells(&self) -> usize {
        match self.cells {
            CellCount::TopicsTimesSlices => self.k * self.t,
            CellCount::Fixed(n) => n,
        }
    }
}

/// `χ²_{df, 1−α} / (2 N ln k)` with `df = (k−1)(t−1)`.
pub fn significance_threshold(params: &ThresholdParams) -> Result<f64, DiffusionError> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(DiffusionError::Invalid(format!(
            "alpha must lie in (0, 1), got {}",
            params.alpha
        )));
    }
    let df = params.degrees_of_freedom();
    if params.k < 2 || df < 1 {
        return Err(DiffusionError::Invalid(format!(
            "need k ≥ 2 and t ≥ 2, got k={} t={}",
            params.k, params.t
        )));
    }
    let n = params.n_cells();
    if n == 0 {
        return Err(DiffusionError::Invalid(
            "cell count must be positive".into(),
        ));
    }
    let q = chi2_quantile(1.0 - params.alpha, df as f64)?;
    Ok(q / (2.0 * n as f64 * (params.k as f64).ln()))
}

/// Default mass a topic must hold for a term to count as occurring in it:
/// `max(0.15, 2/k)`, strictly above the uniform level.
pub fn default_tau_mass(k: usize) -> f64 {
    0.15f64.max(2.0 / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub alpha: f64,
    /// `None` uses [`default_tau_mass`].
    pub tau_mass: Option<f64>,
    pub cells: CellCount,
    /// Weights of the earlier and later window; `None` is `(½, ½)`.
    pub weights: Option<[f64; 2]>,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            tau_mass: None,
            cells: CellCount::TopicsTimesSlices,
            weights: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermClass {
    Narrow,
    Broad,
    Divergent,
    Convergent,
    Unclassified,
}

impl fmt::Display for TermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermClass::Narrow => "narrow",
            TermClass::Broad => "broad",
            TermClass::Divergent => "divergent",
            TermClass::Convergent => "convergent",
            TermClass::Unclassified => "unclassified",
        })
    }
}

/// One term's divergence trajectory across consecutive windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSeries {
    pub term: usize,
    pub window_labels: Vec<String>,
    /// `scores[j]` compares windows `j` and `j+1`.
    pub scores: Vec<f64>,
    pub threshold: f64,
    pub significant: Vec<bool>,
    /// Topics holding at least `tau_mass` of the term, per window.
    pub support_per_window: Vec<usize>,
    pub classification: TermClass,
}

fn check_series(series: &[TermTopicDistribution]) -> Result<(usize, usize), DiffusionError> {
    let first = series
        .first()
        .ok_or_else(|| DiffusionError::Invalid("empty window series".into()))?;
    let (k, m) = (first.k(), first.m());
    if let Some(w) = series.iter().find(|w| w.k() != k || w.m() != m) {
        return Err(DiffusionError::Invalid(format!(
            "window {:?} is {}x{}, expected {k}x{m}",
            w.window_label,
            w.k(),
            w.m()
        )));
    }
    Ok((k, m))
}

/// Pairwise-consecutive divergence of `term`, tested against the two-window
/// threshold. The class is filled in when at least three windows exist.
pub fn diffusion_series(
    series: &[TermTopicDistribution],
    term: usize,
    params: &DiffusionParams,
) -> Result<DiffusionSeries, DiffusionError> {
    if series.len() < 2 {
        return Err(DiffusionError::Invalid(format!(
            "need at least 2 windows, got {}",
            series.len()
        )));
    }
    let (k, m) = check_series(series)?;
    if term >= m {
        return Err(DiffusionError::UnknownTerm(term));
    }
    let threshold = significance_threshold(&ThresholdParams {
        k,
        t: 2,
        alpha: params.alpha,
        cells: params.cells,
    })?;
    let tau = params.tau_mass.unwrap_or_else(|| default_tau_mass(k));

    let columns: Vec<Vec<f64>> = series.iter().map(|w| w.column(term)).collect();
    let weights = params.weights.as_ref().map(|w| w.as_slice());
    let scores = columns
        .windows(2)
        .map(|pair| gjs(&[&pair[0], &pair[1]], weights))
        .collect::<Result<Vec<f64>, _>>()?;
    let significant = scores.iter().map(|&s| s > threshold).collect();
    let support_per_window = columns
        .iter()
        .map(|c| c.iter().filter(|&&p| p >= tau).count())
        .collect();

    let mut out = DiffusionSeries {
        term,
        window_labels: series.iter().map(|w| w.window_label.clone()).collect(),
        scores,
        threshold,
        significant,
        support_per_window,
        classification: TermClass::Unclassified,
    };
    if series.len() >= 3 {
        out.classification = classify_term(&out)?;
    }
    Ok(out)
}

/// Divergence of `term` across all windows at once (t-way), alongside its
/// own threshold. Not used for classification.
pub fn history_divergence(
    series: &[TermTopicDistribution],
    term: usize,
    weights: Option<&[f64]>,
    alpha: f64,
) -> Result<(f64, f64), DiffusionError> {
    let (k, m) = check_series(series)?;
    if term >= m {
        return Err(DiffusionError::UnknownTerm(term));
    }
    let columns: Vec<Vec<f64>> = series.iter().map(|w| w.column(term)).collect();
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let score = gjs(&refs, weights)?;
    let threshold = significance_threshold(&ThresholdParams::new(k, series.len(), alpha))?;
    Ok((score, threshold))
}

/// Ordinary least-squares slope of `ys` against `0, 1, 2, …`.
pub fn least_squares_slope(ys: &[f64]) -> f64 {
    let n = ys.len();
    if n < 2 {
        return 0.0;
    }
    let x_mean = (n - 1) as f64 / 2.0;
    let y_mean = ys.iter().sum::<f64>() / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        num += dx * (y - y_mean);
        den += dx * dx;
    }
    num / den
}

/// Rules, first match wins:
/// 1. divergent: support strictly rises over the last three windows;
/// 2. convergent: support strictly falls over the last three windows and
///    ends at 1;
/// 3. broad: final support ≥ 2 and the score trend is positive;
/// 4. narrow: support is 1 everywhere and no score is significant;
/// 5. otherwise unclassified.
pub fn classify_term(series: &DiffusionSeries) -> Result<TermClass, DiffusionError> {
    let s = &series.support_per_window;
    if s.len() < 3 {
        return Err(DiffusionError::Invalid(format!(
            "classification needs 3 windows of history, got {}",
            s.len()
        )));
    }
    let tail = &s[s.len() - 3..];
    let last = tail[2];
    Ok(if tail[0] < tail[1] && tail[1] < tail[2] {
        TermClass::Divergent
    } else if tail[0] > tail[1] && tail[1] > tail[2] && last == 1 {
        TermClass::Convergent
    } else if last >= 2 && least_squares_slope(&series.scores) > 0.0 {
        TermClass::Broad
    } else if s.iter().all(|&x| x == 1) && !series.significant.iter().any(|&b| b) {
        TermClass::Narrow
    } else {
        TermClass::Unclassified
    })
}
