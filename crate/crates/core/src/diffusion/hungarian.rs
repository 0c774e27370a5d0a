use serde::{Deserialize, Serialize};

use super::topic_matrix::TopicTermMatrix;
use super::DiffusionError;
use crate::factorization::DenseMatrix;

/// Minimum-cost perfect matching on a square cost matrix (Kuhn–Munkres with
/// row/column potentials, O(n³)). Returns `assignment[row] = col`.
pub fn hungarian(cost: &DenseMatrix) -> Result<Vec<usize>, DiffusionError> {
    let n = cost.rows();
    if cost.cols() != n {
        return Err(DiffusionError::Invalid(format!(
            "cost matrix must be square, got {}x{}",
            n,
            cost.cols()
        )));
    }
    if !cost.is_finite() {
        return Err(DiffusionError::Invalid(
            "cost matrix has non-finite entries".into(),
        ));
    }

    // 1-based; index 0 is the virtual column used to grow each augmenting path.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    Ok(assignment)
}

/// Topic correspondence between two windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAlignment {
    pub from_window: String,
    pub to_window: String,
    /// `permutation[a] = b`: topic `a` of the earlier window matches topic
    /// `b` of the later one.
    pub permutation: Vec<usize>,
    /// Sum of `1 − cos` over matched pairs.
    pub total_cost: f64,
}

impl TopicAlignment {
    /// Topics that kept their index.
    pub fn fixed_points(&self) -> usize {
        self.permutation
            .iter()
            .enumerate()
            .filter(|(a, b)| a == *b)
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.fixed_points() == self.permutation.len()
    }
}

/// `1 − cosine similarity` between every pair of topic rows. A zero row has
/// similarity 0 with everything.
pub fn cosine_cost(prev: &DenseMatrix, curr: &DenseMatrix) -> DenseMatrix {
    let norms = |m: &DenseMatrix| -> Vec<f64> {
        (0..m.rows())
            .map(|i| m.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    };
    let (np, nc) = (norms(prev), norms(curr));
    DenseMatrix::from_fn(prev.rows(), curr.rows(), |a, b| {
        if np[a] == 0.0 || nc[b] == 0.0 {
            return 1.0;
        }
        let dot: f64 = prev
            .row(a)
            .iter()
            .zip(curr.row(b))
            .map(|(x, y)| x * y)
            .sum();
        (1.0 - dot / (np[a] * nc[b])).max(0.0)
    })
}

/// Matches the topics of `curr` to those of `prev` by minimum total
/// cosine distance.
pub fn align_topics(
    prev: &TopicTermMatrix,
    curr: &TopicTermMatrix,
) -> Result<TopicAlignment, DiffusionError> {
    if prev.k() != curr.k() || prev.m() != curr.m() {
        return Err(DiffusionError::Invalid(format!(
            "cannot align {}x{} with {}x{}",
            prev.k(),
            prev.m(),
            curr.k(),
            curr.m()
        )));
    }
    let cost = cosine_cost(prev.values(), curr.values());
    let permutation = hungarian(&cost)?;
    let total_cost = permutation
        .iter()
        .enumerate()
        .map(|(a, &b)| cost.get(a, b))
        .sum();
    Ok(TopicAlignment {
        from_window: prev.window_label().to_string(),
        to_window: curr.window_label().to_string(),
        permutation,
        total_cost,
    })
}
