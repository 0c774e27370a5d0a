use super::DiffusionError;

/// Tolerance on `Σp = 1` for probability vectors and weights.
pub const SUM_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_distribution(p: &[f64], what: &str) -> Result<(), DiffusionError> {
    if let Some(v) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(DiffusionError::Invalid(format!(
            "{what} has an invalid entry {v}"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(DiffusionError::Invalid(format!(
            "{what} sums to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Shannon entropy with logarithm base `k`, `k = p.len()`, so the result
/// lies in `[0, 1]`. `0·log 0` counts as 0.
pub fn entropy_kary(p: &[f64], k: usize) -> Result<f64, DiffusionError> {
    if k < 2 || p.len() != k {
        return Err(DiffusionError::Invalid(format!(
            "entropy base {k} needs a vector of that length (≥ 2), got {}",
            p.len()
        )));
    }
    check_distribution(p, "distribution")?;
    Ok(entropy_unchecked(p))
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    let nats: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
    (nats / (p.len() as f64).ln()).clamp(0.0, 1.0)
}

/// Generalised Jensen–Shannon divergence: the k-ary entropy of the weighted
/// mixture minus the weighted mean of the component entropies. `None`
/// weights means uniform.
pub fn gjs(dists: &[&[f64]], weights: Option<&[f64]>) -> Result<f64, DiffusionError> {
    let t = dists.len();
    if t == 0 {
        return Err(DiffusionError::Invalid(
            "no distributions to compare".into(),
        ));
    }
    let k = dists[0].len();
    if k < 2 {
        return Err(DiffusionError::Invalid(format!(
            "distributions need at least 2 outcomes, got {k}"
        )));
    }
    for (i, d) in dists.iter().enumerate() {
        if d.len() != k {
            return Err(DiffusionError::Invalid(format!(
                "distribution {i} has length {}, expected {k}",
                d.len()
            )));
        }
        check_distribution(d, &format!("distribution {i}"))?;
    }
    let uniform = vec![1.0 / t as f64; t];
    let weights = match weights {
        Some(w) => {
            if w.len() != t {
                return Err(DiffusionError::Invalid(format!(
                    "{} weights for {t} distributions",
                    w.len()
                )));
            }
            check_distribution(w, "weights")?;
            w
        }
        None => &uniform,
    };

    // A mixture of identical components is that component.
    if dists.iter().all(|d| d == &dists[0]) {
        return Ok(0.0);
    }

    let mut mixture = vec![0.0; k];
    let mut mean_entropy = 0.0;
    for (d, &w) in dists.iter().zip(weights) {
        for (m, &v) in mixture.iter_mut().zip(d.iter()) {
            *m += w * v;
        }
        mean_entropy += w * entropy_unchecked(d);
    }
    Ok((entropy_unchecked(&mixture) - mean_entropy).clamp(0.0, 1.0))
}
