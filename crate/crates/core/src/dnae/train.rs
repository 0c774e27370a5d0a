use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{forward_with, DnaeConfig, DnaeModel};
use super::DnaeError;
use crate::corpus::WeightedMatrix;
use crate::factorization::DenseMatrix;

/// Rows densified at a time when scoring the full matrix.
const EVAL_CHUNK: usize = 256;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// RMSE over the whole input after each epoch.
    pub rmse_per_epoch: Vec<f64>,
    /// Smallest weight entry across all layers after each epoch.
    pub min_weight_per_epoch: Vec<f64>,
    pub final_rmse: f64,
}

/// Projected mini-batch gradient descent on the mean squared
/// reconstruction error. After every step negative weights are clamped to
/// zero. Batch order is a fresh seeded shuffle per epoch.
pub fn train(
    mut model: DnaeModel,
    x: &WeightedMatrix,
    config: &DnaeConfig,
) -> Result<(DnaeModel, TrainReport), DnaeError> {
    config.validate()?;
    if config.hidden_dims != model.hidden_dims() {
        return Err(DnaeError::Config(format!(
            "config hidden_dims {:?} do not match model {:?}",
            config.hidden_dims,
            model.hidden_dims()
        )));
    }
    if x.n_cols() != model.vocab_size {
        return Err(DnaeError::VocabMismatch {
            model: model.vocab_size,
            data: x.n_cols(),
        });
    }
    model.config = config.clone();

    let n = x.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut report = TrainReport::default();
    for epoch in 0..config.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(epoch_seed(config.seed, epoch));
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let xb = x.rows_dense(batch);
            let (loss, grads) = half_sq_gradients(&model, &xb, config.parallel)?;
            if !loss.is_finite() {
                return Err(divergence(epoch, config));
            }
            // d/dW of mean((X' − X)²) = 2/(b·m) · d/dW of ½‖X' − X‖²
            let step = config.learning_rate * 2.0 / (xb.rows() * xb.cols()) as f64;
            for (w, g) in model.layers_mut().zip(&grads) {
                for (wv, gv) in w.as_mut_slice().iter_mut().zip(g.as_slice()) {
                    *wv = (*wv - step * gv).max(0.0);
                }
            }
        }

        let min_weight = model.min_weight();
        if !min_weight.is_finite() {
            return Err(divergence(epoch, config));
        }
        debug_assert!(min_weight >= 0.0);
        let epoch_rmse = rmse_sparse(&model, x)?;
        if !epoch_rmse.is_finite() {
            return Err(divergence(epoch, config));
        }
        report.rmse_per_epoch.push(epoch_rmse);
        report.min_weight_per_epoch.push(min_weight);
    }
    report.final_rmse = match report.rmse_per_epoch.last() {
        Some(&r) => r,
        None => rmse_sparse(&model, x)?,
    };
    Ok((model, report))
}

fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    seed ^ (epoch as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn divergence(epoch: usize, config: &DnaeConfig) -> DnaeError {
    DnaeError::Divergence {
        epoch,
        learning_rate: config.learning_rate,
    }
}

/// RMSE of the model's reconstruction of `x`, densifying a chunk of rows
/// at a time.
pub fn rmse_sparse(model: &DnaeModel, x: &WeightedMatrix) -> Result<f64, DnaeError> {
    let (n, m) = (x.n_rows(), x.n_cols());
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    let mut sse = 0.0;
    let rows: Vec<usize> = (0..n).collect();
    for chunk in rows.chunks(EVAL_CHUNK) {
        let xb = x.rows_dense(chunk);
        let trace = forward_with(model, &xb, model.config.parallel)?;
        sse += xb
            .as_slice()
            .iter()
            .zip(trace.reconstruction().as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    Ok((sse / (n * m) as f64).sqrt())
}

/// `½‖X − X'‖²_F` and its gradient with respect to every layer's weights
/// (forward order).
pub fn reconstruction_gradients(
    model: &DnaeModel,
    x: &DenseMatrix,
) -> Result<(f64, Vec<DenseMatrix>), DnaeError> {
    half_sq_gradients(model, x, false)
}

fn half_sq_gradients(
    model: &DnaeModel,
    x: &DenseMatrix,
    parallel: bool,
) -> Result<(f64, Vec<DenseMatrix>), DnaeError> {
    let trace = forward_with(model, x, parallel)?;
    let mut delta = trace.reconstruction().sub(x)?;
    let loss = 0.5 * delta.as_slice().iter().map(|v| v * v).sum::<f64>();

    let weights: Vec<&DenseMatrix> = model.layers().collect();
    let mut grads = vec![DenseMatrix::zeros(0, 0); weights.len()];
    for j in (0..weights.len()).rev() {
        let input = if j == 0 { x } else { &trace.activations[j - 1] };
        // layer j: out = in · Wᵀ, so ∂L/∂W = δᵀ · in and δ_in = δ · W
        grads[j] = delta.matmul_tn(input)?;
        if j > 0 {
            delta = delta.matmul_with(weights[j], parallel)?;
        }
    }
    Ok((loss, grads))
}

/// Largest relative disagreement between the analytic gradient of
/// `½‖X − X'‖²` and central finite differences with step `epsilon`, over
/// every weight entry. Intended for small inputs at interior points.
pub fn gradient_check(model: &DnaeModel, x: &DenseMatrix, epsilon: f64) -> Result<f64, DnaeError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(DnaeError::Config(format!(
            "finite-difference step must be positive, got {epsilon}"
        )));
    }
    let (_, analytic) = reconstruction_gradients(model, x)?;
    let loss_of = |m: &DnaeModel| -> Result<f64, DnaeError> {
        let trace = forward_with(m, x, false)?;
        let diff = trace.reconstruction().sub(x)?;
        Ok(0.5 * diff.as_slice().iter().map(|v| v * v).sum::<f64>())
    };

    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (layer, grad) in analytic.iter().enumerate() {
        for (idx, &exact) in grad.as_slice().iter().enumerate() {
            let original = weight_mut(&mut probe, layer)[idx];
            weight_mut(&mut probe, layer)[idx] = original + epsilon;
            let plus = loss_of(&probe)?;
            weight_mut(&mut probe, layer)[idx] = original - epsilon;
            let minus = loss_of(&probe)?;
            weight_mut(&mut probe, layer)[idx] = original;

            let numeric = (plus - minus) / (2.0 * epsilon);
            let scale = exact.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((exact - numeric).abs() / scale);
        }
    }
    Ok(worst)
}

fn weight_mut(model: &mut DnaeModel, layer: usize) -> &mut [f64] {
    model
        .layers_mut()
        .nth(layer)
        .expect("layer index in range")
        .as_mut_slice()
}
