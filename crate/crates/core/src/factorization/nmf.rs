use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dense::{rmse, DenseMatrix};
use super::FactorError;

/// Lower bound of the uniform initialisation range. Zero entries never move
/// under multiplicative updates, so initial values stay strictly positive.
pub const INIT_EPS: f64 = 1e-6;
/// Floor applied to every update denominator.
pub const DENOM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmfResult {
    /// n×k document-topic factor.
    pub w: DenseMatrix,
    /// k×m topic-term factor.
    pub h: DenseMatrix,
    /// `½‖X − WH‖²_F` after each iteration.
    pub objective_trace: Vec<f64>,
}

impl NmfResult {
    pub fn reconstruction(&self) -> DenseMatrix {
        self.w.matmul(&self.h).expect("factor shapes chain")
    }

    pub fn rmse(&self, x: &DenseMatrix) -> Result<f64, FactorError> {
        rmse(x, &self.reconstruction())
    }
}

/// Factorises `x ≈ W·H` with Lee–Seung multiplicative updates for the
/// squared Frobenius objective, running exactly `iters` sweeps.
pub fn nmf(x: &DenseMatrix, k: usize, iters: usize, seed: u64) -> Result<NmfResult, FactorError> {
    check_input(x)?;
    let (n, m) = x.shape();
    if k == 0 || k > n.min(m) {
        return Err(FactorError::Rank { k, limit: n.min(m) });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DenseMatrix::random_uniform(n, k, INIT_EPS, 1.0, &mut rng);
    let mut h = DenseMatrix::random_uniform(k, m, INIT_EPS, 1.0, &mut rng);

    let mut objective_trace = Vec::with_capacity(iters);
    for _ in 0..iters {
        // H ← H ∘ (WᵀX) / (WᵀW H)
        let numer = w.matmul_tn(x)?;
        let denom = w.matmul_tn(&w)?.matmul(&h)?;
        multiplicative_step(&mut h, &numer, &denom);

        // W ← W ∘ (X Hᵀ) / (W H Hᵀ)
        let numer = x.matmul_nt(&h)?;
        let denom = w.matmul(&h.matmul_nt(&h)?)?;
        multiplicative_step(&mut w, &numer, &denom);

        objective_trace.push(half_sq_error(x, &w, &h)?);
    }

    Ok(NmfResult {
        w,
        h,
        objective_trace,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HnmfResult {
    /// `W_1 … W_l`, with `W_1` n×d₁ and `W_i` d_{i−1}×d_i.
    pub ws: Vec<DenseMatrix>,
    /// Deepest topic-term factor, d_l×m.
    pub h: DenseMatrix,
    /// Objective trace of each layer's own factorisation.
    pub layer_traces: Vec<Vec<f64>>,
    /// For layers 2..l, the objective against `x` during refinement.
    pub refine_traces: Vec<Vec<f64>>,
    /// RMSE of `W_1 ⋯ W_l H_l` against the input.
    pub rmse: f64,
}

impl HnmfResult {
    pub fn reconstruction(&self) -> DenseMatrix {
        let mut acc = self.ws[0].clone();
        for w in &self.ws[1..] {
            acc = acc.matmul(w).expect("factor shapes chain");
        }
        acc.matmul(&self.h).expect("factor shapes chain")
    }
}

/// Layer-wise hierarchical NMF: factorise `x`, then keep re-factorising the
/// latest topic-term factor at the next (smaller) rank.
///
/// Earlier layers are frozen once trained. Each deeper layer is seeded by
/// factorising the previous topic-term factor and then refined against `x`
/// itself through the frozen prefix `W_1 ⋯ W_{i−1}`; without that second
/// pass a rank-deficient `W_1` leaves `H_1` unconstrained and the deeper
/// layers chase structure that never reaches the reconstruction.
pub fn hnmf(
    x: &DenseMatrix,
    layer_dims: &[usize],
    iters_per_layer: usize,
    seed: u64,
) -> Result<HnmfResult, FactorError> {
    check_input(x)?;
    if layer_dims.is_empty() {
        return Err(FactorError::LayerDims("no layers given".into()));
    }
    if let Some(pair) = layer_dims.windows(2).find(|p| p[1] >= p[0]) {
        return Err(FactorError::LayerDims(format!(
            "dims must be strictly decreasing, found {} then {}",
            pair[0], pair[1]
        )));
    }

    let first = nmf(x, layer_dims[0], iters_per_layer, seed)?;
    let mut prefix = first.w.clone();
    let mut ws = vec![first.w];
    let mut layer_traces = vec![first.objective_trace];
    let mut refine_traces = Vec::new();
    let mut h = first.h;
    for (layer, &k) in layer_dims.iter().enumerate().skip(1) {
        let res = nmf(&h, k, iters_per_layer, seed.wrapping_add(layer as u64))?;
        layer_traces.push(res.objective_trace);
        let (w, h_new, trace) = refine_through_prefix(x, &prefix, res.w, res.h, iters_per_layer)?;
        refine_traces.push(trace);
        prefix = prefix.matmul(&w)?;
        ws.push(w);
        h = h_new;
    }

    let mut out = HnmfResult {
        ws,
        h,
        layer_traces,
        refine_traces,
        rmse: 0.0,
    };
    out.rmse = rmse(x, &out.reconstruction())?;
    Ok(out)
}

/// Multiplicative updates for `½‖X − P W H‖²` with `P` held fixed.
fn refine_through_prefix(
    x: &DenseMatrix,
    prefix: &DenseMatrix,
    mut w: DenseMatrix,
    mut h: DenseMatrix,
    iters: usize,
) -> Result<(DenseMatrix, DenseMatrix, Vec<f64>), FactorError> {
    let ptx = prefix.matmul_tn(x)?;
    let ptp = prefix.matmul_tn(prefix)?;
    let mut trace = Vec::with_capacity(iters);
    for _ in 0..iters {
        // H ← H ∘ (PW)ᵀX / (PW)ᵀ(PW)H
        let pw = prefix.matmul(&w)?;
        let numer = pw.matmul_tn(x)?;
        let denom = pw.matmul_tn(&pw)?.matmul(&h)?;
        multiplicative_step(&mut h, &numer, &denom);

        // W ← W ∘ PᵀXHᵀ / PᵀP W HHᵀ
        let numer = ptx.matmul_nt(&h)?;
        let denom = ptp.matmul(&w)?.matmul(&h.matmul_nt(&h)?)?;
        multiplicative_step(&mut w, &numer, &denom);

        trace.push(half_sq_error(x, &prefix.matmul(&w)?, &h)?);
    }
    Ok((w, h, trace))
}

fn check_input(x: &DenseMatrix) -> Result<(), FactorError> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(FactorError::Shape("empty input matrix".into()));
    }
    for i in 0..x.rows() {
        for (j, &v) in x.row(i).iter().enumerate() {
            if !v.is_finite() {
                return Err(FactorError::NonFinite { row: i, col: j });
            }
            if v < 0.0 {
                return Err(FactorError::Negative { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn multiplicative_step(target: &mut DenseMatrix, numer: &DenseMatrix, denom: &DenseMatrix) {
    for ((t, &n), &d) in target
        .as_mut_slice()
        .iter_mut()
        .zip(numer.as_slice())
        .zip(denom.as_slice())
    {
        *t *= n / d.max(DENOM_FLOOR);
    }
}

fn half_sq_error(x: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64, FactorError> {
    let approx = w.matmul(h)?;
    Ok(0.5
        * x.as_slice()
            .iter()
            .zip(approx.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>())
}
