use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DnaeError;
use crate::diffusion::TopicTermMatrix;
use crate::factorization::DenseMatrix;

/// Hyperparameters of one autoencoder. Only the encoder widths are given;
/// the decoder mirrors them back out to the vocabulary size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DnaeConfig {
    /// Encoder widths, strictly decreasing; the last one is the topic count.
    pub hidden_dims: Vec<usize>,
    #[serde(default = "defaults::learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "defaults::epochs")]
    pub epochs: usize,
    #[serde(default = "defaults::batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::init_scale")]
    pub init_scale: f64,
    /// Row-parallel kernels. Off means sequential, bit-reproducible runs.
    #[serde(default)]
    pub parallel: bool,
}

mod defaults {
    pub fn learning_rate() -> f64 {
        1e-3
    }
    pub fn epochs() -> usize {
        200
    }
    pub fn batch_size() -> usize {
        64
    }
    pub fn init_scale() -> f64 {
        0.1
    }
}

impl Default for DnaeConfig {
    fn default() -> Self {
        Self {
            hidden_dims: vec![50, 20],
            learning_rate: defaults::learning_rate(),
            epochs: defaults::epochs(),
            batch_size: defaults::batch_size(),
            seed: 0,
            init_scale: defaults::init_scale(),
            parallel: false,
        }
    }
}

impl DnaeConfig {
    pub fn topics(&self) -> usize {
        self.hidden_dims.last().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), DnaeError> {
        let bad = |msg: String| Err(DnaeError::Config(msg));
        if self.hidden_dims.is_empty() {
            return bad("hidden_dims must not be empty".into());
        }
        if self.hidden_dims.contains(&0) {
            return bad("hidden_dims entries must be positive".into());
        }
        if let Some(p) = self.hidden_dims.windows(2).find(|p| p[1] >= p[0]) {
            return bad(format!(
                "hidden_dims must be strictly decreasing, found {} then {}",
                p[0], p[1]
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return bad(format!(
                "init_scale must be positive and finite, got {}",
                self.init_scale
            ));
        }
        Ok(())
    }
}

/// Which time window a set of weights has been trained for.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub window: Option<String>,
    /// Every window this weight lineage has been carried through, oldest
    /// first.
    pub lineage: Vec<String>,
}

/// Bias-free, activation-free autoencoder with non-negative weights.
///
/// Every layer maps `in ↦ in · Wᵀ` with `W` stored as `out × in`, so the
/// encoder is `H_1 (d₁×m), H_2 (d₂×d₁), …` and the decoder mirrors it,
/// ending in an `m×d₁` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DnaeModel {
    pub(crate) encoder: Vec<DenseMatrix>,
    pub(crate) decoder: Vec<DenseMatrix>,
    pub(crate) vocab_size: usize,
    pub(crate) config: DnaeConfig,
    pub(crate) provenance: Provenance,
}

impl DnaeModel {
    /// Assembles a model from explicit weights, checking that the layer
    /// shapes chain `m → … → m` and every entry is finite and `≥ 0`.
    pub fn from_weights(
        encoder: Vec<DenseMatrix>,
        decoder: Vec<DenseMatrix>,
        config: DnaeConfig,
    ) -> Result<Self, DnaeError> {
        if encoder.is_empty() || encoder.len() != decoder.len() {
            return Err(DnaeError::Shape(format!(
                "{} encoder layers vs {} decoder layers",
                encoder.len(),
                decoder.len()
            )));
        }
        let vocab_size = encoder[0].cols();
        let mut width = vocab_size;
        for (i, w) in encoder.iter().chain(&decoder).enumerate() {
            if w.cols() != width || w.rows() == 0 {
                return Err(DnaeError::Shape(format!(
                    "layer {i} is {}x{}, expected input width {width}",
                    w.rows(),
                    w.cols()
                )));
            }
            if !w.is_finite() || !w.is_nonnegative() {
                return Err(DnaeError::Shape(format!(
                    "layer {i} has negative or non-finite weights"
                )));
            }
            width = w.rows();
        }
        if width != vocab_size {
            return Err(DnaeError::Shape(format!(
                "decoder ends at width {width}, vocabulary is {vocab_size}"
            )));
        }
        for (i, (enc, dec)) in encoder.iter().zip(decoder.iter().rev()).enumerate() {
            if enc.rows() != dec.cols() || enc.cols() != dec.rows() {
                return Err(DnaeError::Shape(format!(
                    "decoder layer mirroring encoder layer {i} has the wrong shape"
                )));
            }
        }
        Ok(Self {
            encoder,
            decoder,
            vocab_size,
            config,
            provenance: Provenance::default(),
        })
    }

    pub fn encoder(&self) -> &[DenseMatrix] {
        &self.encoder
    }

    pub fn decoder(&self) -> &[DenseMatrix] {
        &self.decoder
    }

    /// Encoder then decoder weights in forward order.
    pub fn layers(&self) -> impl Iterator<Item = &DenseMatrix> {
        self.encoder.iter().chain(&self.decoder)
    }

    pub(crate) fn layers_mut(&mut self) -> impl Iterator<Item = &mut DenseMatrix> {
        self.encoder.iter_mut().chain(self.decoder.iter_mut())
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn topics(&self) -> usize {
        self.encoder.last().map_or(0, DenseMatrix::rows)
    }

    /// Encoder widths, bottleneck last.
    pub fn hidden_dims(&self) -> Vec<usize> {
        self.encoder.iter().map(DenseMatrix::rows).collect()
    }

    pub fn config(&self) -> &DnaeConfig {
        &self.config
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn assign_window(&mut self, label: &str) {
        self.provenance.window = Some(label.to_string());
        self.provenance.lineage.push(label.to_string());
    }

    pub fn min_weight(&self) -> f64 {
        self.layers()
            .map(DenseMatrix::min_value)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fresh model with weights i.i.d. uniform on `[0, init_scale)`.
pub fn init_model(config: &DnaeConfig, vocab_size: usize) -> Result<DnaeModel, DnaeError> {
    config.validate()?;
    if vocab_size <= config.topics() {
        return Err(DnaeError::Config(format!(
            "vocabulary size {vocab_size} must exceed the bottleneck width {}",
            config.topics()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut widths = vec![vocab_size];
    widths.extend(&config.hidden_dims);

    let encoder: Vec<DenseMatrix> = widths
        .windows(2)
        .map(|w| DenseMatrix::random_uniform(w[1], w[0], 0.0, config.init_scale, &mut rng))
        .collect();
    let decoder: Vec<DenseMatrix> = widths
        .windows(2)
        .rev()
        .map(|w| DenseMatrix::random_uniform(w[0], w[1], 0.0, config.init_scale, &mut rng))
        .collect();
    DnaeModel::from_weights(encoder, decoder, config.clone())
}

/// Copies `prev` as the starting point for the next window's training.
pub fn warm_start(
    prev: &DnaeModel,
    vocab_size: usize,
    window_label: &str,
) -> Result<DnaeModel, DnaeError> {
    if prev.vocab_size != vocab_size {
        return Err(DnaeError::VocabMismatch {
            model: prev.vocab_size,
            data: vocab_size,
        });
    }
    let mut next = prev.clone();
    next.assign_window(window_label);
    Ok(next)
}

/// Intermediate outputs of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// Output of every layer in forward order; the first half are the
    /// encoder outputs `W_1 … W_l`, the last entry is the reconstruction.
    pub activations: Vec<DenseMatrix>,
}

impl ForwardTrace {
    pub fn encoder_outputs(&self) -> &[DenseMatrix] {
        &self.activations[..self.activations.len() / 2]
    }

    pub fn decoder_outputs(&self) -> &[DenseMatrix] {
        &self.activations[self.activations.len() / 2..]
    }

    /// `W_l`, one column per topic.
    pub fn bottleneck(&self) -> &DenseMatrix {
        &self.activations[self.activations.len() / 2 - 1]
    }

    pub fn reconstruction(&self) -> &DenseMatrix {
        self.activations.last().expect("at least two layers")
    }
}

pub fn forward(model: &DnaeModel, x: &DenseMatrix) -> Result<ForwardTrace, DnaeError> {
    forward_with(model, x, model.config.parallel)
}

pub(crate) fn forward_with(
    model: &DnaeModel,
    x: &DenseMatrix,
    parallel: bool,
) -> Result<ForwardTrace, DnaeError> {
    if x.cols() != model.vocab_size {
        return Err(DnaeError::Shape(format!(
            "input has {} columns, model expects {}",
            x.cols(),
            model.vocab_size
        )));
    }
    let mut activations: Vec<DenseMatrix> = Vec::with_capacity(2 * model.encoder.len());
    for w in model.layers() {
        let input = activations.last().unwrap_or(x);
        activations.push(input.matmul_nt_with(w, parallel)?);
    }
    Ok(ForwardTrace { activations })
}

/// `U = H_l ⋯ H_1`, the k×m topic-term matrix of the encoder.
pub fn extract_topic_term(model: &DnaeModel) -> TopicTermMatrix {
    let mut u = model.encoder[0].clone();
    for h in &model.encoder[1..] {
        u = h.matmul(&u).expect("encoder shapes chain");
    }
    let label = model.provenance.window.clone().unwrap_or_default();
    TopicTermMatrix::new(label, u).expect("products of non-negative weights are non-negative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn config(dims: &[usize]) -> DnaeConfig {
        DnaeConfig {
            hidden_dims: dims.to_vec(),
            seed: 17,
            ..DnaeConfig::default()
        }
    }

    fn random_nonneg(n: usize, m: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, m, |_, _| rng.random::<f64>())
    }

    #[test]
    fn full_scale_shapes() {
        let model = init_model(&config(&[50, 20]), 17_240).unwrap();
        let enc: Vec<_> = model.encoder().iter().map(DenseMatrix::shape).collect();
        let dec: Vec<_> = model.decoder().iter().map(DenseMatrix::shape).collect();
        assert_eq!(enc, [(50, 17_240), (20, 50)]);
        assert_eq!(dec, [(50, 20), (17_240, 50)]);
        assert_eq!(extract_topic_term(&model).values().shape(), (20, 17_240));
    }

    #[test]
    fn init_is_seeded() {
        let a = init_model(&config(&[2]), 3).unwrap();
        let b = init_model(&config(&[2]), 3).unwrap();
        assert_eq!(a, b);
        assert!(a.min_weight() >= 0.0);
        let c = init_model(
            &DnaeConfig {
                seed: 18,
                ..config(&[2])
            },
            3,
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_guards() {
        let zero_scale = DnaeConfig {
            init_scale: 0.0,
            ..config(&[2])
        };
        assert!(matches!(
            init_model(&zero_scale, 3),
            Err(DnaeError::Config(_))
        ));
        assert!(init_model(&config(&[3]), 3).is_err());
        assert!(init_model(&config(&[2, 4]), 10).is_err());
        assert!(init_model(&config(&[]), 10).is_err());
    }

    #[test]
    fn identity_model_reproduces_input() {
        let m = 4;
        let model = DnaeModel::from_weights(
            vec![DenseMatrix::identity(m)],
            vec![DenseMatrix::identity(m)],
            config(&[m]),
        )
        .unwrap();
        let x = random_nonneg(5, m, 3);
        let trace = forward(&model, &x).unwrap();
        assert_eq!(trace.reconstruction(), &x);
    }

    #[test]
    fn zero_input_gives_zero_activations() {
        let model = init_model(&config(&[3, 2]), 6).unwrap();
        let trace = forward(&model, &DenseMatrix::zeros(4, 6)).unwrap();
        for a in &trace.activations {
            assert_eq!(a.max_value(), 0.0);
            assert_eq!(a.min_value(), 0.0);
        }
    }

    #[test]
    fn activations_non_negative() {
        let model = init_model(&config(&[5, 3]), 8).unwrap();
        let trace = forward(&model, &random_nonneg(7, 8, 4)).unwrap();
        assert_eq!(trace.activations.len(), 4);
        assert_eq!(trace.bottleneck().cols(), 3);
        assert!(trace.activations.iter().all(|a| a.min_value() >= 0.0));
        assert!(forward(&model, &random_nonneg(2, 7, 4)).is_err());
    }

    #[test]
    fn warm_start_copies_and_tracks_windows() {
        let mut m = init_model(&config(&[3]), 10).unwrap();
        m.assign_window("w1");
        let a = warm_start(&m, 10, "w2").unwrap();
        let b = warm_start(&a, 10, "w3").unwrap();
        assert_eq!(b.encoder, m.encoder);
        assert_eq!(b.provenance().window.as_deref(), Some("w3"));
        assert_eq!(b.provenance().lineage, ["w1", "w2", "w3"]);
        assert!(matches!(
            warm_start(&m, 9, "x"),
            Err(DnaeError::VocabMismatch { model: 10, data: 9 })
        ));
    }

    #[test]
    fn topic_term_product() {
        let single = init_model(&config(&[2]), 5).unwrap();
        assert_eq!(extract_topic_term(&single).values(), &single.encoder[0]);

        let deep = init_model(&config(&[4, 2]), 6).unwrap();
        let u = extract_topic_term(&deep);
        assert!(u.values().min_value() > 0.0);
    }

    #[test]
    fn from_weights_rejects_bad_chains() {
        let e = vec![DenseMatrix::zeros(2, 4)];
        assert!(
            DnaeModel::from_weights(e.clone(), vec![DenseMatrix::zeros(3, 2)], config(&[2]))
                .is_err()
        );
        let neg = DenseMatrix::from_fn(4, 2, |_, _| -1.0);
        assert!(DnaeModel::from_weights(e, vec![neg], config(&[2])).is_err());
    }
}
