//! The single-hidden-layer baseline classifier.
//!
//! Mean-pooled token embeddings feed a tanh hidden layer (1024 units by default)
//! and a softmax output over the training labels. The hidden activations double
//! as the tweet features consumed by the zero-shot heads.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::embedding::{mean_pool, EmbeddingMatrix, Vocabulary};
use crate::ingest::Dataset;
use crate::numeric::{
    adam_step, cross_entropy, Activation, AdamConfig, AdamState, DenseLayer, DenseMatrix,
};
use crate::rng::{derive, streams};
use crate::{Error, Result};

pub const DEFAULT_HIDDEN_UNITS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub learning_rate: f64,
    /// Width of the hidden layer, which is also the feature dimension.
    pub hidden_units: usize,
}

impl Default for TrainSpec {
    fn default() -> Self {
        Self {
            epochs: 50,
            batch_size: 32,
            seed: 1,
            learning_rate: 0.001,
            hidden_units: DEFAULT_HIDDEN_UNITS,
        }
    }
}

impl TrainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.hidden_units == 0 {
            return Err(Error::InvalidArgument(
                "epochs, batch_size and hidden_units must be at least 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument("learning_rate must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            ..AdamConfig::default()
        }
    }
}

/// Anything that turns a pooled input vector into a fixed-width feature vector.
pub trait FeatureExtractor {
    fn feature_dim(&self) -> usize;
    fn features(&self, pooled: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineClassifier {
    pub hidden: DenseLayer,
    pub output: DenseLayer,
    pub label_order: Vec<String>,
    /// Mean cross-entropy over the training set before the first update.
    pub initial_loss: f64,
    /// Mean minibatch loss of each epoch.
    pub epoch_losses: Vec<f64>,
}

impl FeatureExtractor for BaselineClassifier {
    fn feature_dim(&self) -> usize {
        self.hidden.outputs()
    }

    fn features(&self, pooled: &[f64]) -> Result<Vec<f64>> {
        self.hidden.forward(pooled)
    }
}

impl BaselineClassifier {
    pub fn input_dim(&self) -> usize {
        self.hidden.inputs()
    }

    pub fn num_labels(&self) -> usize {
        self.label_order.len()
    }

    /// Softmax of the output layer applied to an already extracted feature.
    pub fn proba_from_features(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.output.forward(features)
    }

    pub fn predict_proba_pooled(&self, pooled: &[f64]) -> Result<Vec<f64>> {
        self.proba_from_features(&self.features(pooled)?)
    }

    pub fn predict_proba<S: AsRef<str>>(
        &self,
        tokens: &[S],
        vocab: &Vocabulary,
        emb: &EmbeddingMatrix,
    ) -> Result<Vec<f64>> {
        self.predict_proba_pooled(&mean_pool(tokens, vocab, emb).vector)
    }

    pub fn extract_features<S: AsRef<str>>(
        &self,
        tokens: &[S],
        vocab: &Vocabulary,
        emb: &EmbeddingMatrix,
    ) -> Result<Vec<f64>> {
        self.features(&mean_pool(tokens, vocab, emb).vector)
    }

    pub fn predict_pooled(&self, pooled: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba_pooled(pooled)?))
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Gradient buffers shaped like the two layers.
#[derive(Debug, Clone)]
pub(crate) struct BaselineGrads {
    pub hidden_w: DenseMatrix,
    pub hidden_b: Vec<f64>,
    pub output_w: DenseMatrix,
    pub output_b: Vec<f64>,
}

impl BaselineGrads {
    fn zeros_like(model: &BaselineClassifier) -> Self {
        Self {
            hidden_w: DenseMatrix::zeros(model.hidden.outputs(), model.hidden.inputs()),
            hidden_b: vec![0.0; model.hidden.outputs()],
            output_w: DenseMatrix::zeros(model.output.outputs(), model.output.inputs()),
            output_b: vec![0.0; model.output.outputs()],
        }
    }

    fn clear(&mut self) {
        self.hidden_w.as_mut_slice().fill(0.0);
        self.hidden_b.fill(0.0);
        self.output_w.as_mut_slice().fill(0.0);
        self.output_b.fill(0.0);
    }

    fn scale(&mut self, factor: f64) {
        self.hidden_w.scale(factor);
        self.output_w.scale(factor);
        self.hidden_b.iter_mut().for_each(|v| *v *= factor);
        self.output_b.iter_mut().for_each(|v| *v *= factor);
    }
}

/// Adds one example's cross-entropy gradient to `grads`; returns its loss.
pub(crate) fn accumulate_example(
    model: &BaselineClassifier,
    input: &[f64],
    label: usize,
    grads: &mut BaselineGrads,
) -> Result<f64> {
    let hidden = model.hidden.forward(input)?;
    let probs = model.output.forward(&hidden)?;
    let loss = cross_entropy(&probs, label)?;

    let mut delta_out = probs;
    delta_out[label] -= 1.0;
    let mut delta_hidden = model.output.weights.matvec_transposed(&delta_out)?;
    for (k, &d) in delta_out.iter().enumerate() {
        grads.output_b[k] += d;
        for (g, h) in grads.output_w.row_mut(k).iter_mut().zip(&hidden) {
            *g += d * h;
        }
    }
    for (dh, h) in delta_hidden.iter_mut().zip(&hidden) {
        *dh *= 1.0 - h * h;
    }
    for (j, &d) in delta_hidden.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        grads.hidden_b[j] += d;
        for (g, x) in grads.hidden_w.row_mut(j).iter_mut().zip(input) {
            *g += d * x;
        }
    }
    Ok(loss)
}

pub(crate) fn mean_loss(model: &BaselineClassifier, inputs: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    let mut total = 0.0;
    for (x, &y) in inputs.iter().zip(labels) {
        total += cross_entropy(&model.predict_proba_pooled(x)?, y)?;
    }
    Ok(total / inputs.len().max(1) as f64)
}

/// Trains on pre-pooled inputs. `labels[i]` indexes `label_order`.
pub fn train_baseline_on_features(
    inputs: &[Vec<f64>],
    labels: &[usize],
    label_order: Vec<String>,
    spec: &TrainSpec,
) -> Result<BaselineClassifier> {
    spec.validate()?;
    if label_order.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "baseline needs at least 2 labels, got {}",
            label_order.len()
        )));
    }
    if inputs.is_empty() || inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "train_baseline examples",
            expected: inputs.len(),
            actual: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= label_order.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: label_order.len(),
        });
    }
    let dim = inputs[0].len();
    if let Some(x) = inputs.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            context: "train_baseline input width",
            expected: dim,
            actual: x.len(),
        });
    }

    let mut rng = derive(spec.seed, streams::TRAIN);
    let hidden = DenseLayer::xavier(dim, spec.hidden_units, Activation::Tanh, &mut rng);
    let output = DenseLayer::xavier(spec.hidden_units, label_order.len(), Activation::Softmax, &mut rng);
    let mut model = BaselineClassifier {
        hidden,
        output,
        label_order,
        initial_loss: 0.0,
        epoch_losses: Vec::with_capacity(spec.epochs),
    };
    model.initial_loss = mean_loss(&model, inputs, labels)?;
    if !model.initial_loss.is_finite() {
        return Err(Error::Diverged {
            epoch: 0,
            last_finite_loss: None,
        });
    }

    let adam = spec.adam();
    let mut states = [
        AdamState::new(model.hidden.weights.as_slice().len(), adam),
        AdamState::new(model.hidden.bias.len(), adam),
        AdamState::new(model.output.weights.as_slice().len(), adam),
        AdamState::new(model.output.bias.len(), adam),
    ];
    let mut grads = BaselineGrads::zeros_like(&model);
    let mut order: Vec<usize> = (0..inputs.len()).collect();

    for epoch in 0..spec.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(spec.batch_size) {
            grads.clear();
            for &i in batch {
                loss_sum += accumulate_example(&model, &inputs[i], labels[i], &mut grads)?;
            }
            grads.scale(1.0 / batch.len() as f64);
            let last_finite_loss = model_last_loss(&model);
            let diverged = |e: Error| match e {
                Error::NonFinite(_) => Error::Diverged {
                    epoch,
                    last_finite_loss,
                },
                other => other,
            };
            adam_step(model.hidden.weights.as_mut_slice(), grads.hidden_w.as_slice(), &mut states[0])
                .map_err(diverged)?;
            adam_step(&mut model.hidden.bias, &grads.hidden_b, &mut states[1]).map_err(diverged)?;
            adam_step(model.output.weights.as_mut_slice(), grads.output_w.as_slice(), &mut states[2])
                .map_err(diverged)?;
            adam_step(&mut model.output.bias, &grads.output_b, &mut states[3]).map_err(diverged)?;
        }
        let mean = loss_sum / inputs.len() as f64;
        if !mean.is_finite() {
            return Err(Error::Diverged {
                epoch,
                last_finite_loss: model_last_loss(&model),
            });
        }
        model.epoch_losses.push(mean);
    }
    Ok(model)
}

fn model_last_loss(model: &BaselineClassifier) -> Option<f64> {
    model.epoch_losses.last().copied().or(Some(model.initial_loss))
}

/// Pools every example of `train` and trains on the result.
pub fn train_baseline(
    train: &Dataset,
    vocab: &Vocabulary,
    emb: &EmbeddingMatrix,
    spec: &TrainSpec,
) -> Result<BaselineClassifier> {
    let inputs: Vec<Vec<f64>> = train
        .examples
        .iter()
        .map(|e| mean_pool(&e.tokens, vocab, emb).vector)
        .collect();
    train_baseline_on_features(&inputs, &train.labels(), train.label_set.clone(), spec)
}
