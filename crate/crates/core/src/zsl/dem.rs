//! Deep embedding model: a ReLU layer maps label vectors into the tweet feature
//! space and is trained by least squares against the features of that label's
//! tweets. Ranking picks the label whose mapped vector is nearest.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{check_dim, AttributeMatrix, Prediction};
use crate::numeric::{adam_step, dot, euclidean_distance, Activation, AdamState, DenseLayer, DenseMatrix};
use crate::rng::{derive, streams};
use crate::supervised::TrainSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemModel {
    /// `p × s` ReLU layer.
    pub mapper: DenseLayer,
    pub initial_loss: f64,
    pub epoch_losses: Vec<f64>,
}

impl DemModel {
    pub fn feature_dim(&self) -> usize {
        self.mapper.outputs()
    }

    pub fn attribute_dim(&self) -> usize {
        self.mapper.inputs()
    }

    pub fn map_label(&self, attribute: &[f64]) -> Result<Vec<f64>> {
        self.mapper.forward(attribute)
    }
}

/// Gradient of [`dem_loss_and_gradient`] with respect to the mapper.
#[derive(Debug, Clone, PartialEq)]
pub struct DemGradient {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

/// Per-label sufficient statistics of a batch: count, feature sum, and the sum
/// of squared feature norms.
struct LabelGroup {
    count: usize,
    feature_sum: Vec<f64>,
    square_sum: f64,
}

fn group_batch(features: &[Vec<f64>], label_ids: &[usize], batch: &[usize], square_norms: &[f64]) -> BTreeMap<usize, LabelGroup> {
    let mut groups: BTreeMap<usize, LabelGroup> = BTreeMap::new();
    for &i in batch {
        let g = groups.entry(label_ids[i]).or_insert_with(|| LabelGroup {
            count: 0,
            feature_sum: vec![0.0; features[i].len()],
            square_sum: 0.0,
        });
        g.count += 1;
        g.square_sum += square_norms[i];
        for (s, x) in g.feature_sum.iter_mut().zip(&features[i]) {
            *s += x;
        }
    }
    groups
}

/// Mean squared error `(1/|batch|)·Σ‖xᵢ − relu(W·s(yᵢ) + b)‖²` and its gradient.
/// Examples sharing a label are handled together, which is exact.
fn batch_loss_and_gradient(
    mapper: &DenseLayer,
    features: &[Vec<f64>],
    label_ids: &[usize],
    labels: &AttributeMatrix,
    batch: &[usize],
    square_norms: &[f64],
    grad: &mut DemGradient,
) -> Result<f64> {
    grad.weights.as_mut_slice().fill(0.0);
    grad.bias.fill(0.0);
    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    for (label, group) in group_batch(features, label_ids, batch, square_norms) {
        let attribute = labels.vector(label);
        let z = mapper.pre_activation(attribute)?;
        let mapped: Vec<f64> = z.iter().map(|&v| v.max(0.0)).collect();
        let n = group.count as f64;
        loss += n * dot(&mapped, &mapped) - 2.0 * dot(&mapped, &group.feature_sum) + group.square_sum;
        for (j, (&zj, &gj)) in z.iter().zip(&mapped).enumerate() {
            if zj <= 0.0 {
                continue;
            }
            let delta = 2.0 * scale * (n * gj - group.feature_sum[j]);
            grad.bias[j] += delta;
            for (g, a) in grad.weights.row_mut(j).iter_mut().zip(attribute) {
                *g += delta * a;
            }
        }
    }
    Ok(loss * scale)
}

fn square_norms(features: &[Vec<f64>]) -> Vec<f64> {
    features.iter().map(|x| dot(x, x)).collect()
}

fn validate(features: &[Vec<f64>], label_ids: &[usize], labels: &AttributeMatrix) -> Result<usize> {
    check_dim("dem examples", features.len(), label_ids.len())?;
    if features.is_empty() {
        return Err(Error::InvalidArgument("DEM needs at least one example".into()));
    }
    let p = features[0].len();
    for f in features {
        check_dim("dem feature width", p, f.len())?;
    }
    if let Some(&bad) = label_ids.iter().find(|&&l| l >= labels.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: labels.len(),
        });
    }
    Ok(p)
}

/// Full-data loss and gradient of `mapper`; the gradient-check entry point.
pub fn dem_loss_and_gradient(
    mapper: &DenseLayer,
    features: &[Vec<f64>],
    label_ids: &[usize],
    labels: &AttributeMatrix,
) -> Result<(f64, DemGradient)> {
    validate(features, label_ids, labels)?;
    let mut grad = DemGradient {
        weights: DenseMatrix::zeros(mapper.outputs(), mapper.inputs()),
        bias: vec![0.0; mapper.outputs()],
    };
    let all: Vec<usize> = (0..features.len()).collect();
    let loss = batch_loss_and_gradient(mapper, features, label_ids, labels, &all, &square_norms(features), &mut grad)?;
    Ok((loss, grad))
}

/// Trains the mapper on `features[i]` paired with `labels.vector(label_ids[i])`.
pub fn dem_fit_indexed(
    features: &[Vec<f64>],
    label_ids: &[usize],
    labels: &AttributeMatrix,
    spec: &TrainSpec,
) -> Result<DemModel> {
    spec.validate()?;
    let p = validate(features, label_ids, labels)?;
    let mut rng = derive(spec.seed, streams::DEM);
    let mapper = DenseLayer::xavier(labels.dim(), p, Activation::Relu, &mut rng);
    dem_train(mapper, features, label_ids, labels, spec, &mut rng)
}

/// Continues training from a given mapper (used to start from a known point).
pub fn dem_train(
    mapper: DenseLayer,
    features: &[Vec<f64>],
    label_ids: &[usize],
    labels: &AttributeMatrix,
    spec: &TrainSpec,
    rng: &mut crate::rng::Rng,
) -> Result<DemModel> {
    validate(features, label_ids, labels)?;
    let norms = square_norms(features);
    let mut model = DemModel {
        initial_loss: dem_loss_and_gradient(&mapper, features, label_ids, labels)?.0,
        mapper,
        epoch_losses: Vec::with_capacity(spec.epochs),
    };
    let adam = spec.adam();
    let mut w_state = AdamState::new(model.mapper.weights.as_slice().len(), adam);
    let mut b_state = AdamState::new(model.mapper.bias.len(), adam);
    let mut grad = DemGradient {
        weights: DenseMatrix::zeros(model.mapper.outputs(), model.mapper.inputs()),
        bias: vec![0.0; model.mapper.outputs()],
    };
    let mut order: Vec<usize> = (0..features.len()).collect();
    for epoch in 0..spec.epochs {
        order.shuffle(rng);
        let mut weighted = 0.0;
        for batch in order.chunks(spec.batch_size) {
            let loss = batch_loss_and_gradient(&model.mapper, features, label_ids, labels, batch, &norms, &mut grad)?;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    last_finite_loss: model.epoch_losses.last().copied().or(Some(model.initial_loss)),
                });
            }
            weighted += loss * batch.len() as f64;
            adam_step(model.mapper.weights.as_mut_slice(), grad.weights.as_slice(), &mut w_state)?;
            adam_step(&mut model.mapper.bias, &grad.bias, &mut b_state)?;
        }
        model.epoch_losses.push(weighted / features.len() as f64);
    }
    Ok(model)
}

/// Trains from per-example label vectors; identical vectors are treated as one label.
pub fn dem_fit(features: &[Vec<f64>], label_vectors: &[Vec<f64>], spec: &TrainSpec) -> Result<DemModel> {
    check_dim("dem_fit examples", features.len(), label_vectors.len())?;
    let mut distinct: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut ids = Vec::with_capacity(label_vectors.len());
    for v in label_vectors {
        let key: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
        let id = *distinct.entry(key).or_insert_with(|| {
            rows.push(v.clone());
            rows.len() - 1
        });
        ids.push(id);
    }
    let names = (0..rows.len()).map(|i| alloc::format!("label{i}")).collect();
    let labels = AttributeMatrix::new(names, &rows)?;
    dem_fit_indexed(features, &ids, &labels, spec)
}

/// Ranks candidates by ascending distance between `x` and each mapped label
/// (score = −distance).
pub fn dem_rank(model: &DemModel, x: &[f64], candidates: &AttributeMatrix) -> Result<Prediction> {
    check_dim("dem_rank features", model.feature_dim(), x.len())?;
    check_dim("dem_rank attributes", model.attribute_dim(), candidates.dim())?;
    let scores = (0..candidates.len())
        .map(|i| Ok(-euclidean_distance(x, &model.map_label(candidates.vector(i))?)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Prediction::from_scores(candidates.labels(), &scores))
}
