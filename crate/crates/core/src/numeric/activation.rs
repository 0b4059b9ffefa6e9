use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Probabilities below this are clamped before taking the log in [`cross_entropy`].
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Relu,
    Softmax,
}

impl Activation {
    pub fn apply(self, values: &mut [f64]) {
        match self {
            Activation::Identity => {}
            Activation::Tanh => values.iter_mut().for_each(|v| *v = libm::tanh(*v)),
            Activation::Relu => values.iter_mut().for_each(|v| *v = relu(*v)),
            Activation::Softmax => softmax_in_place(values),
        }
    }
}

pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let mut out = logits.to_vec();
    softmax_in_place(&mut out);
    out
}

/// Max-subtracted softmax.
pub fn softmax_in_place(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = libm::exp(*v - max);
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
}

pub fn cross_entropy(probs: &[f64], true_index: usize) -> Result<f64> {
    let p = *probs.get(true_index).ok_or(Error::IndexOutOfRange {
        index: true_index,
        len: probs.len(),
    })?;
    Ok(-libm::log(p.max(PROB_FLOOR)))
}
