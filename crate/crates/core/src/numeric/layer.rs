use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{xavier_uniform, Activation, DenseMatrix};
use crate::rng::Rng;
use crate::{Error, Result};

/// Fully connected layer `activation(W·x + b)` with `W` shaped `out × in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    /// Xavier-uniform weights, zero bias.
    pub fn xavier(inputs: usize, outputs: usize, activation: Activation, rng: &mut Rng) -> Self {
        Self {
            weights: xavier_uniform(inputs, outputs, rng),
            bias: vec![0.0; outputs],
            activation,
        }
    }

    pub fn new(weights: DenseMatrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::DimensionMismatch {
                context: "DenseLayer bias",
                expected: weights.rows(),
                actual: bias.len(),
            });
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    /// `W·x + b`, before the activation.
    pub fn pre_activation(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut z = self.weights.matvec(input)?;
        for (v, b) in z.iter_mut().zip(&self.bias) {
            *v += b;
        }
        Ok(z)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut z = self.pre_activation(input)?;
        self.activation.apply(&mut z);
        Ok(z)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.is_finite() && self.bias.iter().all(|b| b.is_finite())
    }
}
