//! Zero-shot and few-shot hashtag rankers.
//!
//! All three methods score a tweet against a candidate label set that was never
//! (or barely) seen in training, using each label's word-embedding vector as its
//! attribute description:
//!
//! - [`conse`]: probability-weighted centroid of seen-label vectors, ranked by cosine.
//! - [`eszsl`]: bilinear compatibility `xᵀ·W·a` with `W` in closed form.
//! - [`dem`]: a ReLU layer mapping label vectors into feature space, ranked by distance.
//!
//! Every ranking breaks ties by the order of the candidate list.

pub mod conse;
pub mod dem;
pub mod eszsl;
mod fsl;
mod model;
mod split;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::{label_embeddings, EmbeddingMatrix, Vocabulary};
use crate::numeric::DenseMatrix;
use crate::{Error, Result};

pub use conse::{conse_embed, conse_rank};
pub use dem::{dem_fit, dem_fit_indexed, dem_loss_and_gradient, dem_rank, DemModel};
pub use eszsl::{eszsl_fit, eszsl_fit_features, eszsl_rank, EszslModel};
pub use fsl::{few_shot_indices, fsl_augment, FewShotAugmentation};
pub use model::{recommend, Recommendation, ZslModel};
pub use split::{make_split, ZslSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZslMethod {
    Conse,
    Eszsl,
    Dem,
}

impl ZslMethod {
    pub const ALL: [ZslMethod; 3] = [ZslMethod::Conse, ZslMethod::Eszsl, ZslMethod::Dem];

    pub fn as_str(self) -> &'static str {
        match self {
            ZslMethod::Conse => "conse",
            ZslMethod::Eszsl => "eszsl",
            ZslMethod::Dem => "dem",
        }
    }

    /// Name as printed in result tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ZslMethod::Conse => "ConSE",
            ZslMethod::Eszsl => "ESZSL",
            ZslMethod::Dem => "DEM",
        }
    }
}

impl fmt::Display for ZslMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ZslMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conse" => Ok(ZslMethod::Conse),
            "eszsl" => Ok(ZslMethod::Eszsl),
            "dem" => Ok(ZslMethod::Dem),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown method {other:?} (expected conse, eszsl or dem)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedLabel {
    pub label: String,
    pub score: f64,
}

/// Labels ordered best first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prediction {
    pub ranked: Vec<RankedLabel>,
}

impl Prediction {
    /// Sorts by descending score; equal scores keep the order of `labels`.
    pub fn from_scores(labels: &[String], scores: &[f64]) -> Self {
        debug_assert_eq!(labels.len(), scores.len());
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
        Self {
            ranked: order
                .into_iter()
                .map(|i| RankedLabel {
                    label: labels[i].clone(),
                    score: scores[i],
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn top(&self) -> Option<&str> {
        self.ranked.first().map(|r| r.label.as_str())
    }

    pub fn labels(&self) -> Vec<&str> {
        self.ranked.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn truncate(&mut self, k: usize) {
        self.ranked.truncate(k);
    }
}

/// One attribute vector per label (the columns of `𝒜`), stored row-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeMatrix {
    labels: Vec<String>,
    vectors: DenseMatrix,
}

impl AttributeMatrix {
    pub fn new(labels: Vec<String>, vectors: &[Vec<f64>]) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                context: "AttributeMatrix labels",
                expected: labels.len(),
                actual: vectors.len(),
            });
        }
        let vectors = DenseMatrix::from_rows(vectors)?;
        if !vectors.is_finite() {
            return Err(Error::NonFinite("attribute vectors".into()));
        }
        Ok(Self { labels, vectors })
    }

    /// Looks up `#label` for every label in the embedding vocabulary.
    pub fn from_embedding<S: AsRef<str>>(labels: &[S], vocab: &Vocabulary, emb: &EmbeddingMatrix) -> Result<Self> {
        let vectors = label_embeddings(labels, vocab, emb)?;
        Self::new(labels.iter().map(|l| String::from(l.as_ref())).collect(), &vectors)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Attribute dimension `s`.
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `s × n` matrix with one column per label.
    pub fn as_columns(&self) -> DenseMatrix {
        self.vectors.transpose()
    }

    /// The rows for `labels`, in that order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mut missing = Vec::new();
        let mut rows = Vec::with_capacity(labels.len());
        for l in labels {
            match self.index_of(l.as_ref()) {
                Some(i) => rows.push(self.vector(i).to_vec()),
                None => missing.push(String::from(l.as_ref())),
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingLabels(missing));
        }
        Self::new(labels.iter().map(|l| String::from(l.as_ref())).collect(), &rows)
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}
