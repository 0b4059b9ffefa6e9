use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{conse_embed, conse_rank, dem_rank, eszsl_rank, AttributeMatrix, DemModel, EszslModel, Prediction, ZslMethod};
use crate::embedding::{mean_pool, EmbeddingMatrix, Vocabulary};
use crate::supervised::{BaselineClassifier, FeatureExtractor};
use crate::{Error, Result};

/// A trained feature extractor plus whichever zero-shot heads were fitted on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZslModel {
    pub classifier: BaselineClassifier,
    /// Attribute vectors of the classifier's labels, in `label_order`.
    pub seen: AttributeMatrix,
    /// Number of top seen labels mixed by ConSE.
    pub conse_top_t: usize,
    pub eszsl: Option<EszslModel>,
    pub dem: Option<DemModel>,
}

impl ZslModel {
    pub fn new(classifier: BaselineClassifier, seen: AttributeMatrix) -> Result<Self> {
        if seen.labels() != classifier.label_order.as_slice() {
            return Err(Error::InvalidArgument(
                "attribute labels must match the classifier's label order".into(),
            ));
        }
        Ok(Self {
            conse_top_t: seen.len(),
            classifier,
            seen,
            eszsl: None,
            dem: None,
        })
    }

    pub fn methods(&self) -> Vec<ZslMethod> {
        let mut m = alloc::vec![ZslMethod::Conse];
        if self.eszsl.is_some() {
            m.push(ZslMethod::Eszsl);
        }
        if self.dem.is_some() {
            m.push(ZslMethod::Dem);
        }
        m
    }

    /// Ranks `candidates` for one pooled tweet.
    pub fn rank_pooled(&self, method: ZslMethod, pooled: &[f64], candidates: &AttributeMatrix) -> Result<Prediction> {
        let features = self.classifier.features(pooled)?;
        self.rank_features(method, &features, candidates)
    }

    /// Ranks `candidates` for an already extracted tweet feature.
    pub fn rank_features(&self, method: ZslMethod, features: &[f64], candidates: &AttributeMatrix) -> Result<Prediction> {
        let missing = |m: ZslMethod| Error::InvalidArgument(format!("model has no {m} head"));
        match method {
            ZslMethod::Conse => {
                let probs = self.classifier.proba_from_features(features)?;
                conse_rank(&conse_embed(&probs, &self.seen, self.conse_top_t)?, candidates)
            }
            ZslMethod::Eszsl => eszsl_rank(self.eszsl.as_ref().ok_or_else(|| missing(method))?, features, candidates),
            ZslMethod::Dem => dem_rank(self.dem.as_ref().ok_or_else(|| missing(method))?, features, candidates),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub prediction: Prediction,
    /// No token of the text was in the embedding vocabulary; the ranking comes
    /// from the zero feature.
    pub all_oov: bool,
}

/// Cleaned tokens → pooled embedding → features → ranking, cut to the top `k`.
pub fn recommend<S: AsRef<str>>(
    method: ZslMethod,
    model: &ZslModel,
    tokens: &[S],
    vocab: &Vocabulary,
    emb: &EmbeddingMatrix,
    candidates: &AttributeMatrix,
    k: usize,
) -> Result<Recommendation> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate labels".into()));
    }
    let pooled = mean_pool(tokens, vocab, emb);
    if pooled.all_oov() {
        log::warn!("no token of the input is in the embedding vocabulary");
    }
    let mut prediction = model.rank_pooled(method, &pooled.vector, candidates)?;
    prediction.truncate(k);
    Ok(Recommendation {
        prediction,
        all_oov: pooled.all_oov(),
    })
}
