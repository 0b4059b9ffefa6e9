//! Convex combination of semantic embeddings.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{check_dim, AttributeMatrix, Prediction};
use crate::embedding::cosine;
use crate::{Error, Result};

const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// `f(x) = (1/Z)·Σ_t p_t·s_t` over the `top_t` most probable seen labels, with
/// `Z` the sum of those probabilities. Ties in probability go to the earlier label.
pub fn conse_embed(probs: &[f64], seen: &AttributeMatrix, top_t: usize) -> Result<Vec<f64>> {
    check_dim("conse_embed probabilities", seen.len(), probs.len())?;
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::InvalidArgument(format!("probabilities sum to {sum}, not 1")));
    }
    if top_t == 0 || top_t > seen.len() {
        return Err(Error::InvalidArgument(format!(
            "T = {top_t} outside [1, {}]",
            seen.len()
        )));
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).unwrap_or(Ordering::Equal));
    let top = &order[..top_t];
    let z: f64 = top.iter().map(|&i| probs[i]).sum();
    if !(z > 0.0) {
        return Err(Error::InvalidArgument("top-T probabilities sum to zero".into()));
    }
    let mut out = vec![0.0; seen.dim()];
    for &i in top {
        let w = probs[i] / z;
        for (o, s) in out.iter_mut().zip(seen.vector(i)) {
            *o += w * s;
        }
    }
    Ok(out)
}

/// Ranks candidates by cosine between `embedded` and each label vector.
pub fn conse_rank(embedded: &[f64], candidates: &AttributeMatrix) -> Result<Prediction> {
    check_dim("conse_rank", candidates.dim(), embedded.len())?;
    let scores = (0..candidates.len())
        .map(|i| cosine(embedded, candidates.vector(i)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Prediction::from_scores(candidates.labels(), &scores))
}
