use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_KS: [usize; 3] = [1, 2, 5];

/// Flat-Hit@K percentages keyed by K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitReport {
    pub hit_at: BTreeMap<usize, f64>,
}

impl HitReport {
    pub fn get(&self, k: usize) -> Option<f64> {
        self.hit_at.get(&k).copied()
    }

    /// Key-wise mean over reports; every report must carry the same Ks.
    pub fn mean(reports: &[HitReport]) -> Result<HitReport> {
        let first = reports.first().ok_or_else(|| Error::InvalidArgument("no reports to average".into()))?;
        let mut hit_at = BTreeMap::new();
        for &k in first.hit_at.keys() {
            let mut sum = 0.0;
            for r in reports {
                sum += r
                    .get(k)
                    .ok_or_else(|| Error::InvalidArgument(alloc::format!("report lacks hit@{k}")))?;
            }
            hit_at.insert(k, sum / reports.len() as f64);
        }
        Ok(HitReport { hit_at })
    }
}

/// Percentage of examples whose true label is among the first K entries of its
/// ranking. A K larger than a ranking is clamped to the ranking's length, which
/// makes it a guaranteed hit for any label that is ranked at all.
pub fn flat_hit_at_k<L: PartialEq, R: AsRef<[L]>>(rankings: &[R], y_true: &[L], ks: &[usize]) -> Result<HitReport> {
    if rankings.len() != y_true.len() {
        return Err(Error::DimensionMismatch {
            context: "rankings",
            expected: y_true.len(),
            actual: rankings.len(),
        });
    }
    if rankings.is_empty() {
        return Err(Error::InvalidArgument("hit rate needs at least one example".into()));
    }
    if ks.contains(&0) {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let positions: Vec<Option<usize>> = rankings
        .iter()
        .zip(y_true)
        .map(|(r, t)| r.as_ref().iter().position(|l| l == t))
        .collect();
    let widest = rankings.iter().map(|r| r.as_ref().len()).max().unwrap_or(0);
    let mut hit_at = BTreeMap::new();
    for &k in ks {
        if k > widest {
            log::warn!("hit@{k} exceeds the {widest} candidates; clamping");
        }
        let hits = positions
            .iter()
            .zip(rankings)
            .filter(|(pos, r)| matches!(pos, Some(p) if *p < k.min(r.as_ref().len())))
            .count();
        hit_at.insert(k, 100.0 * hits as f64 / rankings.len() as f64);
    }
    Ok(HitReport { hit_at })
}
