use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::{derive, streams};
use crate::{Error, Result};

/// Disjoint seen/unseen label lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZslSplit {
    pub seen: Vec<String>,
    pub unseen: Vec<String>,
    pub seed: u64,
}

/// Shuffles `labels` with `seed`; the first `n_seen` become seen, the next
/// `n_unseen` unseen.
pub fn make_split(labels: &[String], n_seen: usize, n_unseen: usize, seed: u64) -> Result<ZslSplit> {
    if n_seen == 0 || n_unseen == 0 {
        return Err(Error::InvalidArgument("seen and unseen sets must be non-empty".into()));
    }
    if n_seen + n_unseen > labels.len() {
        return Err(Error::InvalidArgument(format!(
            "split {n_seen}/{n_unseen} needs {} labels, only {} available",
            n_seen + n_unseen,
            labels.len()
        )));
    }
    let mut shuffled = labels.to_vec();
    shuffled.shuffle(&mut derive(seed, streams::SPLIT));
    let unseen = shuffled[n_seen..n_seen + n_unseen].to_vec();
    shuffled.truncate(n_seen);
    Ok(ZslSplit {
        seen: shuffled,
        unseen,
        seed,
    })
}
