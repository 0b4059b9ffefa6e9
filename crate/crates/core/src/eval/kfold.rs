use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt::Display;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::{derive, streams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    /// Ascending example indices.
    pub train: Vec<usize>,
    /// Ascending example indices.
    pub test: Vec<usize>,
}

/// Splits example indices into `k` folds with every label spread as evenly as
/// possible. Each label's members are shuffled, then dealt round-robin; the
/// dealing position carries over from one label to the next so remainders do
/// not pile up in the first folds.
pub fn stratified_kfold<L: Ord + Display>(labels: &[L], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidArgument(alloc::format!("k-fold needs k >= 2, got {k}")));
    }
    let mut groups: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    if let Some((label, members)) = groups.iter().find(|(_, m)| m.len() < k) {
        return Err(Error::InsufficientExamples {
            label: label.to_string(),
            available: members.len(),
            required: k,
        });
    }
    let mut rng = derive(seed, streams::FOLDS);
    let mut assignment = alloc::vec![0usize; labels.len()];
    let mut next = 0usize;
    for members in groups.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let (test, train) = (0..labels.len()).partition(|&i| assignment[i] == f);
            Fold { train, test }
        })
        .collect())
}
