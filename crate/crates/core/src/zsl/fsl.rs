use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;

use crate::ingest::{Dataset, Example};
use crate::rng::{derive, streams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FewShotAugmentation {
    pub dataset: Dataset,
    /// Indices into the unseen pool that were moved into training, ascending.
    pub used: Vec<usize>,
}

/// Appends `k ~ U{shots_min..=shots_max}` examples of every unseen label to
/// `train`, drawn without replacement from `unseen_pool`. Seen examples are kept
/// verbatim and first; unseen labels join the label set only if they received
/// at least one example.
pub fn fsl_augment(
    train: &Dataset,
    unseen_pool: &Dataset,
    shots_min: usize,
    shots_max: usize,
    seed: u64,
) -> Result<FewShotAugmentation> {
    if let Some(l) = unseen_pool.label_set.iter().find(|l| train.label_set.contains(l)) {
        return Err(Error::InvalidArgument(format!("label {l:?} is both seen and unseen")));
    }
    let pool_labels: Vec<usize> = unseen_pool.examples.iter().map(|e| e.label).collect();
    let picks = few_shot_indices(&pool_labels, &unseen_pool.label_set, shots_min, shots_max, seed)?;
    let mut dataset = train.clone();
    let mut used = Vec::new();
    for (label, picked) in picks.into_iter().enumerate() {
        if picked.is_empty() {
            continue;
        }
        let new_label = dataset.label_set.len();
        dataset.label_set.push(unseen_pool.label_set[label].clone());
        for &i in &picked {
            dataset.examples.push(Example {
                tokens: unseen_pool.examples[i].tokens.clone(),
                label: new_label,
            });
        }
        used.extend(picked);
    }
    used.sort_unstable();
    Ok(FewShotAugmentation { dataset, used })
}

/// Per label of `label_names`, the ascending pool indices drawn as shots.
pub fn few_shot_indices(
    pool_labels: &[usize],
    label_names: &[String],
    shots_min: usize,
    shots_max: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if shots_min > shots_max {
        return Err(Error::InvalidArgument(format!("shots range {shots_min}-{shots_max} is empty")));
    }
    let mut by_label: Vec<Vec<usize>> = (0..label_names.len()).map(|_| Vec::new()).collect();
    for (i, &l) in pool_labels.iter().enumerate() {
        by_label[l].push(i);
    }
    let mut rng = derive(seed, streams::FEW_SHOT);
    let mut picks = Vec::with_capacity(by_label.len());
    for (label, members) in by_label.iter().enumerate() {
        if members.len() < shots_min {
            return Err(Error::InsufficientExamples {
                label: label_names[label].clone(),
                available: members.len(),
                required: shots_min,
            });
        }
        let upper = shots_max.min(members.len());
        let k = if upper > shots_min {
            rng.random_range(shots_min..=upper)
        } else {
            shots_min
        };
        let mut picked: Vec<usize> = index::sample(&mut rng, members.len(), k)
            .into_iter()
            .map(|j| members[j])
            .collect();
        picked.sort_unstable();
        picks.push(picked);
    }
    Ok(picks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dataset(labels: &[&str], per_label: usize, tag: &str) -> Dataset {
        let mut examples = Vec::new();
        for (l, _) in labels.iter().enumerate() {
            for i in 0..per_label {
                examples.push(Example {
                    tokens: vec![format!("{tag}{l}_{i}")],
                    label: l,
                });
            }
        }
        Dataset {
            examples,
            label_set: labels.iter().map(|s| String::from(*s)).collect(),
        }
    }

    #[test]
    fn zero_shots_is_identity() {
        let train = dataset(&["a", "b"], 3, "s");
        let pool = dataset(&["c", "d"], 4, "u");
        let out = fsl_augment(&train, &pool, 0, 0, 1).unwrap();
        assert_eq!(out.dataset, train);
        assert!(out.used.is_empty());
    }

    #[test]
    fn exact_counts_and_seen_prefix() {
        let train = dataset(&["a", "b"], 3, "s");
        let unseen: Vec<String> = (0..20).map(|i| format!("u{i}")).collect();
        let names: Vec<&str> = unseen.iter().map(String::as_str).collect();
        let pool = dataset(&names, 12, "u");
        let out = fsl_augment(&train, &pool, 5, 5, 7).unwrap();
        assert_eq!(out.dataset.len(), train.len() + 100);
        assert_eq!(&out.dataset.examples[..train.len()], &train.examples[..]);
        assert!(out.dataset.examples[train.len()..].iter().all(|e| e.label >= 2));
        assert_eq!(out.used.len(), 100);

        let ranged = fsl_augment(&train, &pool, 5, 10, 7).unwrap();
        let appended = ranged.dataset.len() - train.len();
        assert!((100..=200).contains(&appended));
        assert_eq!(ranged, fsl_augment(&train, &pool, 5, 10, 7).unwrap());
        assert_ne!(ranged, fsl_augment(&train, &pool, 5, 10, 8).unwrap());
    }

    #[test]
    fn insufficient_pool_names_the_label() {
        let train = dataset(&["a"], 2, "s");
        let mut pool = dataset(&["c", "d"], 6, "u");
        pool.examples.retain(|e| e.label == 0 || e.tokens[0].ends_with("_0"));
        let err = fsl_augment(&train, &pool, 5, 10, 1).unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientExamples {
                label: "d".into(),
                available: 1,
                required: 5
            }
        );
    }
}
