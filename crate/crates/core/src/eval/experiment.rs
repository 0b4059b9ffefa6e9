//! Cross-validated supervised runs and seen/unseen zero-/few-shot sweeps.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::hits::{flat_hit_at_k, HitReport, DEFAULT_KS};
use super::kfold::stratified_kfold;
use super::metrics::{accuracy, classification_metrics, Averaging, MetricsReport};
use crate::embedding::{mean_pool, EmbeddingMatrix, Vocabulary};
use crate::ingest::Dataset;
use crate::supervised::{train_baseline_on_features, FeatureExtractor, TrainSpec};
use crate::zsl::{
    dem_fit_indexed, eszsl_fit_features, few_shot_indices, make_split, AttributeMatrix, ZslMethod, ZslModel,
};
use crate::{Error, Result};

/// A dataset with every example already mean-pooled.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledData {
    pub inputs: Vec<Vec<f64>>,
    /// Indices into `label_set`.
    pub labels: Vec<usize>,
    pub label_set: Vec<String>,
}

impl PooledData {
    pub fn from_dataset(dataset: &Dataset, vocab: &Vocabulary, emb: &EmbeddingMatrix) -> Self {
        Self {
            inputs: dataset
                .examples
                .iter()
                .map(|e| mean_pool(&e.tokens, vocab, emb).vector)
                .collect(),
            labels: dataset.labels(),
            label_set: dataset.label_set.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                context: "pooled labels",
                expected: self.inputs.len(),
                actual: self.labels.len(),
            });
        }
        if self.is_empty() {
            return Err(Error::NoExamples);
        }
        if let Some(&l) = self.labels.iter().find(|&&l| l >= self.label_set.len()) {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: self.label_set.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupervisedConfig {
    pub folds: usize,
    pub seed: u64,
    pub averaging: Averaging,
    pub train: TrainSpec,
}

impl Default for SupervisedConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            seed: 1,
            averaging: Averaging::Micro,
            train: TrainSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldCell {
    pub fold: usize,
    pub train_examples: usize,
    pub test_examples: usize,
    pub train_accuracy: f64,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedReport {
    pub experiment: String,
    pub config: SupervisedConfig,
    pub cells: Vec<FoldCell>,
    pub mean: MetricsReport,
}

/// Stratified k-fold: trains the baseline on each training part and scores it
/// on the held-out fold.
pub fn run_supervised_experiment(data: &PooledData, config: &SupervisedConfig) -> Result<SupervisedReport> {
    data.validate()?;
    let names: Vec<&str> = data.labels.iter().map(|&l| data.label_set[l].as_str()).collect();
    let folds = stratified_kfold(&names, config.folds, config.seed)?;
    let mut cells = Vec::with_capacity(folds.len());
    for (i, fold) in folds.iter().enumerate() {
        let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
            idx.iter().map(|&j| (data.inputs[j].clone(), data.labels[j])).unzip()
        };
        let (train_x, train_y) = pick(&fold.train);
        let (test_x, test_y) = pick(&fold.test);
        let model = train_baseline_on_features(&train_x, &train_y, data.label_set.clone(), &config.train)?;
        let predict = |xs: &[Vec<f64>]| xs.iter().map(|x| model.predict_pooled(x)).collect::<Result<Vec<_>>>();
        let train_accuracy = accuracy(&train_y, &predict(&train_x)?);
        let metrics = classification_metrics(&test_y, &predict(&test_x)?, config.averaging)?;
        log::info!("fold {}/{}: accuracy {:.4}", i + 1, folds.len(), metrics.accuracy);
        cells.push(FoldCell {
            fold: i,
            train_examples: train_x.len(),
            test_examples: test_x.len(),
            train_accuracy,
            metrics,
        });
    }
    let per_fold: Vec<MetricsReport> = cells.iter().map(|c| c.metrics).collect();
    Ok(SupervisedReport {
        experiment: "supervised".into(),
        config: config.clone(),
        mean: MetricsReport::mean(&per_fold)?,
        cells,
    })
}

/// Numbers of seen and unseen labels, written `seen/unseen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SplitSize {
    pub seen: usize,
    pub unseen: usize,
}

impl SplitSize {
    pub const TABLE: [SplitSize; 3] = [
        SplitSize { seen: 40, unseen: 10 },
        SplitSize { seen: 30, unseen: 20 },
        SplitSize { seen: 25, unseen: 25 },
    ];
}

impl fmt::Display for SplitSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.seen, self.unseen)
    }
}

impl FromStr for SplitSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("split {s:?} is not of the form SEEN/UNSEEN"));
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        Ok(SplitSize {
            seen: a.trim().parse().map_err(|_| bad())?,
            unseen: b.trim().parse().map_err(|_| bad())?,
        })
    }
}

impl From<SplitSize> for String {
    fn from(s: SplitSize) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SplitSize {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Zsl,
    Fsl,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Zsl => "zsl",
            Setting::Fsl => "fsl",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZslConfig {
    pub splits: Vec<SplitSize>,
    pub methods: Vec<ZslMethod>,
    pub setting: Setting,
    /// Few-shot examples per unseen label are drawn uniformly from this range.
    pub shots_min: usize,
    pub shots_max: usize,
    pub seeds: Vec<u64>,
    pub ks: Vec<usize>,
    /// Feature extractor training; its seed is replaced by each cell's seed.
    pub train: TrainSpec,
    /// DEM mapper training; its seed is replaced by each cell's seed.
    pub dem: TrainSpec,
    pub gamma: f64,
    /// Seen labels mixed by ConSE; all of them when unset.
    pub conse_top_t: Option<usize>,
}

impl Default for ZslConfig {
    fn default() -> Self {
        Self {
            splits: SplitSize::TABLE.to_vec(),
            methods: ZslMethod::ALL.to_vec(),
            setting: Setting::Zsl,
            shots_min: 5,
            shots_max: 10,
            seeds: alloc::vec![1, 2, 3, 4, 5],
            ks: DEFAULT_KS.to_vec(),
            train: TrainSpec::default(),
            dem: TrainSpec::default(),
            gamma: 1.0,
            conse_top_t: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZslCell {
    pub split: SplitSize,
    pub method: ZslMethod,
    pub setting: Setting,
    pub seed: u64,
    pub test_examples: usize,
    pub metrics: HitReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZslSummaryRow {
    pub split: SplitSize,
    pub method: ZslMethod,
    pub setting: Setting,
    pub seeds: usize,
    pub metrics: HitReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZslReport {
    pub experiment: String,
    pub config: ZslConfig,
    pub cells: Vec<ZslCell>,
    /// Per (split, method): hit rates averaged over seeds.
    pub summary: Vec<ZslSummaryRow>,
}

impl ZslReport {
    pub fn summary_for(&self, split: SplitSize, method: ZslMethod) -> Option<&ZslSummaryRow> {
        self.summary.iter().find(|r| r.split == split && r.method == method)
    }
}

/// For each split and seed: draw seen/unseen labels, train the feature
/// extractor on seen examples (plus the few-shot draws in the `fsl` setting),
/// fit every requested head and score Flat-Hit@K on the remaining unseen-label
/// examples against the unseen candidates only.
///
/// `attributes` must cover every label of `data`.
pub fn run_zsl_experiment(data: &PooledData, attributes: &AttributeMatrix, config: &ZslConfig) -> Result<ZslReport> {
    data.validate()?;
    validate_zsl_config(config)?;
    let missing: Vec<String> = data
        .label_set
        .iter()
        .filter(|l| attributes.index_of(l).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingLabels(missing));
    }

    let mut cells = Vec::new();
    for &split in &config.splits {
        for &seed in &config.seeds {
            cells.extend(run_cell(data, attributes, config, split, seed)?);
        }
    }

    let mut groups: BTreeMap<(SplitSize, ZslMethod), Vec<HitReport>> = BTreeMap::new();
    for c in &cells {
        groups.entry((c.split, c.method)).or_default().push(c.metrics.clone());
    }
    let mut summary = Vec::new();
    for &split in &config.splits {
        for &method in &config.methods {
            if let Some(reports) = groups.get(&(split, method)) {
                summary.push(ZslSummaryRow {
                    split,
                    method,
                    setting: config.setting,
                    seeds: reports.len(),
                    metrics: HitReport::mean(reports)?,
                });
            }
        }
    }
    Ok(ZslReport {
        experiment: config.setting.to_string(),
        config: config.clone(),
        cells,
        summary,
    })
}

fn validate_zsl_config(config: &ZslConfig) -> Result<()> {
    if config.splits.is_empty() || config.methods.is_empty() || config.seeds.is_empty() || config.ks.is_empty() {
        return Err(Error::InvalidArgument("splits, methods, seeds and ks must be non-empty".into()));
    }
    if config.shots_min > config.shots_max {
        return Err(Error::InvalidArgument(format!(
            "shots range {}-{} is empty",
            config.shots_min, config.shots_max
        )));
    }
    config.train.validate()?;
    config.dem.validate()
}

fn run_cell(
    data: &PooledData,
    attributes: &AttributeMatrix,
    config: &ZslConfig,
    size: SplitSize,
    seed: u64,
) -> Result<Vec<ZslCell>> {
    let split = make_split(&data.label_set, size.seen, size.unseen, seed)?;
    let position = |names: &[String]| -> BTreeMap<usize, usize> {
        names
            .iter()
            .enumerate()
            .filter_map(|(i, n)| data.label_set.iter().position(|l| l == n).map(|g| (g, i)))
            .collect()
    };
    let seen_of = position(&split.seen);
    let unseen_of = position(&split.unseen);

    let mut train_idx = Vec::new();
    let mut train_labels = Vec::new();
    let mut pool_idx = Vec::new();
    let mut pool_labels = Vec::new();
    for (i, l) in data.labels.iter().enumerate() {
        if let Some(&s) = seen_of.get(l) {
            train_idx.push(i);
            train_labels.push(s);
        } else if let Some(&u) = unseen_of.get(l) {
            pool_idx.push(i);
            pool_labels.push(u);
        }
    }

    let mut label_order = split.seen.clone();
    let mut shot = alloc::vec![false; pool_idx.len()];
    if config.setting == Setting::Fsl {
        let picks = few_shot_indices(&pool_labels, &split.unseen, config.shots_min, config.shots_max, seed)?;
        for (u, picked) in picks.into_iter().enumerate() {
            if picked.is_empty() {
                continue;
            }
            let new_label = label_order.len();
            label_order.push(split.unseen[u].clone());
            for j in picked {
                shot[j] = true;
                train_idx.push(pool_idx[j]);
                train_labels.push(new_label);
            }
        }
    }
    let test: Vec<(usize, usize)> = pool_idx
        .iter()
        .zip(&pool_labels)
        .zip(&shot)
        .filter(|(_, &s)| !s)
        .map(|((&i, &u), _)| (i, u))
        .collect();
    if test.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "split {size} seed {seed} leaves no unseen-label test examples"
        )));
    }

    let train_x: Vec<Vec<f64>> = train_idx.iter().map(|&i| data.inputs[i].clone()).collect();
    let spec = TrainSpec {
        seed,
        ..config.train.clone()
    };
    let classifier = train_baseline_on_features(&train_x, &train_labels, label_order.clone(), &spec)?;
    let train_features = train_x
        .iter()
        .map(|x| classifier.features(x))
        .collect::<Result<Vec<_>>>()?;
    let test_features = test
        .iter()
        .map(|&(i, _)| classifier.features(&data.inputs[i]))
        .collect::<Result<Vec<_>>>()?;

    let seen_attrs = attributes.select(&label_order)?;
    let candidates = attributes.select(&split.unseen)?;
    let mut model = ZslModel::new(classifier, seen_attrs)?;
    if let Some(t) = config.conse_top_t {
        model.conse_top_t = t.min(label_order.len());
    }
    if config.methods.contains(&ZslMethod::Eszsl) {
        model.eszsl = Some(eszsl_fit_features(&train_features, &train_labels, &model.seen, config.gamma)?);
    }
    if config.methods.contains(&ZslMethod::Dem) {
        let dem_spec = TrainSpec {
            seed,
            ..config.dem.clone()
        };
        model.dem = Some(dem_fit_indexed(&train_features, &train_labels, &model.seen, &dem_spec)?);
    }

    let truth: Vec<&str> = test.iter().map(|&(_, u)| split.unseen[u].as_str()).collect();
    let mut cells = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let rankings = test_features
            .iter()
            .map(|f| {
                model
                    .rank_features(method, f, &candidates)
                    .map(|p| p.ranked.into_iter().map(|r| r.label).collect::<Vec<String>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let rankings: Vec<Vec<&str>> = rankings.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let metrics = flat_hit_at_k(&rankings, &truth, &config.ks)?;
        log::info!(
            "{} {size} {method} seed {seed}: hit@1 {:.1}",
            config.setting,
            metrics.hit_at.values().next().copied().unwrap_or(0.0)
        );
        cells.push(ZslCell {
            split: size,
            method,
            setting: config.setting,
            seed,
            test_examples: test.len(),
            metrics,
        });
    }
    Ok(cells)
}
