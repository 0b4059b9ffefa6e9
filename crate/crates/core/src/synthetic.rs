//! Seeded synthetic corpora with known structure, for tests and demos.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::embedding::{hashtag_token, EmbeddingMatrix, Vocabulary};
use crate::eval::PooledData;
use crate::ingest::{Dataset, Example};
use crate::numeric::DenseMatrix;
use crate::rng::seeded;
use crate::zsl::AttributeMatrix;

fn normal(rng: &mut crate::rng::Rng) -> f64 {
    StandardNormal.sample(rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub labels: usize,
    pub per_label: usize,
    pub dim: usize,
    /// Per-coordinate standard deviation of every cluster.
    pub spread: f64,
    /// Distance between any two centroids, in units of `spread`.
    pub separation: f64,
    pub seed: u64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            labels: 4,
            per_label: 50,
            dim: 16,
            spread: 1.0,
            separation: 10.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClusters {
    pub data: PooledData,
    pub centroids: Vec<Vec<f64>>,
}

/// Isotropic Gaussian clusters around mutually equidistant centroids placed on
/// scaled basis vectors. Requires `dim >= labels`.
pub fn gaussian_clusters(spec: &GaussianSpec) -> GaussianClusters {
    assert!(spec.dim >= spec.labels, "need dim >= labels for equidistant centroids");
    let mut rng = seeded(spec.seed);
    let offset = spec.separation * spec.spread / core::f64::consts::SQRT_2;
    let centroids: Vec<Vec<f64>> = (0..spec.labels)
        .map(|l| (0..spec.dim).map(|j| if j == l { offset } else { 0.0 }).collect())
        .collect();
    let noise = Normal::new(0.0, spec.spread).expect("spread must be finite and non-negative");
    let mut inputs = Vec::with_capacity(spec.labels * spec.per_label);
    let mut labels = Vec::with_capacity(inputs.capacity());
    for (l, c) in centroids.iter().enumerate() {
        for _ in 0..spec.per_label {
            inputs.push(c.iter().map(|v| v + noise.sample(&mut rng)).collect());
            labels.push(l);
        }
    }
    GaussianClusters {
        data: PooledData {
            inputs,
            labels,
            label_set: (0..spec.labels).map(|l| format!("class{l}")).collect(),
        },
        centroids,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredSpec {
    pub labels: usize,
    pub per_label: usize,
    /// Embedding dimension.
    pub dim: usize,
    /// Rank of the subspace the label centroids are drawn from.
    pub latent: usize,
    pub words_per_label: usize,
    pub tweet_len: usize,
    /// Standard deviation of a topic word around its label centroid.
    pub word_noise: f64,
    pub seed: u64,
}

impl Default for ClusteredSpec {
    fn default() -> Self {
        Self {
            labels: 12,
            per_label: 100,
            dim: 32,
            latent: 6,
            words_per_label: 10,
            tweet_len: 6,
            word_noise: 1.0,
            seed: 1,
        }
    }
}

/// Topical tweets over a word embedding whose hashtag vectors are the label
/// centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredCorpus {
    pub vocab: Vocabulary,
    pub embeddings: EmbeddingMatrix,
    pub dataset: Dataset,
    pub pooled: PooledData,
    /// Hashtag vector of every label, in label order.
    pub attributes: AttributeMatrix,
}

pub fn topic_label(l: usize) -> String {
    format!("topic{l:02}")
}

fn topic_word(l: usize, w: usize) -> String {
    format!("t{l:02}w{w:02}")
}

/// Each label owns `words_per_label` words scattered around its centroid, with
/// the scatter centered so the words average exactly to the centroid. A tweet
/// is `tweet_len` words drawn from its label's words. Centroids are random
/// points of a `latent`-dimensional subspace, so labels relate linearly to one
/// another, which is what lets a model trained on some labels say something
/// about the rest.
pub fn clustered_corpus(spec: &ClusteredSpec) -> ClusteredCorpus {
    assert!(spec.labels >= 2 && spec.words_per_label >= 1 && spec.tweet_len >= 1 && spec.latent >= 1);
    let mut rng = seeded(spec.seed);
    let basis_scale = 1.0 / (spec.latent as f64).sqrt();
    let basis: Vec<Vec<f64>> = (0..spec.dim)
        .map(|_| (0..spec.latent).map(|_| normal(&mut rng) * basis_scale).collect())
        .collect();
    let centroids: Vec<Vec<f64>> = (0..spec.labels)
        .map(|_| {
            let z: Vec<f64> = (0..spec.latent).map(|_| normal(&mut rng)).collect();
            basis.iter().map(|row| row.iter().zip(&z).map(|(b, z)| b * z).sum()).collect()
        })
        .collect();

    let mut entries: Vec<(String, u64)> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (l, c) in centroids.iter().enumerate() {
        let mut scatter: Vec<Vec<f64>> = (0..spec.words_per_label)
            .map(|_| (0..spec.dim).map(|_| normal(&mut rng) * spec.word_noise).collect())
            .collect();
        for j in 0..spec.dim {
            let mean = scatter.iter().map(|s| s[j]).sum::<f64>() / spec.words_per_label as f64;
            scatter.iter_mut().for_each(|s| s[j] -= mean);
        }
        for (w, s) in scatter.into_iter().enumerate() {
            entries.push((topic_word(l, w), 1));
            rows.push(c.iter().zip(s).map(|(c, s)| c + s).collect());
        }
        entries.push((hashtag_token(&topic_label(l)), 1));
        rows.push(c.clone());
    }

    let mut examples = Vec::with_capacity(spec.labels * spec.per_label);
    let words: Vec<usize> = (0..spec.words_per_label).collect();
    for l in 0..spec.labels {
        for _ in 0..spec.per_label {
            let tokens = (0..spec.tweet_len)
                .map(|_| topic_word(l, *words.choose(&mut rng).expect("non-empty")))
                .collect();
            examples.push(Example { tokens, label: l });
        }
    }
    for e in &examples {
        for t in &e.tokens {
            let l = e.label;
            let w: usize = t[4..].parse().expect("topic word suffix");
            entries[l * (spec.words_per_label + 1) + w].1 += 1;
        }
    }

    let vocab = Vocabulary::from_entries(entries).expect("distinct generated tokens");
    let embeddings =
        EmbeddingMatrix::new(DenseMatrix::from_rows(&rows).expect("uniform rows")).expect("finite embedding");
    let label_set: Vec<String> = (0..spec.labels).map(topic_label).collect();
    let dataset = Dataset { examples, label_set };
    let pooled = PooledData::from_dataset(&dataset, &vocab, &embeddings);
    let attributes =
        AttributeMatrix::from_embedding(&dataset.label_set, &vocab, &embeddings).expect("every label has a hashtag");
    ClusteredCorpus {
        vocab,
        embeddings,
        dataset,
        pooled,
        attributes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynonymCorpus {
    pub sentences: Vec<Vec<String>>,
    /// Two tokens that occur in exactly the same contexts.
    pub pair: (String, String),
    /// Tokens that never share a sentence with either member of the pair.
    pub unrelated: Vec<String>,
}

/// Sentences from `groups` disjoint topics of `group_words` words each. Every
/// sentence of topic 0 contains one of `alpha` or `beta`, chosen by a fair coin,
/// so the two share one context distribution.
pub fn synonym_corpus(groups: usize, group_words: usize, sentences: usize, sentence_len: usize, seed: u64) -> SynonymCorpus {
    assert!(groups >= 2 && group_words >= 1 && sentence_len >= 2);
    let mut rng = seeded(seed);
    let word = |g: usize, w: usize| format!("g{g}w{w}");
    let mut out = Vec::with_capacity(sentences);
    for i in 0..sentences {
        let g = i % groups;
        let mut s: Vec<String> = (0..sentence_len)
            .map(|_| word(g, rng.random_range(0..group_words)))
            .collect();
        if g == 0 {
            let slot = rng.random_range(0..sentence_len);
            s[slot] = String::from(if rng.random_bool(0.5) { "alpha" } else { "beta" });
        }
        out.push(s);
    }
    let unrelated = (1..groups).flat_map(|g| (0..group_words).map(move |w| (g, w))).map(|(g, w)| word(g, w)).collect();
    SynonymCorpus {
        sentences: out,
        pair: ("alpha".into(), "beta".into()),
        unrelated,
    }
}

/// Fraction of points whose nearest centroid is their own.
pub fn nearest_centroid_accuracy(data: &PooledData, centroids: &[Vec<f64>]) -> f64 {
    let correct = data
        .inputs
        .iter()
        .zip(&data.labels)
        .filter(|(x, &l)| {
            let d: Vec<f64> = centroids.iter().map(|c| crate::numeric::euclidean_distance(x, c)).collect();
            (0..d.len()).all(|k| k == l || d[k] > d[l])
        })
        .count();
    correct as f64 / data.inputs.len().max(1) as f64
}
