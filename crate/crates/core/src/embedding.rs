//! Skip-gram word embeddings with negative sampling, and the lookups built on
//! them: mean pooling, cosine similarity and hashtag attribute vectors.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::numeric::{dot, DenseMatrix};
use crate::rng::{seeded, Rng};
use crate::{Error, Result};

/// Exponent applied to unigram counts for the noise distribution.
pub const NOISE_POWER: f64 = 0.75;

/// Token ↔ index map, ordered by descending frequency then lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from explicit `(token, count)` pairs, keeping their order.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Result<Self> {
        let mut vocab = Self::default();
        for (token, count) in entries {
            if count == 0 {
                return Err(Error::InvalidArgument(format!("token {token:?} has zero frequency")));
            }
            if vocab.index.insert(token.clone(), vocab.tokens.len()).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate token {token:?}")));
            }
            vocab.tokens.push(token);
            vocab.counts.push(count);
        }
        Ok(vocab)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Maps a sentence to indices, skipping out-of-vocabulary tokens.
    pub fn encode<S: AsRef<str>>(&self, sentence: &[S]) -> Vec<usize> {
        sentence.iter().filter_map(|t| self.get(t.as_ref())).collect()
    }
}

pub fn build_vocab<'a, I, S>(sentences: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a [S]>,
    S: AsRef<str> + 'a,
{
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for sentence in sentences {
        for token in sentence {
            *freq.entry(token.as_ref()).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(String, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c >= min_count.max(1))
        .map(|(t, c)| (t.to_owned(), c))
        .collect();
    // stable: lexicographic order survives among equal counts
    entries.sort_by(|a, b| b.1.cmp(&a.1));
    if entries.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Vocabulary::from_entries(entries)
}

/// Input (word) vectors, plus the context table when the matrix came out of training.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub input_vectors: DenseMatrix,
    pub output_vectors: Option<DenseMatrix>,
}

impl EmbeddingMatrix {
    pub fn new(input_vectors: DenseMatrix) -> Result<Self> {
        if !input_vectors.is_finite() {
            return Err(Error::NonFinite("embedding matrix".into()));
        }
        Ok(Self {
            input_vectors,
            output_vectors: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.input_vectors.cols()
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        self.input_vectors.row(index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: u64,
    pub seed: u64,
    pub subsample_threshold: Option<f64>,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dim: 150,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 1,
            seed: 1,
            subsample_threshold: None,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("sgns config: {what}")));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        Ok(())
    }
}

/// All `(center, context)` pairs with `0 < |i − j| ≤ window`, in scan order.
pub fn skipgram_pairs(sequence: &[usize], window: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, &center) in sequence.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(sequence.len().saturating_sub(1));
        for j in lo..=hi {
            if j != i {
                pairs.push((center, sequence[j]));
            }
        }
    }
    pairs
}

/// Draws token indices from the unigram distribution raised to [`NOISE_POWER`].
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    pub fn new(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut total = 0.0;
        for &c in counts {
            total += libm::pow(c as f64, NOISE_POWER);
            cumulative.push(total);
        }
        for c in cumulative.iter_mut() {
            *c /= total;
        }
        Ok(Self { cumulative })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -libm::log1p(libm::exp(-x))
    } else {
        x - libm::log1p(libm::exp(x))
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct SgnsModel {
    pub vocab: Vocabulary,
    pub embeddings: EmbeddingMatrix,
    /// Mean per-pair loss of each epoch, measured before each pair's update.
    pub epoch_losses: Vec<f64>,
}

/// Trains skip-gram with negative sampling over tokenized sentences.
pub fn train_sgns<S: AsRef<str>>(sentences: &[Vec<S>], config: &SgnsConfig) -> Result<SgnsModel> {
    config.validate()?;
    let vocab = build_vocab(sentences.iter().map(Vec::as_slice), config.min_count)?;
    let encoded: Vec<Vec<usize>> = sentences.iter().map(|s| vocab.encode(s)).collect();
    let (embeddings, epoch_losses) = train_sgns_encoded(&encoded, &vocab, config)?;
    Ok(SgnsModel {
        vocab,
        embeddings,
        epoch_losses,
    })
}

pub fn initial_embeddings(vocab_len: usize, dim: usize, rng: &mut Rng) -> EmbeddingMatrix {
    let bound = 0.5 / dim as f64;
    EmbeddingMatrix {
        input_vectors: DenseMatrix::from_fn(vocab_len, dim, |_, _| rng.random_range(-bound..bound)),
        output_vectors: Some(DenseMatrix::zeros(vocab_len, dim)),
    }
}

/// The training loop over already-encoded sentences.
pub fn train_sgns_encoded(
    sentences: &[Vec<usize>],
    vocab: &Vocabulary,
    config: &SgnsConfig,
) -> Result<(EmbeddingMatrix, Vec<f64>)> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut rng = seeded(config.seed);
    let mut emb = initial_embeddings(vocab.len(), config.dim, &mut rng);
    let sampler = NegativeSampler::new(vocab.counts())?;
    let total_count: u64 = vocab.counts().iter().sum();

    let keep_probability = |token: usize| -> f64 {
        match config.subsample_threshold {
            Some(t) if t > 0.0 => {
                let f = vocab.count(token) as f64;
                let scaled = t * total_count as f64;
                ((libm::sqrt(f / scaled) + 1.0) * scaled / f).min(1.0)
            }
            _ => 1.0,
        }
    };

    let dim = config.dim;
    let mut hidden_grad = vec![0.0; dim];
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let total_steps = (config.epochs * sentences.len()).max(1) as f64;
    let mut kept = Vec::new();

    for epoch in 0..config.epochs {
        let mut loss_sum = 0.0;
        let mut pair_count = 0usize;
        for (s, sentence) in sentences.iter().enumerate() {
            let progress = (epoch * sentences.len() + s) as f64 / total_steps;
            let lr = config.learning_rate * (1.0 - progress).max(1e-4);
            kept.clear();
            for &t in sentence {
                if config.subsample_threshold.is_none() || rng.random::<f64>() < keep_probability(t) {
                    kept.push(t);
                }
            }
            for (center, context) in skipgram_pairs(&kept, config.window) {
                hidden_grad.iter_mut().for_each(|g| *g = 0.0);
                let mut pair_loss = 0.0;
                for k in 0..=config.negatives {
                    let (target, label) = if k == 0 {
                        (context, 1.0)
                    } else {
                        let n = sampler.sample(&mut rng);
                        if n == context {
                            continue;
                        }
                        (n, 0.0)
                    };
                    let output = emb.output_vectors.as_mut().expect("training table");
                    let v = emb.input_vectors.row(center);
                    let score = dot(v, output.row(target));
                    pair_loss -= if label > 0.0 { log_sigmoid(score) } else { log_sigmoid(-score) };
                    let g = (label - sigmoid(score)) * lr;
                    let u = output.row_mut(target);
                    for ((h, ui), vi) in hidden_grad.iter_mut().zip(u.iter_mut()).zip(v) {
                        *h += g * *ui;
                        *ui += g * vi;
                    }
                }
                for (vi, h) in emb.input_vectors.row_mut(center).iter_mut().zip(&hidden_grad) {
                    *vi += h;
                }
                loss_sum += pair_loss;
                pair_count += 1;
            }
        }
        let mean = if pair_count == 0 { 0.0 } else { loss_sum / pair_count as f64 };
        if !mean.is_finite() {
            return Err(Error::Diverged {
                epoch,
                last_finite_loss: epoch_losses.last().copied(),
            });
        }
        epoch_losses.push(mean);
    }
    Ok((emb, epoch_losses))
}

/// Mean of in-vocabulary token vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Pooled {
    pub vector: Vec<f64>,
    pub in_vocabulary: usize,
}

impl Pooled {
    /// No token was found; `vector` is all zeros.
    pub fn all_oov(&self) -> bool {
        self.in_vocabulary == 0
    }
}

pub fn mean_pool<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, emb: &EmbeddingMatrix) -> Pooled {
    let mut vector = vec![0.0; emb.dim()];
    let mut found = 0usize;
    for idx in tokens.iter().filter_map(|t| vocab.get(t.as_ref())) {
        for (acc, v) in vector.iter_mut().zip(emb.vector(idx)) {
            *acc += v;
        }
        found += 1;
    }
    if found > 0 {
        let inv = 1.0 / found as f64;
        vector.iter_mut().for_each(|v| *v *= inv);
    }
    Pooled {
        vector,
        in_vocabulary: found,
    }
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            context: "cosine",
            expected: u.len(),
            actual: v.len(),
        });
    }
    let nu = libm::sqrt(dot(u, u));
    let nv = libm::sqrt(dot(v, v));
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Vocabulary token holding a hashtag's attribute vector.
pub fn hashtag_token(hashtag: &str) -> String {
    format!("#{hashtag}")
}

pub fn label_embedding(hashtag: &str, vocab: &Vocabulary, emb: &EmbeddingMatrix) -> Result<Vec<f64>> {
    vocab
        .get(&hashtag_token(hashtag))
        .map(|i| emb.vector(i).to_vec())
        .ok_or_else(|| Error::MissingLabels(vec![hashtag.to_owned()]))
}

/// Attribute vectors for several labels; the error lists every missing label.
pub fn label_embeddings<S: AsRef<str>>(
    hashtags: &[S],
    vocab: &Vocabulary,
    emb: &EmbeddingMatrix,
) -> Result<Vec<Vec<f64>>> {
    let mut missing = Vec::new();
    let mut out = Vec::with_capacity(hashtags.len());
    for h in hashtags {
        match label_embedding(h.as_ref(), vocab, emb) {
            Ok(v) => out.push(v),
            Err(_) => missing.push(h.as_ref().to_owned()),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(Error::MissingLabels(missing))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn sentences(lines: &[&str]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.split_whitespace().map(ToString::to_string).collect())
            .collect()
    }

    #[test]
    fn vocab_ordering_and_filtering() {
        let corpus = sentences(&["a b", "b a"]);
        let v = build_vocab(corpus.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(v.tokens(), &["a".to_string(), "b".to_string()]);
        let corpus = sentences(&["a a b"]);
        let v = build_vocab(corpus.iter().map(Vec::as_slice), 2).unwrap();
        assert_eq!(v.tokens(), &["a".to_string()]);
        assert_eq!(v.count(0), 2);
        let empty: Vec<Vec<String>> = Vec::new();
        assert_eq!(build_vocab(empty.iter().map(Vec::as_slice), 1), Err(Error::EmptyVocabulary));
        let corpus = sentences(&["z y y x x x"]);
        let v = build_vocab(corpus.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(v.tokens(), &["x".to_string(), "y".to_string(), "z".to_string()]);
    }

    #[test]
    fn pair_enumeration() {
        assert_eq!(skipgram_pairs(&[0, 1, 2], 1), vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert!(skipgram_pairs(&[4], 3).is_empty());
        assert!(skipgram_pairs(&[], 3).is_empty());
        assert_eq!(skipgram_pairs(&[0, 1], 5), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn noise_distribution() {
        let sampler = NegativeSampler::new(&[1, 3]).unwrap();
        let p = sampler.probabilities();
        let three = libm::pow(3.0, 0.75);
        assert!((p[0] - 1.0 / (1.0 + three)).abs() < 1e-12);
        assert!((p[0] - 0.3052).abs() < 1e-3 && (p[1] - 0.6948).abs() < 1e-3);

        let mut rng = seeded(3);
        let mut hits = [0usize; 2];
        for _ in 0..20_000 {
            hits[sampler.sample(&mut rng)] += 1;
        }
        let frac = hits[0] as f64 / 20_000.0;
        assert!((frac - p[0]).abs() < 0.02, "{frac}");
    }

    #[test]
    fn empty_pair_stream_keeps_initialization() {
        let vocab = Vocabulary::from_entries(vec![("solo".into(), 1)]).unwrap();
        let config = SgnsConfig {
            dim: 8,
            epochs: 1,
            seed: 11,
            ..Default::default()
        };
        let (emb, losses) = train_sgns_encoded(&[vec![0]], &vocab, &config).unwrap();
        let init = initial_embeddings(1, 8, &mut seeded(11));
        assert_eq!(emb.input_vectors, init.input_vectors);
        assert_eq!(losses, vec![0.0]);
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = sentences(&["the cat sat on the mat", "the dog sat on the log", "a cat and a dog"]);
        let config = SgnsConfig {
            dim: 10,
            epochs: 3,
            seed: 5,
            ..Default::default()
        };
        let a = train_sgns(&corpus, &config).unwrap();
        let b = train_sgns(&corpus, &config).unwrap();
        assert_eq!(a.embeddings, b.embeddings);
        assert_eq!(a.epoch_losses, b.epoch_losses);
        let c = train_sgns(&corpus, &SgnsConfig { seed: 6, ..config.clone() }).unwrap();
        assert_ne!(a.embeddings, c.embeddings);
        assert!(SgnsConfig { window: 0, ..config }.validate().is_err());
    }

    #[test]
    fn pooling() {
        let vocab = Vocabulary::from_entries(vec![("x".into(), 1), ("y".into(), 1)]).unwrap();
        let emb = EmbeddingMatrix::new(DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap()).unwrap();
        assert_eq!(mean_pool(&["x"], &vocab, &emb).vector, vec![1.0, 0.0]);
        assert_eq!(mean_pool(&["x", "y", "zz"], &vocab, &emb).vector, vec![0.5, 0.5]);
        let oov = mean_pool(&["q", "r"], &vocab, &emb);
        assert!(oov.all_oov());
        assert_eq!(oov.vector, vec![0.0, 0.0]);
    }

    #[test]
    fn cosine_cases() {
        assert_eq!(cosine(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - 0.70711).abs() < 1e-5);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn hashtag_lookup() {
        let vocab = Vocabulary::from_entries(vec![("#metoo".into(), 3), ("metoo".into(), 1)]).unwrap();
        let emb = EmbeddingMatrix::new(DenseMatrix::from_rows(&[[0.5, 1.5], [9.0, 9.0]]).unwrap()).unwrap();
        assert_eq!(label_embedding("metoo", &vocab, &emb).unwrap(), vec![0.5, 1.5]);
        assert_eq!(
            label_embeddings(&["metoo", "a", "b"], &vocab, &emb),
            Err(Error::MissingLabels(vec!["a".into(), "b".into()]))
        );
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_scale_invariant(
            pair in (1usize..12).prop_flat_map(|n| (
                proptest::collection::vec(-10.0f64..10.0, n),
                proptest::collection::vec(-10.0f64..10.0, n),
            )),
            a in 0.01f64..100.0,
            b in 0.01f64..100.0,
        ) {
            let (u, v) = pair;
            let c = cosine(&u, &v).unwrap();
            prop_assert!((-1.0..=1.0).contains(&c));
            prop_assert!((c - cosine(&v, &u).unwrap()).abs() <= 1e-12);
            let us: Vec<f64> = u.iter().map(|x| x * a).collect();
            let vs: Vec<f64> = v.iter().map(|x| x * b).collect();
            prop_assert!((c - cosine(&us, &vs).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn pair_count_matches_brute_force(len in 0usize..30, window in 1usize..8) {
            let seq: Vec<usize> = (0..len).collect();
            let mut expected = 0;
            for i in 0..len {
                for j in 0..len {
                    if i != j && i.abs_diff(j) <= window {
                        expected += 1;
                    }
                }
            }
            prop_assert_eq!(skipgram_pairs(&seq, window).len(), expected);
        }

        #[test]
        fn noise_distribution_matches_direct(counts in proptest::collection::vec(1u64..1000, 1..30)) {
            let p = NegativeSampler::new(&counts).unwrap().probabilities();
            let weights: Vec<f64> = counts.iter().map(|&c| libm::pow(c as f64, 0.75)).collect();
            let total: f64 = weights.iter().sum();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for (pi, w) in p.iter().zip(&weights) {
                prop_assert!((pi - w / total).abs() <= 1e-12);
            }
        }
    }
}
