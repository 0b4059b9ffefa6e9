#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tagzero::files::{write_clean_jsonl, write_json, LabelCatalog, LabelEntry};
use tagzero::word2vec::save_embeddings;
use tagzero_core::ingest::CleanTweet;
use tagzero_core::synthetic::{clustered_corpus, ClusteredCorpus, ClusteredSpec};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn tagzero(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tagzero"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TAGZERO_CONFIG")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Writes `clean.jsonl`, `labels.json` and `vec.txt` for a clustered corpus
/// into `dir`, the same files `ingest` and `train-embeddings` would produce.
pub fn write_workspace(dir: &Path, spec: &ClusteredSpec) -> ClusteredCorpus {
    let corpus = clustered_corpus(spec);
    let tweets: Vec<CleanTweet> = corpus
        .dataset
        .examples
        .iter()
        .enumerate()
        .map(|(i, e)| CleanTweet {
            id: format!("{i}"),
            tokens: e.tokens.clone(),
            labels: [corpus.dataset.label_set[e.label].clone()].into_iter().collect(),
        })
        .collect();
    write_clean_jsonl(&dir.join("clean.jsonl"), &tweets).unwrap();
    let catalog = LabelCatalog {
        config: serde_json::Value::Null,
        labels: corpus
            .dataset
            .label_set
            .iter()
            .map(|l| LabelEntry {
                label: l.clone(),
                tweets: spec.per_label,
            })
            .collect(),
    };
    write_json(&dir.join("labels.json"), &catalog).unwrap();
    save_embeddings(&dir.join("vec.txt"), &corpus.vocab, &corpus.embeddings).unwrap();
    corpus
}

pub const DATA: [&str; 6] = ["--data", "clean.jsonl", "--labels", "labels.json", "--embeddings", "vec.txt"];

/// Small-network flags that keep CLI tests quick.
pub const FAST: [&str; 6] = ["--epochs", "15", "--hidden-units", "64", "--dem-epochs", "15"];
