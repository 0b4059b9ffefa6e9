//! Small readers and writers for the pipeline's intermediate files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tagzero_core::ingest::{CleanTweet, Stopwords};

use crate::error::{CliError, Result};

pub const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, to_json_string(value).as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line(), e.to_string()))
}

pub fn load_stopwords(path: Option<&Path>) -> Result<Stopwords> {
    match path {
        Some(p) => Ok(Stopwords::parse(&read_to_string(p)?)),
        None => Ok(Stopwords::parse(BUNDLED_STOPWORDS)),
    }
}

pub fn write_clean_jsonl(path: &Path, tweets: &[CleanTweet]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for t in tweets {
            serde_json::to_writer(&mut out, t)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    };
    write().map_err(|e| CliError::io(path, e))
}

pub fn read_clean_jsonl(path: &Path) -> Result<Vec<CleanTweet>> {
    let mut tweets = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        tweets.push(serde_json::from_str(&line).map_err(|e| CliError::parse(path, i + 1, e.to_string()))?);
    }
    Ok(tweets)
}

/// One whitespace-tokenized sentence per non-blank line.
pub fn read_token_corpus(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut sentences = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if !tokens.is_empty() {
            sentences.push(tokens);
        }
    }
    Ok(sentences)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub label: String,
    pub tweets: usize,
}

/// The selected hashtags, most frequent first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCatalog {
    pub config: serde_json::Value,
    pub labels: Vec<LabelEntry>,
}

impl LabelCatalog {
    pub fn names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.label.clone()).collect()
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut reader = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}
