//! word2vec text format: a `V d` header, then `token v1 … vd` per line.
//!
//! Token frequencies are not part of the format. [`save_embeddings`] writes them
//! to a `<path>.vocab` sidecar (`token count` per line, the layout of word2vec's
//! `-save-vocab`), and [`load_embeddings`] reads it back when present; without
//! it every count is 1.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use tagzero_core::embedding::{EmbeddingMatrix, Vocabulary};
use tagzero_core::numeric::DenseMatrix;

use crate::error::{CliError, Result};

pub fn vocab_sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".vocab");
    PathBuf::from(name)
}

/// Writes vectors with shortest round-trip formatting, so a reload is bit-exact.
pub fn write_embeddings<W: Write>(mut out: W, vocab: &Vocabulary, emb: &EmbeddingMatrix) -> std::io::Result<()> {
    writeln!(out, "{} {}", vocab.len(), emb.dim())?;
    for (i, token) in vocab.tokens().iter().enumerate() {
        out.write_all(token.as_bytes())?;
        for v in emb.vector(i) {
            write!(out, " {v:?}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn check_tokens(vocab: &Vocabulary) -> Result<()> {
    match vocab.tokens().iter().find(|t| t.is_empty() || t.chars().any(char::is_whitespace)) {
        Some(t) => Err(CliError::Data(format!(
            "token {t:?} cannot be stored in word2vec text format"
        ))),
        None => Ok(()),
    }
}

pub fn save_embeddings(path: &Path, vocab: &Vocabulary, emb: &EmbeddingMatrix) -> Result<()> {
    if vocab.len() != emb.input_vectors.rows() {
        return Err(CliError::Data(format!(
            "vocabulary has {} tokens but the matrix has {} rows",
            vocab.len(),
            emb.input_vectors.rows()
        )));
    }
    check_tokens(vocab)?;
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_embeddings(BufWriter::new(file), vocab, emb).map_err(|e| CliError::io(path, e))?;

    let sidecar = vocab_sidecar(path);
    let file = File::create(&sidecar).map_err(|e| CliError::io(&sidecar, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        for (token, count) in vocab.tokens().iter().zip(vocab.counts()) {
            writeln!(out, "{token} {count}")?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| CliError::io(&sidecar, e))
}

/// Streams the file line by line; memory is the matrix itself plus one line.
pub fn read_embeddings<R: BufRead>(reader: R, path: &Path) -> Result<(Vec<String>, EmbeddingMatrix)> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| CliError::io(path, e))?,
        None => return Err(CliError::parse(path, 1, "empty file; expected a 'V d' header")),
    };
    let mut fields = header.split_whitespace().map(str::parse::<usize>);
    let (rows, dim) = match (fields.next(), fields.next(), fields.next()) {
        (Some(Ok(v)), Some(Ok(d)), None) if v > 0 && d > 0 => (v, d),
        _ => return Err(CliError::parse(path, 1, format!("bad header {header:?}; expected 'V d'"))),
    };

    let mut tokens = Vec::with_capacity(rows);
    let mut data = Vec::with_capacity(rows.saturating_mul(dim));
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if tokens.len() == rows {
            return Err(CliError::parse(path, line_no, format!("more than the {rows} vectors the header declares")));
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().expect("non-blank line");
        let before = data.len();
        for field in fields {
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::parse(path, line_no, format!("{field:?} is not a number")))?;
            if !v.is_finite() {
                return Err(CliError::parse(path, line_no, format!("non-finite component {field:?}")));
            }
            data.push(v);
        }
        if data.len() - before != dim {
            return Err(CliError::parse(
                path,
                line_no,
                format!("{token:?} has {} components, expected {dim}", data.len() - before),
            ));
        }
        tokens.push(token.to_owned());
    }
    if tokens.len() != rows {
        return Err(CliError::Data(format!(
            "{}: header declares {rows} vectors, found {}",
            path.display(),
            tokens.len()
        )));
    }
    let matrix = DenseMatrix::from_vec(rows, dim, data)?;
    Ok((tokens, EmbeddingMatrix::new(matrix)?))
}

fn read_counts(path: &Path, tokens: &[String]) -> Result<Vec<u64>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut counts = Vec::with_capacity(tokens.len());
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (token, count) = line
            .rsplit_once(' ')
            .ok_or_else(|| CliError::parse(path, i + 1, "expected 'token count'"))?;
        let count: u64 = count
            .parse()
            .map_err(|_| CliError::parse(path, i + 1, format!("bad count {count:?}")))?;
        match tokens.get(counts.len()) {
            Some(t) if t == token => counts.push(count),
            _ => return Err(CliError::parse(path, i + 1, "sidecar does not match the vector file's tokens")),
        }
    }
    if counts.len() != tokens.len() {
        return Err(CliError::Data(format!("{}: sidecar lists {} of {} tokens", path.display(), counts.len(), tokens.len())));
    }
    Ok(counts)
}

pub fn load_embeddings(path: &Path) -> Result<(Vocabulary, EmbeddingMatrix)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let (tokens, emb) = read_embeddings(BufReader::new(file), path)?;
    let sidecar = vocab_sidecar(path);
    let counts = if sidecar.exists() {
        read_counts(&sidecar, &tokens)?
    } else {
        vec![1; tokens.len()]
    };
    let vocab = Vocabulary::from_entries(tokens.into_iter().zip(counts).collect())?;
    Ok((vocab, emb))
}
