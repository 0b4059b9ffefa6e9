//! A trained model saved as JSON, pinned to the embedding file it was built on.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tagzero_core::embedding::{EmbeddingMatrix, Vocabulary};
use tagzero_core::zsl::ZslModel;

use crate::error::{CliError, Result};
use crate::files::{read_json, sha256_file, write_json};
use crate::word2vec::load_embeddings;

pub const BUNDLE_FORMAT: &str = "tagzero-model/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingRef {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: String,
    pub config: serde_json::Value,
    pub embeddings: EmbeddingRef,
    pub model: ZslModel,
}

impl ModelBundle {
    pub fn new(config: serde_json::Value, embeddings_path: &Path, model: ZslModel) -> Result<Self> {
        Ok(Self {
            format: BUNDLE_FORMAT.to_owned(),
            config,
            embeddings: EmbeddingRef {
                path: embeddings_path.to_owned(),
                sha256: sha256_file(embeddings_path)?,
            },
            model,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bundle: ModelBundle = read_json(path)?;
        if bundle.format != BUNDLE_FORMAT {
            return Err(CliError::Data(format!(
                "{}: unsupported bundle format {:?} (expected {BUNDLE_FORMAT})",
                path.display(),
                bundle.format
            )));
        }
        Ok(bundle)
    }

    /// Loads the pinned embedding file, or `override_path` in its place, and
    /// refuses it unless its hash matches the one recorded at training time.
    pub fn load_embeddings(&self, override_path: Option<&Path>) -> Result<(Vocabulary, EmbeddingMatrix)> {
        let path = override_path.unwrap_or(&self.embeddings.path);
        let digest = sha256_file(path)?;
        if digest != self.embeddings.sha256 {
            return Err(CliError::Data(format!(
                "{} does not match the embeddings this model was trained on (sha256 {}, expected {})",
                path.display(),
                digest,
                self.embeddings.sha256
            )));
        }
        let (vocab, emb) = load_embeddings(path)?;
        if emb.dim() != self.model.classifier.input_dim() {
            return Err(CliError::Data(format!(
                "embedding dimension {} does not match the model's input dimension {}",
                emb.dim(),
                self.model.classifier.input_dim()
            )));
        }
        Ok((vocab, emb))
    }
}
