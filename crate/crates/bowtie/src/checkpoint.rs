//! Checkpoint files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic     8 bytes   b"BOWTIECK"
//! version   u32       FORMAT_VERSION
//! manifest  u64 len + UTF-8 JSON (config, fingerprint, encoding, provenance)
//! params    u64 count + count * f64
//! ```
//!
//! Parameters follow `BowTieModel::parameters` order, so a reload is bit-exact.

use std::fs;
use std::path::Path;

use bowtie_core::net::Activation;
use bowtie_core::{BowTieModel, EncodingKind, ModelConfig, Vocabulary};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"BOWTIECK";
pub const FORMAT_VERSION: u32 = 1;

/// Vocabulary size plus SHA-256 of the newline-joined tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabFingerprint {
    pub size: usize,
    pub sha256: String,
}

impl VocabFingerprint {
    pub fn of(vocab: &Vocabulary) -> Self {
        let mut h = Sha256::new();
        for tok in vocab.tokens() {
            h.update(tok.as_bytes());
            h.update(b"\n");
        }
        let sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            size: vocab.len(),
            sha256,
        }
    }

    pub fn ensure_matches(&self, other: &VocabFingerprint) -> Result<()> {
        if self != other {
            return Err(Error::FingerprintMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }

    /// Width-only check for data that carries no vocabulary.
    pub fn ensure_width(&self, width: usize) -> Result<()> {
        if self.size != width {
            return Err(Error::FingerprintMismatch {
                expected: self.to_string(),
                found: format!("width {width}"),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for VocabFingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} tokens sha256:{}",
            self.size,
            &self.sha256[..self.sha256.len().min(16)]
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub input_width: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: String,
    pub dropout_rate: f64,
    pub l2_weight: f64,
    pub discriminator: f64,
    pub init_seed: u64,
}

impl From<&ModelConfig> for ConfigRecord {
    fn from(c: &ModelConfig) -> Self {
        Self {
            input_width: c.input_width,
            hidden_widths: c.hidden_widths.clone(),
            activation: c.activation.as_str().to_owned(),
            dropout_rate: c.dropout_rate,
            l2_weight: c.l2_weight,
            discriminator: c.discriminator,
            init_seed: c.init_seed,
        }
    }
}

impl ConfigRecord {
    pub fn to_config(&self) -> Result<ModelConfig> {
        let activation: Activation = self.activation.parse()?;
        let config = ModelConfig {
            input_width: self.input_width,
            hidden_widths: self.hidden_widths.clone(),
            activation,
            dropout_rate: self.dropout_rate,
            l2_weight: self.l2_weight,
            discriminator: self.discriminator,
            init_seed: self.init_seed,
        };
        config.validate()?;
        Ok(config)
    }
}

/// How the checkpoint was produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub dataset: String,
    pub optimizer: String,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub data_seed: u64,
    pub dropout_seed: u64,
    pub epochs_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    config: ConfigRecord,
    vocabulary: VocabFingerprint,
    encoding: String,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: BowTieModel,
    pub vocabulary: VocabFingerprint,
    pub encoding: EncodingKind,
    pub provenance: Provenance,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let manifest = Manifest {
            config: ConfigRecord::from(self.model.config()),
            vocabulary: self.vocabulary.clone(),
            encoding: self.encoding.as_str().to_owned(),
            provenance: self.provenance.clone(),
        };
        let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        let count = self.model.param_count();
        let mut out = Vec::with_capacity(8 + 4 + 8 + json.len() + 8 + 8 * count);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        out.extend_from_slice(&(count as u64).to_le_bytes());
        for p in self.model.parameters() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let corrupt = |message: &str| Error::CheckpointCorrupt {
            path: path.to_owned(),
            message: message.to_owned(),
        };
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(8).ok_or_else(|| corrupt("truncated header"))?;
        let version = r.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()));
        if magic != MAGIC || version != Some(FORMAT_VERSION) {
            return Err(Error::CheckpointVersion {
                path: path.to_owned(),
                magic: String::from_utf8_lossy(magic).into_owned(),
                version: version.unwrap_or(0),
            });
        }
        let len = r.u64().ok_or_else(|| corrupt("truncated manifest length"))? as usize;
        let json = r.take(len).ok_or_else(|| corrupt("truncated manifest"))?;
        let manifest: Manifest = serde_json::from_slice(json).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })?;
        let count = r.u64().ok_or_else(|| corrupt("truncated parameter count"))? as usize;
        let blob = r
            .take(
                count
                    .checked_mul(8)
                    .ok_or_else(|| corrupt("parameter count overflows"))?,
            )
            .ok_or_else(|| corrupt("truncated parameter blob"))?;
        if r.pos != bytes.len() {
            return Err(corrupt("trailing bytes after parameters"));
        }
        let params: Vec<f64> = blob
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let config = manifest.config.to_config()?;
        let model = BowTieModel::from_parameters(config, &params).map_err(|e| Error::data(path, e))?;
        if manifest.vocabulary.size != model.config().input_width {
            return Err(corrupt("vocabulary size disagrees with model input width"));
        }
        Ok(Self {
            model,
            vocabulary: manifest.vocabulary,
            encoding: manifest.encoding.parse()?,
            provenance: manifest.provenance,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let s = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(s)
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }
}
