//! Model file container.
//!
//! ```text
//! magic   8 bytes   "IRNYMDL\0"
//! version u32 LE
//! header  u32 LE length + UTF-8 TOML (task, widths, member count)
//! payload u64 LE length + bincode EnsembleModel
//! digest  32 bytes  SHA-256 of everything above
//! ```
//!
//! The header is readable without decoding the payload, so tools can check
//! task and layout cheaply. Any byte flip is caught by the digest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Task;
use crate::ensemble::EnsembleModel;
use crate::error::{IronyError, Result};

pub const MAGIC: &[u8; 8] = b"IRNYMDL\0";
pub const FORMAT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub task: Task,
    pub crate_version: String,
    pub feature_width: usize,
    pub members: usize,
    pub num_classes: usize,
    pub training_tweets: usize,
}

impl ModelHeader {
    pub fn describe(model: &EnsembleModel) -> Self {
        ModelHeader {
            task: model.task,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            feature_width: model.pipeline.width(),
            members: model.members.len(),
            num_classes: model.num_classes(),
            training_tweets: model.fold_assignment.len(),
        }
    }
}

pub fn encode_model(model: &EnsembleModel) -> Result<Vec<u8>> {
    let header = toml::to_string(&ModelHeader::describe(model))
        .map_err(|e| IronyError::Internal(format!("header encoding: {e}")))?;
    let payload = bincode::serialize(model)
        .map_err(|e| IronyError::Internal(format!("model encoding: {e}")))?;

    let mut out = Vec::with_capacity(payload.len() + header.len() + 64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(IronyError::Integrity(format!(
                "truncated while reading {what}"
            ))),
        }
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Validates magic, version and digest, returning the header and the raw
/// payload slice.
fn open_container(bytes: &[u8]) -> Result<(ModelHeader, &[u8])> {
    if bytes.is_empty() {
        return Err(IronyError::Integrity("empty model file".into()));
    }
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len(), "magic")? != MAGIC {
        return Err(IronyError::Integrity("not a model file (bad magic)".into()));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(IronyError::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let header_len = r.u32("header length")? as usize;
    let header = r.take(header_len, "header")?;
    let payload_len = usize::try_from(r.u64("payload length")?)
        .map_err(|_| IronyError::Integrity("payload length overflows".into()))?;
    let payload = r.take(payload_len, "payload")?;
    let body_end = r.pos;
    let digest = r.take(DIGEST_LEN, "digest")?;
    if r.pos != bytes.len() {
        return Err(IronyError::Integrity(format!(
            "{} trailing bytes after digest",
            bytes.len() - r.pos
        )));
    }
    if Sha256::digest(&bytes[..body_end]).as_slice() != digest {
        return Err(IronyError::Integrity("checksum mismatch".into()));
    }
    let header = std::str::from_utf8(header)
        .map_err(|_| IronyError::Integrity("header is not UTF-8".into()))?;
    let header: ModelHeader =
        toml::from_str(header).map_err(|e| IronyError::Integrity(format!("bad header: {e}")))?;
    Ok((header, payload))
}

pub fn decode_model(bytes: &[u8]) -> Result<EnsembleModel> {
    let (header, payload) = open_container(bytes)?;
    let model: EnsembleModel = bincode::deserialize(payload)
        .map_err(|e| IronyError::Integrity(format!("payload decoding: {e}")))?;
    if ModelHeader::describe(&model) != header {
        return Err(IronyError::Integrity(
            "header disagrees with payload".into(),
        ));
    }
    Ok(model)
}

pub fn save_model(model: &EnsembleModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_model(model)?;
    fs::write(path, bytes).map_err(|e| IronyError::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<EnsembleModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| IronyError::io(path, e))?;
    decode_model(&bytes)
}

/// Reads only the header, still verifying the digest.
pub fn read_header(path: impl AsRef<Path>) -> Result<ModelHeader> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| IronyError::io(path, e))?;
    open_container(&bytes).map(|(h, _)| h)
}
