//! On-disk snapshot format.
//!
//! ```text
//! "GXSI" | version: u32 LE | payload_len: u64 LE | payload | crc32: u32 LE
//! ```
//!
//! The CRC covers every byte before it. The payload is JSON holding the
//! documents, postings, element signatures and taxonomy. On load the postings
//! are rebuilt from the documents and must match the stored ones exactly.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gparse::GaussianRecord;
use crate::index::{IndexSnapshot, PostingMap, Postings};
use crate::taxonomy::Taxonomy;

pub const MAGIC: &[u8; 4] = b"GXSI";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8;
const TRAILER_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O: {0}")]
    Io(#[from] io::Error),
    #[error("bad snapshot: {0}")]
    Format(String),
}

fn format_err(msg: impl Into<String>) -> SnapshotError {
    SnapshotError::Format(msg.into())
}

#[derive(Serialize)]
struct PayloadRef<'a> {
    docs: Vec<&'a GaussianRecord>,
    postings: &'a Postings,
    element_signature: &'a PostingMap,
    taxonomy: &'a Taxonomy,
}

#[derive(Deserialize)]
struct Payload {
    docs: Vec<GaussianRecord>,
    postings: Postings,
    element_signature: PostingMap,
    taxonomy: Taxonomy,
}

impl IndexSnapshot {
    /// Just the payload bytes, deterministic for a given snapshot.
    pub fn payload_bytes(&self) -> Vec<u8> {
        let payload = PayloadRef {
            docs: self.docs.values().collect(),
            postings: &self.postings,
            element_signature: &self.element_signature,
            taxonomy: &self.taxonomy,
        };
        serde_json::to_vec(&payload).expect("snapshot payload serializes")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = self.payload_bytes();
        let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + TRAILER_LEN);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload);
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        if bytes.len() < HEADER_LEN + TRAILER_LEN {
            return Err(format_err("file too short"));
        }
        if &bytes[..4] != MAGIC {
            return Err(format_err("bad magic"));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(format_err(format!("unsupported version {version}")));
        }
        let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let expected_total = (HEADER_LEN as u64)
            .checked_add(len)
            .and_then(|n| n.checked_add(TRAILER_LEN as u64));
        if expected_total != Some(bytes.len() as u64) {
            return Err(format_err("length mismatch (truncated or padded file)"));
        }
        let body_end = bytes.len() - TRAILER_LEN;
        let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
        if crc32fast::hash(&bytes[..body_end]) != stored {
            return Err(format_err("checksum mismatch"));
        }

        let payload: Payload =
            serde_json::from_slice(&bytes[HEADER_LEN..body_end]).map_err(|e| format_err(format!("payload: {e}")))?;
        let rebuilt = IndexSnapshot::build(payload.docs, payload.taxonomy).map_err(|e| format_err(e.to_string()))?;
        if rebuilt.postings != payload.postings || rebuilt.element_signature != payload.element_signature {
            return Err(format_err("postings do not match documents"));
        }
        Ok(rebuilt)
    }

    /// Writes to a sibling temp file and renames it into place.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_bytes())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SnapshotError> {
        let bytes = fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}
