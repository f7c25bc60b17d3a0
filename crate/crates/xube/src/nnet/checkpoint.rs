//! Binary checkpoint format for MLP approximators.
//!
//! Layout: magic `XUBE`, little-endian u32 version (= 1), u32 header
//! length, a JSON header (spec, optimizer metadata, parameter count,
//! caller metadata), the flat little-endian IEEE-754 32-bit parameter
//! array, the optimizer-state arrays, and a trailing CRC32 of all
//! preceding bytes. Files are written to a temp path and renamed, so a
//! checkpoint on disk is always complete.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::opt::{AdamParams, AdamState, Optimizer};
use super::{Mlp, MlpSpec, NnetError};

pub const MAGIC: &[u8; 4] = b"XUBE";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    spec: MlpSpec,
    optimizer: OptimizerMeta,
    n_params: usize,
    meta: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct OptimizerMeta {
    kind: String,
    lr: f64,
    #[serde(default)]
    t: u64,
    #[serde(default)]
    adam: Option<AdamParams>,
}

/// A loaded checkpoint: the network, its optimizer state, and the
/// caller metadata stored at save time.
pub struct CheckpointData {
    pub mlp: Mlp,
    pub optimizer: Optimizer,
    pub lr: f64,
    pub meta: serde_json::Value,
}

pub fn save_checkpoint(
    path: &Path,
    mlp: &Mlp,
    optimizer: &Optimizer,
    lr: f64,
    meta: &serde_json::Value,
) -> Result<(), NnetError> {
    let (kind, t, adam_params, state_arrays): (_, _, _, Vec<&[f32]>) = match optimizer {
        Optimizer::Sgd => ("sgd", 0, None, Vec::new()),
        Optimizer::Adam { params, state } => (
            "adam",
            state.t,
            Some(*params),
            vec![state.m.as_slice(), state.v.as_slice()],
        ),
    };
    let header = Header {
        spec: mlp.spec().clone(),
        optimizer: OptimizerMeta {
            kind: kind.to_string(),
            lr,
            t,
            adam: adam_params,
        },
        n_params: mlp.params().len(),
        meta: meta.clone(),
    };
    let header_json = serde_json::to_vec(&header)
        .map_err(|e| NnetError::BadCheckpoint(format!("header serialization: {e}")))?;

    let mut bytes = Vec::with_capacity(16 + header_json.len() + mlp.params().len() * 4);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(header_json.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&header_json);
    for &p in mlp.params() {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    for arr in state_arrays {
        for &v in arr {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&bytes);
    bytes.extend_from_slice(&crc.to_le_bytes());

    let tmp = path.with_extension("ckpt.tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(&bytes)?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<CheckpointData, NnetError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 16 {
        return Err(NnetError::BadCheckpoint("truncated file".into()));
    }
    if &bytes[0..4] != MAGIC {
        return Err(NnetError::BadCheckpoint("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(NnetError::Version(version));
    }
    let stored_crc = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    if crc32fast::hash(&bytes[..bytes.len() - 4]) != stored_crc {
        return Err(NnetError::BadCheckpoint("checksum failure".into()));
    }

    let header_len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = &bytes[12..bytes.len() - 4];
    if body.len() < header_len {
        return Err(NnetError::BadCheckpoint("truncated header".into()));
    }
    let header: Header = serde_json::from_slice(&body[..header_len])
        .map_err(|e| NnetError::BadCheckpoint(format!("header parse: {e}")))?;
    if header.n_params != header.spec.n_params() {
        return Err(NnetError::BadCheckpoint(
            "parameter count disagrees with spec".into(),
        ));
    }

    let mut cursor = &body[header_len..];
    let params = read_f32s(&mut cursor, header.n_params)?;
    let optimizer = match header.optimizer.kind.as_str() {
        "sgd" => Optimizer::Sgd,
        "adam" => {
            let m = read_f32s(&mut cursor, header.n_params)?;
            let v = read_f32s(&mut cursor, header.n_params)?;
            Optimizer::Adam {
                params: header.optimizer.adam.unwrap_or_default(),
                state: AdamState {
                    t: header.optimizer.t,
                    m,
                    v,
                },
            }
        }
        other => {
            return Err(NnetError::BadCheckpoint(format!(
                "unknown optimizer kind `{other}`"
            )))
        }
    };
    if !cursor.is_empty() {
        return Err(NnetError::BadCheckpoint("trailing bytes".into()));
    }

    let mlp = Mlp::from_params(header.spec, params)?;
    Ok(CheckpointData {
        mlp,
        optimizer,
        lr: header.optimizer.lr,
        meta: header.meta,
    })
}

fn read_f32s(cursor: &mut &[u8], n: usize) -> Result<Vec<f32>, NnetError> {
    if cursor.len() < n * 4 {
        return Err(NnetError::BadCheckpoint("truncated parameter array".into()));
    }
    let (head, tail) = cursor.split_at(n * 4);
    *cursor = tail;
    Ok(head
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
