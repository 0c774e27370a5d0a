//! Binary checkpoint layout, all integers little-endian:
//!
//! ```text
//! b"DNAE" | version u32 | vocab_size u64 | layer_count u32
//!        | hidden dim u64 × layer_count
//!        | f64 weights, row-major: H_1 … H_l, then decoder in forward order
//!        | trailer_len u64 | trailer JSON {config, provenance}
//! ```

use serde::{Deserialize, Serialize};

use super::model::{DnaeConfig, DnaeModel, Provenance};
use super::DnaeError;
use crate::factorization::DenseMatrix;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"DNAE";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Trailer {
    config: DnaeConfig,
    provenance: Provenance,
}

pub fn save_checkpoint(model: &DnaeModel) -> Vec<u8> {
    let dims = model.hidden_dims();
    let n_weights: usize = model.layers().map(|w| w.as_slice().len()).sum();
    let mut out = Vec::with_capacity(24 + 8 * (dims.len() + n_weights));
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(model.vocab_size() as u64).to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for d in &dims {
        out.extend_from_slice(&(*d as u64).to_le_bytes());
    }
    for w in model.layers() {
        for v in w.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let trailer = serde_json::to_vec(&Trailer {
        config: model.config().clone(),
        provenance: model.provenance().clone(),
    })
    .expect("trailer serialises");
    out.extend_from_slice(&(trailer.len() as u64).to_le_bytes());
    out.extend_from_slice(&trailer);
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], DnaeError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| DnaeError::Checkpoint(format!("truncated while reading {what}")))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, DnaeError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64, DnaeError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

fn to_usize(v: u64, what: &str) -> Result<usize, DnaeError> {
    usize::try_from(v).map_err(|_| DnaeError::Checkpoint(format!("{what} {v} too large")))
}

pub fn load_checkpoint(bytes: &[u8]) -> Result<DnaeModel, DnaeError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "magic")? != CHECKPOINT_MAGIC {
        return Err(DnaeError::Checkpoint("bad magic".into()));
    }
    let version = cur.u32("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(DnaeError::Checkpoint(format!(
            "unsupported version {version}"
        )));
    }
    let vocab = to_usize(cur.u64("vocab size")?, "vocab size")?;
    let layer_count = cur.u32("layer count")? as usize;
    if layer_count == 0 || layer_count > cur.remaining() / 8 {
        return Err(DnaeError::Checkpoint(format!(
            "implausible layer count {layer_count}"
        )));
    }
    let mut widths = vec![vocab];
    for _ in 0..layer_count {
        widths.push(to_usize(cur.u64("hidden dim")?, "hidden dim")?);
    }

    let mut shapes: Vec<(usize, usize)> = widths.windows(2).map(|w| (w[1], w[0])).collect();
    shapes.extend(widths.windows(2).rev().map(|w| (w[0], w[1])));
    let mut read_matrix = |rows: usize, cols: usize| -> Result<DenseMatrix, DnaeError> {
        let len = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| DnaeError::Checkpoint("layer size overflows".into()))?;
        let raw = cur.take(len, "weights")?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        DenseMatrix::from_vec(rows, cols, data)
            .map_err(|e| DnaeError::Checkpoint(format!("weights: {e}")))
    };
    let mut layers = Vec::with_capacity(shapes.len());
    for &(r, c) in &shapes {
        layers.push(read_matrix(r, c)?);
    }
    let decoder = layers.split_off(layer_count);
    let encoder = layers;

    let trailer_len = to_usize(cur.u64("trailer length")?, "trailer length")?;
    let trailer: Trailer = serde_json::from_slice(cur.take(trailer_len, "trailer")?)
        .map_err(|e| DnaeError::Checkpoint(format!("trailer: {e}")))?;
    if cur.remaining() != 0 {
        return Err(DnaeError::Checkpoint(format!(
            "{} trailing bytes after trailer",
            cur.remaining()
        )));
    }
    if trailer.config.hidden_dims != widths[1..] {
        return Err(DnaeError::Checkpoint(format!(
            "trailer hidden_dims {:?} disagree with header {:?}",
            trailer.config.hidden_dims,
            &widths[1..]
        )));
    }

    let mut model = DnaeModel::from_weights(encoder, decoder, trailer.config)
        .map_err(|e| DnaeError::Checkpoint(e.to_string()))?;
    model.provenance = trailer.provenance;
    Ok(model)
}
