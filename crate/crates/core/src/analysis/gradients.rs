//! Gradient-set files.
//!
//! Binary (`GRD1`, little-endian):
//!
//! ```text
//! "GRD1", u32 len + utf-8 layer_id, u32 M, u32 p, M*p f32 values row-major
//! ```
//!
//! Text fallback: one comma-separated vector per line.

use super::cosine::GradientSet;
use crate::{Error, Result};

pub const GRADIENT_MAGIC: &[u8; 4] = b"GRD1";

pub fn write_gradients(g: &GradientSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + g.layer_id.len() + 4 * g.len() * g.dim());
    out.extend_from_slice(GRADIENT_MAGIC);
    out.extend_from_slice(&(g.layer_id.len() as u32).to_le_bytes());
    out.extend_from_slice(g.layer_id.as_bytes());
    out.extend_from_slice(&(g.len() as u32).to_le_bytes());
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    for v in g.vectors() {
        for x in v {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

/// Decodes a `GRD1` container, or falls back to CSV text when the magic is absent.
pub fn read_gradients(bytes: &[u8]) -> Result<GradientSet> {
    if bytes.starts_with(GRADIENT_MAGIC) {
        read_binary(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Malformed {
            offset: e.valid_up_to(),
            reason: "neither GRD1 nor UTF-8 text".into(),
        })?;
        read_gradients_csv(text, "csv")
    }
}

fn read_binary(bytes: &[u8]) -> Result<GradientSet> {
    let mut pos = 4;
    let word = |pos: &mut usize| -> Result<u32> {
        let raw = bytes.get(*pos..*pos + 4).ok_or(Error::Truncated {
            what: "header bytes",
            expected: (*pos + 4) as u64,
            actual: bytes.len() as u64,
        })?;
        *pos += 4;
        Ok(u32::from_le_bytes(raw.try_into().expect("4 bytes")))
    };
    let id_len = word(&mut pos)? as usize;
    let id = bytes.get(pos..pos + id_len).ok_or(Error::Truncated {
        what: "header bytes",
        expected: (pos + id_len) as u64,
        actual: bytes.len() as u64,
    })?;
    let layer_id = String::from_utf8(id.to_vec()).map_err(|_| Error::Malformed {
        offset: pos,
        reason: "layer id is not UTF-8".into(),
    })?;
    pos += id_len;
    let m = word(&mut pos)? as usize;
    let p = word(&mut pos)? as usize;
    let payload = &bytes[pos..];
    let expected = (m * p) as u64;
    if payload.len() as u64 != 4 * expected {
        return Err(Error::Truncated {
            what: "gradient values",
            expected,
            actual: payload.len() as u64 / 4,
        });
    }
    let values: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let vectors = if p == 0 {
        vec![Vec::new(); m]
    } else {
        values.chunks(p).map(<[f32]>::to_vec).collect()
    };
    GradientSet::new(layer_id, vectors)
}

pub fn read_gradients_csv(text: &str, layer_id: &str) -> Result<GradientSet> {
    let mut vectors = Vec::new();
    for (i, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v = l
            .split(',')
            .map(|f| {
                f.trim().parse::<f32>().map_err(|_| Error::Parse {
                    line: i as u64 + 1,
                    reason: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        vectors.push(v);
    }
    GradientSet::new(layer_id, vectors)
}
