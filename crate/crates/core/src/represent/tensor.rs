use std::fmt::Write as _;

use crate::event::EventStream;
use crate::{Error, Result};

pub const TENSOR_MAGIC: &[u8; 4] = b"EVT1";

/// Dense `(2, C, H, W)` tensor indexed `(polarity group, bin, y, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameTensor {
    pub data: Vec<f64>,
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub video_id: String,
    pub n_events: usize,
}

impl FrameTensor {
    pub(crate) fn zeros(channels: usize, stream: &EventStream) -> Self {
        let (h, w) = (stream.height as usize, stream.width as usize);
        FrameTensor {
            data: vec![0.0; 2 * channels * h * w],
            channels,
            height: h,
            width: w,
            video_id: stream.video_id.clone(),
            n_events: stream.len(),
        }
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (2, self.channels, self.height, self.width)
    }

    /// Number of frames across both polarity groups.
    pub fn total_channels(&self) -> usize {
        2 * self.channels
    }

    pub(crate) fn plane_len(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn offset(&self, p: usize, c: usize, y: usize, x: usize) -> usize {
        ((p * self.channels + c) * self.height + y) * self.width + x
    }

    pub fn get(&self, p: usize, c: usize, y: usize, x: usize) -> f64 {
        self.data[self.offset(p, c, y, x)]
    }

    /// Nonzero cells as `((p, c, y, x), value)` in memory order.
    pub fn nonzero(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        let (c, h, w) = (self.channels, self.height, self.width);
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(move |(i, v)| {
                let x = i % w;
                let y = (i / w) % h;
                let ch = (i / (w * h)) % c;
                let p = i / (w * h * c);
                ((p, ch, y, x), *v)
            })
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.data.iter().map(|&v| v as f32).collect()
    }
}

/// `"EVT1"`, `u32` rank (= 4), four `u32` dims, then `f32` values in
/// `(p, c, y, x)` order. All little-endian.
pub fn write_tensor(t: &FrameTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 4 * t.data.len());
    out.extend_from_slice(TENSOR_MAGIC);
    out.extend_from_slice(&4u32.to_le_bytes());
    let (a, b, c, d) = t.shape();
    for dim in [a, b, c, d] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in t.to_f32() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Returns the dims and the `f32` payload of a tensor container.
pub fn read_tensor(bytes: &[u8]) -> Result<([usize; 4], Vec<f32>)> {
    if bytes.len() < 4 || &bytes[..4] != TENSOR_MAGIC {
        return Err(Error::BadMagic {
            expected: "EVT1",
            found: bytes.iter().take(4).copied().collect(),
        });
    }
    if bytes.len() < 24 {
        return Err(Error::Truncated {
            what: "header bytes",
            expected: 24,
            actual: bytes.len() as u64,
        });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    if word(4) != 4 {
        return Err(Error::Malformed {
            offset: 4,
            reason: format!("expected rank 4, found {}", word(4)),
        });
    }
    let dims = [word(8), word(12), word(16), word(20)];
    let n: usize = dims.iter().product();
    let payload = &bytes[24..];
    if payload.len() != 4 * n {
        return Err(Error::Truncated {
            what: "values",
            expected: n as u64,
            actual: (payload.len() / 4) as u64,
        });
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    Ok((dims, values))
}

/// `p,c,y,x,value` rows for every nonzero cell.
pub fn write_nonzero_csv(t: &FrameTensor) -> String {
    let mut out = String::from("p,c,y,x,value\n");
    for ((p, c, y, x), v) in t.nonzero() {
        let _ = writeln!(out, "{p},{c},{y},{x},{}", v as f32);
    }
    out
}
