//! Gradient diversity: cosine similarity between gradients from different
//! subsamples of one video, and histograms of those similarities.

use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

pub const DEFAULT_COSINE_BINS: usize = 50;

/// `M` gradient vectors of one layer, one per subsample draw.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSet {
    vectors: Vec<Vec<f32>>,
    pub layer_id: String,
}

impl GradientSet {
    pub fn new(layer_id: impl Into<String>, vectors: Vec<Vec<f32>>) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::Argument(format!(
                "need at least 2 gradient vectors, got {}",
                vectors.len()
            )));
        }
        let len = vectors[0].len();
        if let Some(i) = vectors.iter().position(|v| v.len() != len) {
            return Err(Error::Argument(format!(
                "vector {i} has length {}, expected {len}",
                vectors[i].len()
            )));
        }
        Ok(GradientSet {
            vectors,
            layer_id: layer_id.into(),
        })
    }

    pub fn vectors(&self) -> &[Vec<f32>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

/// All `M (M - 1) / 2` pairwise cosine similarities, ordered by `(i, j)`
/// with `i < j`.
pub fn pairwise_cosine(g: &GradientSet) -> Result<Vec<f64>> {
    let vs = g.vectors();
    let norms: Vec<f64> = vs
        .par_iter()
        .map(|v| v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt())
        .collect();
    if let Some(index) = norms.iter().position(|&n| n == 0.0 || !n.is_finite()) {
        return Err(Error::DegenerateGradient { index });
    }
    let rows: Vec<Vec<f64>> = (0..vs.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..vs.len())
                .map(|j| {
                    let dot: f64 = vs[i]
                        .iter()
                        .zip(&vs[j])
                        .map(|(&a, &b)| f64::from(a) * f64::from(b))
                        .sum();
                    (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width bins over `[lo, hi]`, half-open `[a, b)` except that values
/// at or beyond the ends clamp into the first or last bin.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Vec<HistBin>> {
    if bins == 0 {
        return Err(Error::Argument("histogram needs at least one bin".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Argument(format!("invalid histogram range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistBin> = (0..bins)
        .map(|b| HistBin {
            lo: lo + b as f64 * width,
            hi: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for &v in values {
        let pos = ((v - lo) / width).floor();
        // NaN lands in the first bin
        let b = if pos >= bins as f64 {
            bins - 1
        } else {
            pos.max(0.0) as usize
        };
        out[b].count += 1;
    }
    Ok(out)
}
