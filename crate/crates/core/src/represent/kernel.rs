//! Temporal kernels applied to the offset between an event's normalized
//! timestamp and a bin center.

use std::path::Path;

use crate::{Error, Result};

pub const MLP_HIDDEN: usize = 30;
pub const LEAKY_SLOPE: f64 = 0.1;
pub const KERNEL_MAGIC: &[u8; 4] = b"ESTK";

/// Shapes `(rows, cols)` of the three dense layers: 1 -> 30 -> 30 -> 1.
pub const MLP_SHAPES: [(usize, usize); 3] = [(1, MLP_HIDDEN), (MLP_HIDDEN, MLP_HIDDEN), (MLP_HIDDEN, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Delta,
    Triangular,
    Gaussian,
    Mlp,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delta" => Ok(KernelKind::Delta),
            "triangular" => Ok(KernelKind::Triangular),
            "gaussian" => Ok(KernelKind::Gaussian),
            "mlp" => Ok(KernelKind::Mlp),
            other => Err(Error::Argument(format!("unknown kernel {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    /// Nearest-bin indicator.
    Delta,
    /// Unit peak at its bin, zero at the neighbouring bins.
    Triangular,
    /// `exp(-u^2 / (2 sigma^2))`, sigma in normalized time.
    Gaussian {
        sigma: f64,
    },
    Mlp(MlpKernel),
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!("gaussian sigma must be positive, got {sigma}")));
        }
        Ok(KernelSpec::Gaussian { sigma })
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Delta => KernelKind::Delta,
            KernelSpec::Triangular => KernelKind::Triangular,
            KernelSpec::Gaussian { .. } => KernelKind::Gaussian,
            KernelSpec::Mlp(_) => KernelKind::Mlp,
        }
    }

    /// Whether the kernel never produces negative weights.
    pub fn is_non_negative(&self) -> bool {
        !matches!(self, KernelSpec::Mlp(_))
    }
}

/// Spacing between adjacent bin centers on the normalized time axis.
/// Infinite when there is a single bin.
pub fn bin_spacing(channels: usize) -> f64 {
    if channels > 1 {
        1.0 / (channels - 1) as f64
    } else {
        f64::INFINITY
    }
}

/// Bin center `c / (C - 1)`, or `0` for a single bin.
pub fn bin_center(c: usize, channels: usize) -> f64 {
    if channels > 1 {
        c as f64 / (channels - 1) as f64
    } else {
        0.0
    }
}

/// Kernel value at offset `u` for a tensor with `channels` bins per polarity.
///
/// The delta kernel uses the half-open interval `[-h/2, h/2)`; the
/// accumulator additionally closes the last bin on the right.
pub fn eval_kernel(k: &KernelSpec, channels: usize, u: f64) -> f64 {
    match k {
        KernelSpec::Delta => delta(u, bin_spacing(channels), false),
        KernelSpec::Triangular => {
            if channels > 1 {
                (1.0 - u.abs() * (channels - 1) as f64).max(0.0)
            } else {
                1.0
            }
        }
        KernelSpec::Gaussian { sigma } => (-u * u / (2.0 * sigma * sigma)).exp(),
        KernelSpec::Mlp(m) => m.forward(u),
    }
}

pub(crate) fn delta(u: f64, spacing: f64, closed_right: bool) -> f64 {
    let half = spacing / 2.0;
    let inside = u >= -half && (u < half || (closed_right && u == half));
    if inside {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    /// Input width.
    pub rows: usize,
    /// Output width.
    pub cols: usize,
    /// Row-major `rows x cols`; output `j` is `sum_i x[i] * weights[i * cols + j] + bias[j]`.
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

/// 1 -> 30 -> 30 -> 1 perceptron with LeakyReLU(0.1) on both hidden layers
/// and a linear output. Weights are loaded, never trained here.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpKernel {
    layers: [DenseLayer; 3],
}

impl MlpKernel {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.len() != 3 {
            return Err(Error::Kernel {
                layer: 0,
                reason: format!("expected 3 layers, found {}", layers.len()),
            });
        }
        for (i, (layer, &(rows, cols))) in layers.iter().zip(&MLP_SHAPES).enumerate() {
            check_shape(i + 1, layer.rows, layer.cols, rows, cols)?;
            if layer.weights.len() != rows * cols || layer.bias.len() != cols {
                return Err(Error::Kernel {
                    layer: i + 1,
                    reason: format!(
                        "expected {} weights and {} biases, found {} and {}",
                        rows * cols,
                        cols,
                        layer.weights.len(),
                        layer.bias.len()
                    ),
                });
            }
            if layer.weights.iter().chain(&layer.bias).any(|w| !w.is_finite()) {
                return Err(Error::Kernel {
                    layer: i + 1,
                    reason: "non-finite weight".into(),
                });
            }
        }
        let layers: [DenseLayer; 3] = layers.try_into().expect("length checked");
        Ok(MlpKernel { layers })
    }

    /// All weights and biases zero.
    pub fn zeros() -> Self {
        let layers = MLP_SHAPES
            .iter()
            .map(|&(rows, cols)| DenseLayer {
                rows,
                cols,
                weights: vec![0.0; rows * cols],
                bias: vec![0.0; cols],
            })
            .collect();
        MlpKernel::new(layers).expect("canonical shapes")
    }

    pub fn layers(&self) -> &[DenseLayer; 3] {
        &self.layers
    }

    pub fn forward(&self, u: f64) -> f64 {
        let mut act = [0.0f64; MLP_HIDDEN];
        let mut next = [0.0f64; MLP_HIDDEN];
        let l0 = &self.layers[0];
        for (j, a) in act.iter_mut().enumerate() {
            *a = leaky(u * f64::from(l0.weights[j]) + f64::from(l0.bias[j]));
        }
        let l1 = &self.layers[1];
        for (j, out) in next.iter_mut().enumerate() {
            let mut s = f64::from(l1.bias[j]);
            for (i, a) in act.iter().enumerate() {
                s += a * f64::from(l1.weights[i * MLP_HIDDEN + j]);
            }
            *out = leaky(s);
        }
        let l2 = &self.layers[2];
        let mut y = f64::from(l2.bias[0]);
        for (i, a) in next.iter().enumerate() {
            y += a * f64::from(l2.weights[i]);
        }
        y
    }

    /// Serializes to the `ESTK` container.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(KERNEL_MAGIC);
        out.extend_from_slice(&3u32.to_le_bytes());
        for l in &self.layers {
            out.extend_from_slice(&(l.rows as u32).to_le_bytes());
            out.extend_from_slice(&(l.cols as u32).to_le_bytes());
            for w in l.weights.iter().chain(&l.bias) {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out
    }
}

fn leaky(v: f64) -> f64 {
    if v >= 0.0 {
        v
    } else {
        LEAKY_SLOPE * v
    }
}

fn check_shape(layer: usize, rows: usize, cols: usize, want_rows: usize, want_cols: usize) -> Result<()> {
    if (rows, cols) != (want_rows, want_cols) {
        return Err(Error::Kernel {
            layer,
            reason: format!("shape {rows}x{cols}, expected {want_rows}x{want_cols}"),
        });
    }
    Ok(())
}

/// Parses an `ESTK` kernel file:
///
/// ```text
/// "ESTK", u32 layer_count (= 3)
/// per layer: u32 rows, u32 cols, rows*cols f32 weights (row-major), cols f32 biases
/// ```
///
/// All little-endian.
pub fn load_mlp_kernel(bytes: &[u8]) -> Result<KernelSpec> {
    if bytes.len() < 4 || &bytes[..4] != KERNEL_MAGIC {
        return Err(Error::BadMagic {
            expected: "ESTK",
            found: bytes.iter().take(4).copied().collect(),
        });
    }
    let mut pos = 4;
    let next_u32 = |pos: &mut usize| -> Result<u32> {
        let raw = bytes.get(*pos..*pos + 4).ok_or(Error::Truncated {
            what: "kernel bytes",
            expected: (*pos + 4) as u64,
            actual: bytes.len() as u64,
        })?;
        *pos += 4;
        Ok(u32::from_le_bytes(raw.try_into().expect("4 bytes")))
    };
    let count = next_u32(&mut pos)? as usize;
    if count != 3 {
        return Err(Error::Kernel {
            layer: 0,
            reason: format!("expected 3 layers, found {count}"),
        });
    }
    let mut layers = Vec::with_capacity(3);
    for (i, &(want_rows, want_cols)) in MLP_SHAPES.iter().enumerate() {
        let rows = next_u32(&mut pos)? as usize;
        let cols = next_u32(&mut pos)? as usize;
        check_shape(i + 1, rows, cols, want_rows, want_cols)?;
        let n = rows * cols + cols;
        let raw = bytes.get(pos..pos + 4 * n).ok_or(Error::Truncated {
            what: "kernel bytes",
            expected: (pos + 4 * n) as u64,
            actual: bytes.len() as u64,
        })?;
        pos += 4 * n;
        let mut values: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let bias = values.split_off(rows * cols);
        layers.push(DenseLayer {
            rows,
            cols,
            weights: values,
            bias,
        });
    }
    if pos != bytes.len() {
        return Err(Error::Malformed {
            offset: pos,
            reason: "trailing bytes after kernel layers".into(),
        });
    }
    MlpKernel::new(layers).map(KernelSpec::Mlp)
}

pub fn load_mlp_kernel_file(path: &Path) -> Result<KernelSpec> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_mlp_kernel(&bytes)
}
