//! Event-to-frame representations.
//!
//! [`est_frames`] accumulates each event into `C` temporal bins per polarity:
//!
//! ```text
//! V(p, c, x, y) = sum_i  tau_i * f(tau_i - c / (C - 1))   over events at (x, y) with polarity p
//! ```
//!
//! where `tau_i` is the event time mapped onto `[0, 1]` by the stream's
//! window (or the raw microsecond value when normalization is off) and `f`
//! is a [`KernelSpec`]. Sums run in `f64`; the tensor is exported as `f32`.

mod kernel;
mod tensor;

use rayon::prelude::*;

pub use kernel::{
    bin_center, bin_spacing, eval_kernel, load_mlp_kernel, load_mlp_kernel_file, DenseLayer, KernelKind, KernelSpec,
    MlpKernel, KERNEL_MAGIC, LEAKY_SLOPE, MLP_HIDDEN, MLP_SHAPES,
};
pub use tensor::{read_tensor, write_nonzero_csv, write_tensor, FrameTensor, TENSOR_MAGIC};

use crate::event::EventStream;
use crate::{Error, Result};

pub const DEFAULT_CHANNELS: usize = 9;

#[derive(Clone, Debug, PartialEq)]
pub struct ReprConfig {
    /// Temporal bins per polarity.
    pub channels: usize,
    pub kernel: KernelSpec,
    /// Map timestamps onto `[0, 1]` using the stream window.
    pub normalize_time: bool,
}

impl Default for ReprConfig {
    fn default() -> Self {
        ReprConfig {
            channels: DEFAULT_CHANNELS,
            kernel: KernelSpec::Triangular,
            normalize_time: true,
        }
    }
}

impl ReprConfig {
    pub fn new(channels: usize, kernel: KernelSpec) -> Result<Self> {
        if channels == 0 {
            return Err(Error::Config("channels per polarity must be at least 1".into()));
        }
        Ok(ReprConfig {
            channels,
            kernel,
            normalize_time: true,
        })
    }

    pub fn raw_time(mut self) -> Self {
        self.normalize_time = false;
        self
    }
}

/// Maps a microsecond timestamp onto the representation time axis.
#[derive(Clone, Copy, Debug)]
pub(crate) enum TimeScale {
    Normalized { start: u64, span: f64 },
    Raw,
}

impl TimeScale {
    pub(crate) fn for_stream(stream: &EventStream, normalize: bool) -> Result<Self> {
        if !normalize {
            return Ok(TimeScale::Raw);
        }
        if stream.t_end <= stream.t_start && !stream.is_empty() {
            return Err(Error::DegenerateWindow(stream.t_start));
        }
        Ok(TimeScale::Normalized {
            start: stream.t_start,
            span: (stream.t_end - stream.t_start) as f64,
        })
    }

    #[inline]
    pub(crate) fn apply(self, t: u64) -> f64 {
        match self {
            TimeScale::Normalized { start, span } => (t - start) as f64 / span,
            TimeScale::Raw => t as f64,
        }
    }
}

/// Kernel-weighted temporal accumulation into a `(2, C, H, W)` tensor.
pub fn est_frames(stream: &EventStream, cfg: &ReprConfig) -> Result<FrameTensor> {
    if cfg.channels == 0 {
        return Err(Error::Config("channels per polarity must be at least 1".into()));
    }
    crate::event::ensure_valid(stream)?;
    let scale = TimeScale::for_stream(stream, cfg.normalize_time)?;
    let channels = cfg.channels;
    let mut out = FrameTensor::zeros(channels, stream);
    let last = channels - 1;
    let spacing = bin_spacing(channels);
    let centers: Vec<f64> = (0..channels).map(|c| bin_center(c, channels)).collect();
    let mut weights = vec![0.0f64; channels];

    for e in &stream.events {
        let tau = scale.apply(e.t);
        // candidate bin range outside of which the kernel is known to vanish
        let (lo, hi) = match &cfg.kernel {
            KernelSpec::Delta | KernelSpec::Triangular if channels > 1 => {
                let pos = (tau * last as f64).clamp(0.0, last as f64);
                let lo = (pos.floor() as usize).saturating_sub(1);
                let hi = (pos.ceil() as usize + 1).min(last);
                (lo, hi)
            }
            _ => (0, last),
        };
        for c in lo..=hi {
            let u = tau - centers[c];
            weights[c] = match &cfg.kernel {
                KernelSpec::Delta => kernel::delta(u, spacing, c == last),
                k => eval_kernel(k, channels, u),
            };
        }
        let base = out.offset(e.p.group(), 0, e.y as usize, e.x as usize);
        let plane = out.plane_len();
        for (c, w) in weights.iter_mut().enumerate().take(hi + 1).skip(lo) {
            if *w != 0.0 {
                out.data[base + c * plane] += tau * *w;
            }
            *w = 0.0;
        }
    }
    Ok(out)
}

/// [`est_frames`] over many videos on the current rayon pool, in input order.
pub fn est_frames_many(streams: &[EventStream], cfg: &ReprConfig) -> Result<Vec<FrameTensor>> {
    streams.par_iter().map(|s| est_frames(s, cfg)).collect()
}

/// Per-pixel event counts, shape `(2, 1, H, W)`.
pub fn count_histogram(stream: &EventStream) -> Result<FrameTensor> {
    crate::event::ensure_valid(stream)?;
    let mut out = FrameTensor::zeros(1, stream);
    for e in &stream.events {
        let i = out.offset(e.p.group(), 0, e.y as usize, e.x as usize);
        out.data[i] += 1.0;
    }
    Ok(out)
}

/// Normalized timestamp of the most recent event per pixel and polarity,
/// shape `(2, 1, H, W)`, zero where no event occurred.
pub fn time_surface(stream: &EventStream) -> Result<FrameTensor> {
    crate::event::ensure_valid(stream)?;
    let scale = TimeScale::for_stream(stream, true)?;
    let mut out = FrameTensor::zeros(1, stream);
    // events are chronological, so the last write wins
    for e in &stream.events {
        let i = out.offset(e.p.group(), 0, e.y as usize, e.x as usize);
        out.data[i] = scale.apply(e.t);
    }
    Ok(out)
}
