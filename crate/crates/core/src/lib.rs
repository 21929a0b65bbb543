//! Event-camera stream processing: per-epoch random subsampling, EST-style
//! multi-channel frame representations, and the accompanying analysis
//! procedures (hyperparameter sensitivity, gradient diversity, binomial
//! above-chance tests).
//!
//! The crate is organised bottom-up:
//!
//! - [`event`]: the event model and stream container.
//! - [`formats`]: ATIS binary, CSV, JSONL and the native `.evs` container.
//! - [`subsample`]: deterministic, order-independent random subsampling.
//! - [`represent`]: kernel-weighted frame tensors plus count and time-surface baselines.
//! - [`analysis`]: k-means sensitivity metric, cosine statistics, binomial tails.
//! - [`synth`]: rotating-fan synthetic event generator.

pub mod analysis;
pub mod error;
pub mod event;
pub mod formats;
pub mod represent;
pub mod rng;
pub mod subsample;
pub mod synth;

pub use error::{Error, Result};
pub use event::{sort_events, validate, Event, EventStream, Polarity, Violation};
pub use formats::FormatKind;
pub use represent::{est_frames, FrameTensor, KernelKind, KernelSpec, ReprConfig};
pub use subsample::{repeat_eval_draws, subsample, SubsamplePlan};

/// Crate version, shared by every front end.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
