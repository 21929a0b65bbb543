//! Per-epoch random event subsampling.
//!
//! Each call draws a uniformly random subset of `min(n_target, N)` events
//! without replacement and returns them in chronological order. The draw is
//! a pure function of `(seed, epoch, video_id)`, so a training loop gets a
//! fresh subset every epoch, and any scheduler reproduces it exactly.

use rand::Rng;
use rayon::prelude::*;

use crate::event::EventStream;
use crate::rng::keyed_rng;

/// Default number of repeated test-time evaluations.
pub const DEFAULT_EVAL_REPEATS: usize = 20;

const DOMAIN: &str = "subsample";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsamplePlan {
    pub n_target: usize,
    pub seed: u64,
    pub epoch: u64,
}

impl SubsamplePlan {
    pub fn new(n_target: usize, seed: u64, epoch: u64) -> Self {
        SubsamplePlan { n_target, seed, epoch }
    }
}

/// Indices of the selected events, ascending.
pub fn select_indices(n: usize, plan: &SubsamplePlan, video_id: &str) -> Vec<usize> {
    let k = plan.n_target.min(n);
    if k == n {
        return (0..n).collect();
    }
    let mut rng = keyed_rng(DOMAIN, plan.seed, video_id, plan.epoch);
    // partial Fisher-Yates: the first k slots end up a uniform k-subset
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

pub fn subsample(stream: &EventStream, plan: &SubsamplePlan) -> EventStream {
    if plan.n_target >= stream.len() {
        return stream.clone();
    }
    let events = select_indices(stream.len(), plan, &stream.video_id)
        .into_iter()
        .map(|i| stream.events[i])
        .collect();
    stream.with_events(events)
}

/// `repeats` draws at epochs `0..repeats` under one seed.
pub fn repeat_eval_draws(stream: &EventStream, n_target: usize, seed: u64, repeats: usize) -> Vec<EventStream> {
    (0..repeats as u64)
        .map(|epoch| subsample(stream, &SubsamplePlan::new(n_target, seed, epoch)))
        .collect()
}

/// Subsamples many videos on the current rayon pool. Output order follows
/// input order and is identical for any number of threads.
pub fn subsample_many(streams: &[EventStream], plan: &SubsamplePlan) -> Vec<EventStream> {
    streams.par_iter().map(|s| subsample(s, plan)).collect()
}
