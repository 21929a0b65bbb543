//! Deterministic inputs shared by the benchmarks.

use eventflux::synth::{gen_fan, FanConfig};
use eventflux::EventStream;

/// Fan clip with roughly `target` events, obtained by scaling the clip
/// duration at the default speed.
pub fn fan_stream(target: usize) -> EventStream {
    let base = FanConfig::default();
    let per_us = (base.expected_blade_events() + base.expected_noise_events()) / base.duration as f64;
    let cfg = FanConfig {
        duration: ((target as f64 / per_us) as u64).max(1),
        ..base
    };
    gen_fan(&cfg).expect("valid fan config").with_video_id("bench")
}

/// `m` gradient-like vectors of length `dim` from a fixed linear congruential sequence.
pub fn vectors(m: usize, dim: usize) -> Vec<Vec<f32>> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    (0..m)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    state = state
                        .wrapping_mul(6_364_136_223_846_793_005)
                        .wrapping_add(1_442_695_040_888_963_407);
                    ((state >> 40) as f32 / (1u64 << 24) as f32) - 0.5
                })
                .collect()
        })
        .collect()
}

/// Accuracies spread over a few plateaus, like a hyperparameter sweep.
pub fn accuracies(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let plateau = [0.2, 0.55, 0.7, 0.9][i % 4];
            plateau + ((i * 37) % 11) as f64 * 0.004
        })
        .collect()
}
