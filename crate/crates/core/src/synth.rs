//! Synthetic rotating-fan event streams.
//!
//! Blade events are placed on ideal radial line segments: a timestamp is
//! drawn uniformly over the clip, the blade angle follows from it, and the
//! event lands at a uniform radius on the blade's leading (`On`) or trailing
//! (`Off`) edge. The number of blade events is Poisson with mean
//! `events_per_revolution * revolutions`, so a fan spinning three times as
//! fast produces three times as many events per clip on average. Uniform
//! background noise is added on top.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::event::{sort_events, Event, EventStream, Polarity};
use crate::formats::write_native;
use crate::rng::{child_seed, keyed_rng};
use crate::{Error, Result};

pub const DEFAULT_CLIP_US: u64 = 75_000;
pub const SLOW_LABEL: &str = "speed1";
pub const FAST_LABEL: &str = "speed3";
pub const DEFAULT_SLOW_VIDEOS: usize = 235;
pub const DEFAULT_FAST_VIDEOS: usize = 275;

/// Angular width of a blade in radians.
const BLADE_WIDTH: f64 = 0.35;
/// Hub and tip radius as fractions of the shorter sensor side.
const HUB: f64 = 0.08;
const TIP: f64 = 0.45;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FanConfig {
    pub width: u16,
    pub height: u16,
    pub n_blades: u32,
    /// Revolutions per second. Zero renders a stopped fan (noise only).
    pub angular_speed: f64,
    pub duration: u64,
    pub events_per_revolution: u32,
    /// Background events per second.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for FanConfig {
    fn default() -> Self {
        FanConfig {
            width: 128,
            height: 128,
            n_blades: 3,
            angular_speed: 10.0,
            duration: DEFAULT_CLIP_US,
            events_per_revolution: 3200,
            noise_rate: 2000.0,
            seed: 0,
        }
    }
}

impl FanConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.width == 0 || self.height == 0 {
            return fail(format!("sensor {}x{} has a zero dimension", self.width, self.height));
        }
        if self.n_blades == 0 {
            return fail("n_blades must be at least 1".into());
        }
        if !(self.angular_speed.is_finite() && self.angular_speed >= 0.0) {
            return fail(format!(
                "angular speed must be finite and non-negative, got {}",
                self.angular_speed
            ));
        }
        if self.duration == 0 {
            return fail("duration must be positive".into());
        }
        if self.events_per_revolution == 0 {
            return fail("events_per_revolution must be at least 1".into());
        }
        if !(self.noise_rate.is_finite() && self.noise_rate >= 0.0) {
            return fail(format!(
                "noise rate must be finite and non-negative, got {}",
                self.noise_rate
            ));
        }
        Ok(())
    }

    pub fn revolutions(&self) -> f64 {
        self.angular_speed * self.duration as f64 / 1e6
    }

    /// Expected number of blade events per clip.
    pub fn expected_blade_events(&self) -> f64 {
        f64::from(self.events_per_revolution) * self.revolutions()
    }

    pub fn expected_noise_events(&self) -> f64 {
        self.noise_rate * self.duration as f64 / 1e6
    }

    pub fn with_speed(&self, angular_speed: f64) -> Self {
        FanConfig {
            angular_speed,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        FanConfig { seed, ..self.clone() }
    }
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map_or(0, |d| d.sample(rng) as usize)
}

/// Blade events only, unsorted.
fn blade_events(cfg: &FanConfig, rng: &mut ChaCha8Rng) -> Vec<Event> {
    let n = poisson(rng, cfg.expected_blade_events());
    let (w, h) = (f64::from(cfg.width), f64::from(cfg.height));
    let (cx, cy) = ((w - 1.0) / 2.0, (h - 1.0) / 2.0);
    let side = w.min(h);
    let (r_lo, r_hi) = (HUB * side, TIP * side);
    (0..n)
        .map(|_| {
            let t = rng.random_range(0..=cfg.duration);
            let blade = rng.random_range(0..cfg.n_blades);
            let leading = rng.random_bool(0.5);
            let r = rng.random_range(r_lo..=r_hi);
            let mut angle = TAU * (cfg.angular_speed * t as f64 / 1e6 + f64::from(blade) / f64::from(cfg.n_blades));
            if !leading {
                angle -= BLADE_WIDTH;
            }
            let x = (cx + r * angle.cos()).round().clamp(0.0, w - 1.0) as u16;
            let y = (cy + r * angle.sin()).round().clamp(0.0, h - 1.0) as u16;
            Event::new(x, y, t, if leading { Polarity::On } else { Polarity::Off })
        })
        .collect()
}

fn noise_events(cfg: &FanConfig, rng: &mut ChaCha8Rng) -> Vec<Event> {
    let n = poisson(rng, cfg.expected_noise_events());
    (0..n)
        .map(|_| {
            let t = rng.random_range(0..=cfg.duration);
            let x = rng.random_range(0..cfg.width);
            let y = rng.random_range(0..cfg.height);
            let p = if rng.random_bool(0.5) {
                Polarity::On
            } else {
                Polarity::Off
            };
            Event::new(x, y, t, p)
        })
        .collect()
}

/// One fan clip over `[0, duration]`.
pub fn gen_fan(cfg: &FanConfig) -> Result<EventStream> {
    cfg.validate()?;
    let mut blade_rng = keyed_rng("fan-blades", cfg.seed, "", 0);
    let mut noise_rng = keyed_rng("fan-noise", cfg.seed, "", 0);
    let mut events = blade_events(cfg, &mut blade_rng);
    events.extend(noise_events(cfg, &mut noise_rng));
    let stream = EventStream {
        events,
        ..EventStream::empty(cfg.width, cfg.height, 0, cfg.duration)
    }
    .with_video_id(format!("fan-{:016x}", cfg.seed));
    Ok(sort_events(&stream))
}

/// Number of events `gen_fan` would place on blades (noise excluded).
pub fn blade_event_count(cfg: &FanConfig) -> Result<usize> {
    cfg.validate()?;
    let mut rng = keyed_rng("fan-blades", cfg.seed, "", 0);
    Ok(poisson(&mut rng, cfg.expected_blade_events()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FanDatasetSpec {
    pub slow: FanConfig,
    pub fast: FanConfig,
    pub n_slow: usize,
    pub n_fast: usize,
}

impl Default for FanDatasetSpec {
    fn default() -> Self {
        let slow = FanConfig::default();
        FanDatasetSpec {
            fast: slow.with_speed(3.0 * slow.angular_speed),
            slow,
            n_slow: DEFAULT_SLOW_VIDEOS,
            n_fast: DEFAULT_FAST_VIDEOS,
        }
    }
}

impl FanDatasetSpec {
    pub fn validate(&self) -> Result<()> {
        self.slow.validate()?;
        self.fast.validate()?;
        if self.slow.with_speed(self.fast.angular_speed) != self.fast {
            return Err(Error::Config("class configs may differ only in angular_speed".into()));
        }
        Ok(())
    }

    /// Per-video configs with derived seeds, slow class first.
    pub fn videos(&self) -> impl Iterator<Item = (&'static str, usize, FanConfig)> + '_ {
        let slow = (0..self.n_slow).map(move |i| {
            let seed = child_seed(self.slow.seed, SLOW_LABEL, i as u64);
            (SLOW_LABEL, i, self.slow.with_seed(seed))
        });
        let fast = (0..self.n_fast).map(move |i| {
            let seed = child_seed(self.fast.seed, FAST_LABEL, i as u64);
            (FAST_LABEL, i, self.fast.with_seed(seed))
        });
        slow.chain(fast)
    }

    /// Generates every clip in memory, labelled and with stable ids.
    pub fn generate(&self) -> Result<Vec<EventStream>> {
        self.validate()?;
        self.videos()
            .map(|(label, i, cfg)| {
                Ok(gen_fan(&cfg)?
                    .with_label(label)
                    .with_video_id(format!("{label}_{i:04}")))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifestRow {
    /// Relative to the dataset directory.
    pub path: PathBuf,
    pub label: String,
    pub n_events: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,label,n_events\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.path.display(), r.label, r.n_events));
        }
        out
    }
}

/// Writes one native `.evs` file per clip plus `manifest.csv` into `out_dir`.
pub fn gen_two_class_fan_dataset(spec: &FanDatasetSpec, out_dir: &Path) -> Result<Manifest> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut rows = Vec::with_capacity(spec.n_slow + spec.n_fast);
    for (label, i, cfg) in spec.videos() {
        let id = format!("{label}_{i:04}");
        let stream = gen_fan(&cfg)?.with_label(label).with_video_id(id.clone());
        let rel = PathBuf::from(format!("{id}.evs"));
        let path = out_dir.join(&rel);
        std::fs::write(&path, write_native(&stream)).map_err(|e| Error::io(&path, e))?;
        rows.push(ManifestRow {
            path: rel,
            label: label.to_owned(),
            n_events: stream.len(),
        });
    }
    let manifest = Manifest { rows };
    let path = out_dir.join("manifest.csv");
    std::fs::write(&path, manifest.to_csv()).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
