//! Event model and the stream container shared by every other module.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Sign of a brightness change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Polarity {
    Off,
    On,
}

impl Polarity {
    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Off => -1,
            Polarity::On => 1,
        }
    }

    /// Channel group in a frame tensor: `On -> 1`, `Off -> 0`.
    pub fn group(self) -> usize {
        match self {
            Polarity::Off => 0,
            Polarity::On => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Off => Polarity::On,
            Polarity::On => Polarity::Off,
        }
    }
}

impl TryFrom<i8> for Polarity {
    type Error = String;

    fn try_from(value: i8) -> Result<Self, Self::Error> {
        match value {
            -1 => Ok(Polarity::Off),
            1 => Ok(Polarity::On),
            other => Err(format!("polarity must be -1 or +1, got {other}")),
        }
    }
}

impl From<Polarity> for i8 {
    fn from(p: Polarity) -> i8 {
        p.sign()
    }
}

/// A single camera event. Timestamps are integer microseconds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    pub t: u64,
    pub p: Polarity,
}

impl Event {
    pub fn new(x: u16, y: u16, t: u64, p: Polarity) -> Self {
        Event { x, y, t, p }
    }
}

/// Chronologically ordered events of one video, with the sensor geometry
/// and the video's time window.
///
/// `t_start`/`t_end` are stored rather than derived so that subsampled
/// streams keep the window of the source video.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventStream {
    pub events: Vec<Event>,
    pub width: u16,
    pub height: u16,
    pub t_start: u64,
    pub t_end: u64,
    pub label: Option<String>,
    pub video_id: String,
}

impl EventStream {
    /// Empty stream with the given geometry and window.
    pub fn empty(width: u16, height: u16, t_start: u64, t_end: u64) -> Self {
        EventStream {
            events: Vec::new(),
            width,
            height,
            t_start,
            t_end,
            label: None,
            video_id: String::new(),
        }
    }

    /// Stream over `events` whose window spans `[0, max t]`.
    pub fn from_events(events: Vec<Event>, width: u16, height: u16) -> Self {
        let t_end = events.iter().map(|e| e.t).max().unwrap_or(0);
        EventStream {
            events,
            width,
            height,
            t_start: 0,
            t_end,
            label: None,
            video_id: String::new(),
        }
    }

    pub fn with_video_id(mut self, id: impl Into<String>) -> Self {
        self.video_id = id.into();
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn duration_us(&self) -> u64 {
        self.t_end.saturating_sub(self.t_start)
    }

    /// Copy of this stream's metadata with a different event list.
    pub fn with_events(&self, events: Vec<Event>) -> Self {
        EventStream {
            events,
            width: self.width,
            height: self.height,
            t_start: self.t_start,
            t_end: self.t_end,
            label: self.label.clone(),
            video_id: self.video_id.clone(),
        }
    }
}

/// One violated stream invariant, with the first offending event index
/// where applicable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyGeometry { width: u16, height: u16 },
    InvertedWindow { t_start: u64, t_end: u64 },
    NonMonotonic { index: usize },
    XOutOfBounds { index: usize },
    YOutOfBounds { index: usize },
    BeforeWindow { index: usize },
    AfterWindow { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGeometry { width, height } => {
                write!(f, "sensor geometry {width}x{height} has a zero dimension")
            }
            Violation::InvertedWindow { t_start, t_end } => {
                write!(f, "time window inverted: t_start {t_start} > t_end {t_end}")
            }
            Violation::NonMonotonic { index } => write!(f, "non-monotonic timestamp at index {index}"),
            Violation::XOutOfBounds { index } => write!(f, "x out of bounds at index {index}"),
            Violation::YOutOfBounds { index } => write!(f, "y out of bounds at index {index}"),
            Violation::BeforeWindow { index } => write!(f, "timestamp before t_start at index {index}"),
            Violation::AfterWindow { index } => write!(f, "timestamp after t_end at index {index}"),
        }
    }
}

/// Checks every stream invariant. Returns one entry per violated invariant;
/// an empty list means the stream is valid.
pub fn validate(stream: &EventStream) -> Vec<Violation> {
    let mut out = Vec::new();
    if stream.width == 0 || stream.height == 0 {
        out.push(Violation::EmptyGeometry {
            width: stream.width,
            height: stream.height,
        });
    }
    if stream.t_start > stream.t_end {
        out.push(Violation::InvertedWindow {
            t_start: stream.t_start,
            t_end: stream.t_end,
        });
    }

    let events = &stream.events;
    let first = |pred: &dyn Fn(usize, &Event) -> bool| events.iter().enumerate().position(|(i, e)| pred(i, e));

    if let Some(index) = first(&|i, e| i > 0 && e.t < events[i - 1].t) {
        out.push(Violation::NonMonotonic { index });
    }
    if let Some(index) = first(&|_, e| e.x >= stream.width) {
        out.push(Violation::XOutOfBounds { index });
    }
    if let Some(index) = first(&|_, e| e.y >= stream.height) {
        out.push(Violation::YOutOfBounds { index });
    }
    if let Some(index) = first(&|_, e| e.t < stream.t_start) {
        out.push(Violation::BeforeWindow { index });
    }
    if let Some(index) = first(&|_, e| e.t > stream.t_end) {
        out.push(Violation::AfterWindow { index });
    }
    out
}

/// Convenience wrapper turning violations into an error.
pub fn ensure_valid(stream: &EventStream) -> crate::Result<()> {
    let violations = validate(stream);
    if violations.is_empty() {
        return Ok(());
    }
    let msg = violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ");
    Err(crate::Error::InvalidStream(msg))
}

/// Stable sort by timestamp; ties keep their original relative order.
pub fn sort_events(stream: &EventStream) -> EventStream {
    let mut events = stream.events.clone();
    events.sort_by_key(|e| e.t);
    stream.with_events(events)
}
