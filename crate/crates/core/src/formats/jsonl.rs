//! JSON lines: a metadata header object followed by one event object per line.
//!
//! ```text
//! {"width":128,"height":128,"t_start":0,"t_end":75000,"label":"speed1","video_id":"v0"}
//! {"x":3,"y":4,"t":100,"p":1}
//! ```

use serde::{Deserialize, Serialize};

use crate::event::{Event, EventStream};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Header {
    width: u16,
    height: u16,
    t_start: u64,
    t_end: u64,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    video_id: String,
}

pub fn read_jsonl(text: &str) -> Result<EventStream> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let parse_err = |i: usize, e: serde_json::Error| Error::Parse {
        line: i as u64 + 1,
        reason: e.to_string(),
    };
    let (i, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "missing header line".into(),
    })?;
    let header: Header = serde_json::from_str(first).map_err(|e| parse_err(i, e))?;
    let events = lines
        .map(|(i, l)| serde_json::from_str::<Event>(l).map_err(|e| parse_err(i, e)))
        .collect::<Result<Vec<_>>>()?;
    let stream = EventStream {
        events,
        width: header.width,
        height: header.height,
        t_start: header.t_start,
        t_end: header.t_end,
        label: header.label,
        video_id: header.video_id,
    };
    crate::event::ensure_valid(&stream)?;
    Ok(stream)
}

pub fn write_jsonl(stream: &EventStream) -> Result<String> {
    let header = Header {
        width: stream.width,
        height: stream.height,
        t_start: stream.t_start,
        t_end: stream.t_end,
        label: stream.label.clone(),
        video_id: stream.video_id.clone(),
    };
    let to_err = |e: serde_json::Error| Error::Config(e.to_string());
    let mut out = serde_json::to_string(&header).map_err(to_err)?;
    out.push('\n');
    for e in &stream.events {
        out.push_str(&serde_json::to_string(e).map_err(to_err)?);
        out.push('\n');
    }
    Ok(out)
}
