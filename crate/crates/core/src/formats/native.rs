//! Native `.evs` container. All integers little-endian.
//!
//! ```text
//! "EVS1"
//! u16 width, u16 height
//! u64 t_start, u64 t_end
//! u8  has_label, [u32 len, utf-8 bytes]   label, present iff has_label = 1
//! u32 len, utf-8 bytes                     video_id
//! u64 n_events
//! n_events x { u16 x, u16 y, u64 t, i8 p }
//! ```

use crate::event::{Event, EventStream, Polarity};
use crate::{Error, Result};

pub const NATIVE_MAGIC: &[u8; 4] = b"EVS1";
const EVENT_BYTES: usize = 2 + 2 + 8 + 1;

pub fn write_native(stream: &EventStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + stream.video_id.len() + stream.len() * EVENT_BYTES);
    out.extend_from_slice(NATIVE_MAGIC);
    out.extend_from_slice(&stream.width.to_le_bytes());
    out.extend_from_slice(&stream.height.to_le_bytes());
    out.extend_from_slice(&stream.t_start.to_le_bytes());
    out.extend_from_slice(&stream.t_end.to_le_bytes());
    match &stream.label {
        Some(label) => {
            out.push(1);
            put_str(&mut out, label);
        }
        None => out.push(0),
    }
    put_str(&mut out, &stream.video_id);
    out.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    for e in &stream.events {
        out.extend_from_slice(&e.x.to_le_bytes());
        out.extend_from_slice(&e.y.to_le_bytes());
        out.extend_from_slice(&e.t.to_le_bytes());
        out.push(e.p.sign() as u8);
    }
    out
}

pub fn read_native(bytes: &[u8]) -> Result<EventStream> {
    if bytes.len() < 4 || &bytes[..4] != NATIVE_MAGIC {
        return Err(Error::BadMagic {
            expected: "EVS1",
            found: bytes.iter().take(4).copied().collect(),
        });
    }
    let mut cur = Cursor { bytes, pos: 4 };
    let width = u16::from_le_bytes(cur.take()?);
    let height = u16::from_le_bytes(cur.take()?);
    let t_start = u64::from_le_bytes(cur.take()?);
    let t_end = u64::from_le_bytes(cur.take()?);
    let label = match cur.take::<1>()?[0] {
        0 => None,
        1 => Some(cur.string()?),
        flag => {
            return Err(Error::Malformed {
                offset: cur.pos - 1,
                reason: format!("label flag must be 0 or 1, found {flag}"),
            })
        }
    };
    let video_id = cur.string()?;
    let n = u64::from_le_bytes(cur.take()?);

    let payload = &bytes[cur.pos..];
    let available = (payload.len() / EVENT_BYTES) as u64;
    if available < n {
        return Err(Error::Truncated {
            what: "events",
            expected: n,
            actual: available,
        });
    }
    let mut events = Vec::with_capacity(n as usize);
    for (i, rec) in payload.chunks_exact(EVENT_BYTES).take(n as usize).enumerate() {
        let p = Polarity::try_from(rec[12] as i8).map_err(|reason| Error::Malformed {
            offset: cur.pos + i * EVENT_BYTES + 12,
            reason,
        })?;
        events.push(Event {
            x: u16::from_le_bytes([rec[0], rec[1]]),
            y: u16::from_le_bytes([rec[2], rec[3]]),
            t: u64::from_le_bytes(rec[4..12].try_into().expect("8-byte slice")),
            p,
        });
    }
    let trailing = payload.len() - n as usize * EVENT_BYTES;
    if trailing != 0 {
        return Err(Error::Malformed {
            offset: bytes.len() - trailing,
            reason: format!("{trailing} trailing bytes after event array"),
        });
    }

    let stream = EventStream {
        events,
        width,
        height,
        t_start,
        t_end,
        label,
        video_id,
    };
    crate::event::ensure_valid(&stream)?;
    Ok(stream)
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self.bytes.get(self.pos..end).ok_or(Error::Truncated {
            what: "header bytes",
            expected: end as u64,
            actual: self.bytes.len() as u64,
        })?;
        self.pos = end;
        Ok(slice.try_into().expect("length checked"))
    }

    fn string(&mut self) -> Result<String> {
        let len = u32::from_le_bytes(self.take()?) as usize;
        let start = self.pos;
        let raw = self.bytes.get(start..start + len).ok_or(Error::Truncated {
            what: "header bytes",
            expected: (start + len) as u64,
            actual: self.bytes.len() as u64,
        })?;
        self.pos += len;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::Malformed {
            offset: start,
            reason: "string is not valid UTF-8".into(),
        })
    }
}
