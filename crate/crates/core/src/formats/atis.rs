//! ATIS / N-MNIST style 40-bit records.
//!
//! ```text
//! byte 0     x
//! byte 1     y
//! byte 2..5  bit 23 = polarity (1 = on), bits 22..0 = timestamp (µs), big-endian
//! ```
//!
//! There is no overflow marker in this format, so timestamps must fit in
//! 23 bits (about 8.39 s). Longer recordings belong in the native format.

use crate::event::{sort_events, Event, EventStream, Polarity};
use crate::{Error, Result};

const RECORD: usize = 5;

/// Largest representable timestamp.
pub const ATIS_MAX_TIMESTAMP: u64 = (1 << 23) - 1;

pub fn read_atis_bin(bytes: &[u8], width: u16, height: u16) -> Result<EventStream> {
    if !bytes.len().is_multiple_of(RECORD) {
        return Err(Error::Malformed {
            offset: bytes.len() - bytes.len() % RECORD,
            reason: format!("length {} is not a multiple of {RECORD}", bytes.len()),
        });
    }
    let mut events = Vec::with_capacity(bytes.len() / RECORD);
    for (index, rec) in bytes.chunks_exact(RECORD).enumerate() {
        let (x, y) = (u16::from(rec[0]), u16::from(rec[1]));
        if x >= width || y >= height {
            return Err(Error::OutOfBounds {
                index,
                reason: format!("({x}, {y}) outside {width}x{height} sensor"),
            });
        }
        let word = u32::from_be_bytes([0, rec[2], rec[3], rec[4]]);
        let p = if word & 0x80_0000 != 0 {
            Polarity::On
        } else {
            Polarity::Off
        };
        let t = u64::from(word & 0x7f_ffff);
        events.push(Event::new(x, y, t, p));
    }
    let stream = EventStream::from_events(events, width, height);
    if stream.events.windows(2).all(|w| w[0].t <= w[1].t) {
        Ok(stream)
    } else {
        Ok(sort_events(&stream))
    }
}

pub fn write_atis_bin(stream: &EventStream) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(stream.len() * RECORD);
    for (index, e) in stream.events.iter().enumerate() {
        if e.t > ATIS_MAX_TIMESTAMP {
            return Err(Error::Encoding {
                index,
                reason: format!("timestamp {} exceeds 23 bits", e.t),
            });
        }
        let (Ok(x), Ok(y)) = (u8::try_from(e.x), u8::try_from(e.y)) else {
            return Err(Error::Encoding {
                index,
                reason: format!("coordinate ({}, {}) exceeds 8 bits", e.x, e.y),
            });
        };
        let word = e.t as u32 | if e.p == Polarity::On { 0x80_0000 } else { 0 };
        let [_, b2, b3, b4] = word.to_be_bytes();
        out.extend_from_slice(&[x, y, b2, b3, b4]);
    }
    Ok(out)
}
