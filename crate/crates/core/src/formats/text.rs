//! Plain `x,y,t,p` CSV. Accepts `{-1, 1}` or `{0, 1}` polarity on input,
//! always writes `{-1, 1}`.

use crate::event::{sort_events, Event, EventStream, Polarity};
use crate::{Error, Result};

const HEADER: [&str; 4] = ["x", "y", "t", "p"];

/// Parses CSV text. Without `geometry` the sensor size is inferred as
/// one past the largest coordinate seen.
pub fn read_csv(text: &str, geometry: Option<(u16, u16)>) -> Result<EventStream> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    match records.next() {
        Some(Ok(h)) if h.iter().eq(HEADER) => {}
        Some(Ok(h)) => {
            return Err(Error::Parse {
                line: 1,
                reason: format!(
                    "expected header \"x,y,t,p\", found {:?}",
                    h.iter().collect::<Vec<_>>().join(",")
                ),
            })
        }
        Some(Err(e)) => return Err(csv_error(e, 1)),
        None => {
            return Err(Error::Parse {
                line: 1,
                reason: "missing header \"x,y,t,p\"".into(),
            })
        }
    }

    let mut events = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(Error::Parse {
                line,
                reason: format!("expected 4 fields, found {}", rec.len()),
            });
        }
        let field = |i: usize| -> Result<i64> {
            rec[i].parse::<i64>().map_err(|_| Error::Parse {
                line,
                reason: format!("field {:?} is not an integer: {:?}", HEADER[i], &rec[i]),
            })
        };
        let coord = |i: usize| -> Result<u16> {
            u16::try_from(field(i)?).map_err(|_| Error::Parse {
                line,
                reason: format!("field {:?} out of range: {:?}", HEADER[i], &rec[i]),
            })
        };
        let (x, y) = (coord(0)?, coord(1)?);
        let t = u64::try_from(field(2)?).map_err(|_| Error::Parse {
            line,
            reason: format!("negative timestamp {:?}", &rec[2]),
        })?;
        let p = match field(3)? {
            1 => Polarity::On,
            0 | -1 => Polarity::Off,
            other => {
                return Err(Error::Parse {
                    line,
                    reason: format!("unknown polarity value {other}"),
                })
            }
        };
        events.push(Event::new(x, y, t, p));
    }

    let (width, height) = match geometry {
        Some((w, h)) => {
            if let Some(index) = events.iter().position(|e| e.x >= w || e.y >= h) {
                return Err(Error::OutOfBounds {
                    index,
                    reason: format!("({}, {}) outside {w}x{h} sensor", events[index].x, events[index].y),
                });
            }
            (w, h)
        }
        None => {
            let extent = |f: fn(&Event) -> u16| events.iter().map(f).max().map_or(1, |m| m.saturating_add(1));
            (extent(|e| e.x), extent(|e| e.y))
        }
    };
    let stream = EventStream::from_events(events, width, height);
    if stream.events.windows(2).all(|w| w[0].t <= w[1].t) {
        Ok(stream)
    } else {
        Ok(sort_events(&stream))
    }
}

pub fn write_csv(stream: &EventStream) -> String {
    let mut out = String::with_capacity(8 + stream.len() * 16);
    out.push_str("x,y,t,p\n");
    for e in &stream.events {
        out.push_str(&format!("{},{},{},{}\n", e.x, e.y, e.t, e.p.sign()));
    }
    out
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        reason: e.to_string(),
    }
}
