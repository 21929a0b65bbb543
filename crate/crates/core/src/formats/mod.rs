//! On-disk event formats.
//!
//! | kind       | extension | carries                                   |
//! |------------|-----------|-------------------------------------------|
//! | `AtisBin`  | `.bin`    | events only (23-bit µs timestamps)        |
//! | `Csv`      | `.csv`    | events only                               |
//! | `Jsonl`    | `.jsonl`  | header line with all metadata, then events |
//! | `Native`   | `.evs`    | everything, bit-exact                     |
//!
//! Formats that do not carry a time window decode to `[0, max t]`.

mod atis;
mod jsonl;
mod native;
mod text;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub use atis::{read_atis_bin, write_atis_bin, ATIS_MAX_TIMESTAMP};
pub use jsonl::{read_jsonl, write_jsonl};
pub use native::{read_native, write_native, NATIVE_MAGIC};
pub use text::{read_csv, write_csv};

use crate::event::EventStream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormatKind {
    AtisBin,
    Csv,
    Jsonl,
    Native,
}

impl FormatKind {
    pub const ALL: [FormatKind; 4] = [
        FormatKind::AtisBin,
        FormatKind::Csv,
        FormatKind::Jsonl,
        FormatKind::Native,
    ];

    pub fn extension(self) -> &'static str {
        match self {
            FormatKind::AtisBin => "bin",
            FormatKind::Csv => "csv",
            FormatKind::Jsonl => "jsonl",
            FormatKind::Native => "evs",
        }
    }

    pub fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        FormatKind::ALL.into_iter().find(|k| k.extension() == ext)
    }

    /// Whether the format needs sensor dimensions from the caller.
    pub fn needs_geometry(self) -> bool {
        matches!(self, FormatKind::AtisBin)
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormatKind::AtisBin => "atis-bin",
            FormatKind::Csv => "csv",
            FormatKind::Jsonl => "jsonl",
            FormatKind::Native => "native",
        })
    }
}

impl FromStr for FormatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "atis-bin" | "atis_bin" | "bin" => Ok(FormatKind::AtisBin),
            "csv" => Ok(FormatKind::Csv),
            "jsonl" => Ok(FormatKind::Jsonl),
            "native" | "evs" => Ok(FormatKind::Native),
            other => Err(Error::Argument(format!("unknown format {other:?}"))),
        }
    }
}

/// Decodes `bytes` in the given format. `geometry` is required for ATIS
/// input; for CSV it overrides the geometry inferred from the data.
pub fn decode(kind: FormatKind, bytes: &[u8], geometry: Option<(u16, u16)>) -> Result<EventStream> {
    match kind {
        FormatKind::AtisBin => {
            let (w, h) = geometry.ok_or_else(|| Error::Argument("atis-bin input requires width and height".into()))?;
            read_atis_bin(bytes, w, h)
        }
        FormatKind::Csv => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Malformed {
                offset: e.valid_up_to(),
                reason: "invalid UTF-8".into(),
            })?;
            read_csv(text, geometry)
        }
        FormatKind::Jsonl => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Malformed {
                offset: e.valid_up_to(),
                reason: "invalid UTF-8".into(),
            })?;
            read_jsonl(text)
        }
        FormatKind::Native => read_native(bytes),
    }
}

pub fn encode(kind: FormatKind, stream: &EventStream) -> Result<Vec<u8>> {
    match kind {
        FormatKind::AtisBin => write_atis_bin(stream),
        FormatKind::Csv => Ok(write_csv(stream).into_bytes()),
        FormatKind::Jsonl => write_jsonl(stream).map(String::into_bytes),
        FormatKind::Native => Ok(write_native(stream)),
    }
}

/// Reads a stream from disk. Formats without a video id get the file stem.
pub fn load(path: &Path, kind: FormatKind, geometry: Option<(u16, u16)>) -> Result<EventStream> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut stream = decode(kind, &bytes, geometry)?;
    if stream.video_id.is_empty() {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            stream.video_id = stem.to_owned();
        }
    }
    Ok(stream)
}

pub fn save(path: &Path, kind: FormatKind, stream: &EventStream) -> Result<()> {
    let bytes = encode(kind, stream)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_names_round_trip() {
        for kind in FormatKind::ALL {
            assert_eq!(kind.to_string().parse::<FormatKind>().unwrap(), kind);
            let p = format!("a.{}", kind.extension());
            assert_eq!(FormatKind::from_extension(Path::new(&p)), Some(kind));
        }
        assert!("aedat".parse::<FormatKind>().is_err());
    }

    #[test]
    fn atis_decode_requires_geometry() {
        assert!(matches!(
            decode(FormatKind::AtisBin, &[], None),
            Err(Error::Argument(_))
        ));
    }
}
