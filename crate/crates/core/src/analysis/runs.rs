//! Training-run observations and their CSV / JSONL ingestion.
//!
//! CSV header: `run_id,split,seed,accuracy,lr,batch_size,weight_decay[,extras...]`.
//! JSONL: one object per line with the same keys; unknown keys become extras.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

pub const RUN_COLUMNS: [&str; 7] = [
    "run_id",
    "split",
    "seed",
    "accuracy",
    "lr",
    "batch_size",
    "weight_decay",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Validation,
    Test,
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::Argument(format!("unknown split {other:?}"))),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum HpValue {
    Int(i64),
    Real(f64),
    Text(String),
}

impl HpValue {
    fn parse(raw: &str) -> Self {
        let raw = raw.trim();
        if let Ok(i) = raw.parse::<i64>() {
            HpValue::Int(i)
        } else if let Ok(f) = raw.parse::<f64>() {
            HpValue::Real(f)
        } else {
            HpValue::Text(raw.to_owned())
        }
    }

    fn from_json(v: &serde_json::Value) -> Self {
        match v {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(HpValue::Int)
                .unwrap_or_else(|| HpValue::Real(n.as_f64().unwrap_or(f64::NAN))),
            serde_json::Value::String(s) => HpValue::Text(s.clone()),
            other => HpValue::Text(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: String,
    pub split: Split,
    pub seed: u64,
    /// In `[0, 1]`.
    pub accuracy: f64,
    pub hp: BTreeMap<String, HpValue>,
}

fn check_accuracy(line: u64, accuracy: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&accuracy) {
        Ok(accuracy)
    } else {
        Err(Error::Parse {
            line,
            reason: format!("invariant violation: accuracy {accuracy} outside [0, 1]"),
        })
    }
}

pub fn read_runs_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    if headers.len() < RUN_COLUMNS.len() || !headers.iter().zip(RUN_COLUMNS).all(|(h, want)| h == want) {
        return Err(Error::Parse {
            line: 1,
            reason: format!("header must start with {:?}", RUN_COLUMNS.join(",")),
        });
    }

    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |col: &str, reason: String| Error::Parse {
            line,
            reason: format!("column {col}: {reason}"),
        };
        let split = rec[1].parse::<Split>().map_err(|e| bad("split", e.to_string()))?;
        let seed = rec[2].parse::<u64>().map_err(|e| bad("seed", e.to_string()))?;
        let accuracy = rec[3].parse::<f64>().map_err(|e| bad("accuracy", e.to_string()))?;
        let accuracy = check_accuracy(line, accuracy)?;
        let mut hp = BTreeMap::new();
        let lr = rec[4].parse::<f64>().map_err(|e| bad("lr", e.to_string()))?;
        let batch = rec[5].parse::<i64>().map_err(|e| bad("batch_size", e.to_string()))?;
        let wd = rec[6].parse::<f64>().map_err(|e| bad("weight_decay", e.to_string()))?;
        hp.insert("lr".to_owned(), HpValue::Real(lr));
        hp.insert("batch_size".to_owned(), HpValue::Int(batch));
        hp.insert("weight_decay".to_owned(), HpValue::Real(wd));
        for (name, raw) in headers.iter().zip(rec.iter()).skip(RUN_COLUMNS.len()) {
            hp.insert(name.to_owned(), HpValue::parse(raw));
        }
        out.push(RunRecord {
            run_id: rec[0].to_owned(),
            split,
            seed,
            accuracy,
            hp,
        });
    }
    Ok(out)
}

pub fn read_runs_jsonl(text: &str) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line = i as u64 + 1;
        let bad = |reason: String| Error::Parse { line, reason };
        let obj: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(l).map_err(|e| bad(e.to_string()))?;
        let field = |k: &str| obj.get(k).ok_or_else(|| bad(format!("missing field {k:?}")));
        let number = |k: &str| {
            field(k)?
                .as_f64()
                .ok_or_else(|| bad(format!("field {k:?} is not a number")))
        };
        let run_id = match field("run_id")? {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let split = field("split")?
            .as_str()
            .ok_or_else(|| bad("field \"split\" is not a string".into()))?
            .parse::<Split>()
            .map_err(|e| bad(e.to_string()))?;
        let seed = field("seed")?
            .as_u64()
            .ok_or_else(|| bad("field \"seed\" is not an unsigned integer".into()))?;
        let accuracy = check_accuracy(line, number("accuracy")?)?;
        let mut hp = BTreeMap::new();
        hp.insert("lr".to_owned(), HpValue::Real(number("lr")?));
        let batch = field("batch_size")?
            .as_i64()
            .ok_or_else(|| bad("field \"batch_size\" is not an integer".into()))?;
        hp.insert("batch_size".to_owned(), HpValue::Int(batch));
        hp.insert("weight_decay".to_owned(), HpValue::Real(number("weight_decay")?));
        for (k, v) in obj.iter().filter(|(k, _)| !RUN_COLUMNS.contains(&k.as_str())) {
            hp.insert(k.clone(), HpValue::from_json(v));
        }
        out.push(RunRecord {
            run_id,
            split,
            seed,
            accuracy,
            hp,
        });
    }
    Ok(out)
}
