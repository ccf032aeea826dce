//! Citation datasets: one CSV row per paper, or a JSON object of arrays.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hindex_core::{CitationSample, HEstimate};
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: negative citation count {value}")]
    NegativeCount { line: u64, value: i64 },
    #[error("scholar `{0}` has a negative citation count")]
    NegativeCountFor(String),
    #[error("duplicate scholar id `{0}`")]
    DuplicateId(String),
    #[error("scholar `{0}` has no papers")]
    EmptyScholar(String),
    #[error("expected header `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("cannot infer input format from `{0}`; pass --input-format")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Ok(Self::Csv),
            Some(e) if e.eq_ignore_ascii_case("json") => Ok(Self::Json),
            _ => Err(IngestError::UnknownFormat(path.display().to_string())),
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown input format `{other}`")),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub scholars: Vec<CitationSample>,
    pub source: PathBuf,
    pub format: InputFormat,
}

impl Dataset {
    pub fn is_empty(&self) -> bool {
        self.scholars.is_empty()
    }
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn ingest(path: &Path, format: InputFormat) -> Result<Dataset, IngestError> {
    let text = read(path)?;
    let scholars = match format {
        InputFormat::Csv => parse_csv(&text)?,
        InputFormat::Json => parse_json(&text)?,
    };
    Ok(Dataset {
        scholars,
        source: path.to_path_buf(),
        format,
    })
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), IngestError> {
    let trimmed: Vec<&str> = found.iter().map(str::trim).collect();
    if trimmed != expected {
        return Err(IngestError::BadHeader {
            expected: expected.join(","),
            found: trimmed.join(","),
        });
    }
    Ok(())
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    IngestError::MalformedRow {
        line,
        reason: err.to_string(),
    }
}

/// `scholar_id,citations`, one row per paper. Scholars appear in order of
/// first occurrence; papers keep their row order.
pub fn parse_csv(text: &str) -> Result<Vec<CitationSample>, IngestError> {
    let mut reader = csv_reader(text);
    check_header(reader.headers().map_err(csv_error)?, &["scholar_id", "citations"])?;
    let mut grouped: Vec<(String, Vec<u64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id = &record[0];
        if id.is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "empty scholar_id".into(),
            });
        }
        let raw = &record[1];
        let value: i64 = raw.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("citations `{raw}` is not an integer"),
        })?;
        if value < 0 {
            return Err(IngestError::NegativeCount { line, value });
        }
        match grouped.iter_mut().find(|(g, _)| g == id) {
            Some((_, counts)) => counts.push(value as u64),
            None => grouped.push((id.to_string(), vec![value as u64])),
        }
    }
    grouped
        .into_iter()
        .map(|(id, counts)| {
            CitationSample::new(id.clone(), counts).map_err(|_| IngestError::EmptyScholar(id))
        })
        .collect()
}

/// JSON object keys in document order, rejecting repeated keys.
struct OrderedScholars(Vec<(String, Vec<i64>)>);

impl<'de> Deserialize<'de> for OrderedScholars {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScholarsVisitor;

        impl<'de> Visitor<'de> for ScholarsVisitor {
            type Value = OrderedScholars;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping scholar ids to arrays of citation counts")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out: Vec<(String, Vec<i64>)> = Vec::new();
                while let Some((id, counts)) = map.next_entry::<String, Vec<i64>>()? {
                    if out.iter().any(|(seen, _)| *seen == id) {
                        return Err(serde::de::Error::custom(format!("duplicate scholar id `{id}`")));
                    }
                    out.push((id, counts));
                }
                Ok(OrderedScholars(out))
            }
        }

        deserializer.deserialize_map(ScholarsVisitor)
    }
}

pub fn parse_json(text: &str) -> Result<Vec<CitationSample>, IngestError> {
    let parsed: OrderedScholars = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        match msg.strip_prefix("duplicate scholar id `") {
            Some(rest) => IngestError::DuplicateId(rest.split('`').next().unwrap_or("").to_string()),
            None => IngestError::Json(msg),
        }
    })?;
    parsed
        .0
        .into_iter()
        .map(|(id, counts)| {
            if counts.iter().any(|&c| c < 0) {
                return Err(IngestError::NegativeCountFor(id));
            }
            let counts = counts.into_iter().map(|c| c as u64).collect();
            CitationSample::new(id.clone(), counts).map_err(|_| IngestError::EmptyScholar(id))
        })
        .collect()
}

pub fn to_csv(scholars: &[CitationSample]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["scholar_id", "citations"])
        .expect("in-memory write");
    for s in scholars {
        for c in s.counts() {
            writer
                .write_record([s.scholar_id(), &c.to_string()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn to_json(scholars: &[CitationSample]) -> String {
    // written by hand so scholars keep their order
    let entries: Vec<String> = scholars
        .iter()
        .map(|s| {
            let id = serde_json::to_string(s.scholar_id()).expect("string");
            let counts = serde_json::to_string(s.counts()).expect("integers");
            format!("  {id}: {counts}")
        })
        .collect();
    if entries.is_empty() {
        return "{}\n".into();
    }
    format!("{{\n{}\n}}\n", entries.join(",\n"))
}

#[derive(Debug, Deserialize)]
struct EstimateRow {
    scholar_id: String,
    n: u64,
    h_hat: u64,
    v_hat: f64,
}

/// Precomputed estimates, `scholar_id,n,h_hat,v_hat`, in file order.
pub fn ingest_estimates(path: &Path) -> Result<Vec<HEstimate>, IngestError> {
    parse_estimates(&read(path)?)
}

pub fn parse_estimates(text: &str) -> Result<Vec<HEstimate>, IngestError> {
    let mut reader = csv_reader(text);
    check_header(reader.headers().map_err(csv_error)?, &["scholar_id", "n", "h_hat", "v_hat"])?;
    let mut out: Vec<HEstimate> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: EstimateRow = record.deserialize(None).map_err(|e| IngestError::MalformedRow {
            line,
            reason: e.to_string(),
        })?;
        if row.n == 0 || row.h_hat > row.n || !(row.v_hat >= 0.0 && row.v_hat.is_finite()) {
            return Err(IngestError::MalformedRow {
                line,
                reason: "need n >= 1, 0 <= h_hat <= n and finite v_hat >= 0".into(),
            });
        }
        if out.iter().any(|e| e.scholar_id == row.scholar_id) {
            return Err(IngestError::DuplicateId(row.scholar_id));
        }
        out.push(HEstimate {
            scholar_id: row.scholar_id,
            n: row.n,
            h_hat: row.h_hat,
            v_hat: row.v_hat,
        });
    }
    Ok(out)
}
