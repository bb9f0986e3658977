//! Record tables and their CSV and JSON encodings.
//!
//! Every record of a document has the same columns in the same order.
//! Reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite `f64`; non-finite values become `null` in JSON
//! and empty cells in CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::SCHEMA_VERSION;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Int(i64),
    Real(f64),
    Null,
}

impl Field {
    fn real(x: f64) -> Field {
        if x.is_finite() {
            Field::Real(x)
        } else {
            Field::Null
        }
    }

    fn cell(&self) -> String {
        match self {
            Field::Text(s) => s.clone(),
            Field::Int(i) => i.to_string(),
            Field::Real(x) => format!("{x:.16e}"),
            Field::Null => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Field::Null => "null".into(),
            other => other.cell(),
        }
    }

    /// Inverse of the CSV cell encoding.
    pub fn parse_cell(s: &str) -> Field {
        if s.is_empty() {
            return Field::Null;
        }
        if let Ok(i) = s.parse::<i64>() {
            return Field::Int(i);
        }
        match s.parse::<f64>() {
            Ok(x) if s.contains(['e', '.']) => Field::Real(x),
            _ => Field::Text(s.to_string()),
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Field, CliError> {
        Ok(match v {
            serde_json::Value::Null => Field::Null,
            serde_json::Value::String(s) => Field::Text(s.clone()),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Field::Int(i),
                None => Field::Real(
                    n.as_f64()
                        .ok_or_else(|| CliError::Parse(format!("bad number {n}")))?,
                ),
            },
            other => return Err(CliError::Parse(format!("unexpected JSON value {other}"))),
        })
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::real(x)
    }
}

impl From<usize> for Field {
    fn from(i: usize) -> Self {
        Field::Int(i as i64)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map_or(Field::Null, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub mode: String,
    pub columns: Vec<String>,
    pub records: Vec<Vec<Field>>,
}

impl Document {
    pub fn new(mode: &str, columns: &[&str]) -> Self {
        Document {
            mode: mode.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: Vec<Field>) {
        assert_eq!(record.len(), self.columns.len(), "record width");
        self.records.push(record);
    }

    /// Records as column-name maps.
    pub fn maps(&self) -> Vec<BTreeMap<String, Field>> {
        self.records
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .cloned()
                    .zip(r.iter().cloned())
                    .collect()
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.records {
            w.write_record(r.iter().map(Field::cell))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 output")
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\n  \"schema_version\": {SCHEMA_VERSION},\n  \"mode\": {},\n  \"records\": [",
            Field::Text(self.mode.clone()).json()
        );
        for (k, r) in self.records.iter().enumerate() {
            out.push_str(if k == 0 { "\n    {" } else { ",\n    {" });
            for (j, (name, f)) in self.columns.iter().zip(r).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", Field::Text(name.clone()).json(), f.json());
            }
            out.push('}');
        }
        out.push_str(if self.records.is_empty() {
            "]\n}\n"
        } else {
            "\n  ]\n}\n"
        });
        out
    }

    pub fn from_csv(mode: &str, text: &str) -> Result<Document, CliError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| CliError::Parse(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let mut doc = Document {
            mode: mode.to_string(),
            columns,
            records: Vec::new(),
        };
        for row in r.records() {
            let row = row.map_err(|e| CliError::Parse(e.to_string()))?;
            doc.records
                .push(row.iter().map(Field::parse_cell).collect());
        }
        Ok(doc)
    }

    pub fn from_json(text: &str) -> Result<Document, CliError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let bad = |what: &str| CliError::Parse(format!("JSON document: {what}"));
        if v.get("schema_version").and_then(|x| x.as_u64()) != Some(SCHEMA_VERSION as u64) {
            return Err(bad("missing or unsupported schema_version"));
        }
        let mode = v
            .get("mode")
            .and_then(|m| m.as_str())
            .ok_or_else(|| bad("missing mode"))?;
        let recs = v
            .get("records")
            .and_then(|r| r.as_array())
            .ok_or_else(|| bad("missing records"))?;
        let mut doc = Document {
            mode: mode.to_string(),
            columns: Vec::new(),
            records: Vec::new(),
        };
        for rec in recs {
            let obj = rec
                .as_object()
                .ok_or_else(|| bad("record is not an object"))?;
            if doc.columns.is_empty() {
                doc.columns = obj.keys().cloned().collect();
            }
            let keys: Vec<&String> = obj.keys().collect();
            if keys.len() != doc.columns.len()
                || keys.iter().zip(&doc.columns).any(|(a, b)| *a != b)
            {
                return Err(bad("records have differing columns"));
            }
            doc.records.push(
                obj.values()
                    .map(Field::from_json)
                    .collect::<Result<_, _>>()?,
            );
        }
        Ok(doc)
    }
}
