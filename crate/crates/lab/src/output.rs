//! Tabular results rendered as CSV or JSON, plus the content digest.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::LabResult;

/// Columns excluded from the digest because they vary between identical runs.
pub const VOLATILE_COLUMNS: &[&str] = &["elapsed_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Rows of JSON values under fixed column names.
///
/// In CSV, arrays are joined with `;` and nulls become empty cells. In JSON
/// the table is an array of objects, or a single object when built with
/// [`Table::single`].
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    single: bool,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            single: false,
        }
    }

    /// A one-record table rendered as a bare JSON object.
    pub fn single(columns: &[&str], row: Vec<Value>) -> Self {
        let mut t = Self::new(columns);
        t.push(row);
        t.single = true;
        t
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn render(&self, format: Format) -> LabResult<Vec<u8>> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    /// The table with [`VOLATILE_COLUMNS`] removed.
    pub fn stable(&self) -> Table {
        let keep: Vec<usize> = (0..self.columns.len())
            .filter(|&i| !VOLATILE_COLUMNS.contains(&self.columns[i].as_str()))
            .collect();
        Table {
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&i| r[i].clone()).collect())
                .collect(),
            single: self.single,
        }
    }

    /// SHA-256 of the stable rendering, lowercase hex.
    pub fn digest(&self, format: Format) -> LabResult<String> {
        Ok(sha256_hex(&self.stable().render(format)?))
    }

    fn render_csv(&self) -> LabResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }

    fn render_json(&self) -> LabResult<Vec<u8>> {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                Value::Object(map)
            })
            .collect();
        let doc = match (self.single, objects.len()) {
            (true, 1) => objects.into_iter().next().expect("one row"),
            _ => Value::Array(objects),
        };
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Parses a rendered table back; CSV cells come back as strings.
    pub fn parse(bytes: &[u8], format: Format) -> LabResult<Table> {
        match format {
            Format::Csv => {
                let mut r = csv::ReaderBuilder::new().from_reader(bytes);
                let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
                let mut t = Table {
                    columns,
                    rows: Vec::new(),
                    single: false,
                };
                for rec in r.records() {
                    t.rows.push(rec?.iter().map(|s| Value::String(s.to_string())).collect());
                }
                Ok(t)
            }
            Format::Json => {
                let doc: Value = serde_json::from_slice(bytes)?;
                let (objects, single) = match doc {
                    Value::Array(items) => (items, false),
                    obj @ Value::Object(_) => (vec![obj], true),
                    _ => return Err(crate::error::LabError::Failed("unexpected JSON shape".into())),
                };
                let columns: Vec<String> = match objects.first() {
                    Some(Value::Object(m)) => m.keys().cloned().collect(),
                    _ => Vec::new(),
                };
                let rows = objects
                    .into_iter()
                    .map(|o| match o {
                        Value::Object(m) => m.into_iter().map(|(_, v)| v).collect(),
                        _ => Vec::new(),
                    })
                    .collect();
                Ok(Table {
                    columns,
                    rows,
                    single,
                })
            }
        }
    }
}

/// Recomputes the digest of an emitted file.
pub fn digest_file(path: &Path, format: Format) -> LabResult<String> {
    let bytes = std::fs::read(path)?;
    let table = Table::parse(&bytes, format)?;
    let stable = table.stable();
    let rendered = match format {
        // CSV cells are re-emitted verbatim, so the stable rendering is reproduced.
        Format::Csv => stable.render_csv()?,
        Format::Json => stable.render_json()?,
    };
    Ok(sha256_hex(&rendered))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell_text).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// JSON number for an `i128`, or a decimal string when it does not fit in 64 bits.
pub fn int_value(x: i128) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

/// JSON number for a finite float, `null` otherwise.
pub fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Table {
        let mut t = Table::new(&["experiment", "shifts", "value", "elapsed_ms"]);
        t.push(vec![json!("a,b"), json!([0, 1]), json!(0.25), json!(12.5)]);
        t.push(vec![json!("c"), json!([2]), Value::Null, json!(3.0)]);
        t
    }

    #[test]
    fn csv_rendering() {
        let text = String::from_utf8(sample().render(Format::Csv).unwrap()).unwrap();
        assert_eq!(
            text,
            "experiment,shifts,value,elapsed_ms\n\"a,b\",0;1,0.25,12.5\nc,2,,3.0\n"
        );
    }

    #[test]
    fn digest_ignores_timing_and_round_trips() {
        let t = sample();
        let mut u = sample();
        u.rows[0][3] = json!(99.0);
        for format in [Format::Csv, Format::Json] {
            assert_eq!(t.digest(format).unwrap(), u.digest(format).unwrap());
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.out");
            std::fs::write(&path, t.render(format).unwrap()).unwrap();
            assert_eq!(digest_file(&path, format).unwrap(), t.digest(format).unwrap());
        }
    }

    #[test]
    fn single_record_json_is_an_object() {
        let t = Table::single(&["solvable", "lcm"], vec![json!(true), json!(6)]);
        let v: Value = serde_json::from_slice(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v, json!({"solvable": true, "lcm": 6}));
    }

    #[test]
    fn header_only_csv() {
        let t = Table::new(&["x", "value"]);
        assert_eq!(t.render(Format::Csv).unwrap(), b"x,value\n");
    }
}
