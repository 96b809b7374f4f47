//! Sweep tables: CSV with `#` metadata above the header and `#` summary lines
//! below the rows. Floats carry 17 significant digits so a table survives a
//! round trip bit for bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 5] = ["r", "t", "method", "value", "est_error"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub r: f64,
    pub t: f64,
    pub method: String,
    pub value: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub meta: Vec<Meta>,
    pub rows: Vec<Row>,
    pub summary: Vec<Summary>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("malformed table: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Round-trip float format, 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepTable {
    pub fn summary(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|s| s.name == name).map(|s| s.value)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|m| m.key == key).map(|m| m.value.as_str())
    }

    pub fn rows_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for m in &self.meta {
            let _ = writeln!(out, "# {}: {}", m.key, m.value);
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(HEADER).expect("writing to memory");
        for r in &self.rows {
            w.write_record([
                fmt_f64(r.r),
                fmt_f64(r.t),
                r.method.clone(),
                fmt_f64(r.value),
                fmt_f64(r.est_error),
            ])
            .expect("writing to memory");
        }
        let body = w.into_inner().expect("flushing to memory");
        out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
        for s in &self.summary {
            let _ = writeln!(out, "# {} = {}", s.name, fmt_f64(s.value));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, TableError> {
        let mut table = SweepTable::default();
        let mut seen_header = false;
        for line in text.lines() {
            let Some(c) = line.strip_prefix('#') else {
                seen_header |= !line.trim().is_empty();
                continue;
            };
            let c = c.trim();
            if !seen_header {
                let (k, v) = c
                    .split_once(": ")
                    .ok_or_else(|| TableError::Format(format!("metadata line without ': ': {line}")))?;
                table.meta.push(Meta {
                    key: k.to_string(),
                    value: v.to_string(),
                });
            } else {
                let (k, v) = c
                    .rsplit_once(" = ")
                    .ok_or_else(|| TableError::Format(format!("summary line without ' = ': {line}")))?;
                let value = v
                    .parse()
                    .map_err(|_| TableError::Format(format!("summary value is not a number: {line}")))?;
                table.summary.push(Summary {
                    name: k.to_string(),
                    value,
                });
            }
        }
        let mut rd = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = rd.headers()?.clone();
        if header.iter().ne(HEADER) {
            return Err(TableError::Format(format!(
                "unexpected header {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        for rec in rd.deserialize() {
            table.rows.push(rec?);
        }
        Ok(table)
    }
}
