//! Text, CSV and JSON rendering of flat records.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`.

use crate::config::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Value {
    fn plain(&self) -> String {
        match self {
            Self::Real(x) => real(*x),
            Self::Int(n) => n.to_string(),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Self::Real(x) if x.is_finite() => real(*x),
            Self::Real(_) => "null".into(),
            Self::Text(s) => json_string(s),
            other => other.plain(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Self::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            other => other.plain(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Self::Real(x)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Self::Int(n)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Self::Int(n as u64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Self::Bool(b)
    }
}

pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Ordered `(key, value)` pairs.
pub type Record = Vec<(&'static str, Value)>;

pub fn json_object(rec: &Record) -> String {
    let fields: Vec<String> = rec
        .iter()
        .map(|(k, v)| format!("{}: {}", json_string(k), v.json()))
        .collect();
    format!("{{{}}}", fields.join(", "))
}

/// A single record: aligned `key value` lines, a two-line CSV, or a JSON
/// object.
pub fn record(rec: &Record, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json_object(rec) + "\n",
        OutputFormat::Csv => table(std::slice::from_ref(rec), &keys(rec), format),
        OutputFormat::Text => {
            let width = rec.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rec.iter()
                .map(|(k, v)| format!("{k:<width$}  {}\n", v.plain()))
                .collect()
        }
    }
}

fn keys(rec: &Record) -> Vec<&'static str> {
    rec.iter().map(|(k, _)| *k).collect()
}

/// Rows sharing the column set `columns`: CSV with a header, a JSON array of
/// objects, or whitespace-aligned columns.
pub fn table(rows: &[Record], columns: &[&'static str], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let objs: Vec<String> = rows.iter().map(json_object).collect();
            format!("[{}]\n", objs.join(",\n "))
        }
        OutputFormat::Csv => {
            let mut out = columns.join(",") + "\n";
            for r in rows {
                let cells: Vec<String> = r.iter().map(|(_, v)| v.csv()).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Text => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(|(_, v)| v.plain()).collect())
                .collect();
            let widths: Vec<usize> = columns
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |items: Vec<&str>| -> String {
                let padded: Vec<String> = items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(columns.to_vec());
            for r in &cells {
                out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
            }
            out
        }
    }
}
