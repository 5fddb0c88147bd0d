//! Command output as a two-column `label,value` table.
//!
//! Floats are written in scientific notation with 17 significant digits
//! (`{:.16e}`), enough to round-trip any `f64`. Rows keep insertion order
//! and lines end in `\n`, so identical records give identical bytes.

use std::fmt;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x:.16e}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as u64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_owned())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub command: String,
    pub rows: Vec<(String, Value)>,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        let mut record = Self {
            command: command.to_owned(),
            rows: Vec::new(),
        };
        record.push("command", command);
        record
    }

    pub fn push(&mut self, label: impl Into<String>, value: impl Into<Value>) {
        self.rows.push((label.into(), value.into()));
    }

    pub fn get(&self, label: &str) -> Option<&Value> {
        self.rows.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }

    pub fn float(&self, label: &str) -> Option<f64> {
        match self.get(label)? {
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(["label", "value"])
            .expect("writing to memory");
        for (label, value) in &self.rows {
            writer
                .write_record([label.as_str(), value.to_string().as_str()])
                .expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 input")
    }
}

pub fn emit_csv(record: &OutputRecord, path: impl AsRef<Path>) -> Result<(), CliError> {
    let path = path.as_ref();
    std::fs::write(path, record.to_csv()).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = OutputRecord::new("geometry");
        r.push("v.M", 0.5);
        r.push("seed", 7u64);
        r.push("label, with comma", true);
        assert_eq!(
            r.to_csv(),
            "label,value\ncommand,geometry\nv.M,5.0000000000000000e-1\nseed,7\n\"label, with comma\",true\n"
        );
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let x = std::f64::consts::SQRT_2 / 2.0;
        let s = Value::Float(x).to_string();
        assert_eq!(s, "7.0710678118654757e-1");
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn write_failure_names_the_path() {
        let r = OutputRecord::new("geometry");
        let err = emit_csv(&r, "/nonexistent-dir/out.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
        assert_eq!(err.exit_code(), 2);
    }
}
