//! CSV and JSON writers with fixed scientific notation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::CliError;

pub const PRECISION_VAR: &str = "FLUCTOPTICS_PRECISION";
pub const DEFAULT_PRECISION: usize = 17;

/// Significant digits from the environment, 1 to 17.
pub fn precision_from_env() -> Result<usize, CliError> {
    match std::env::var(PRECISION_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_PRECISION),
        Err(e) => Err(CliError::Usage(format!("{PRECISION_VAR}: {e}"))),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(p) if (1..=17).contains(&p) => Ok(p),
            _ => Err(CliError::Usage(format!("{PRECISION_VAR} must be an integer from 1 to 17, found `{text}`"))),
        },
    }
}

/// `d.ddd…e±x` with `digits` significant digits.
pub fn sci(value: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), value)
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), data: vec![Vec::new(); columns.len()] }
    }

    pub fn push(&mut self, row: &[f64]) {
        for (col, v) in self.data.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.data[i].as_slice())
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in 0..self.rows() {
            let cells: Vec<String> = self.data.iter().map(|c| sci(c[r], digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (name, col) in self.columns.iter().zip(&self.data) {
            m.insert(name.clone(), Value::Array(col.iter().map(|&v| num(v)).collect()));
        }
        Value::Object(m)
    }

    fn all_finite(&self) -> bool {
        self.data.iter().flatten().all(|v| v.is_finite())
    }
}

/// JSON number; non-finite values are rejected before writing.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Results of one subcommand on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub command: String,
    pub meta: Map<String, Value>,
    pub series: Table,
    /// Additional tables written next to the main one.
    pub extra: Vec<(String, Table)>,
}

pub fn config_hash(config_text: &str) -> String {
    Sha256::digest(config_text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

struct SciFormatter {
    inner: PrettyFormatter<'static>,
    digits: usize,
}

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(sci(value, self.digits).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

pub fn to_json(value: &Value, digits: usize) -> String {
    let mut buf = Vec::new();
    let fmt = SciFormatter { inner: PrettyFormatter::with_indent(b"  "), digits };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    serde::Serialize::serialize(value, &mut ser).expect("in-memory JSON");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

impl Output {
    fn stem(&self) -> String {
        format!("{}.{}", self.name, self.command)
    }

    pub fn json(&self, digits: usize) -> String {
        let mut root = Map::new();
        root.insert("meta".into(), Value::Object(self.meta.clone()));
        root.insert("series".into(), self.series.to_json());
        for (name, t) in &self.extra {
            root.insert(name.clone(), t.to_json());
        }
        to_json(&Value::Object(root), digits)
    }

    /// Writes the requested formats into `dir` and returns the paths.
    pub fn write(&self, dir: &Path, formats: &[Format], digits: usize) -> Result<Vec<PathBuf>, CliError> {
        if !self.series.all_finite() || self.extra.iter().any(|(_, t)| !t.all_finite()) {
            return Err(CliError::Numerical(format!("{}: non-finite value in output", self.stem())));
        }
        fs::create_dir_all(dir).map_err(|e| CliError::Write(dir.to_path_buf(), e))?;
        let mut files: Vec<(PathBuf, String)> = Vec::new();
        for f in formats {
            match f {
                Format::Csv => {
                    files.push((dir.join(format!("{}.csv", self.stem())), self.series.to_csv(digits)));
                    for (name, t) in &self.extra {
                        files.push((dir.join(format!("{}.{name}.csv", self.stem())), t.to_csv(digits)));
                    }
                }
                Format::Json => files.push((dir.join(format!("{}.json", self.stem())), self.json(digits))),
            }
        }
        let mut written = Vec::with_capacity(files.len());
        for (path, text) in files {
            fs::write(&path, text).map_err(|e| CliError::Write(path.clone(), e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_notation() {
        assert_eq!(sci(1.5, 3), "1.50e0");
        assert_eq!(sci(-2.88e-15, 3), "-2.88e-15");
        assert_eq!(sci(0.0, 1), "0e0");
        assert_eq!(sci(0.1, 17), "1.0000000000000001e-1");
    }

    #[test]
    fn full_precision_round_trips() {
        for v in [0.1, 1.0 / 3.0, 2.8903e-15, -1.4389e-12, std::f64::consts::TAU] {
            assert_eq!(sci(v, 17).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["t", "e2"]);
        t.push(&[0.0, 1.0]);
        t.push(&[0.5, -2.0]);
        assert_eq!(t.to_csv(2), "t,e2\n0.0e0,1.0e0\n5.0e-1,-2.0e0\n");
    }

    #[test]
    fn json_numbers_are_scientific() {
        let v = serde_json::json!({"a": [0.25, 3.0], "n": 3, "s": "x"});
        let text = to_json(&v, 3);
        assert!(text.contains("2.50e-1"), "{text}");
        assert!(text.contains("\"n\": 3"), "{text}");
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"][1].as_f64(), Some(3.0));
    }

    #[test]
    fn hash_is_hex_sha256() {
        let h = config_hash("");
        assert_eq!(h, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
