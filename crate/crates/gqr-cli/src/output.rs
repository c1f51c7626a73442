//! Deterministic artifact emission.
//!
//! Reproducibility contract: identical configuration and seed produce
//! byte-identical files. Floats are therefore serialized with fixed
//! formatting — 17 significant digits in JSON (the machine-exact record),
//! 9 in CSV (the plotting feed) — object keys keep insertion order, and no
//! wall-clock data enters any artifact. Files are written to a temporary
//! name in the target directory and renamed into place.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

/// 17 significant digits; round-trips any f64 exactly.
pub fn fmt_f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// 9 significant digits for CSV plotting data.
pub fn fmt_f9(x: f64) -> String {
    format!("{x:.8e}")
}

/// JSON document tree with insertion-ordered objects and fixed number
/// formatting.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    UInt(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj(fields: Vec<(&str, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn num_array(values: &[f64]) -> Json {
        Json::Arr(values.iter().map(|&v| Json::Num(v)).collect())
    }

    pub fn str_array(values: &[String]) -> Json {
        Json::Arr(values.iter().map(|v| Json::Str(v.clone())).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::UInt(v) => {
                let _ = write!(out, "{v}");
            }
            Json::Num(x) => {
                if x.is_finite() {
                    out.push_str(&fmt_f17(*x));
                } else {
                    out.push_str("null");
                }
            }
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Render CSV rows (RFC-4180 quoting) from pre-formatted fields.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(header)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Write bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::fs::write(tmp.path(), bytes)?;
    tmp.persist(dir.join(name))
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}
