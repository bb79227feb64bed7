//! Report writing: versioned CSV with comment headers, or JSON mirroring the rows.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where a report goes: an explicit file, a file in the default output
/// directory, or standard output.
pub fn destination(out: Option<&Path>, out_dir: Option<&Path>, name: &str, format: Format) -> Option<PathBuf> {
    match (out, out_dir) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(dir)) => Some(dir.join(format!("{name}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub struct Report<'a, C: Serialize> {
    pub schema: &'a str,
    pub version: u32,
    pub config: &'a C,
}

impl<C: Serialize> Report<'_, C> {
    pub fn write<R: Serialize>(&self, rows: &[R], format: Format, dest: Option<&Path>) -> Result<()> {
        let body = match format {
            Format::Csv => self.csv(rows)?,
            Format::Json => self.json(rows)?,
        };
        match dest {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                fs::write(path, body).with_context(|| format!("writing {}", path.display()))
            }
            None => io::stdout().lock().write_all(&body).context("writing to stdout"),
        }
    }

    fn csv<R: Serialize>(&self, rows: &[R]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "# schema: {} v{}", self.schema, self.version)?;
        writeln!(out, "# config: {}", serde_json::to_string(self.config)?)?;
        writeln!(out, "# generated: {}", timestamp())?;
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        drop(w);
        Ok(out)
    }

    fn json<R: Serialize>(&self, rows: &[R]) -> Result<Vec<u8>> {
        let doc = serde_json::json!({
            "schema": self.schema,
            "version": self.version,
            "config": self.config,
            "generated": timestamp(),
            "rows": rows,
        });
        let mut out = serde_json::to_vec_pretty(&doc)?;
        out.push(b'\n');
        Ok(out)
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u32,
        b: f64,
    }

    #[test]
    fn csv_has_versioned_header() {
        let r = Report { schema: "x", version: 2, config: &serde_json::json!({"seed": 1}) };
        let text = String::from_utf8(r.csv(&[Row { a: 1, b: 0.5 }]).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema: x v2");
        assert_eq!(lines[1], r#"# config: {"seed":1}"#);
        assert_eq!(&lines[3..], ["a,b", "1,0.5"]);
    }

    #[test]
    fn explicit_output_wins() {
        let p = destination(Some(Path::new("a.csv")), Some(Path::new("d")), "n", Format::Json);
        assert_eq!(p, Some(PathBuf::from("a.csv")));
        assert_eq!(destination(None, Some(Path::new("d")), "n", Format::Json), Some(PathBuf::from("d/n.json")));
        assert_eq!(destination(None, None, "n", Format::Csv), None);
    }
}
