use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance written at the top of every output.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub command: String,
    /// Fully resolved configuration of the run.
    pub config: Value,
    pub seed: u64,
}

impl Header {
    pub fn new(command: &str, config: Value, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
        }
    }

    /// `#`-prefixed lines for CSV and text outputs.
    pub fn comment_lines(&self) -> String {
        format!(
            "# qcep {VERSION}\n# command: {}\n# config: {}\n# seed: {}\n",
            self.command, self.config, self.seed
        )
    }

    pub fn json_document(&self, result: impl Serialize) -> Result<String> {
        let doc = json!({
            "qcep_version": VERSION,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "result": result,
        });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }
}

/// Full double precision in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV body with the header comment on top.
pub fn csv_document(header: &Header, columns: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r)?;
    }
    let body = String::from_utf8(w.into_inner().context("flushing CSV")?)?;
    Ok(header.comment_lines() + &body)
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
