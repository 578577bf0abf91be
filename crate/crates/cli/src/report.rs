//! CSV tables and `key: value` summaries.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

/// Verdicts and values collected by one command.
#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
    failures: Vec<String>,
}

impl Report {
    pub fn value(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Plain decimals in [1e-4, 1e7), scientific notation elsewhere.
    pub fn number(&mut self, key: &str, x: f64) {
        let a = x.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e7).contains(&a) {
            self.value(key, x);
        } else {
            self.value(key, format!("{x:e}"));
        }
    }

    pub fn check(&mut self, key: &str, passed: bool) {
        self.value(key, if passed { "pass" } else { "FAIL" });
        if !passed {
            self.failures.push(key.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }
}

/// Directory that receives every file of a run.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `rows` under an explicit header, so empty tables still get one.
    pub fn table<T: Serialize>(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self, command: &str, report: &Report, config: &RunConfig) -> Result<PathBuf> {
        let mut text = String::new();
        text.push_str(&format!("tool: chur {}\n", env!("CARGO_PKG_VERSION")));
        text.push_str(&format!("command: {command}\n"));
        text.push_str(&format!("verdict: {}\n", if report.passed() { "pass" } else { "FAIL" }));
        for (k, v) in &report.entries {
            text.push_str(&format!("{k}: {v}\n"));
        }
        text.push_str("effective_config: |\n");
        for line in config.to_toml().lines() {
            if !line.is_empty() {
                text.push_str("  ");
                text.push_str(line);
            }
            text.push('\n');
        }
        let path = self.path(&format!("{}_summary.txt", command.replace('-', "_")));
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
