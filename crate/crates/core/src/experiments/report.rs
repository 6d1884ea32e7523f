use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::ExperimentName;
use super::schema::validate_report;
use crate::error::{Error, Result};
use crate::field::{heatmap_png, write_field, FieldSample, Palette};
use crate::stats::Estimate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub observed: Option<f64>,
    pub stderr: Option<f64>,
    pub target: String,
    pub pass: bool,
}

impl Check {
    pub fn new(id: &str, description: impl Into<String>, observed: f64, target: impl Into<String>, pass: bool) -> Self {
        Check {
            id: id.to_string(),
            description: description.into(),
            observed: observed.is_finite().then_some(observed),
            stderr: None,
            target: target.into(),
            pass,
        }
    }

    pub fn with_stderr(mut self, stderr: Option<f64>) -> Self {
        self.stderr = stderr.filter(|s| s.is_finite());
        self
    }

    /// Passes iff `observed` lies in `[lo, hi]`.
    pub fn within(id: &str, description: impl Into<String>, est: Estimate, lo: f64, hi: f64) -> Self {
        let target = format!("[{}, {}]", short(lo), short(hi));
        Check::new(id, description, est.value, target, est.value >= lo && est.value <= hi).with_stderr(est.stderr)
    }
}

/// At most six decimals, trailing zeros dropped.
fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub experiment: ExperimentName,
    pub config: Value,
    /// One object per N, each carrying an `n` key.
    pub results: Vec<Value>,
    pub checks: Vec<Check>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// A CSV table built in memory and written once.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Cell text for a float; `Display` is shortest-roundtrip and therefore
/// reproducible.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| Error::Format(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.into_inner().map_err(|e| Error::Format(e.to_string()))
    }
}

/// Every file an experiment produces goes through here.
pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ArtifactWriter { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record(&mut self, name: &str) {
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), data)?;
        self.record(name);
        Ok(())
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        self.bytes(name, &t.to_csv()?)
    }

    pub fn field(&mut self, stem: &str, fs_: &FieldSample) -> Result<()> {
        write_field(&self.dir.join(stem), fs_)?;
        self.record(&format!("{stem}.json"));
        self.record(&format!("{stem}.f64"));
        Ok(())
    }

    pub fn heatmap(&mut self, name: &str, fs_: &FieldSample, palette: Palette) -> Result<()> {
        let png = heatmap_png(fs_, palette, 0.01, 0.99)?;
        self.bytes(name, &png)
    }

    /// Validates the report against the schema, then writes `report.json`.
    pub fn report(&mut self, report: &mut ExperimentReport) -> Result<()> {
        self.record("report.json");
        report.artifacts = self.written.clone();
        let v = serde_json::to_value(&*report)?;
        validate_report(&v)?;
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        fs::write(self.dir.join("report.json"), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_targets_are_short() {
        let c = Check::within("x", "", Estimate::exact(-0.3), -2.0 * 0.35 * 0.35 - 0.2, 0.5);
        assert_eq!(c.target, "[-0.445, 0.5]");
        assert!(c.pass);
    }

    #[test]
    fn csv_and_cells() {
        let mut t = Table::new(&["n", "value"]);
        t.push(vec!["4".into(), cell(0.1 + 0.2)]);
        t.push(vec!["8".into(), cell(f64::NAN)]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "n,value\n4,0.30000000000000004\n8,\n");
    }

    #[test]
    fn check_bounds() {
        let c = Check::within("x", "d", Estimate::with_stderr(0.5, 0.1), 0.45, 0.75);
        assert!(c.pass);
        assert_eq!(c.target, "[0.45, 0.75]");
        assert!(!Check::within("x", "d", Estimate::exact(0.8), 0.45, 0.75).pass);
        assert_eq!(Check::new("x", "d", f64::NAN, "", false).observed, None);
    }
}
