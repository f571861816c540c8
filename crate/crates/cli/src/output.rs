use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dmcv_core::{FigureOutput, SweepSpec, Table};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool_version: &'static str,
    pub figure: String,
    pub config_echo: &'a SweepSpec,
    pub scenario: String,
    pub timestamp: String,
    /// Sweeps are grid-based, so there is nothing to seed.
    pub grid_seeds: Option<()>,
    pub files: Vec<String>,
    pub summary: Vec<(String, f64)>,
    pub warnings: &'a [String],
}

/// Header plus rows, every float in shortest round-trip form.
pub fn csv_bytes(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn file_name(output: &FigureOutput, table: &Table) -> String {
    format!("{}_{}.csv", output.figure, table.name)
}

/// Writes the CSVs and `<figure>_manifest.json`; returns the paths written.
pub fn write_figure(dir: &Path, spec: &SweepSpec, scenario: String, output: &FigureOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for table in &output.tables {
        let name = file_name(output, table);
        let path = dir.join(&name);
        fs::write(&path, csv_bytes(table)?).with_context(|| format!("cannot write {}", path.display()))?;
        files.push(name);
        written.push(path);
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        figure: output.figure.to_string(),
        config_echo: spec,
        scenario,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        grid_seeds: None,
        files,
        summary: output.summary.clone(),
        warnings: &output.warnings,
    };
    let path = dir.join(format!("{}_manifest.json", output.figure));
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(&path, json).with_context(|| format!("cannot write {}", path.display()))?;
    written.push(path);
    Ok(written)
}
