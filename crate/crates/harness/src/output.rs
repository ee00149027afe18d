use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sweep::{summarize, ExperimentRecord, TrialOutcome};

/// The fixed CSV schema, one row per record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub grid_index: usize,
    pub trial: usize,
    pub n: usize,
    pub p: f64,
    pub r: usize,
    pub coloring: String,
    pub seed: u64,
    pub edges: usize,
    pub status: String,
    pub route: String,
    pub cycles: Option<usize>,
    pub bound: f64,
    pub within_bound: Option<bool>,
    pub w: Option<usize>,
    pub u: Option<usize>,
    pub stage: String,
    pub error_kind: String,
    pub error: String,
    pub wall_ms: f64,
}

impl From<&ExperimentRecord> for CsvRow {
    fn from(rec: &ExperimentRecord) -> Self {
        let s = &rec.setup;
        let coloring = serde_json::to_value(s.coloring)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let mut row = CsvRow {
            grid_index: s.grid_index,
            trial: s.trial,
            n: s.n,
            p: s.p,
            r: s.r,
            coloring,
            seed: s.seed,
            edges: rec.edges,
            status: String::new(),
            route: String::new(),
            cycles: rec.cycles(),
            bound: rec.bound,
            within_bound: rec.within_bound(),
            w: None,
            u: None,
            stage: String::new(),
            error_kind: String::new(),
            error: String::new(),
            wall_ms: rec.wall_ms,
        };
        match &rec.outcome {
            TrialOutcome::Success { route, w, u, .. } => {
                row.status = "success".into();
                row.route = route.clone();
                row.w = *w;
                row.u = *u;
            }
            TrialOutcome::Failure { stage, kind, message } => {
                row.status = "failure".into();
                row.stage = stage.clone().unwrap_or_default();
                row.error_kind = kind.clone();
                row.error = message.clone();
            }
        }
        row
    }
}

pub fn write_csv(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for rec in records {
        w.serialize(CsvRow::from(rec))?;
    }
    w.flush()?;
    Ok(())
}

/// Full records, covers included.
pub fn write_json(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(records)?)?;
    Ok(())
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub summary: PathBuf,
}

/// Writes `records.csv`, `records.json` and `summary.json` into `dir`.
pub fn write_outputs(dir: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<OutputPaths> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let paths = OutputPaths {
        csv: dir.join("records.csv"),
        json: dir.join("records.json"),
        summary: dir.join("summary.json"),
    };
    write_csv(&paths.csv, records)?;
    write_json(&paths.json, records)?;
    fs::write(&paths.summary, serde_json::to_string_pretty(&summarize(records))?)?;
    Ok(paths)
}
