//! CSV and JSON output.
//!
//! Every file is written to a temporary sibling and renamed into place, so
//! readers never observe a partial file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::RunRecord;
use crate::error::{CboError, Result};

use super::experiment::{AllenCahnResult, ExperimentResult, FinalRow, Summary};
use super::sweep::SweepResult;

pub const RUN_CSV_HEADER: [&str; 7] = [
    "iter",
    "time",
    "residual",
    "consensus_energy",
    "best_energy",
    "alpha",
    "radius",
];

pub fn version_stamp() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_error(path: &Path, e: csv::Error) -> CboError {
    CboError::Serde {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CboError::io(parent, e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CboError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CboError::io(path, e))
}

fn csv_bytes(path: &Path, fill: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    fill(&mut w).map_err(|e| csv_error(path, e))?;
    w.into_inner().map_err(|e| CboError::Serde {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CboError::Serde {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// The per-run diagnostics table, one row per recorded iteration.
pub fn run_csv(record: &RunRecord) -> Vec<u8> {
    csv_bytes(Path::new("<memory>"), |w| {
        w.write_record(RUN_CSV_HEADER)?;
        for r in &record.rows {
            w.write_record([
                r.iteration.to_string(),
                r.time.to_string(),
                fmt_opt(r.residual),
                r.consensus_energy.to_string(),
                r.best_energy.to_string(),
                r.alpha.to_string(),
                fmt_opt(r.radius),
            ])?;
        }
        Ok(())
    })
    .expect("writing CSV to memory cannot fail")
}

pub fn write_run_csv(path: &Path, record: &RunRecord) -> Result<()> {
    write_atomic(path, &run_csv(record))
}

/// A parsed row of a run CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsvRow {
    pub iter: usize,
    pub time: f64,
    pub residual: Option<f64>,
    pub consensus_energy: f64,
    pub best_energy: f64,
    pub alpha: f64,
    pub radius: Option<f64>,
}

pub fn read_run_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .collect::<csv::Result<Vec<CsvRow>>>()
        .map_err(|e| csv_error(path, e))
}

/// Final-row quantities of a parsed run CSV.
pub fn final_row_of(rows: &[CsvRow]) -> Option<FinalRow> {
    let (first, last) = (rows.first()?, rows.last()?);
    Some(FinalRow {
        initial_residual: first.residual,
        final_residual: last.residual,
        consensus_energy: last.consensus_energy,
        best_energy: last.best_energy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub seed: u64,
    pub csv: String,
    pub iterations: usize,
    pub stop: String,
    pub sigma: f64,
    pub admissible: bool,
    pub final_residual: Option<f64>,
    pub final_consensus_energy: f64,
    pub final_best_energy: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummaryFile {
    pub version: String,
    pub name: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunEntry>,
    pub aggregate: Summary,
}

pub fn run_csv_name(seed: u64) -> String {
    format!("run_seed{seed}.csv")
}

/// Writes `summary.json` and one CSV per run into `dir`.
pub fn persist_experiment(dir: &Path, result: &ExperimentResult) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for run in &result.runs {
        let name = run_csv_name(run.seed);
        let path = dir.join(&name);
        write_run_csv(&path, &run.record)?;
        written.push(path);
        let last = run.record.last();
        entries.push(RunEntry {
            seed: run.seed,
            csv: name,
            iterations: run.record.iterations(),
            stop: format!("{:?}", run.record.stop),
            sigma: run.record.sigma,
            admissible: run.record.admissible,
            final_residual: last.residual,
            final_consensus_energy: last.consensus_energy,
            final_best_energy: last.best_energy,
            wall_seconds: run.wall_seconds,
        });
    }
    let summary_path = dir.join("summary.json");
    write_json(
        &summary_path,
        &ExperimentSummaryFile {
            version: version_stamp(),
            name: result.config.name.clone(),
            config: serde_json::to_value(&result.config).expect("configs serialize"),
            seeds: result.runs.iter().map(|r| r.seed).collect(),
            runs: entries,
            aggregate: result.summary.clone(),
        },
    )?;
    written.push(summary_path);
    Ok(written)
}

pub fn read_summary(path: &Path) -> Result<ExperimentSummaryFile> {
    super::config::read_json(path)
}

/// Re-derives the aggregate of an experiment directory from its CSVs.
pub fn aggregate_from_dir(dir: &Path) -> Result<Summary> {
    let summary = read_summary(&dir.join("summary.json"))?;
    let finals = summary
        .runs
        .iter()
        .map(|e| {
            let p = dir.join(&e.csv);
            final_row_of(&read_run_csv(&p)?).ok_or_else(|| CboError::Serde {
                path: p,
                message: "no rows".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary::from_finals(&finals, summary.aggregate.success_threshold))
}

#[derive(Debug, Clone, Serialize)]
struct SweepMeta<'a> {
    version: String,
    name: &'a str,
    config: serde_json::Value,
    grid: serde_json::Value,
    lambdas: &'a [f64],
    sigmas: &'a [f64],
    /// Level set separating converged from non-converged cells.
    contour_level: f64,
    converged_cells: usize,
}

/// Writes `sweep.csv` (rows λ, columns σ, entries `ln V̂` at the end) and
/// `sweep.json` with the contour level `ln V̂(0)`.
pub fn persist_sweep(dir: &Path, result: &SweepResult) -> Result<Vec<PathBuf>> {
    let csv_path = dir.join("sweep.csv");
    let bytes = csv_bytes(&csv_path, |w| {
        let mut header = vec!["lambda\\sigma".to_string()];
        header.extend(result.sigmas.iter().map(f64::to_string));
        w.write_record(&header)?;
        for (lambda, row) in result.lambdas.iter().zip(&result.ln_final) {
            let mut rec = vec![lambda.to_string()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    write_atomic(&csv_path, &bytes)?;
    let json_path = dir.join("sweep.json");
    write_json(
        &json_path,
        &SweepMeta {
            version: version_stamp(),
            name: &result.base.name,
            config: serde_json::to_value(&result.base).expect("configs serialize"),
            grid: serde_json::to_value(result.grid).expect("grids serialize"),
            lambdas: &result.lambdas,
            sigmas: &result.sigmas,
            contour_level: result.ln_initial,
            converged_cells: result.cells().filter(|c| c.converged).count(),
        },
    )?;
    Ok(vec![csv_path, json_path])
}

#[derive(Debug, Clone, Serialize)]
struct LevelEntry {
    level: u32,
    csv: String,
    field_csv: String,
    iterations: usize,
    final_consensus_energy: f64,
    final_best_energy: f64,
}

#[derive(Debug, Clone, Serialize)]
struct AllenCahnRunEntry {
    seed: u64,
    levels: Vec<LevelEntry>,
    final_energy: f64,
    wall_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
struct AllenCahnSummaryFile {
    version: String,
    name: String,
    config: serde_json::Value,
    seeds: Vec<u64>,
    runs: Vec<AllenCahnRunEntry>,
}

/// Two columns: node coordinate and nodal value, boundary nodes included.
pub fn field_csv(nodes: impl IntoIterator<Item = (f64, f64)>) -> Vec<u8> {
    csv_bytes(Path::new("<memory>"), |w| {
        w.write_record(["x", "value"])?;
        for (x, v) in nodes {
            w.write_record([x.to_string(), v.to_string()])?;
        }
        Ok(())
    })
    .expect("writing CSV to memory cannot fail")
}

/// Per seed and level: the run CSV and the consensus field CSV, plus
/// `summary.json`.
pub fn persist_allen_cahn(dir: &Path, result: &AllenCahnResult) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut runs = Vec::new();
    for run in &result.runs {
        let mut levels = Vec::new();
        for lr in &run.outcome.levels {
            let csv = format!("seed{}_level{}.csv", run.seed, lr.level);
            let field_name = format!("seed{}_level{}_field.csv", run.seed, lr.level);
            let p = dir.join(&csv);
            write_run_csv(&p, &lr.record)?;
            written.push(p);
            let p = dir.join(&field_name);
            write_atomic(&p, &field_csv(lr.consensus.nodes()))?;
            written.push(p);
            levels.push(LevelEntry {
                level: lr.level,
                csv,
                field_csv: field_name,
                iterations: lr.record.iterations(),
                final_consensus_energy: lr.record.last().consensus_energy,
                final_best_energy: lr.record.last().best_energy,
            });
        }
        let final_energy = levels.last().map_or(f64::NAN, |l| l.final_consensus_energy);
        runs.push(AllenCahnRunEntry {
            seed: run.seed,
            levels,
            final_energy,
            wall_seconds: run.wall_seconds,
        });
    }
    let p = dir.join("summary.json");
    write_json(
        &p,
        &AllenCahnSummaryFile {
            version: version_stamp(),
            name: result.config.name.clone(),
            config: serde_json::to_value(&result.config).expect("configs serialize"),
            seeds: result.runs.iter().map(|r| r.seed).collect(),
            runs,
        },
    )?;
    written.push(p);
    Ok(written)
}
