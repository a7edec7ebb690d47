//! Multi-seed execution and aggregation.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allen_cahn::{multigrid_solve, MultigridOutcome};
use crate::dynamics::{run, RunRecord};
use crate::error::Result;

use super::config::{AllenCahnConfig, ExperimentConfig};

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub record: RunRecord,
    pub wall_seconds: f64,
}

/// Aggregates over the final rows of a set of runs. Residual statistics
/// are `None` when no run reports a residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub mean_initial_residual: Option<f64>,
    pub mean_final_residual: Option<f64>,
    pub median_final_residual: Option<f64>,
    pub success_threshold: f64,
    pub successes: usize,
    pub success_rate: Option<f64>,
    pub mean_final_consensus_energy: Option<f64>,
    pub mean_final_best_energy: Option<f64>,
}

/// Final-row quantities used by [`Summary::from_finals`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalRow {
    pub initial_residual: Option<f64>,
    pub final_residual: Option<f64>,
    pub consensus_energy: f64,
    pub best_energy: f64,
}

impl FinalRow {
    pub fn of(record: &RunRecord) -> Self {
        let last = record.last();
        FinalRow {
            initial_residual: record.initial().residual,
            final_residual: last.residual,
            consensus_energy: last.consensus_energy,
            best_energy: last.best_energy,
        }
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    })
}

impl Summary {
    pub fn from_finals(finals: &[FinalRow], threshold: f64) -> Self {
        let initial: Vec<f64> = finals.iter().filter_map(|f| f.initial_residual).collect();
        let fin: Vec<f64> = finals.iter().filter_map(|f| f.final_residual).collect();
        let successes = fin.iter().filter(|&&r| r < threshold).count();
        let ce: Vec<f64> = finals.iter().map(|f| f.consensus_energy).collect();
        let be: Vec<f64> = finals.iter().map(|f| f.best_energy).collect();
        Summary {
            runs: finals.len(),
            mean_initial_residual: mean(&initial),
            mean_final_residual: mean(&fin),
            median_final_residual: median(&fin),
            success_threshold: threshold,
            successes,
            success_rate: (!fin.is_empty()).then(|| successes as f64 / fin.len() as f64),
            mean_final_consensus_energy: mean(&ce),
            mean_final_best_energy: mean(&be),
        }
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RunRecord>, threshold: f64) -> Self {
        let finals: Vec<FinalRow> = records.into_iter().map(FinalRow::of).collect();
        Self::from_finals(&finals, threshold)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// One run per seed, in the order of `config.seeds`.
    pub runs: Vec<SeedRun>,
    pub summary: Summary,
}

/// Runs every seed of `config` (seeds in parallel) and aggregates.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let built = config.build()?;
    let runs = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            let init = config.initial_ensemble(&built.domain, seed)?;
            let out = run(
                built.objective.as_ref(),
                &built.domain,
                init,
                &built.params,
                &built.heuristics,
            )?;
            log::debug!("{}: seed {seed} finished", config.name);
            Ok(SeedRun {
                seed,
                record: out.record,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::from_records(runs.iter().map(|r| &r.record), config.success_threshold());
    Ok(ExperimentResult {
        config: config.clone(),
        runs,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct AllenCahnRun {
    pub seed: u64,
    pub outcome: MultigridOutcome,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct AllenCahnResult {
    pub config: AllenCahnConfig,
    pub runs: Vec<AllenCahnRun>,
}

/// Multigrid CBO for every seed of `config`. Seeds run one after another;
/// each multigrid solve is already parallel over particles.
pub fn run_allen_cahn(config: &AllenCahnConfig) -> Result<AllenCahnResult> {
    config.validate()?;
    let problem = config.problem()?;
    let params = config.params.build();
    let heuristics = config.heuristics.build();
    let schedule = config.schedule();
    let runs = config
        .seeds
        .iter()
        .map(|&seed| {
            let start = Instant::now();
            let outcome =
                multigrid_solve(&problem, &params, &heuristics, &schedule, config.particles(), seed)?;
            Ok(AllenCahnRun {
                seed,
                outcome,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AllenCahnResult {
        config: config.clone(),
        runs,
    })
}
