//! `(λ, σ)` parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{run, RunRecord};
use crate::error::{CboError, Result};

use super::config::{ExperimentConfig, SweepGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda: f64,
    pub sigma: f64,
    /// `ln` of the final residual, averaged over repetitions.
    pub ln_final: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub base: ExperimentConfig,
    pub grid: SweepGrid,
    pub lambdas: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// `ln_final[i][j]` for `lambdas[i]`, `sigmas[j]`.
    pub ln_final: Vec<Vec<f64>>,
    /// Contour level `ln V̂(0)`, averaged over repetitions.
    pub ln_initial: f64,
}

impl SweepResult {
    pub fn cells(&self) -> impl Iterator<Item = SweepCell> + '_ {
        self.lambdas.iter().enumerate().flat_map(move |(i, &lambda)| {
            self.sigmas.iter().enumerate().map(move |(j, &sigma)| SweepCell {
                lambda,
                sigma,
                ln_final: self.ln_final[i][j],
                converged: self.ln_final[i][j] < self.ln_initial,
            })
        })
    }
}

/// Runs `base` once per grid cell and repetition. Repetition `r` uses
/// `base.seeds[r]` in every cell, so all cells share initial ensembles.
/// Any boost in `base` is dropped: σ comes from the grid.
pub fn run_sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    base.validate()?;
    if base.seeds.len() < grid.repetitions {
        return Err(CboError::Config(vec![format!(
            "sweep needs {} seeds for its repetitions, config has {}",
            grid.repetitions,
            base.seeds.len()
        )]));
    }
    let built = base.build()?;
    let mut heuristics = built.heuristics;
    heuristics.boost = None;
    let seeds = &base.seeds[..grid.repetitions];
    let inits = seeds
        .iter()
        .map(|&s| base.initial_ensemble(&built.domain, s))
        .collect::<Result<Vec<_>>>()?;

    let lambdas = grid.lambda.values();
    let sigmas = grid.sigma.values();
    let jobs: Vec<(usize, usize, usize)> = (0..lambdas.len())
        .flat_map(|i| (0..sigmas.len()).flat_map(move |j| (0..seeds.len()).map(move |r| (i, j, r))))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(i, j, r)| {
            let mut params = built.params;
            params.lambda = lambdas[i];
            params.sigma = sigmas[j];
            run(
                built.objective.as_ref(),
                &built.domain,
                inits[r].clone(),
                &params,
                &heuristics,
            )
            .map(|o| o.record)
        })
        .collect::<Result<_>>()?;

    let residual = |rec: &RunRecord, first: bool| -> Result<f64> {
        let row = if first { rec.initial() } else { rec.last() };
        row.residual.ok_or_else(|| {
            CboError::Config(vec!["sweeps need an objective with a known minimizer".into()])
        })
    };
    let reps = seeds.len() as f64;
    let mut ln_final = vec![vec![0.0; sigmas.len()]; lambdas.len()];
    for (&(i, j, _), rec) in jobs.iter().zip(&records) {
        ln_final[i][j] += residual(rec, false)?.ln() / reps;
    }
    let mut ln_initial = 0.0;
    for rec in &records[..seeds.len()] {
        ln_initial += residual(rec, true)?.ln() / reps;
    }
    Ok(SweepResult {
        base: base.clone(),
        grid: *grid,
        lambdas,
        sigmas,
        ln_final,
        ln_initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PaperDomain;
    use crate::harness::config::*;
    use crate::harness::experiment::run_experiment;

    fn base(iterations: usize, seeds: Vec<u64>) -> ExperimentConfig {
        ExperimentConfig {
            name: "sweep".into(),
            objective: ObjectiveSpec::Rastrigin { dim: 2 },
            domain: DomainSpec::paper(PaperDomain::Omega1, 2),
            params: ParamsSpec::new(1.0, 1.0, 0.01, iterations),
            heuristics: HeuristicsSpec::fixed_alpha(1e6),
            init: InitSpec::Gaussian {
                mean: vec![3.62, 3.62],
                variance: 10.0,
            },
            particles: 50,
            seeds,
            success_threshold: None,
            output: None,
        }
    }

    #[test]
    fn single_cell_matches_experiment() {
        let mut cfg = base(30, vec![4]);
        cfg.params.lambda = 2.0;
        cfg.params.sigma = 0.3;
        let grid = SweepGrid {
            lambda: LogRange { lo: 2.0, hi: 2.0, count: 1 },
            sigma: LogRange { lo: 0.3, hi: 0.3, count: 1 },
            repetitions: 1,
        };
        let sw = run_sweep(&cfg, &grid).unwrap();
        let ex = run_experiment(&cfg).unwrap();
        let r = ex.runs[0].record.last().residual.unwrap();
        assert_eq!(sw.ln_final[0][0], r.ln());
        assert_eq!(sw.ln_initial, ex.runs[0].record.initial().residual.unwrap().ln());
    }

    #[test]
    fn huge_volatility_does_not_converge() {
        let grid = SweepGrid {
            lambda: LogRange { lo: 0.1, hi: 1.0, count: 2 },
            sigma: LogRange { lo: 1e3, hi: 2e3, count: 2 },
            repetitions: 5,
        };
        let sw = run_sweep(&base(100, (0..5).collect()), &grid).unwrap();
        for cell in sw.cells() {
            assert!(!cell.converged, "{cell:?}");
        }
    }

    #[test]
    fn too_few_seeds_is_a_config_error() {
        let grid = SweepGrid {
            lambda: LogRange { lo: 1.0, hi: 1.0, count: 1 },
            sigma: LogRange { lo: 1.0, hi: 1.0, count: 1 },
            repetitions: 3,
        };
        assert!(matches!(run_sweep(&base(1, vec![0]), &grid), Err(CboError::Config(_))));
    }
}
