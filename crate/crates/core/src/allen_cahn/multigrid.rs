use rand_distr::{Distribution, Uniform};

use crate::domain::Domain;
use crate::dynamics::{run, CboParams, RunRecord};
use crate::ensemble::Ensemble;
use crate::error::{CboError, Result};
use crate::heuristics::HeuristicsConfig;
use crate::noise::{fine_dim, NoiseKind};

use super::energy::{prolongate_into, DiscreteField, FeLevel, GlEnergy, Obstacle, WellParams};

/// Half-width margin added around the wells when drawing the coarse start.
const INIT_MARGIN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct AllenCahnProblem {
    /// Finest level and boundary data.
    pub level: FeLevel,
    pub wells: WellParams,
    pub obstacle: Option<Obstacle>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultigridSchedule {
    pub coarsest: u32,
    pub iters_per_level: usize,
    pub iters_finest: usize,
}

impl Default for MultigridSchedule {
    fn default() -> Self {
        Self {
            coarsest: 2,
            iters_per_level: 100,
            iters_finest: 1000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevelResult {
    pub level: u32,
    pub record: RunRecord,
    /// Final consensus of this level's run, on the finest mesh.
    pub consensus: DiscreteField,
}

#[derive(Debug, Clone)]
pub struct MultigridOutcome {
    pub levels: Vec<LevelResult>,
    pub solution: DiscreteField,
    pub ensemble: Ensemble,
}

/// Draws `n` fields whose level-`coarse` interior values are uniform on
/// `[w1 - 0.25, w2 + 0.25]`, prolongated to the finest level.
pub fn coarse_initial_ensemble(
    problem: &AllenCahnProblem,
    coarse: u32,
    n: usize,
    seed: u64,
) -> Result<Ensemble> {
    let m = problem.level.m;
    if coarse < 1 || coarse > m {
        return Err(CboError::input(format!("coarse level {coarse} outside 1..={m}")));
    }
    let w = &problem.wells;
    let dist = Uniform::new_inclusive(w.w1 - INIT_MARGIN, w.w2 + INIT_MARGIN)
        .map_err(|e| CboError::input(e.to_string()))?;
    let (v0, v1) = (problem.level.v0, problem.level.v1);
    let nc = fine_dim(coarse);
    Ensemble::sample_with(n, fine_dim(m), seed, |rng, row| {
        let c: Vec<f64> = (0..nc).map(|_| dist.sample(rng)).collect();
        prolongate_into(&c, coarse, m, v0, v1, row);
    })
}

/// Coarse-to-fine consensus optimization of the discrete energy.
///
/// For each level `i = coarsest..=m` the noise is made hierarchical at
/// level `i`, the obstacle (if any) is enforced on the level-`i` nodes,
/// and the ensemble of the previous level is used as the starting point.
/// `cbo.noise` and `cbo.iterations` are overridden per level.
pub fn multigrid_solve(
    problem: &AllenCahnProblem,
    cbo: &CboParams,
    heuristics: &HeuristicsConfig,
    schedule: &MultigridSchedule,
    particles: usize,
    seed: u64,
) -> Result<MultigridOutcome> {
    let m = problem.level.m;
    if m < 2 {
        return Err(CboError::input(format!("multigrid needs a finest level >= 2, got {m}")));
    }
    if schedule.coarsest < 1 || schedule.coarsest > m {
        return Err(CboError::input(format!(
            "coarsest level {} outside 1..={m}",
            schedule.coarsest
        )));
    }
    if let Some(ob) = &problem.obstacle {
        if ob.level() != m {
            return Err(CboError::input(format!(
                "obstacle sampled on level {} but the problem is on level {m}",
                ob.level()
            )));
        }
    }
    let objective = GlEnergy::new(problem.level, problem.wells)?;
    let mut ensemble = coarse_initial_ensemble(problem, schedule.coarsest, particles, seed)?;
    let mut levels = Vec::new();

    for i in schedule.coarsest..=m {
        let domain = match &problem.obstacle {
            Some(ob) => ob.domain_at(i)?,
            None => Domain::all_space(fine_dim(m)),
        };
        ensemble.project_onto(&domain)?;
        let params = CboParams {
            noise: NoiseKind::Hierarchical { coarse: i, fine: m },
            iterations: if i == m {
                schedule.iters_finest
            } else {
                schedule.iters_per_level
            },
            ..*cbo
        };
        let out = run(&objective, &domain, ensemble, &params, heuristics)?;
        ensemble = out.ensemble;
        let consensus = DiscreteField::new(problem.level, out.record.last().consensus.clone())?;
        log::info!(
            "level {i}: consensus energy {:.6e}, best {:.6e}",
            out.record.last().consensus_energy,
            out.record.last().best_energy
        );
        levels.push(LevelResult {
            level: i,
            record: out.record,
            consensus,
        });
    }

    let solution = levels
        .last()
        .map(|l| l.consensus.clone())
        .expect("at least one level runs");
    Ok(MultigridOutcome {
        levels,
        solution,
        ensemble,
    })
}
