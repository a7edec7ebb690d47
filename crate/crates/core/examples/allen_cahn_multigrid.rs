//! Coarse-to-fine minimization of the 1D p-Allen–Cahn energy on 2^5 elements.

use cbo::allen_cahn::*;
use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let m = 5;
    let problem = AllenCahnProblem {
        level: FeLevel::new(m, 0.5, 1.0)?,
        wells: WellParams { w1: 0.25, w2: 0.75, p: 1.5, eps_inv_sq: 500.0 },
        obstacle: None,
    };
    let mut params = CboParams::new(1.0, 7.0, 0.01, 0);
    params.rescale_hierarchical = true;
    let schedule = MultigridSchedule::default();
    let particles = 20 * cbo::noise::fine_dim(m);
    let out = multigrid_solve(&problem, &params, &HeuristicsConfig::fixed_alpha(1e6), &schedule, particles, 0)?;

    for level in &out.levels {
        println!(
            "level {}: {} iterations, consensus energy {:.6}",
            level.level,
            level.record.iterations(),
            level.record.last().consensus_energy
        );
    }
    println!("x, v");
    for (x, v) in out.solution.nodes() {
        println!("{x:.5}, {v:.5}");
    }
    Ok(())
}
