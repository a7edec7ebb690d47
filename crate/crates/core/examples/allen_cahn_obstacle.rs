//! The same energy with a lower obstacle that lifts the middle of the
//! interval; nodes where the solution rests on the obstacle are marked.

use cbo::allen_cahn::*;
use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let m = 5;
    let floor = |x: f64| if (0.3..=0.5).contains(&x) { 0.9 } else { f64::NEG_INFINITY };
    let obstacle = Obstacle::from_fns(m, floor, |_| f64::INFINITY)?;
    let problem = AllenCahnProblem {
        level: FeLevel::new(m, 0.5, 1.0)?,
        wells: WellParams { w1: 0.25, w2: 0.75, p: 1.5, eps_inv_sq: 500.0 },
        obstacle: Some(obstacle.clone()),
    };
    let mut params = CboParams::new(1.0, 7.0, 0.01, 0);
    params.rescale_hierarchical = true;
    let out = multigrid_solve(
        &problem,
        &params,
        &HeuristicsConfig::fixed_alpha(1e6),
        &MultigridSchedule::default(),
        20 * cbo::noise::fine_dim(m),
        4,
    )?;

    println!("x, v, lower");
    let nodes = out.solution.nodes();
    for (l, (x, v)) in nodes[1..nodes.len() - 1].iter().enumerate() {
        let active = if (obstacle.lower()[l] - v).abs() < 1e-4 { " (active)" } else { "" };
        println!("{x:.5}, {v:.5}, {:.5}{active}", obstacle.lower()[l]);
    }
    println!("energy {:.6}", out.levels.last().unwrap().record.last().consensus_energy);
    Ok(())
}
