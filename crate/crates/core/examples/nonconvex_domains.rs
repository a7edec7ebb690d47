//! Projections onto perforated balls, and a run on each of them.

use cbo::domain::Ball;
use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let holes = Domain::ball_minus_balls(
        Ball::new(vec![0.0, 0.0], 3.0)?,
        vec![Ball::new(vec![1.0, 0.0], 0.5)?, Ball::new(vec![-1.0, 1.0], 0.5)?],
    )?;
    for p in [[1.1, 0.1], [5.0, 0.0], [-1.0, 1.0], [0.0, 0.0]] {
        let q = holes.project(&p)?;
        println!("{p:?} -> ({:+.4}, {:+.4}), distance {:.4}", q[0], q[1], holes.distance(&p));
    }

    for which in [PaperDomain::Omega3, PaperDomain::Omega4] {
        let domain = make_paper_domain(which, 2)?;
        let init = init_gaussian(&[3.62, 3.62], 10.0, &domain, 500, 11)?;
        let h = HeuristicsConfig { alpha0: 1e6, alpha_final: 1e9, gamma: Some(0.95), boost: Some(5.0) };
        let out = run(&Rastrigin { dim: 2 }, &domain, init, &CboParams::new(1.0, 1.0, 0.01, 500), &h)?;
        let last = out.record.last();
        println!(
            "{}: consensus ({:+.4}, {:+.4}), f = {:.3e}, feasible {}",
            which.name(),
            last.consensus[0],
            last.consensus[1],
            last.consensus_energy,
            out.ensemble.is_feasible(&domain, 1e-12)
        );
    }
    Ok(())
}
