//! Any closure can be minimized; here a shifted Ackley function on a ball.

use std::f64::consts::{E, PI};

use cbo::objective::FnObjective;
use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let shift = [1.5, -0.5, 0.25];
    let ackley = FnObjective::new(3, move |x: &[f64]| {
        let n = x.len() as f64;
        let (mut sq, mut cs) = (0.0, 0.0);
        for (v, s) in x.iter().zip(&shift) {
            let y = v - s;
            sq += y * y;
            cs += (2.0 * PI * y).cos();
        }
        -20.0 * (-0.2 * (sq / n).sqrt()).exp() - (cs / n).exp() + 20.0 + E
    })
    .with_minimizer(shift.to_vec());

    let domain = Domain::ball(vec![0.0; 3], 4.0)?;
    let init = init_uniform(&[-4.0; 3], &[4.0; 3], &domain, 1000, 5)?;
    let h = HeuristicsConfig { alpha0: 1e3, alpha_final: 1e6, gamma: None, boost: None };
    let out = run(&ackley, &domain, init, &CboParams::new(1.0, 0.7, 0.01, 800), &h)?;
    let last = out.record.last();
    println!("consensus {:?}", last.consensus);
    println!("residual {:.3e}, energy {:.3e}", last.residual.unwrap(), last.consensus_energy);
    Ok(())
}
