//! The Gibbs-weighted consensus point approaches the best particle as α grows.

use cbo::consensus::argmin;
use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let domain = Domain::all_space(2);
    let ens = init_uniform(&[-3.0, -3.0], &[3.0, 3.0], &domain, 200, 1)?;
    let f = Rastrigin { dim: 2 };
    let energies: Vec<f64> = ens.particles().map(|p| f.energy(p)).collect();
    let best = argmin(&energies).unwrap();
    println!("best particle {:?} with f = {:.4}", ens.particle(best), energies[best]);

    for alpha in [0.0, 0.1, 1.0, 10.0, 100.0, 1e4, 1e8, 1e15] {
        let x = consensus_point(&ens, &energies, alpha)?;
        let w = gibbs_weights(&energies, alpha)?;
        let gap = x.iter().zip(ens.particle(best)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        println!(
            "alpha={alpha:8.0e}  consensus=({:+.4}, {:+.4})  |x - best|={gap:.2e}  max weight={:.3}",
            x[0],
            x[1],
            w.iter().cloned().fold(0.0, f64::max)
        );
    }
    Ok(())
}
