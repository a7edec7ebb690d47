//! Rastrigin in d = 2 on the box [-6.12, 5.12]², fixed α, anisotropic noise.

use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let domain = make_paper_domain(PaperDomain::Omega1, 2)?;
    let init = init_gaussian(&[3.62, 3.62], 10.0, &domain, 500, 7)?;
    let params = CboParams::new(1.0, 1.0, 0.01, 300);
    let out = run(&Rastrigin { dim: 2 }, &domain, init, &params, &HeuristicsConfig::fixed_alpha(1e6))?;

    for row in out.record.rows.iter().step_by(50) {
        println!(
            "k={:4} t={:5.2} V={:.3e} f(consensus)={:.3e} x*=({:+.4}, {:+.4})",
            row.iteration,
            row.time,
            row.residual.unwrap(),
            row.consensus_energy,
            row.consensus[0],
            row.consensus[1]
        );
    }
    let last = out.record.last();
    println!("final consensus {:?}, energy {:.3e}", last.consensus, last.consensus_energy);
    println!("all particles feasible: {}", out.ensemble.is_feasible(&domain, 0.0));
    Ok(())
}
