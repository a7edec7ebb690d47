//! Rastrigin in d = 15 on [-6.12, 5.12]^15 with few particles: the plain
//! scheme against the α schedule, the γ-ball and the σ boost.

use std::f64::consts::SQRT_2;

use cbo::prelude::*;

fn main() -> Result<(), CboError> {
    let d = 15;
    let domain = make_paper_domain(PaperDomain::Omega1, d)?;
    let params = CboParams::new(1.0, SQRT_2, 0.01, 1000);
    let variants = [
        ("plain, alpha 1e6", HeuristicsConfig::fixed_alpha(1e6)),
        (
            "alpha 1e6 -> 1e9",
            HeuristicsConfig { alpha0: 1e6, alpha_final: 1e9, gamma: None, boost: None },
        ),
        (
            "+ gamma 0.95",
            HeuristicsConfig { alpha0: 1e6, alpha_final: 1e9, gamma: Some(0.95), boost: None },
        ),
        (
            "+ boost S = 5",
            HeuristicsConfig { alpha0: 1e6, alpha_final: 1e9, gamma: Some(0.95), boost: Some(5.0) },
        ),
    ];
    for (label, h) in variants {
        let mut wins = 0;
        let seeds = 0..3u64;
        for seed in seeds.clone() {
            let init = init_gaussian(&vec![3.62; d], 10.0, &domain, 1000, seed)?;
            let out = run(&Rastrigin { dim: d }, &domain, init, &params, &h)?;
            let x = &out.record.last().consensus;
            if x.iter().all(|v| v.abs() < 0.25) {
                wins += 1;
            }
        }
        println!("{label:18} consensus at the origin in {wins}/{} runs", seeds.count());
    }
    Ok(())
}
