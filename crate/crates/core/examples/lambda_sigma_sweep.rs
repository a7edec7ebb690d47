//! A coarse (λ, σ) map for Rastrigin in d = 2; `#` marks cells whose final
//! residual beats the initial one.

use cbo::harness::presets::preset;
use cbo::harness::{run_sweep, LogRange, PresetJob, Scale};

fn main() -> Result<(), cbo::CboError> {
    let PresetJob::Sweep(mut cfg) = preset("fig-sweep", Scale::Desk, None)?.remove(3) else {
        unreachable!()
    };
    cfg.grid.lambda = LogRange { lo: 0.1, hi: 10f64.powf(2.5), count: 12 };
    cfg.grid.sigma = LogRange { lo: 0.1, hi: 10f64.powf(1.1), count: 12 };
    let res = run_sweep(&cfg.base, &cfg.grid)?;

    println!("{}: ln V(0) = {:.3}", cfg.base.name, res.ln_initial);
    println!("rows: lambda from {:.1} down to {:.1}; columns: sigma from {:.1} to {:.1}", res.lambdas[res.lambdas.len() - 1], res.lambdas[0], res.sigmas[0], res.sigmas[res.sigmas.len() - 1]);
    for (i, lambda) in res.lambdas.iter().enumerate().rev() {
        let line: String = res.ln_final[i]
            .iter()
            .map(|v| if *v < res.ln_initial { '#' } else { '.' })
            .collect();
        println!("{lambda:8.2} {line}");
    }
    Ok(())
}
