//! Builds an experiment config, round-trips it through JSON, runs it, and
//! writes per-seed CSVs plus summary.json into a temporary directory.

use cbo::domain::PaperDomain;
use cbo::harness::persist::aggregate_from_dir;
use cbo::harness::*;

fn main() -> Result<(), cbo::CboError> {
    let cfg = ExperimentConfig {
        name: "demo".into(),
        objective: ObjectiveSpec::Rastrigin { dim: 5 },
        domain: DomainSpec::paper(PaperDomain::Omega2, 5),
        params: ParamsSpec::new(1.0, 1.0, 0.01, 400),
        heuristics: HeuristicsSpec { alpha0: 1e6, alpha_final: 1e9, gamma: Some(0.95), boost: Some(5.0) },
        init: presets::paper_gaussian_init(5),
        particles: 400,
        seeds: vec![1, 2, 3],
        success_threshold: Some(0.1),
        output: None,
    };
    let json = serde_json::to_string_pretty(&cfg).unwrap();
    println!("{json}");
    let cfg: ExperimentConfig = serde_json::from_str(&json).unwrap();

    let res = run_experiment(&cfg)?;
    let dir = std::env::temp_dir().join("cbo-demo");
    for path in persist_experiment(&dir, &res)? {
        println!("wrote {}", path.display());
    }
    let s = aggregate_from_dir(&dir)?;
    println!(
        "{} runs, median final residual {:.3e}, success rate {:.2}",
        s.runs,
        s.median_final_residual.unwrap_or(f64::NAN),
        s.success_rate.unwrap_or(f64::NAN)
    );
    Ok(())
}
