//! Named reproductions of the benchmark experiments.
//!
//! `Scale::Paper` uses the published parameters; `Scale::Desk` shrinks
//! particle counts, iteration budgets, grids and dimensions so the whole
//! preset finishes in minutes.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::domain::PaperDomain;
use crate::error::{CboError, Result};
use crate::noise::fine_dim;

use super::config::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl FromStr for Scale {
    type Err = CboError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(CboError::Config(vec![format!(
                "unknown scale {s:?} (expected desk or paper)"
            )])),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        })
    }
}

pub const PRESET_NAMES: [&str; 6] = [
    "fig-sweep",
    "fig-middle-scale",
    "fig-large-scale",
    "fig-nonconvex",
    "fig-allen-cahn",
    "fig-obstacle",
];

#[derive(Debug, Clone, PartialEq)]
pub enum PresetJob {
    Experiment(ExperimentConfig),
    Sweep(SweepConfig),
    AllenCahn(AllenCahnConfig),
}

impl PresetJob {
    pub fn name(&self) -> &str {
        match self {
            PresetJob::Experiment(c) => &c.name,
            PresetJob::Sweep(c) => &c.base.name,
            PresetJob::AllenCahn(c) => &c.name,
        }
    }
}

/// Rastrigin start used throughout: `N((5.12, ..., 5.12)/√d, 10 Id)`.
pub fn paper_gaussian_init(dim: usize) -> InitSpec {
    InitSpec::Gaussian {
        mean: vec![5.12 / (dim as f64).sqrt(); dim],
        variance: 10.0,
    }
}

fn seeds(n: usize) -> Vec<u64> {
    (0..n as u64).collect()
}

/// Jobs of preset `name`. `n_seeds` overrides the default seed count.
pub fn preset(name: &str, scale: Scale, n_seeds: Option<usize>) -> Result<Vec<PresetJob>> {
    if n_seeds == Some(0) {
        return Err(CboError::Config(vec!["--seeds must be at least 1".into()]));
    }
    match name {
        "fig-sweep" => Ok(fig_sweep(scale, n_seeds)),
        "fig-middle-scale" => Ok(fig_middle_scale(scale, n_seeds)),
        "fig-large-scale" => Ok(fig_large_scale(scale, n_seeds)),
        "fig-nonconvex" => Ok(fig_nonconvex(scale, n_seeds)),
        "fig-allen-cahn" => Ok(fig_allen_cahn(scale, n_seeds)),
        "fig-obstacle" => Ok(fig_obstacle(scale, n_seeds)),
        _ => Err(CboError::Config(vec![format!(
            "unknown preset {name:?}; available: {}",
            PRESET_NAMES.join(", ")
        )])),
    }
}

/// `(λ, σ)` sweep on Rastrigin in d = 2: anisotropic and isotropic noise,
/// with and without the box constraint.
fn fig_sweep(scale: Scale, n_seeds: Option<usize>) -> Vec<PresetJob> {
    let (particles, count) = match scale {
        Scale::Paper => (1000, 100),
        Scale::Desk => (200, 10),
    };
    let reps = n_seeds.unwrap_or(1);
    let mut jobs = Vec::new();
    for (noise, tag) in [(NoiseSpec::Anisotropic, "anisotropic"), (NoiseSpec::Isotropic, "isotropic")] {
        for (domain, dtag) in [
            (DomainSpec::paper(PaperDomain::Omega1, 2), "omega1"),
            (DomainSpec::AllSpace { dim: 2 }, "unconstrained"),
        ] {
            let mut params = ParamsSpec::new(1.0, 1.0, 1e-2, 100);
            params.noise = noise;
            jobs.push(PresetJob::Sweep(SweepConfig {
                base: ExperimentConfig {
                    name: format!("fig-sweep-{tag}-{dtag}"),
                    objective: ObjectiveSpec::Rastrigin { dim: 2 },
                    domain,
                    params,
                    heuristics: HeuristicsSpec::fixed_alpha(1e6),
                    init: paper_gaussian_init(2),
                    particles,
                    seeds: seeds(reps),
                    success_threshold: None,
                    output: None,
                },
                grid: SweepGrid {
                    lambda: LogRange { lo: 0.1, hi: 10f64.powf(2.5), count },
                    sigma: LogRange { lo: 0.1, hi: 10f64.powf(1.1), count },
                    repetitions: reps,
                },
            }));
        }
    }
    jobs
}

fn rastrigin_job(
    name: String,
    dim: usize,
    domain: DomainSpec,
    heuristics: HeuristicsSpec,
    particles: usize,
    iterations: usize,
    n: usize,
) -> PresetJob {
    PresetJob::Experiment(ExperimentConfig {
        name,
        objective: ObjectiveSpec::Rastrigin { dim },
        domain,
        params: ParamsSpec::new(1.0, SQRT_2, 1e-2, iterations),
        heuristics,
        init: paper_gaussian_init(dim),
        particles,
        seeds: seeds(n),
        success_threshold: None,
        output: None,
    })
}

/// Enhanced parameters: λ = 1, σ = 5 √(2λ) through the boost, α 1e6 → 1e9.
fn enhanced(gamma: Option<f64>) -> HeuristicsSpec {
    HeuristicsSpec {
        alpha0: 1e6,
        alpha_final: 1e9,
        gamma,
        boost: Some(5.0),
    }
}

/// Admissible comparison: σ = √(2λ), same α schedule.
fn admissible(gamma: Option<f64>) -> HeuristicsSpec {
    HeuristicsSpec {
        alpha0: 1e6,
        alpha_final: 1e9,
        gamma,
        boost: None,
    }
}

fn gamma_tag(g: Option<f64>) -> String {
    g.map_or("off".into(), |g| g.to_string())
}

fn fig_middle_scale(scale: Scale, n_seeds: Option<usize>) -> Vec<PresetJob> {
    let (dims, gammas): (&[usize], &[Option<f64>]) = match scale {
        Scale::Paper => (&[2, 15, 20], &[None, Some(0.5), Some(0.75), Some(0.95)]),
        Scale::Desk => (&[15], &[None, Some(0.95)]),
    };
    let n = n_seeds.unwrap_or(20);
    let mut jobs = Vec::new();
    for &d in dims {
        for (omega, otag) in [(PaperDomain::Omega1, "omega1"), (PaperDomain::Omega2, "omega2")] {
            for &g in gammas {
                for (h, htag) in [(enhanced(g), "S5"), (admissible(g), "S1")] {
                    jobs.push(rastrigin_job(
                        format!("fig-middle-scale-d{d}-{otag}-{htag}-gamma{}", gamma_tag(g)),
                        d,
                        DomainSpec::paper(omega, d),
                        h,
                        1000,
                        1000,
                        n,
                    ));
                }
            }
        }
    }
    jobs
}

fn fig_large_scale(scale: Scale, n_seeds: Option<usize>) -> Vec<PresetJob> {
    let d = 100;
    let (domains, n): (Vec<(DomainSpec, &str)>, usize) = match scale {
        Scale::Paper => (
            vec![
                (DomainSpec::paper(PaperDomain::Omega2, d), "omega2"),
                (DomainSpec::AllSpace { dim: d }, "unconstrained"),
            ],
            20,
        ),
        Scale::Desk => (vec![(DomainSpec::paper(PaperDomain::Omega2, d), "omega2")], 5),
    };
    domains
        .into_iter()
        .map(|(dom, tag)| {
            rastrigin_job(
                format!("fig-large-scale-d100-{tag}"),
                d,
                dom,
                enhanced(Some(0.95)),
                1000,
                1000,
                n_seeds.unwrap_or(n),
            )
        })
        .collect()
}

fn fig_nonconvex(scale: Scale, n_seeds: Option<usize>) -> Vec<PresetJob> {
    let (dims, particles, iterations, n): (&[usize], _, _, _) = match scale {
        Scale::Paper => (&[2, 15, 20], 1000, 1000, 20),
        Scale::Desk => (&[2], 200, 500, 5),
    };
    let mut jobs = Vec::new();
    for &d in dims {
        for (omega, tag) in [(PaperDomain::Omega3, "omega3"), (PaperDomain::Omega4, "omega4")] {
            jobs.push(rastrigin_job(
                format!("fig-nonconvex-d{d}-{tag}"),
                d,
                DomainSpec::paper(omega, d),
                enhanced(Some(0.95)),
                particles,
                iterations,
                n_seeds.unwrap_or(n),
            ));
        }
    }
    jobs
}

/// The p-Allen–Cahn setup without obstacle: v0 = 0.5, v1 = 1, wells at
/// 0.25 and 0.75, ε⁻² = 500, p = 1.5, λ = 1, σ = 7, α = 1e6, Δt = 1e-2,
/// N = 20 d. Hierarchical noise uses the 1/h amplitude; with the bare
/// mass-matrix amplitude the ensemble collapses far above the minimum.
pub fn allen_cahn_base(name: String, level: u32) -> AllenCahnConfig {
    let mut params = ParamsSpec::new(1.0, 7.0, 1e-2, 0);
    params.noise = NoiseSpec::Hierarchical { coarse: level, fine: level };
    params.rescale_hierarchical = true;
    AllenCahnConfig {
        name,
        level,
        v0: 0.5,
        v1: 1.0,
        w1: 0.25,
        w2: 0.75,
        p: 1.5,
        eps_inv_sq: 500.0,
        obstacle: None,
        params,
        heuristics: HeuristicsSpec::fixed_alpha(1e6),
        particles: Some(20 * fine_dim(level)),
        coarsest: 2,
        iters_per_level: 100,
        iters_finest: 1000,
        seeds: vec![0],
        output: None,
    }
}

fn fig_allen_cahn(scale: Scale, n_seeds: Option<usize>) -> Vec<PresetJob> {
    let (level, n) = match scale {
        Scale::Paper => (7, 1),
        Scale::Desk => (5, 5),
    };
    let mut cfg = allen_cahn_base(format!("fig-allen-cahn-m{level}"), level);
    cfg.seeds = seeds(n_seeds.unwrap_or(n));
    vec![PresetJob::AllenCahn(cfg)]
}

const RECONSTRUCTION: &str = "reconstruction: representative bounds, not the published obstacle data";

/// Representative obstacles. The published ones are only shown as plots.
pub fn reconstructed_obstacles() -> Vec<(&'static str, ObstacleSpec)> {
    let label = Some(RECONSTRUCTION.to_string());
    vec![
        (
            "band",
            ObstacleSpec {
                label: label.clone(),
                lower: ObstacleBound::Constant { value: 0.1 },
                upper: ObstacleBound::Constant { value: 0.9 },
            },
        ),
        (
            "ceiling",
            ObstacleSpec {
                label: label.clone(),
                lower: ObstacleBound::Unbounded,
                upper: ObstacleBound::PiecewiseLinear {
                    points: vec![(0.0, 0.9), (0.25, 0.6), (0.6, 0.6), (1.0, 1.0)],
                },
            },
        ),
        (
            "floor",
            ObstacleSpec {
                label,
                lower: ObstacleBound::PiecewiseLinear {
                    points: vec![(0.0, 0.4), (0.4, 0.4), (0.6, 0.7), (1.0, 0.95)],
                },
                upper: ObstacleBound::Unbounded,
            },
        ),
    ]
}

fn fig_obstacle(scale: Scale, n_seeds: Option<usize>) -> Vec<PresetJob> {
    let (level, coarse_iters, fine_iters) = match scale {
        Scale::Paper => (7, 1000, 10000),
        Scale::Desk => (5, 100, 1000),
    };
    let n = n_seeds.unwrap_or(1);
    let obstacles = reconstructed_obstacles();
    let make = |name: String, p: f64, eps_inv_sq: f64, obstacle: &ObstacleSpec| {
        let mut cfg = allen_cahn_base(name, level);
        cfg.p = p;
        cfg.eps_inv_sq = eps_inv_sq;
        cfg.obstacle = Some(obstacle.clone());
        cfg.iters_per_level = coarse_iters;
        cfg.iters_finest = fine_iters;
        cfg.seeds = seeds(n);
        PresetJob::AllenCahn(cfg)
    };
    let mut jobs = Vec::new();
    for (tag, ob) in &obstacles {
        jobs.push(make(format!("fig-obstacle-{tag}-p1.5-eps500"), 1.5, 500.0, ob));
    }
    let (_, band) = &obstacles[0];
    for p in [1.0, 1.25, 1.5] {
        jobs.push(make(format!("fig-obstacle-band-p{p}-eps2000"), p, 2000.0, band));
    }
    for e in [500.0, 10000.0] {
        jobs.push(make(format!("fig-obstacle-band-p1.5-eps{e}"), 1.5, e, band));
    }
    jobs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates_at_both_scales() {
        for name in PRESET_NAMES {
            for scale in [Scale::Desk, Scale::Paper] {
                let jobs = preset(name, scale, None).unwrap();
                assert!(!jobs.is_empty());
                for job in &jobs {
                    match job {
                        PresetJob::Experiment(c) => c.validate().unwrap(),
                        PresetJob::Sweep(s) => {
                            s.base.validate().unwrap();
                            s.grid.validate().unwrap();
                        }
                        PresetJob::AllenCahn(c) => c.validate().unwrap(),
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_names_are_config_errors() {
        assert!(matches!(preset("fig-nope", Scale::Desk, None), Err(CboError::Config(_))));
        assert!("huge".parse::<Scale>().is_err());
        assert!(preset("fig-sweep", Scale::Desk, Some(0)).is_err());
    }

    #[test]
    fn seed_override() {
        let jobs = preset("fig-large-scale", Scale::Desk, Some(2)).unwrap();
        let PresetJob::Experiment(c) = &jobs[0] else { panic!() };
        assert_eq!(c.seeds, vec![0, 1]);
    }
}
