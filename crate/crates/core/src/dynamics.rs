//! The projected Euler–Maruyama consensus iteration.
//!
//! One step moves every particle towards the consensus point, adds the
//! configured diffusion, optionally pulls it into the exploitation ball and
//! finally projects it back onto the feasible set:
//!
//! ```text
//! Y   = X - dt λ (X - c) + noise(X, c)
//! X'  = Π_domain(Π_ball(Y))          (default order)
//! ```
//!
//! Each iteration is a barrier-synchronized map/reduce: particle energies
//! and updates run in parallel, the consensus point is a sequential
//! reduction. Results are bit-identical for any number of worker threads.

use rayon::prelude::*;

use crate::consensus::{consensus_point, residual, squared_distance};
use crate::domain::{project_to_closed_ball, Domain, FEASIBILITY_TOL};
use crate::ensemble::Ensemble;
use crate::error::{check_dim, CboError, Result};
use crate::heuristics::{exploitation_radius, HeuristicsConfig};
use crate::noise::{NoiseKind, NoiseModel};
use crate::objective::Objective;

/// Order of the exploitation-ball and domain projections within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionOrder {
    #[default]
    BallThenDomain,
    DomainThenBall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stagnation {
    /// Consensus displacement (Euclidean) regarded as "not moving".
    pub tol: f64,
    /// Consecutive non-moving iterations before stopping.
    pub patience: usize,
}

/// Optional early stopping; the default never stops early.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StopRule {
    pub residual_below: Option<f64>,
    pub stagnation: Option<Stagnation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CboParams {
    pub lambda: f64,
    pub sigma: f64,
    pub dt: f64,
    pub iterations: usize,
    pub noise: NoiseKind,
    pub rescale_hierarchical: bool,
    pub projection_order: ProjectionOrder,
    pub stop: StopRule,
}

impl CboParams {
    pub fn new(lambda: f64, sigma: f64, dt: f64, iterations: usize) -> Self {
        Self {
            lambda,
            sigma,
            dt,
            iterations,
            noise: NoiseKind::Anisotropic,
            rescale_hierarchical: false,
            projection_order: ProjectionOrder::default(),
            stop: StopRule::default(),
        }
    }

    pub fn with_noise(mut self, noise: NoiseKind) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            problems.push(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            problems.push(format!("sigma must be nonnegative, got {}", self.sigma));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            problems.push(format!("dt must be positive, got {}", self.dt));
        }
        if let Some(r) = self.stop.residual_below {
            if !(r > 0.0) {
                problems.push(format!("residual stop threshold must be positive, got {r}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CboError::Config(problems))
        }
    }
}

/// Whether `2λ - σ² > 0`.
pub fn is_admissible(lambda: f64, sigma: f64) -> bool {
    2.0 * lambda - sigma * sigma > 0.0
}

/// Time horizon `log(V0/ε) / ((1-τ)(2λ - σ²))` after which the mean-field
/// dynamics reach accuracy `ε`.
pub fn planned_horizon(v0: f64, eps: f64, tau: f64, lambda: f64, sigma: f64) -> Result<f64> {
    if !(v0 > 0.0 && eps > 0.0) {
        return Err(CboError::input("V0 and eps must be positive"));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(CboError::input(format!("tau must lie in [0, 1), got {tau}")));
    }
    let rate = 2.0 * lambda - sigma * sigma;
    if !(rate > 0.0) {
        return Err(CboError::Domain(format!(
            "outside theory-admissible regime: 2λ - σ² = {rate} <= 0"
        )));
    }
    if v0 <= eps {
        return Ok(0.0);
    }
    Ok((v0 / eps).ln() / ((1.0 - tau) * rate))
}

/// Iteration count covering a horizon: `ceil(T / dt)`.
pub fn suggested_iterations(horizon: f64, dt: f64) -> usize {
    (horizon / dt).ceil().max(0.0) as usize
}

/// Advances every particle by one projected Euler–Maruyama step.
///
/// `exploitation` is the ball radius around `consensus`, if that
/// heuristic is active. A non-finite pre-projection state aborts the step
/// with [`CboError::NonFinite`] (iteration reported as 0; [`run`] fills in
/// the real one).
pub fn cbo_step(
    ensemble: &mut Ensemble,
    consensus: &[f64],
    params: &CboParams,
    noise: &NoiseModel,
    exploitation: Option<f64>,
    domain: &Domain,
) -> Result<()> {
    let dim = ensemble.dim();
    check_dim(dim, consensus.len(), "consensus")?;
    check_dim(dim, domain.dim(), "domain")?;
    let drift = params.dt * params.lambda;
    let dt = params.dt;
    let order = params.projection_order;
    ensemble.par_rows_and_streams_mut().try_for_each_init(
        || (vec![0.0; dim], vec![0.0; dim]),
        |(inc, scratch), (x, rng)| {
            noise.draw(x, consensus, dt, rng, inc, scratch);
            for ((xl, cl), nl) in x.iter_mut().zip(consensus).zip(inc.iter()) {
                *xl = *xl - drift * (*xl - cl) + nl;
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(CboError::NonFinite {
                    iteration: 0,
                    what: "particle update".into(),
                    point: x.to_vec(),
                });
            }
            match (exploitation, order) {
                (Some(r), ProjectionOrder::BallThenDomain) => {
                    project_to_closed_ball(x, consensus, r);
                    domain.project_in_place(x);
                }
                (Some(r), ProjectionOrder::DomainThenBall) => {
                    domain.project_in_place(x);
                    project_to_closed_ball(x, consensus, r);
                }
                (None, _) => domain.project_in_place(x),
            }
            Ok(())
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub iteration: usize,
    pub time: f64,
    /// `(1/N) Σ |X^i - x*|²`, when a minimizer is known.
    pub residual: Option<f64>,
    pub consensus: Vec<f64>,
    pub consensus_energy: f64,
    /// Lowest particle energy seen so far.
    pub best_energy: f64,
    pub alpha: f64,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    ResidualThreshold,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<RunRow>,
    /// Volatility actually used (after any boost).
    pub sigma: f64,
    pub admissible: bool,
    pub stop: StopReason,
}

impl RunRecord {
    pub fn initial(&self) -> &RunRow {
        &self.rows[0]
    }

    pub fn last(&self) -> &RunRow {
        self.rows.last().expect("a record always has its initial row")
    }

    pub fn iterations(&self) -> usize {
        self.rows.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub ensemble: Ensemble,
}

fn evaluate(objective: &dyn Objective, ensemble: &Ensemble, iteration: usize) -> Result<Vec<f64>> {
    let energies: Vec<f64> = ensemble
        .positions()
        .par_chunks_exact(ensemble.dim())
        .map(|p| objective.energy(p))
        .collect();
    if let Some(i) = energies.iter().position(|e| !e.is_finite()) {
        return Err(CboError::NonFinite {
            iteration,
            what: format!("objective value {} of particle {i}", energies[i]),
            point: ensemble.particle(i).to_vec(),
        });
    }
    Ok(energies)
}

/// Runs the consensus dynamics for `params.iterations` steps (or until an
/// enabled stopping rule fires) and records one diagnostic row per
/// iteration plus the initial row.
pub fn run(
    objective: &dyn Objective,
    domain: &Domain,
    init: Ensemble,
    params: &CboParams,
    heuristics: &HeuristicsConfig,
) -> Result<RunOutcome> {
    params.validate()?;
    heuristics.validate()?;
    let dim = init.dim();
    check_dim(objective.dim(), dim, "objective vs ensemble")?;
    check_dim(domain.dim(), dim, "domain vs ensemble")?;
    params.noise.validate(dim)?;
    if let Some(i) = init
        .particles()
        .position(|p| !domain.contains(p, FEASIBILITY_TOL))
    {
        return Err(CboError::input(format!(
            "initial particle {i} is not feasible: {:?}",
            init.particle(i)
        )));
    }
    if params.dt * params.lambda > 1.0 {
        log::warn!(
            "dt * lambda = {} > 1: the drift overshoots the consensus point",
            params.dt * params.lambda
        );
    }

    let sigma = heuristics.effective_sigma(params.lambda, params.sigma);
    let noise = NoiseModel {
        kind: params.noise,
        sigma,
        rescale: params.rescale_hierarchical,
    };
    let x_star = objective.minimizer();
    if let Some(x) = &x_star {
        check_dim(dim, x.len(), "objective minimizer")?;
    }

    let budget = params.iterations;
    let mut ensemble = init;
    let mut rows = Vec::with_capacity(budget + 1);
    let mut best = f64::INFINITY;
    let mut still = 0usize;
    let mut stop = StopReason::Budget;

    for k in 0..=budget {
        let energies = evaluate(objective, &ensemble, k)?;
        let alpha = heuristics.alpha_at(k, budget)?;
        let consensus = consensus_point(&ensemble, &energies, alpha)?;
        let consensus_energy = objective.energy(&consensus);
        best = energies.iter().copied().fold(best, f64::min);
        let radius = heuristics
            .gamma
            .map(|g| exploitation_radius(&ensemble, &consensus, g));
        let res = match &x_star {
            Some(x) => Some(residual(&ensemble, x)?),
            None => None,
        };

        if let (Some(stag), Some(prev)) = (params.stop.stagnation, rows.last()) {
            let prev: &RunRow = prev;
            if squared_distance(&prev.consensus, &consensus).sqrt() < stag.tol {
                still += 1;
            } else {
                still = 0;
            }
        }

        rows.push(RunRow {
            iteration: k,
            time: k as f64 * params.dt,
            residual: res,
            consensus,
            consensus_energy,
            best_energy: best,
            alpha,
            radius,
        });

        if k == budget {
            break;
        }
        if let (Some(th), Some(r)) = (params.stop.residual_below, res) {
            if r < th {
                stop = StopReason::ResidualThreshold;
                break;
            }
        }
        if let Some(stag) = params.stop.stagnation {
            if still >= stag.patience {
                stop = StopReason::Stagnation;
                break;
            }
        }

        let row = rows.last().expect("row just pushed");
        cbo_step(&mut ensemble, &row.consensus, params, &noise, radius, domain).map_err(
            |e| match e {
                CboError::NonFinite { what, point, .. } => CboError::NonFinite {
                    iteration: k + 1,
                    what,
                    point,
                },
                other => other,
            },
        )?;
    }

    Ok(RunOutcome {
        record: RunRecord {
            rows,
            sigma,
            admissible: is_admissible(params.lambda, sigma),
            stop,
        },
        ensemble,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{FnObjective, Sphere};

    fn quiet(lambda: f64, dt: f64, k: usize) -> CboParams {
        CboParams::new(lambda, 0.0, dt, k)
    }

    #[test]
    fn full_drift_lands_on_consensus() {
        let mut ens = Ensemble::from_rows(&[[1.0, 2.0], [-3.0, 0.5], [4.0, 4.0]], 1).unwrap();
        let c = [0.25, -0.75];
        let noise = NoiseModel::new(NoiseKind::Anisotropic, 0.0);
        cbo_step(&mut ens, &c, &quiet(1.0, 1.0, 1), &noise, None, &Domain::all_space(2)).unwrap();
        assert!(ens.particles().all(|p| p == c));
    }

    #[test]
    fn half_drift_inside_box_face() {
        let mut ens = Ensemble::from_rows(&[[2.0, 0.0]], 1).unwrap();
        let noise = NoiseModel::new(NoiseKind::Anisotropic, 0.0);
        let dom = Domain::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        cbo_step(&mut ens, &[0.0, 0.0], &quiet(1.0, 0.5, 1), &noise, None, &dom).unwrap();
        assert_eq!(ens.particle(0), &[1.0, 0.0]);
    }

    #[test]
    fn step_matches_scripted_update() {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let (lambda, sigma, dt) = (0.7, 1.0, 0.04);
        let x0 = [1.5, -0.25];
        let c = [0.1, 0.2];
        let mut ens = Ensemble::from_rows(&[x0], 42).unwrap();
        // replay the particle's stream to recover the normals it will use
        let mut replay = crate::ensemble::particle_stream(42, 0);
        let z: [f64; 2] = [replay.sample(StandardNormal), replay.sample(StandardNormal)];
        let noise = NoiseModel::new(NoiseKind::Anisotropic, sigma);
        let params = CboParams::new(lambda, sigma, dt, 1);
        cbo_step(&mut ens, &c, &params, &noise, None, &Domain::all_space(2)).unwrap();
        for l in 0..2 {
            let gap = x0[l] - c[l];
            let expect = x0[l] - dt * lambda * gap + sigma * gap * z[l] * dt.sqrt();
            assert!((ens.particle(0)[l] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn non_finite_update_aborts() {
        let mut ens = Ensemble::from_rows(&[[1e308, 0.0]], 0).unwrap();
        let noise = NoiseModel::new(NoiseKind::Anisotropic, 0.0);
        let err = cbo_step(
            &mut ens,
            &[-1e308, 0.0],
            &quiet(1.0, 3.0, 1),
            &noise,
            None,
            &Domain::all_space(2),
        )
        .unwrap_err();
        assert!(matches!(err, CboError::NonFinite { .. }));
    }

    #[test]
    fn horizon_examples() {
        let e = std::f64::consts::E;
        assert!((planned_horizon(e * 1e-3, 1e-3, 0.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(planned_horizon(1e-3, 1e-3, 0.5, 1.0, 1.0).unwrap(), 0.0);
        let t = planned_horizon(100.0 * 1e-2, 1e-2, 0.5, 1.0, 1.0).unwrap();
        let expect = 2.0 * 100f64.ln();
        assert!((t - expect).abs() < 1e-12);
        assert!((t - 9.2103).abs() < 1e-4);
        assert!(matches!(
            planned_horizon(10.0, 1.0, 0.0, 1.0, 2f64.sqrt()),
            Err(CboError::Domain(_))
        ));
        assert_eq!(suggested_iterations(t, 0.01), 922);
    }

    #[test]
    fn zero_budget_records_initial_row_only() {
        let ens = Ensemble::from_rows(&[[1.0, 1.0], [2.0, -1.0]], 0).unwrap();
        let out = run(
            &Sphere { dim: 2 },
            &Domain::all_space(2),
            ens,
            &quiet(1.0, 0.1, 0),
            &HeuristicsConfig::fixed_alpha(1.0),
        )
        .unwrap();
        assert_eq!(out.record.rows.len(), 1);
        assert_eq!(out.record.rows[0].residual, Some(3.5));
    }

    #[test]
    fn deterministic_contraction_towards_consensus() {
        let rows: Vec<[f64; 2]> = (0..10)
            .map(|i| [(i as f64 * 0.37).sin() * 3.0, (i as f64 * 1.3).cos() * 2.0])
            .collect();
        let ens = Ensemble::from_rows(&rows, 0).unwrap();
        let (lambda, dt) = (1.0, 0.1);
        let out = run(
            &Sphere { dim: 2 },
            &Domain::all_space(2),
            ens.clone(),
            &quiet(lambda, dt, 200),
            &HeuristicsConfig::fixed_alpha(1.0),
        )
        .unwrap();

        // direct simulation of the σ = 0 recursion, step by step
        let mut sim = ens;
        let factor = (1.0 - lambda * dt).powi(2);
        let spread0 = spread(&sim, &out.record.rows[0].consensus);
        for row in &out.record.rows[..200] {
            let before = spread(&sim, &row.consensus);
            let noise = NoiseModel::new(NoiseKind::Anisotropic, 0.0);
            cbo_step(&mut sim, &row.consensus, &quiet(lambda, dt, 1), &noise, None, &Domain::all_space(2)).unwrap();
            let after = spread(&sim, &row.consensus);
            // positions carry rounding of order eps |x|, which dominates once the spread is tiny
            let floor = 8.0 * f64::EPSILON * before.sqrt();
            assert!((after - factor * before).abs() <= 1e-12 * before + floor, "{}", row.iteration);
        }
        let last = out.record.last();
        assert!(spread(&out.ensemble, &last.consensus) <= 1e-8 * spread0);
        assert_eq!(sim.positions(), out.ensemble.positions());
    }

    fn spread(ens: &Ensemble, c: &[f64]) -> f64 {
        residual(ens, c).unwrap()
    }

    #[test]
    fn best_energy_non_increasing_and_rows_counted() {
        let ens = crate::ensemble::init_gaussian(&[2.0, 2.0], 1.0, &Domain::all_space(2), 30, 3).unwrap();
        let out = run(
            &Sphere { dim: 2 },
            &Domain::all_space(2),
            ens,
            &CboParams::new(1.0, 2.0, 0.05, 50),
            &HeuristicsConfig::fixed_alpha(10.0),
        )
        .unwrap();
        assert_eq!(out.record.rows.len(), 51);
        for w in out.record.rows.windows(2) {
            assert!(w[1].best_energy <= w[0].best_energy);
        }
        assert!(!out.record.admissible);
    }

    #[test]
    fn non_finite_objective_is_reported_with_point() {
        let obj = FnObjective::new(1, |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] });
        let ens = Ensemble::from_rows(&[[0.0], [1.0]], 0).unwrap();
        let err = run(
            &obj,
            &Domain::all_space(1),
            ens,
            &quiet(1.0, 0.1, 3),
            &HeuristicsConfig::fixed_alpha(1.0),
        )
        .unwrap_err();
        match err {
            CboError::NonFinite { iteration, point, .. } => {
                assert_eq!(iteration, 0);
                assert_eq!(point, vec![1.0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_start_rejected() {
        let ens = Ensemble::from_rows(&[[2.0]], 0).unwrap();
        let dom = Domain::boxed(vec![0.0], vec![1.0]).unwrap();
        assert!(run(&Sphere { dim: 1 }, &dom, ens, &quiet(1.0, 0.1, 1), &HeuristicsConfig::fixed_alpha(1.0)).is_err());
    }

    #[test]
    fn residual_stop_rule() {
        let ens = Ensemble::from_rows(&[[1.0], [-1.0]], 0).unwrap();
        let mut params = quiet(1.0, 0.5, 1000);
        params.stop.residual_below = Some(1e-6);
        let out = run(&Sphere { dim: 1 }, &Domain::all_space(1), ens, &params, &HeuristicsConfig::fixed_alpha(1.0)).unwrap();
        assert_eq!(out.record.stop, StopReason::ResidualThreshold);
        assert!(out.record.last().residual.unwrap() < 1e-6);
        assert!(out.record.iterations() < 1000);
    }

    #[test]
    fn stagnation_stop_rule() {
        let ens = Ensemble::from_rows(&[[1.0], [1.0]], 0).unwrap();
        let mut params = quiet(1.0, 0.5, 1000);
        params.stop.stagnation = Some(Stagnation { tol: 1e-12, patience: 5 });
        let out = run(&Sphere { dim: 1 }, &Domain::all_space(1), ens, &params, &HeuristicsConfig::fixed_alpha(1.0)).unwrap();
        assert_eq!(out.record.stop, StopReason::Stagnation);
        assert_eq!(out.record.iterations(), 5);
    }

    #[test]
    fn steps_stay_feasible_on_every_domain() {
        use crate::domain::{make_paper_domain, PaperDomain};
        for name in [PaperDomain::Omega1, PaperDomain::Omega2, PaperDomain::Omega3, PaperDomain::Omega4] {
            let dom = make_paper_domain(name, 3).unwrap();
            let init = crate::ensemble::init_gaussian(&[2.9; 3], 10.0, &dom, 200, 5).unwrap();
            let heur = HeuristicsConfig { alpha0: 1e3, alpha_final: 1e6, gamma: Some(0.8), boost: Some(5.0) };
            let out = run(&crate::objective::Rastrigin { dim: 3 }, &dom, init, &CboParams::new(1.0, 0.0, 0.01, 30), &heur).unwrap();
            assert!(out.ensemble.is_feasible(&dom, FEASIBILITY_TOL), "{name}");
        }
    }
}
