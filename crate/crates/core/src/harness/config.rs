//! JSON experiment configuration.
//!
//! A config file is the single source of truth for a run. Domains, noise
//! kinds, initial laws and obstacles are internally tagged by `"type"` (or
//! `"kind"` for noise):
//!
//! ```json
//! {
//!   "name": "rastrigin-omega1",
//!   "objective": { "type": "rastrigin", "dim": 2 },
//!   "domain": { "type": "box", "lower": [-6.12, -6.12], "upper": [5.12, 5.12] },
//!   "params": { "lambda": 1.0, "sigma": 1.0, "dt": 0.01, "iterations": 100 },
//!   "heuristics": { "alpha0": 1e6, "alphaK": 1e6 },
//!   "init": { "type": "gaussian", "mean": [3.62, 3.62], "variance": 10.0 },
//!   "particles": 1000,
//!   "seeds": [0]
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::allen_cahn::{
    coarse_initial_ensemble, AllenCahnProblem, FeLevel, GlEnergy, MultigridSchedule, Obstacle,
    WellParams,
};
use crate::domain::{make_paper_domain, Ball, Domain, PaperDomain};
use crate::dynamics::{CboParams, ProjectionOrder, Stagnation, StopRule};
use crate::ensemble::{init_gaussian, init_uniform, Ensemble};
use crate::error::{CboError, Result};
use crate::heuristics::{HeuristicsConfig, DEFAULT_ALPHA_FINAL};
use crate::noise::{fine_dim, NoiseKind};
use crate::objective::{Objective, Rastrigin, Sphere};

/// Default success threshold on the final residual.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Rastrigin {
        dim: usize,
    },
    Sphere {
        dim: usize,
    },
    /// Discrete p-Ginzburg–Landau energy on level `level`.
    AllenCahn {
        level: u32,
        v0: f64,
        v1: f64,
        w1: f64,
        w2: f64,
        p: f64,
        eps_inv_sq: f64,
    },
}

impl ObjectiveSpec {
    pub fn dim(&self) -> usize {
        match self {
            ObjectiveSpec::Rastrigin { dim } | ObjectiveSpec::Sphere { dim } => *dim,
            ObjectiveSpec::AllenCahn { level, .. } => {
                if (1..=30).contains(level) {
                    fine_dim(*level)
                } else {
                    0
                }
            }
        }
    }

    pub fn build(&self) -> Result<Box<dyn Objective>> {
        Ok(match *self {
            ObjectiveSpec::Rastrigin { dim } => Box::new(Rastrigin { dim }),
            ObjectiveSpec::Sphere { dim } => Box::new(Sphere { dim }),
            ObjectiveSpec::AllenCahn {
                level,
                v0,
                v1,
                w1,
                w2,
                p,
                eps_inv_sq,
            } => Box::new(GlEnergy::new(
                FeLevel::new(level, v0, v1)?,
                WellParams { w1, w2, p, eps_inv_sq },
            )?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallSpec {
    fn build(&self) -> Result<Ball> {
        Ball::new(self.center.clone(), self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    AllSpace {
        dim: usize,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    BallMinusBalls {
        outer: BallSpec,
        removed: Vec<BallSpec>,
    },
    /// `null` bounds are unconstrained.
    ObstacleBox {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    /// One of the named benchmark domains `omega1`..`omega4`.
    Paper {
        name: String,
        dim: usize,
    },
}

impl DomainSpec {
    pub fn paper(name: PaperDomain, dim: usize) -> Self {
        DomainSpec::Paper {
            name: name.name().to_string(),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::AllSpace { dim } | DomainSpec::Paper { dim, .. } => *dim,
            DomainSpec::Box { lower, .. } => lower.len(),
            DomainSpec::ObstacleBox { lower, .. } => lower.len(),
            DomainSpec::Ball { center, .. } => center.len(),
            DomainSpec::BallMinusBalls { outer, .. } => outer.center.len(),
        }
    }

    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::AllSpace { dim } => Ok(Domain::all_space(*dim)),
            DomainSpec::Box { lower, upper } => Domain::boxed(lower.clone(), upper.clone()),
            DomainSpec::Ball { center, radius } => Domain::ball(center.clone(), *radius),
            DomainSpec::BallMinusBalls { outer, removed } => Domain::ball_minus_balls(
                outer.build()?,
                removed.iter().map(BallSpec::build).collect::<Result<_>>()?,
            ),
            DomainSpec::ObstacleBox { lower, upper } => Domain::obstacle_box(
                lower.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect(),
                upper.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
            ),
            DomainSpec::Paper { name, dim } => make_paper_domain(name.parse()?, *dim),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    #[default]
    Anisotropic,
    Isotropic,
    Hierarchical {
        coarse: u32,
        fine: u32,
    },
}

impl From<NoiseSpec> for NoiseKind {
    fn from(s: NoiseSpec) -> Self {
        match s {
            NoiseSpec::Anisotropic => NoiseKind::Anisotropic,
            NoiseSpec::Isotropic => NoiseKind::Isotropic,
            NoiseSpec::Hierarchical { coarse, fine } => NoiseKind::Hierarchical { coarse, fine },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderSpec {
    #[default]
    BallThenDomain,
    DomainThenBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub lambda: f64,
    pub sigma: f64,
    pub dt: f64,
    pub iterations: usize,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default, skip_serializing_if = "is_false")]
    pub rescale_hierarchical: bool,
    #[serde(default)]
    pub projection_order: OrderSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_residual: Option<f64>,
    /// `[tol, patience]` consensus-stagnation rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_stagnation: Option<(f64, usize)>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ParamsSpec {
    pub fn new(lambda: f64, sigma: f64, dt: f64, iterations: usize) -> Self {
        Self {
            lambda,
            sigma,
            dt,
            iterations,
            noise: NoiseSpec::Anisotropic,
            rescale_hierarchical: false,
            projection_order: OrderSpec::BallThenDomain,
            stop_residual: None,
            stop_stagnation: None,
        }
    }

    pub fn build(&self) -> CboParams {
        CboParams {
            lambda: self.lambda,
            sigma: self.sigma,
            dt: self.dt,
            iterations: self.iterations,
            noise: self.noise.into(),
            rescale_hierarchical: self.rescale_hierarchical,
            projection_order: match self.projection_order {
                OrderSpec::BallThenDomain => ProjectionOrder::BallThenDomain,
                OrderSpec::DomainThenBall => ProjectionOrder::DomainThenBall,
            },
            stop: StopRule {
                residual_below: self.stop_residual,
                stagnation: self
                    .stop_stagnation
                    .map(|(tol, patience)| Stagnation { tol, patience }),
            },
        }
    }
}

fn default_alpha_final() -> f64 {
    DEFAULT_ALPHA_FINAL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicsSpec {
    pub alpha0: f64,
    #[serde(rename = "alphaK", default = "default_alpha_final")]
    pub alpha_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "boost_S", default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<f64>,
}

impl HeuristicsSpec {
    pub fn fixed_alpha(alpha: f64) -> Self {
        Self {
            alpha0: alpha,
            alpha_final: alpha,
            gamma: None,
            boost: None,
        }
    }

    pub fn build(&self) -> HeuristicsConfig {
        HeuristicsConfig {
            alpha0: self.alpha0,
            alpha_final: self.alpha_final,
            gamma: self.gamma,
            boost: self.boost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// Isotropic Gaussian `N(mean, variance Id)`, projected onto the domain.
    Gaussian { mean: Vec<f64>, variance: f64 },
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    /// Coarse-level uniform draws prolongated to the objective's level
    /// (Allen–Cahn objectives only).
    FemCoarse { level: u32 },
}

impl InitSpec {
    fn dim(&self) -> Option<usize> {
        match self {
            InitSpec::Gaussian { mean, .. } => Some(mean.len()),
            InitSpec::Uniform { lower, .. } => Some(lower.len()),
            InitSpec::FemCoarse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub objective: ObjectiveSpec,
    pub domain: DomainSpec,
    pub params: ParamsSpec,
    pub heuristics: HeuristicsSpec,
    pub init: InitSpec,
    pub particles: usize,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Everything needed to start a run, built from a validated config.
pub struct BuiltExperiment {
    pub objective: Box<dyn Objective>,
    pub domain: Domain,
    pub params: CboParams,
    pub heuristics: HeuristicsConfig,
}

impl ExperimentConfig {
    pub fn success_threshold(&self) -> f64 {
        self.success_threshold.unwrap_or(DEFAULT_SUCCESS_THRESHOLD)
    }

    /// Collects every problem in the config instead of stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let d = self.objective.dim();
        if d == 0 {
            problems.push("objective dimension must be at least 1".to_string());
        }
        if self.domain.dim() != d {
            problems.push(format!(
                "domain dimension {} does not match objective dimension {d}",
                self.domain.dim()
            ));
        }
        if let Some(di) = self.init.dim() {
            if di != d {
                problems.push(format!(
                    "init dimension {di} does not match objective dimension {d}"
                ));
            }
        }
        match (&self.init, &self.objective) {
            (InitSpec::FemCoarse { level }, ObjectiveSpec::AllenCahn { level: fine, .. }) => {
                if *level < 1 || level > fine {
                    problems.push(format!("fem_coarse level {level} outside 1..={fine}"));
                }
            }
            (InitSpec::FemCoarse { .. }, _) => {
                problems.push("fem_coarse init requires an allen_cahn objective".into())
            }
            (InitSpec::Gaussian { variance, .. }, _) if !(*variance > 0.0) => {
                problems.push(format!("init variance must be positive, got {variance}"))
            }
            _ => {}
        }
        if self.particles == 0 {
            problems.push("particles must be at least 1".into());
        }
        if self.seeds.is_empty() {
            problems.push("at least one seed is required".into());
        }
        if let Some(t) = self.success_threshold {
            if !(t > 0.0) {
                problems.push(format!("success_threshold must be positive, got {t}"));
            }
        }
        if let Err(e) = self.domain.build() {
            problems.push(format!("domain: {e}"));
        }
        if let Err(e) = self.objective.build() {
            problems.push(format!("objective: {e}"));
        }
        let params = self.params.build();
        collect(&mut problems, params.validate());
        if let Err(e) = params.noise.validate(d) {
            problems.push(format!("noise: {e}"));
        }
        collect(&mut problems, self.heuristics.build().validate());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CboError::Config(problems))
        }
    }

    pub fn build(&self) -> Result<BuiltExperiment> {
        self.validate()?;
        Ok(BuiltExperiment {
            objective: self.objective.build()?,
            domain: self.domain.build()?,
            params: self.params.build(),
            heuristics: self.heuristics.build(),
        })
    }

    /// Initial ensemble for `seed`.
    pub fn initial_ensemble(&self, domain: &Domain, seed: u64) -> Result<Ensemble> {
        match &self.init {
            InitSpec::Gaussian { mean, variance } => {
                init_gaussian(mean, *variance, domain, self.particles, seed)
            }
            InitSpec::Uniform { lower, upper } => {
                init_uniform(lower, upper, domain, self.particles, seed)
            }
            InitSpec::FemCoarse { level } => {
                let ObjectiveSpec::AllenCahn {
                    level: fine,
                    v0,
                    v1,
                    w1,
                    w2,
                    p,
                    eps_inv_sq,
                } = self.objective
                else {
                    return Err(CboError::Config(vec![
                        "fem_coarse init requires an allen_cahn objective".into(),
                    ]));
                };
                let problem = AllenCahnProblem {
                    level: FeLevel::new(fine, v0, v1)?,
                    wells: WellParams { w1, w2, p, eps_inv_sq },
                    obstacle: None,
                };
                let mut ens = coarse_initial_ensemble(&problem, *level, self.particles, seed)?;
                ens.project_onto(domain)?;
                Ok(ens)
            }
        }
    }
}

fn collect(problems: &mut Vec<String>, r: Result<()>) {
    match r {
        Ok(()) => {}
        Err(CboError::Config(p)) => problems.extend(p),
        Err(e) => problems.push(e.to_string()),
    }
}

/// `count` values spaced evenly in `log10` between `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LogRange {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.log10(), self.hi.log10());
        (0..self.count)
            .map(|j| 10f64.powf(a + (b - a) * j as f64 / (self.count - 1) as f64))
            .collect()
    }

    fn problems(&self, what: &str, out: &mut Vec<String>) {
        if self.count == 0 {
            out.push(format!("{what}: count must be at least 1"));
        }
        if !(self.lo > 0.0) || !(self.hi > 0.0) {
            out.push(format!("{what}: bounds must be positive for log spacing"));
        }
        if self.count > 1 && !(self.lo < self.hi) {
            out.push(format!("{what}: lo ({}) must be below hi ({})", self.lo, self.hi));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub lambda: LogRange,
    pub sigma: LogRange,
    #[serde(default = "one")]
    pub repetitions: usize,
}

fn one() -> usize {
    1
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        self.lambda.problems("lambda", &mut problems);
        self.sigma.problems("sigma", &mut problems);
        if self.repetitions == 0 {
            problems.push("repetitions must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CboError::Config(problems))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub grid: SweepGrid,
}

/// One side of an obstacle, evaluated at the interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObstacleBound {
    Unbounded,
    Constant { value: f64 },
    /// Linear interpolation between `[x, y]` breakpoints sorted by `x`;
    /// constant extrapolation outside.
    PiecewiseLinear { points: Vec<(f64, f64)> },
    /// One value per interior node of the finest level.
    Sampled { values: Vec<f64> },
}

impl ObstacleBound {
    fn sample(&self, m: u32, infinite: f64) -> Result<Vec<f64>> {
        let n = fine_dim(m);
        let h = 1.0 / (1u64 << m) as f64;
        Ok(match self {
            ObstacleBound::Unbounded => vec![infinite; n],
            ObstacleBound::Constant { value } => vec![*value; n],
            ObstacleBound::PiecewiseLinear { points } => {
                if points.is_empty() || points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(CboError::Config(vec![
                        "piecewise_linear needs breakpoints with increasing x".into(),
                    ]));
                }
                (1..=n)
                    .map(|l| piecewise_linear(points, l as f64 * h))
                    .collect()
            }
            ObstacleBound::Sampled { values } => {
                if values.len() != n {
                    return Err(CboError::Config(vec![format!(
                        "sampled obstacle needs {n} values, got {}",
                        values.len()
                    )]));
                }
                values.clone()
            }
        })
    }
}

fn piecewise_linear(points: &[(f64, f64)], x: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let k = points.partition_point(|p| p.0 <= x);
    let (a, b) = (points[k - 1], points[k]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    /// Free-text provenance of the bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub lower: ObstacleBound,
    pub upper: ObstacleBound,
}

impl ObstacleSpec {
    pub fn build(&self, m: u32) -> Result<Obstacle> {
        Obstacle::new(
            m,
            self.lower.sample(m, f64::NEG_INFINITY)?,
            self.upper.sample(m, f64::INFINITY)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllenCahnConfig {
    pub name: String,
    /// Finest level `m` (`2^m` elements).
    pub level: u32,
    pub v0: f64,
    pub v1: f64,
    pub w1: f64,
    pub w2: f64,
    pub p: f64,
    pub eps_inv_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<ObstacleSpec>,
    pub params: ParamsSpec,
    pub heuristics: HeuristicsSpec,
    /// Defaults to `20 d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles: Option<usize>,
    #[serde(default = "two")]
    pub coarsest: u32,
    pub iters_per_level: usize,
    pub iters_finest: usize,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn two() -> u32 {
    2
}

impl AllenCahnConfig {
    pub fn particles(&self) -> usize {
        self.particles
            .unwrap_or_else(|| 20 * fine_dim(self.level.min(30)))
    }

    pub fn problem(&self) -> Result<AllenCahnProblem> {
        let wells = WellParams {
            w1: self.w1,
            w2: self.w2,
            p: self.p,
            eps_inv_sq: self.eps_inv_sq,
        };
        wells.validate()?;
        Ok(AllenCahnProblem {
            level: FeLevel::new(self.level, self.v0, self.v1)?,
            wells,
            obstacle: self
                .obstacle
                .as_ref()
                .map(|o| o.build(self.level))
                .transpose()?,
        })
    }

    pub fn schedule(&self) -> MultigridSchedule {
        MultigridSchedule {
            coarsest: self.coarsest,
            iters_per_level: self.iters_per_level,
            iters_finest: self.iters_finest,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.level < 2 || self.level > 20 {
            problems.push(format!("level must lie in 2..=20, got {}", self.level));
        }
        if self.coarsest < 1 || self.coarsest > self.level {
            problems.push(format!(
                "coarsest level {} outside 1..={}",
                self.coarsest, self.level
            ));
        }
        if self.seeds.is_empty() {
            problems.push("at least one seed is required".into());
        }
        if self.particles == Some(0) {
            problems.push("particles must be at least 1".into());
        }
        if problems.is_empty() {
            collect(&mut problems, self.problem().map(|_| ()));
        }
        collect(&mut problems, self.params.build().validate());
        collect(&mut problems, self.heuristics.build().validate());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CboError::Config(problems))
        }
    }
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CboError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    serde_json::from_str(&text).map_err(|e| CboError::Config(vec![format!("{}: {e}", path.display())]))
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig> {
    read_json(path)
}

pub fn load_sweep(path: &Path) -> Result<SweepConfig> {
    read_json(path)
}

pub fn load_allen_cahn(path: &Path) -> Result<AllenCahnConfig> {
    read_json(path)
}
