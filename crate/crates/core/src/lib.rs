//! Constrained consensus-based optimization.
//!
//! A swarm of particles explores a feasible set; each particle drifts towards
//! a Gibbs-weighted consensus point, diffuses with a volatility proportional
//! to its distance from that point, and is projected back onto the feasible
//! set after every Euler–Maruyama step. On top of the basic scheme the crate
//! provides
//!
//! * an increasing inverse-temperature schedule, a shrinking exploitation ball
//!   and boosted volatility for runs with few particles ([`heuristics`]);
//! * box, ball, perforated-ball and obstacle domains ([`domain`]);
//! * anisotropic, isotropic and finite-element hierarchical noise ([`noise`]);
//! * a 1D p-Ginzburg–Landau energy with a coarse-to-fine driver
//!   ([`allen_cahn`]);
//! * a benchmark harness with JSON configs, sweeps, presets and CSV output
//!   ([`harness`]).
//!
//! ```no_run
//! use cbo::prelude::*;
//!
//! let domain = make_paper_domain(PaperDomain::Omega1, 2)?;
//! let init = init_gaussian(&[3.62, 3.62], 10.0, &domain, 500, 7)?;
//! let params = CboParams::new(1.0, 0.5, 0.01, 300);
//! let out = run(&Rastrigin { dim: 2 }, &domain, init, &params, &HeuristicsConfig::fixed_alpha(1e6))?;
//! println!("final residual {:?}", out.record.last().residual);
//! # Ok::<(), cbo::CboError>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allen_cahn;
pub mod consensus;
pub mod domain;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod heuristics;
pub mod noise;
pub mod objective;

pub use error::{CboError, Result};

pub mod prelude {
    pub use crate::consensus::{consensus_point, gibbs_weights, residual};
    pub use crate::domain::{make_paper_domain, Domain, PaperDomain};
    pub use crate::dynamics::{cbo_step, run, CboParams, RunOutcome, RunRecord, RunRow};
    pub use crate::ensemble::{init_gaussian, init_uniform, Ensemble};
    pub use crate::heuristics::HeuristicsConfig;
    pub use crate::noise::{NoiseKind, NoiseModel};
    pub use crate::objective::{Objective, Rastrigin, Sphere};
    pub use crate::CboError;
}
