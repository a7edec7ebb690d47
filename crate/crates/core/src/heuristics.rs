//! Few-particle enhancements: the linear inverse-temperature schedule, the
//! shrinking exploitation ball around the consensus point, and boosted
//! volatility beyond the `2λ > σ²` regime.

use rayon::prelude::*;

use crate::consensus::squared_distance;
use crate::domain::project_to_closed_ball;
use crate::ensemble::Ensemble;
use crate::error::{check_dim, CboError, Result};

/// Default final inverse temperature of the schedule.
pub const DEFAULT_ALPHA_FINAL: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicsConfig {
    pub alpha0: f64,
    pub alpha_final: f64,
    /// Exploitation factor in `(0, 1]`; `None` disables the ball projection.
    pub gamma: Option<f64>,
    /// Volatility boost `S >= 1`; when set, `σ = S √(2λ)` replaces the
    /// configured volatility.
    pub boost: Option<f64>,
}

impl HeuristicsConfig {
    /// Constant `alpha`, no ball projection, no boost.
    pub fn fixed_alpha(alpha: f64) -> Self {
        Self {
            alpha0: alpha,
            alpha_final: alpha,
            gamma: None,
            boost: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.alpha0 > 0.0) || !self.alpha0.is_finite() {
            problems.push(format!("alpha0 must be positive, got {}", self.alpha0));
        }
        if !(self.alpha_final >= self.alpha0) || !self.alpha_final.is_finite() {
            problems.push(format!(
                "alpha_final ({}) must be finite and >= alpha0 ({})",
                self.alpha_final, self.alpha0
            ));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g <= 1.0) {
                problems.push(format!("gamma must lie in (0, 1], got {g}"));
            }
        }
        if let Some(s) = self.boost {
            if !(s >= 1.0) || !s.is_finite() {
                problems.push(format!("boost S must be >= 1, got {s}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CboError::Config(problems))
        }
    }

    pub fn alpha_at(&self, k: usize, budget: usize) -> Result<f64> {
        alpha_schedule(k, budget, self.alpha0, self.alpha_final)
    }

    pub fn effective_sigma(&self, lambda: f64, sigma: f64) -> f64 {
        match self.boost {
            Some(s) => boosted_sigma(lambda, s),
            None => sigma,
        }
    }
}

/// `α_k = α_0 + (k/K)(α_K - α_0)`. A zero budget yields `α_0`.
pub fn alpha_schedule(k: usize, budget: usize, alpha0: f64, alpha_final: f64) -> Result<f64> {
    if k > budget {
        return Err(CboError::input(format!(
            "alpha_schedule: iteration {k} exceeds budget {budget}"
        )));
    }
    if budget == 0 {
        return Ok(alpha0);
    }
    if k == budget {
        return Ok(alpha_final);
    }
    Ok(alpha0 + (k as f64 / budget as f64) * (alpha_final - alpha0))
}

/// `S √(2λ)`.
pub fn boosted_sigma(lambda: f64, boost: f64) -> f64 {
    boost * (2.0 * lambda).sqrt()
}

/// `γ · max_i |X^i - c|`.
pub fn exploitation_radius(ensemble: &Ensemble, consensus: &[f64], gamma: f64) -> f64 {
    let max_sq = ensemble
        .particles()
        .map(|p| squared_distance(p, consensus))
        .fold(0.0, f64::max);
    gamma * max_sq.sqrt()
}

/// Projects every particle onto the closed ball `B(center, radius)`.
pub fn project_onto_ball(ensemble: &mut Ensemble, center: &[f64], radius: f64) -> Result<()> {
    check_dim(ensemble.dim(), center.len(), "ball center")?;
    let dim = ensemble.dim();
    ensemble
        .positions_mut()
        .par_chunks_exact_mut(dim)
        .for_each(|p| project_to_closed_ball(p, center, radius));
    Ok(())
}

/// Shrinks the ensemble into the ball of radius `γ max_i |X^i - c|` around
/// the consensus point and returns that radius.
pub fn exploitation_project(ensemble: &mut Ensemble, consensus: &[f64], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(CboError::input(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    check_dim(ensemble.dim(), consensus.len(), "consensus")?;
    let radius = exploitation_radius(ensemble, consensus, gamma);
    project_onto_ball(ensemble, consensus, radius)?;
    Ok(radius)
}
