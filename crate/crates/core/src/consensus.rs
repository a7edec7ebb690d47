//! Gibbs weights, the consensus point and the empirical residual.

use crate::ensemble::Ensemble;
use crate::error::{check_dim, CboError, Result};

/// Normalized Gibbs weights `w_i ∝ exp(-alpha * E_i)`.
///
/// Exponents are shifted by the minimum energy, so the largest term is
/// exactly one and nothing overflows even for `alpha` around `1e9`.
pub fn gibbs_weights(energies: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if energies.is_empty() {
        return Err(CboError::input("gibbs_weights: no energies"));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(CboError::input(format!(
            "gibbs_weights: alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    if let Some(i) = energies.iter().position(|e| !e.is_finite()) {
        return Err(CboError::input(format!(
            "gibbs_weights: energy {i} is not finite ({})",
            energies[i]
        )));
    }
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = energies
        .iter()
        .map(|e| (-alpha * (e - min)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Index of the smallest energy; ties go to the lowest index.
pub fn argmin(energies: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &e) in energies.iter().enumerate() {
        match best {
            Some((_, b)) if e >= b => {}
            _ => best = Some((i, e)),
        }
    }
    best.map(|(i, _)| i)
}

/// Gibbs-weighted mean of the particle positions.
pub fn consensus_point(ensemble: &Ensemble, energies: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if ensemble.is_empty() {
        return Err(CboError::input("consensus_point: empty ensemble"));
    }
    check_dim(ensemble.len(), energies.len(), "consensus_point energies")?;
    let weights = gibbs_weights(energies, alpha)?;
    Ok(weighted_mean(ensemble, &weights))
}

pub(crate) fn weighted_mean(ensemble: &Ensemble, weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; ensemble.dim()];
    for (p, &w) in ensemble.particles().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(p) {
            *o += w * x;
        }
    }
    out
}

/// `(1/N) Σ |X^i - x*|²`.
pub fn residual(ensemble: &Ensemble, x_star: &[f64]) -> Result<f64> {
    check_dim(ensemble.dim(), x_star.len(), "residual target")?;
    let total: f64 = ensemble
        .particles()
        .map(|p| squared_distance(p, x_star))
        .sum();
    Ok(total / ensemble.len() as f64)
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
