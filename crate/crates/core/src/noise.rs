//! Diffusion terms of the particle update.
//!
//! * anisotropic: `σ (x - c) ⊙ z √dt`, one standard normal per coordinate;
//! * isotropic: `σ |x - c| z √dt`;
//! * hierarchical: an anisotropic draw on the fine 1D finite-element grid,
//!   sub-sampled at the nodes of a coarser level, re-interpolated with the
//!   coarse hat functions and tested against the fine hat functions.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, CboError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Anisotropic,
    Isotropic,
    /// Fine level `fine` (dimension `2^fine - 1`) driven through the coarse
    /// level `coarse`, `1 <= coarse <= fine`.
    Hierarchical { coarse: u32, fine: u32 },
}

impl NoiseKind {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if let NoiseKind::Hierarchical { coarse, fine } = *self {
            if coarse < 1 || coarse > fine {
                return Err(CboError::input(format!(
                    "hierarchical noise needs 1 <= coarse <= fine, got coarse={coarse}, fine={fine}"
                )));
            }
            if fine > 30 {
                return Err(CboError::input(format!("fine level {fine} is too large")));
            }
            check_dim(fine_dim(fine), dim, "hierarchical noise dimension")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub sigma: f64,
    /// Multiply hierarchical output by `1/h`, undoing the mass-matrix scaling.
    pub rescale: bool,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, sigma: f64) -> Self {
        Self {
            kind,
            sigma,
            rescale: false,
        }
    }

    /// Writes one increment for particle `x` into `out`.
    ///
    /// `scratch` must hold at least `x.len()` values; it is only used by the
    /// hierarchical kind.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        consensus: &[f64],
        dt: f64,
        rng: &mut R,
        out: &mut [f64],
        scratch: &mut [f64],
    ) {
        match self.kind {
            NoiseKind::Anisotropic => anisotropic_into(x, consensus, self.sigma, dt, rng, out),
            NoiseKind::Isotropic => isotropic_into(x, consensus, self.sigma, dt, rng, out),
            NoiseKind::Hierarchical { coarse, fine } => {
                let base = &mut scratch[..x.len()];
                anisotropic_into(x, consensus, self.sigma, dt, rng, base);
                hierarchical_into(base, coarse, fine, out);
                if self.rescale {
                    let inv_h = (1u64 << fine) as f64;
                    out.iter_mut().for_each(|v| *v *= inv_h);
                }
            }
        }
    }
}

fn anisotropic_into<R: Rng + ?Sized>(
    x: &[f64],
    consensus: &[f64],
    sigma: f64,
    dt: f64,
    rng: &mut R,
    out: &mut [f64],
) {
    let scale = sigma * dt.sqrt();
    for ((o, xi), ci) in out.iter_mut().zip(x).zip(consensus) {
        let z: f64 = rng.sample(StandardNormal);
        *o = anisotropic_component(*xi - *ci, scale, z);
    }
}

#[inline]
fn anisotropic_component(gap: f64, scale: f64, z: f64) -> f64 {
    scale * gap * z
}

fn isotropic_into<R: Rng + ?Sized>(
    x: &[f64],
    consensus: &[f64],
    sigma: f64,
    dt: f64,
    rng: &mut R,
    out: &mut [f64],
) {
    let gap = x
        .iter()
        .zip(consensus)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = sigma * gap * dt.sqrt();
    for o in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *o = scale * z;
    }
}

/// Anisotropic increment with caller-supplied standard normals `z`.
pub fn anisotropic_from_normals(
    x: &[f64],
    consensus: &[f64],
    sigma: f64,
    dt: f64,
    z: &[f64],
) -> Result<Vec<f64>> {
    check_dim(x.len(), consensus.len(), "anisotropic consensus")?;
    check_dim(x.len(), z.len(), "anisotropic normals")?;
    let scale = sigma * dt.sqrt();
    Ok(x.iter()
        .zip(consensus)
        .zip(z)
        .map(|((a, b), zi)| anisotropic_component(a - b, scale, *zi))
        .collect())
}

/// Isotropic increment with caller-supplied standard normals `z`.
pub fn isotropic_from_normals(
    x: &[f64],
    consensus: &[f64],
    sigma: f64,
    dt: f64,
    z: &[f64],
) -> Result<Vec<f64>> {
    check_dim(x.len(), consensus.len(), "isotropic consensus")?;
    check_dim(x.len(), z.len(), "isotropic normals")?;
    let gap = x
        .iter()
        .zip(consensus)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = sigma * gap * dt.sqrt();
    Ok(z.iter().map(|zi| scale * zi).collect())
}

pub fn anisotropic_draw<R: Rng + ?Sized>(
    x: &[f64],
    consensus: &[f64],
    sigma: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_dim(x.len(), consensus.len(), "anisotropic consensus")?;
    let mut out = vec![0.0; x.len()];
    anisotropic_into(x, consensus, sigma, dt, rng, &mut out);
    Ok(out)
}

pub fn isotropic_draw<R: Rng + ?Sized>(
    x: &[f64],
    consensus: &[f64],
    sigma: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_dim(x.len(), consensus.len(), "isotropic consensus")?;
    let mut out = vec![0.0; x.len()];
    isotropic_into(x, consensus, sigma, dt, rng, &mut out);
    Ok(out)
}

/// Number of interior nodes on level `m`.
pub fn fine_dim(m: u32) -> usize {
    (1usize << m) - 1
}

/// `out_l = ∫ φ_l^m(s) w(s) ds`, where `w` is the coarse-level-`i`
/// interpolant of the fine values sampled at nodes `k 2^{m-i}`.
pub fn hierarchical_transform(beta_fine: &[f64], i: u32, m: u32) -> Result<Vec<f64>> {
    NoiseKind::Hierarchical { coarse: i, fine: m }.validate(beta_fine.len())?;
    let mut out = vec![0.0; beta_fine.len()];
    hierarchical_into(beta_fine, i, m, &mut out);
    Ok(out)
}

fn hierarchical_into(beta: &[f64], i: u32, m: u32, out: &mut [f64]) {
    let n = beta.len();
    let stride = 1usize << (m - i);
    let h = 1.0 / (1u64 << m) as f64;
    // coarse value at coarse node k (1-based); boundary nodes carry zero
    let coarse = |k: usize| -> f64 {
        if k == 0 || k * stride > n {
            0.0
        } else {
            beta[k * stride - 1]
        }
    };
    // interpolant at fine node l (0..=n+1)
    let interp = |l: usize| -> f64 {
        let k = l / stride;
        let r = l % stride;
        if r == 0 {
            coarse(k)
        } else {
            let t = r as f64 / stride as f64;
            (1.0 - t) * coarse(k) + t * coarse(k + 1)
        }
    };
    let mut left = 0.0;
    let mut mid = interp(1);
    for l in 1..=n {
        let right = if l == n { 0.0 } else { interp(l + 1) };
        out[l - 1] = h * (left + 4.0 * mid + right) / 6.0;
        left = mid;
        mid = right;
    }
}

/// Fine mass operator (tridiagonal `h/6, 2h/3, h/6`) applied to interior
/// nodal values with zero boundary.
pub fn mass_apply(values: &[f64], m: u32) -> Vec<f64> {
    let h = 1.0 / (1u64 << m) as f64;
    let n = values.len();
    (0..n)
        .map(|l| {
            let left = if l == 0 { 0.0 } else { values[l - 1] };
            let right = if l + 1 == n { 0.0 } else { values[l + 1] };
            h * (left + 4.0 * values[l] + right) / 6.0
        })
        .collect()
}
