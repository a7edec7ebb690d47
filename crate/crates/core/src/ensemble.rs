//! Particle ensembles with one independent random stream per particle.
//!
//! Every particle owns a ChaCha8 stream derived from a single master seed
//! (`stream id = particle index`). All randomness a particle ever consumes,
//! including its initial draw, comes from its own stream, so results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::domain::Domain;
use crate::error::{check_dim, CboError, Result};

pub type ParticleRng = ChaCha8Rng;

/// Per-particle stream `index` of the master `seed`.
pub fn particle_stream(seed: u64, index: usize) -> ParticleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    dim: usize,
    positions: Vec<f64>,
    streams: Vec<ParticleRng>,
}

impl Ensemble {
    /// Builds an ensemble from row-major positions (`n * dim` values).
    pub fn new(dim: usize, positions: Vec<f64>, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(CboError::input("ensemble dimension must be at least 1"));
        }
        if positions.is_empty() || !positions.len().is_multiple_of(dim) {
            return Err(CboError::input(format!(
                "ensemble needs a positive multiple of {dim} coordinates, got {}",
                positions.len()
            )));
        }
        if let Some(bad) = positions.iter().position(|v| !v.is_finite()) {
            return Err(CboError::input(format!(
                "non-finite coordinate in particle {}",
                bad / dim
            )));
        }
        let n = positions.len() / dim;
        let streams = (0..n).map(|i| particle_stream(seed, i)).collect();
        Ok(Self {
            dim,
            positions,
            streams,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], seed: u64) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut positions = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            check_dim(dim, row.as_ref().len(), &format!("row {i}"))?;
            positions.extend_from_slice(row.as_ref());
        }
        Self::new(dim, positions, seed)
    }

    /// Draws each particle from its own stream with `sample(stream, row)`.
    pub fn sample_with<F>(n: usize, dim: usize, seed: u64, sample: F) -> Result<Self>
    where
        F: Fn(&mut ParticleRng, &mut [f64]) + Sync,
    {
        if n == 0 || dim == 0 {
            return Err(CboError::input("ensemble needs n >= 1 and dim >= 1"));
        }
        let mut streams: Vec<ParticleRng> = (0..n).map(|i| particle_stream(seed, i)).collect();
        let mut positions = vec![0.0; n * dim];
        positions
            .par_chunks_mut(dim)
            .zip(streams.par_iter_mut())
            .for_each(|(row, rng)| sample(rng, row));
        Self::new_with_streams(dim, positions, streams)
    }

    pub(crate) fn new_with_streams(
        dim: usize,
        positions: Vec<f64>,
        streams: Vec<ParticleRng>,
    ) -> Result<Self> {
        debug_assert_eq!(positions.len(), dim * streams.len());
        if let Some(bad) = positions.iter().position(|v| !v.is_finite()) {
            return Err(CboError::input(format!(
                "non-finite coordinate in particle {}",
                bad / dim
            )));
        }
        Ok(Self {
            dim,
            positions,
            streams,
        })
    }

    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particle(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn particles(&self) -> std::slice::ChunksExact<'_, f64> {
        self.positions.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [f64] {
        &mut self.positions
    }

    pub(crate) fn par_rows_and_streams_mut(
        &mut self,
    ) -> rayon::iter::Zip<rayon::slice::ChunksExactMut<'_, f64>, rayon::slice::IterMut<'_, ParticleRng>>
    {
        self.positions
            .par_chunks_exact_mut(self.dim)
            .zip(self.streams.par_iter_mut())
    }

    /// Projects every particle onto `domain`.
    pub fn project_onto(&mut self, domain: &Domain) -> Result<()> {
        check_dim(domain.dim(), self.dim, "ensemble vs domain")?;
        self.positions
            .par_chunks_exact_mut(self.dim)
            .for_each(|row| domain.project_in_place(row));
        Ok(())
    }

    /// True when every particle lies within `tol` of `domain`.
    pub fn is_feasible(&self, domain: &Domain, tol: f64) -> bool {
        self.particles().all(|p| domain.contains(p, tol))
    }
}

/// `n` i.i.d. draws from `N(mean, variance * Id)`, projected onto `domain`.
pub fn init_gaussian(
    mean: &[f64],
    variance: f64,
    domain: &Domain,
    n: usize,
    seed: u64,
) -> Result<Ensemble> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(CboError::input(format!(
            "variance must be positive and finite, got {variance}"
        )));
    }
    check_dim(domain.dim(), mean.len(), "gaussian mean vs domain")?;
    let std_dev = variance.sqrt();
    let mut ens = Ensemble::sample_with(n, mean.len(), seed, |rng, row| {
        for (x, m) in row.iter_mut().zip(mean) {
            let z: f64 = StandardNormal.sample(rng);
            *x = m + std_dev * z;
        }
    })?;
    ens.project_onto(domain)?;
    Ok(ens)
}

/// `n` i.i.d. draws, uniform on the box `[lower, upper]`, projected onto `domain`.
pub fn init_uniform(
    lower: &[f64],
    upper: &[f64],
    domain: &Domain,
    n: usize,
    seed: u64,
) -> Result<Ensemble> {
    check_dim(lower.len(), upper.len(), "uniform bounds")?;
    check_dim(domain.dim(), lower.len(), "uniform bounds vs domain")?;
    let mut dists = Vec::with_capacity(lower.len());
    for (l, u) in lower.iter().zip(upper) {
        if !(l <= u) || !l.is_finite() || !u.is_finite() {
            return Err(CboError::input(format!("bad uniform interval [{l}, {u}]")));
        }
        dists.push(Uniform::new_inclusive(*l, *u).map_err(|e| CboError::input(e.to_string()))?);
    }
    let mut ens = Ensemble::sample_with(n, lower.len(), seed, |rng, row| {
        for (x, dist) in row.iter_mut().zip(&dists) {
            *x = dist.sample(rng);
        }
    })?;
    ens.project_onto(domain)?;
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Ensemble::new(0, vec![1.0], 0).is_err());
        assert!(Ensemble::new(2, vec![1.0, 2.0, 3.0], 0).is_err());
        assert!(Ensemble::new(1, vec![], 0).is_err());
        assert!(Ensemble::new(1, vec![f64::NAN], 0).is_err());
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        use rand::Rng;
        let mut a = particle_stream(7, 0);
        let mut b = particle_stream(7, 1);
        let mut a2 = particle_stream(7, 0);
        let xa: u64 = a.random();
        assert_ne!(xa, b.random::<u64>());
        assert_eq!(xa, a2.random::<u64>());
    }

    #[test]
    fn degenerate_gaussian_lands_on_projected_mean() {
        let dom = Domain::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let ens = init_gaussian(&[3.0, 0.5], 1e-30, &dom, 16, 3).unwrap();
        for p in ens.particles() {
            assert!((p[0] - 1.0).abs() < 1e-14);
            assert!((p[1] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_mean_within_clt_bound() {
        let dom = Domain::all_space(3);
        let mean = [1.0, -2.0, 0.5];
        let variance = 4.0;
        let n = 100_000;
        let ens = init_gaussian(&mean, variance, &dom, n, 11).unwrap();
        let bound = 3.0 * variance.sqrt() / (n as f64).sqrt();
        for (l, m) in mean.iter().enumerate() {
            let emp = ens.particles().map(|p| p[l]).sum::<f64>() / n as f64;
            assert!((emp - m).abs() < bound, "coord {l}: {emp} vs {m}");
        }
    }

    #[test]
    fn paper_gaussian_start_is_feasible() {
        let dom = crate::domain::make_paper_domain(crate::domain::PaperDomain::Omega1, 2).unwrap();
        let m = 5.12 / 2f64.sqrt();
        let ens = init_gaussian(&[m, m], 10.0, &dom, 5000, 1).unwrap();
        assert!(ens.is_feasible(&dom, 0.0));
    }
}
