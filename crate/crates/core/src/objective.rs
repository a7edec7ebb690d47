use std::f64::consts::PI;

/// An energy to be minimized over `R^d`.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn energy(&self, x: &[f64]) -> f64;

    /// Known global minimizer, used for residual reporting.
    fn minimizer(&self) -> Option<Vec<f64>> {
        None
    }
}

/// `10 d + Σ (x_i² - 10 cos(2π x_i))`, minimum 0 at the origin.
///
/// Evaluated as `Σ (x_i² + 20 sin²(π x_i))`, which avoids cancelling `10 d`
/// against the cosines near the minimizer.
pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| {
            let s = (PI * v).sin();
            v * v + 20.0 * s * s
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rastrigin {
    pub dim: usize,
}

impl Objective for Rastrigin {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy(&self, x: &[f64]) -> f64 {
        rastrigin(x)
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim])
    }
}

/// `|x|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sphere {
    pub dim: usize,
}

impl Objective for Sphere {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0; self.dim])
    }
}

/// Wraps a closure as an [`Objective`].
pub struct FnObjective<F> {
    dim: usize,
    f: F,
    minimizer: Option<Vec<f64>>,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            f,
            minimizer: None,
        }
    }

    pub fn with_minimizer(mut self, x: Vec<f64>) -> Self {
        self.minimizer = Some(x);
        self
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        self.minimizer.clone()
    }
}
