//! Feasible sets with membership tests and Euclidean nearest-point projection.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, CboError, Result};

/// Default membership tolerance after projection chains.
pub const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    fn new(lower: Vec<f64>, upper: Vec<f64>, allow_infinite: bool) -> Result<Self> {
        check_dim(lower.len(), upper.len(), "box bounds")?;
        if lower.is_empty() {
            return Err(CboError::input("box needs at least one coordinate"));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() {
                return Err(CboError::input(format!("box bound {i} is NaN")));
            }
            if !allow_infinite && !(l.is_finite() && u.is_finite()) {
                return Err(CboError::input(format!("box bound {i} is not finite")));
            }
            if *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(CboError::input(format!("box bound {i} is empty")));
            }
            if l > u {
                return Err(CboError::input(format!(
                    "box bound {i}: lower {l} exceeds upper {u}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn project(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.max(*l).min(*u);
        }
    }

    fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .map(|((v, l), u)| {
                let e = (l - v).max(v - u).max(0.0);
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(CboError::input("ball needs at least one coordinate"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(CboError::input("ball center must be finite"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(CboError::input(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn gap_norm(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Nearest point of the closed ball.
    fn project(&self, x: &mut [f64]) {
        project_to_closed_ball(x, &self.center, self.radius);
    }

    /// Nearest point outside the open ball. A point at the exact center
    /// is pushed along `+e_1`.
    fn push_out(&self, x: &mut [f64]) {
        let n = self.gap_norm(x);
        if n >= self.radius {
            return;
        }
        let (gap, mut scale) = if n == 0.0 {
            let mut e = vec![0.0; x.len()];
            e[0] = 1.0;
            (e, self.radius)
        } else {
            let gap: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
            (gap, self.radius / n)
        };
        let mut step = f64::EPSILON;
        loop {
            for ((v, g), c) in x.iter_mut().zip(&gap).zip(&self.center) {
                *v = c + g * scale;
            }
            if self.gap_norm(x) >= self.radius {
                break;
            }
            scale *= 1.0 + step;
            step *= 2.0;
        }
    }
}

/// Projects `x` in place onto the closed ball `B(center, radius)`. The
/// result satisfies `|x - center| <= radius` in floating point, so a second
/// projection leaves it unchanged.
pub(crate) fn project_to_closed_ball(x: &mut [f64], center: &[f64], radius: f64) {
    let norm = x
        .iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if norm <= radius {
        return;
    }
    if radius == 0.0 {
        x.copy_from_slice(center);
        return;
    }
    let gap: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
    let mut scale = radius / norm;
    let mut step = f64::EPSILON;
    loop {
        for ((v, g), c) in x.iter_mut().zip(&gap).zip(center) {
            *v = c + g * scale;
        }
        let n2 = x
            .iter()
            .zip(center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if n2 <= radius {
            break;
        }
        // rounding of c + g * scale can dominate tiny radii; back off geometrically
        if step >= 1.0 {
            x.copy_from_slice(center);
            break;
        }
        scale *= 1.0 - step;
        step *= 2.0;
    }
}

/// A closed outer ball with finitely many open balls removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Perforated {
    outer: Ball,
    removed: Vec<Ball>,
}

impl Perforated {
    pub fn outer(&self) -> &Ball {
        &self.outer
    }

    pub fn removed(&self) -> &[Ball] {
        &self.removed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    AllSpace(usize),
    Box(Bounds),
    Ball(Ball),
    BallMinusBalls(Perforated),
    /// Box with possibly infinite bounds; unconstrained coordinates use `±inf`.
    ObstacleBox(Bounds),
}

impl Domain {
    pub fn all_space(dim: usize) -> Self {
        Domain::AllSpace(dim)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Bounds::new(lower, upper, false).map(Domain::Box)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Ball::new(center, radius).map(Domain::Ball)
    }

    pub fn obstacle_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Bounds::new(lower, upper, true).map(Domain::ObstacleBox)
    }

    /// Removed balls must lie strictly inside `outer` and be pairwise
    /// disjoint as open sets (tangency allowed, up to rounding).
    pub fn ball_minus_balls(outer: Ball, removed: Vec<Ball>) -> Result<Self> {
        let d = outer.center.len();
        for (j, b) in removed.iter().enumerate() {
            check_dim(d, b.center.len(), &format!("removed ball {j}"))?;
            if outer.gap_norm(&b.center) + b.radius >= outer.radius {
                return Err(CboError::input(format!(
                    "removed ball {j} is not strictly inside the outer ball"
                )));
            }
            for (k, other) in removed.iter().enumerate().skip(j + 1) {
                let reach = b.radius + other.radius;
                if b.gap_norm(&other.center) < reach * (1.0 - 4.0 * f64::EPSILON) {
                    return Err(CboError::input(format!(
                        "removed balls {j} and {k} overlap"
                    )));
                }
            }
        }
        Ok(Domain::BallMinusBalls(Perforated { outer, removed }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::AllSpace(d) => *d,
            Domain::Box(b) | Domain::ObstacleBox(b) => b.lower.len(),
            Domain::Ball(b) => b.center.len(),
            Domain::BallMinusBalls(p) => p.outer.center.len(),
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Domain::BallMinusBalls(p) if !p.removed.is_empty())
    }

    /// Nearest feasible point, written back into `x`.
    ///
    /// Dimension is the caller's responsibility; see [`Domain::project`]
    /// for the checked version.
    pub fn project_in_place(&self, x: &mut [f64]) {
        match self {
            Domain::AllSpace(_) => {}
            Domain::Box(b) | Domain::ObstacleBox(b) => b.project(x),
            Domain::Ball(b) => b.project(x),
            Domain::BallMinusBalls(p) => {
                if p.outer.gap_norm(x) > p.outer.radius {
                    // The outer sphere does not meet any removed ball.
                    p.outer.project(x);
                    return;
                }
                if let Some(hole) = p.removed.iter().find(|b| b.gap_norm(x) < b.radius) {
                    hole.push_out(x);
                    debug_assert!(p.outer.gap_norm(x) <= p.outer.radius);
                    if p.outer.gap_norm(x) > p.outer.radius {
                        p.outer.project(x);
                    }
                }
            }
        }
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len(), "projection")?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CboError::input("cannot project a non-finite point"));
        }
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// Euclidean distance from `x` to the feasible set.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::AllSpace(_) => 0.0,
            Domain::Box(b) | Domain::ObstacleBox(b) => b.distance(x),
            Domain::Ball(b) => (b.gap_norm(x) - b.radius).max(0.0),
            Domain::BallMinusBalls(p) => {
                let outside = p.outer.gap_norm(x) - p.outer.radius;
                if outside > 0.0 {
                    return outside;
                }
                p.removed
                    .iter()
                    .map(|b| b.radius - b.gap_norm(x))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// True iff `x` lies within distance `tol` of the feasible set.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim() && self.distance(x) <= tol
    }
}

/// The named test domains of the benchmark suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperDomain {
    /// `[-6.12, 5.12]^d`, minimizer in the interior.
    Omega1,
    /// `[0, 11.24]^d`, minimizer on a corner.
    Omega2,
    /// `B_{5.12}(0)` minus unit balls at `±e_1`.
    Omega3,
    /// `B_{5.12}(0)` minus unit balls at `±(1,…,1)/√d`.
    Omega4,
}

impl PaperDomain {
    pub fn name(self) -> &'static str {
        match self {
            PaperDomain::Omega1 => "omega1",
            PaperDomain::Omega2 => "omega2",
            PaperDomain::Omega3 => "omega3",
            PaperDomain::Omega4 => "omega4",
        }
    }
}

impl fmt::Display for PaperDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PaperDomain {
    type Err = CboError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omega1" => Ok(PaperDomain::Omega1),
            "omega2" => Ok(PaperDomain::Omega2),
            "omega3" => Ok(PaperDomain::Omega3),
            "omega4" => Ok(PaperDomain::Omega4),
            other => Err(CboError::input(format!("unknown domain name {other:?}"))),
        }
    }
}

const PERFORATED_OUTER_RADIUS: f64 = 5.12;

pub fn make_paper_domain(name: PaperDomain, dim: usize) -> Result<Domain> {
    if dim == 0 {
        return Err(CboError::input("dimension must be at least 1"));
    }
    match name {
        PaperDomain::Omega1 => Domain::boxed(vec![-6.12; dim], vec![5.12; dim]),
        PaperDomain::Omega2 => Domain::boxed(vec![0.0; dim], vec![11.24; dim]),
        PaperDomain::Omega3 | PaperDomain::Omega4 => {
            let mut axis = vec![0.0; dim];
            if name == PaperDomain::Omega3 {
                axis[0] = 1.0;
            } else {
                axis.fill(1.0 / (dim as f64).sqrt());
            }
            let neg: Vec<f64> = axis.iter().map(|v| -v).collect();
            let outer = Ball::new(vec![0.0; dim], PERFORATED_OUTER_RADIUS)?;
            Domain::ball_minus_balls(outer, vec![Ball::new(axis, 1.0)?, Ball::new(neg, 1.0)?])
        }
    }
}
