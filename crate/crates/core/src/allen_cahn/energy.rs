use crate::domain::Domain;
use crate::error::{check_dim, CboError, Result};
use crate::noise::fine_dim;
use crate::objective::Objective;

/// Uniform mesh of `[0, 1]` with `2^m` elements and Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeLevel {
    pub m: u32,
    pub v0: f64,
    pub v1: f64,
}

impl FeLevel {
    pub fn new(m: u32, v0: f64, v1: f64) -> Result<Self> {
        if !(1..=30).contains(&m) {
            return Err(CboError::input(format!("level must lie in 1..=30, got {m}")));
        }
        if !v0.is_finite() || !v1.is_finite() {
            return Err(CboError::input("boundary values must be finite"));
        }
        Ok(Self { m, v0, v1 })
    }

    pub fn elements(&self) -> usize {
        1 << self.m
    }

    /// Element length, an exact power of two.
    pub fn h(&self) -> f64 {
        1.0 / self.elements() as f64
    }

    pub fn interior_len(&self) -> usize {
        fine_dim(self.m)
    }
}

/// Interior nodal values on a level; boundary values come from the level.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    level: FeLevel,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(level: FeLevel, values: Vec<f64>) -> Result<Self> {
        check_dim(level.interior_len(), values.len(), "field")?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CboError::input(format!("nodal value {} is not finite", i + 1)));
        }
        Ok(Self { level, values })
    }

    pub fn level(&self) -> FeLevel {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(x_j, v_j)` for all `M + 1` nodes, boundary included.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let h = self.level.h();
        let m = self.level.elements();
        (0..=m)
            .map(|j| {
                let v = if j == 0 {
                    self.level.v0
                } else if j == m {
                    self.level.v1
                } else {
                    self.values[j - 1]
                };
                (j as f64 * h, v)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParams {
    pub w1: f64,
    pub w2: f64,
    pub p: f64,
    pub eps_inv_sq: f64,
}

impl WellParams {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.w1 < self.w2) {
            problems.push(format!("wells need w1 < w2, got {} and {}", self.w1, self.w2));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            problems.push(format!("p must be >= 1, got {}", self.p));
        }
        if !(self.eps_inv_sq >= 0.0) || !self.eps_inv_sq.is_finite() {
            problems.push(format!("eps_inv_sq must be >= 0, got {}", self.eps_inv_sq));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CboError::Config(problems))
        }
    }
}

/// `(v - w₁)²(v - w₂)²`.
pub fn double_well(v: f64, w: &WellParams) -> f64 {
    let a = (v - w.w1) * (v - w.w2);
    a * a
}

// 3-point Gauss–Legendre on [0, 1]
const GL3_NODES: [f64; 3] = [
    0.112_701_665_379_258_3,
    0.5,
    0.887_298_334_620_741_7,
];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// `∫ F(v)` over one element of length `h` on which `v` is linear from
/// `xl` to `xr`; exact for the quartic integrand.
pub fn element_potential(xl: f64, xr: f64, h: f64, w: &WellParams) -> f64 {
    let d = xr - xl;
    let sum: f64 = GL3_NODES
        .iter()
        .zip(GL3_WEIGHTS)
        .map(|(t, wt)| wt * double_well(xl + t * d, w))
        .sum();
    h * sum
}

#[inline]
fn abs_pow(a: f64, p: f64) -> f64 {
    let a = a.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 1.5 {
        a * a.sqrt()
    } else {
        a.powf(p)
    }
}

pub(crate) fn energy_of(values: &[f64], level: &FeLevel, w: &WellParams) -> f64 {
    let h = level.h();
    let n = values.len();
    let mut total = 0.0;
    let mut left = level.v0;
    for j in 0..=n {
        let right = if j == n { level.v1 } else { values[j] };
        let grad = (h / w.p) * abs_pow((right - left) / h, w.p);
        let pot = if w.eps_inv_sq == 0.0 {
            0.0
        } else {
            w.eps_inv_sq * element_potential(left, right, h, w)
        };
        total += grad + pot;
        left = right;
    }
    total
}

/// Discrete p-Ginzburg–Landau energy of a field.
pub fn gl_energy(field: &DiscreteField, w: &WellParams) -> Result<f64> {
    w.validate()?;
    Ok(energy_of(&field.values, &field.level, w))
}

/// The discrete energy as an optimization objective over interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlEnergy {
    pub level: FeLevel,
    pub wells: WellParams,
}

impl GlEnergy {
    pub fn new(level: FeLevel, wells: WellParams) -> Result<Self> {
        wells.validate()?;
        Ok(Self { level, wells })
    }
}

impl Objective for GlEnergy {
    fn dim(&self) -> usize {
        self.level.interior_len()
    }

    fn energy(&self, x: &[f64]) -> f64 {
        if x.iter().any(|v| !v.is_finite()) {
            return f64::NAN;
        }
        energy_of(x, &self.level, &self.wells)
    }
}

/// Piecewise-linear interpolation of level-`i` interior values (with the
/// boundary values `v0`, `v1`) onto the interior nodes of level `m`.
pub fn prolongate(coarse: &[f64], i: u32, m: u32, v0: f64, v1: f64) -> Result<Vec<f64>> {
    if i < 1 || i > m || m > 30 {
        return Err(CboError::input(format!("prolongate needs 1 <= i <= m, got i={i}, m={m}")));
    }
    check_dim(fine_dim(i), coarse.len(), "coarse field")?;
    let mut out = vec![0.0; fine_dim(m)];
    prolongate_into(coarse, i, m, v0, v1, &mut out);
    Ok(out)
}

pub(crate) fn prolongate_into(coarse: &[f64], i: u32, m: u32, v0: f64, v1: f64, out: &mut [f64]) {
    let stride = 1usize << (m - i);
    let top = 1usize << i;
    let node = |k: usize| -> f64 {
        if k == 0 {
            v0
        } else if k == top {
            v1
        } else {
            coarse[k - 1]
        }
    };
    for (idx, o) in out.iter_mut().enumerate() {
        let l = idx + 1;
        let k = l / stride;
        let r = l % stride;
        *o = if r == 0 {
            node(k)
        } else {
            let t = r as f64 / stride as f64;
            (1.0 - t) * node(k) + t * node(k + 1)
        };
    }
}

/// Pointwise bounds `g ≤ v ≤ f` sampled at the interior nodes of the finest
/// level.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    m: u32,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Obstacle {
    pub fn new(m: u32, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(fine_dim(m), lower.len(), "obstacle lower")?;
        check_dim(fine_dim(m), upper.len(), "obstacle upper")?;
        let mut problems = Vec::new();
        for (l, (g, f)) in lower.iter().zip(&upper).enumerate() {
            if g.is_nan() || f.is_nan() || g > f {
                problems.push(format!("node {}: lower {g} exceeds upper {f}", l + 1));
            }
        }
        if !problems.is_empty() {
            return Err(CboError::Config(problems));
        }
        Ok(Self { m, lower, upper })
    }

    /// Samples `g` and `f` at the interior nodes `l h`.
    pub fn from_fns(m: u32, g: impl Fn(f64) -> f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 1.0 / (1u64 << m) as f64;
        let xs: Vec<f64> = (1..=fine_dim(m)).map(|l| l as f64 * h).collect();
        Self::new(m, xs.iter().map(|&x| g(x)).collect(), xs.iter().map(|&x| f(x)).collect())
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn is_active(&self, idx: usize, i: u32) -> bool {
        (idx + 1).is_multiple_of(1usize << (self.m - i))
    }

    /// Box constraining only the nodes `k 2^{m-i}`; other nodes are free.
    pub fn domain_at(&self, i: u32) -> Result<Domain> {
        if i < 1 || i > self.m {
            return Err(CboError::input(format!("active level {i} outside 1..={}", self.m)));
        }
        let n = self.lower.len();
        let mut lo = vec![f64::NEG_INFINITY; n];
        let mut hi = vec![f64::INFINITY; n];
        for idx in 0..n {
            if self.is_active(idx, i) {
                lo[idx] = self.lower[idx];
                hi[idx] = self.upper[idx];
            }
        }
        Domain::obstacle_box(lo, hi)
    }
}

/// Clamps the nodes active at level `i` into `[g, f]`; others are untouched.
pub fn apply_obstacle(field: &DiscreteField, obstacle: &Obstacle, i: u32) -> Result<DiscreteField> {
    if field.level.m != obstacle.m {
        return Err(CboError::input(format!(
            "field level {} does not match obstacle level {}",
            field.level.m, obstacle.m
        )));
    }
    let domain = obstacle.domain_at(i)?;
    let values = domain.project(&field.values)?;
    DiscreteField::new(field.level, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PAPER_WELLS: WellParams = WellParams {
        w1: 0.25,
        w2: 0.75,
        p: 1.5,
        eps_inv_sq: 500.0,
    };

    fn no_wells(p: f64) -> WellParams {
        WellParams { w1: 0.0, w2: 1.0, p, eps_inv_sq: 0.0 }
    }

    /// Composite Simpson oracle for `∫ F` along a linear segment.
    fn simpson_potential(xl: f64, xr: f64, h: f64, w: &WellParams, panels: usize) -> f64 {
        let n = panels * 2;
        let step = 1.0 / n as f64;
        let f = |t: f64| double_well(xl + t * (xr - xl), w);
        let mut s = f(0.0) + f(1.0);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * step);
        }
        h * s * step / 3.0
    }

    fn ramp(level: FeLevel) -> Vec<f64> {
        (1..level.elements())
            .map(|j| level.v0 + (level.v1 - level.v0) * j as f64 * level.h())
            .collect()
    }

    #[test]
    fn well_values() {
        let w = PAPER_WELLS;
        assert_eq!(double_well(0.25, &w), 0.0);
        assert_eq!(double_well(0.75, &w), 0.0);
        assert_eq!(double_well(0.5, &w), 0.00390625);
    }

    #[test]
    fn element_potential_examples() {
        let w = WellParams { w1: 0.0, w2: 1.0, p: 2.0, eps_inv_sq: 1.0 };
        assert_eq!(element_potential(0.0, 0.0, 0.3, &w), 0.0);
        let c = 0.4;
        assert!((element_potential(c, c, 0.3, &w) - 0.3 * double_well(c, &w)).abs() < 1e-16);
        assert!((element_potential(0.0, 1.0, 1.0, &w) - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn flat_field_in_a_well_has_zero_energy() {
        let level = FeLevel::new(4, 0.25, 0.25).unwrap();
        let field = DiscreteField::new(level, vec![0.25; 15]).unwrap();
        assert_eq!(gl_energy(&field, &PAPER_WELLS).unwrap(), 0.0);
    }

    #[test]
    fn ramp_energies() {
        for m in 1..8 {
            let level = FeLevel::new(m, 0.0, 1.0).unwrap();
            let f = DiscreteField::new(level, ramp(level)).unwrap();
            assert!((gl_energy(&f, &no_wells(2.0)).unwrap() - 0.5).abs() < 1e-12);
            let level = FeLevel::new(m, 0.2, -0.7).unwrap();
            let f = DiscreteField::new(level, ramp(level)).unwrap();
            let s: f64 = -0.9;
            let expect = (2.0 / 3.0) * s.abs().powf(1.5);
            assert!((gl_energy(&f, &no_wells(1.5)).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_fields() {
        let level = FeLevel::new(2, 0.0, 1.0).unwrap();
        assert!(DiscreteField::new(level, vec![0.0; 2]).is_err());
        assert!(DiscreteField::new(level, vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(FeLevel::new(0, 0.0, 1.0).is_err());
        let bad = WellParams { w1: 1.0, w2: 0.0, p: 0.5, eps_inv_sq: -1.0 };
        assert!(matches!(bad.validate(), Err(CboError::Config(p)) if p.len() == 3));
    }

    #[test]
    fn h_times_m_is_one() {
        for m in 1..=30 {
            let l = FeLevel::new(m, 0.0, 0.0).unwrap();
            assert_eq!(l.h() * l.elements() as f64, 1.0);
        }
    }

    #[test]
    fn prolongation_examples() {
        let v = vec![0.3, -1.0, 2.5];
        assert_eq!(prolongate(&v, 2, 2, 0.0, 1.0).unwrap(), v);
        let c = 0.8;
        let fine = prolongate(&[c], 1, 2, 0.2, 1.4).unwrap();
        assert_eq!(fine, vec![(0.2 + c) / 2.0, c, (c + 1.4) / 2.0]);
        assert!(prolongate(&[1.0, 2.0], 1, 2, 0.0, 0.0).is_err());
        assert!(prolongate(&[1.0], 3, 2, 0.0, 0.0).is_err());
    }

    #[test]
    fn obstacle_examples() {
        let level = FeLevel::new(2, 0.0, 0.0).unwrap();
        let ob = Obstacle::new(2, vec![0.0; 3], vec![1.0; 3]).unwrap();
        let inside = DiscreteField::new(level, vec![0.1, 0.5, 0.9]).unwrap();
        assert_eq!(apply_obstacle(&inside, &ob, 2).unwrap(), inside);
        let twos = DiscreteField::new(level, vec![2.0; 3]).unwrap();
        assert_eq!(apply_obstacle(&twos, &ob, 1).unwrap().values(), &[2.0, 1.0, 2.0]);
        assert_eq!(apply_obstacle(&twos, &ob, 2).unwrap().values(), &[1.0; 3]);
        assert!(Obstacle::new(2, vec![0.0, 2.0, 0.0], vec![1.0; 3]).is_err());
    }

    #[test]
    fn active_nodes_by_enumeration() {
        let ob = Obstacle::new(4, vec![0.0; 15], vec![0.0; 15]).unwrap();
        for i in 1..=4u32 {
            let dom = ob.domain_at(i).unwrap();
            let Domain::ObstacleBox(b) = dom else { panic!() };
            let active: Vec<usize> = (0..15).filter(|&k| b.lower()[k].is_finite()).map(|k| k + 1).collect();
            let expect: Vec<usize> = (1..(1usize << i)).map(|k| k * (1 << (4 - i))).collect();
            assert_eq!(active, expect);
        }
    }

    proptest! {
        #[test]
        fn potential_matches_dense_quadrature(xl in -2.0..2.0f64, xr in -2.0..2.0f64, h in 0.01..1.0f64) {
            let w = WellParams { w1: -0.3, w2: 0.9, p: 2.0, eps_inv_sq: 1.0 };
            let exact = element_potential(xl, xr, h, &w);
            let oracle = simpson_potential(xl, xr, h, &w, 5000);
            prop_assert!((exact - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
        }

        #[test]
        fn energy_nonnegative_and_translation_symmetric(
            vals in prop::collection::vec(-1.0..2.0f64, 7),
            v0 in -1.0..2.0f64, v1 in -1.0..2.0f64, c in -3.0..3.0f64,
        ) {
            let level = FeLevel::new(3, v0, v1).unwrap();
            let f = DiscreteField::new(level, vals.clone()).unwrap();
            let e = gl_energy(&f, &PAPER_WELLS).unwrap();
            prop_assert!(e >= 0.0);
            let shifted_level = FeLevel::new(3, v0 + c, v1 + c).unwrap();
            let sf = DiscreteField::new(shifted_level, vals.iter().map(|v| v + c).collect()).unwrap();
            let sw = WellParams { w1: PAPER_WELLS.w1 + c, w2: PAPER_WELLS.w2 + c, ..PAPER_WELLS };
            let es = gl_energy(&sf, &sw).unwrap();
            prop_assert!((e - es).abs() <= 1e-12 * e.max(1.0) * 100.0);
        }

        #[test]
        fn ramp_is_optimal_for_dirichlet_energy(
            pert in prop::collection::vec(-0.5..0.5f64, 15),
        ) {
            let level = FeLevel::new(4, 0.0, 1.0).unwrap();
            let r = ramp(level);
            let w = no_wells(2.0);
            let base = gl_energy(&DiscreteField::new(level, r.clone()).unwrap(), &w).unwrap();
            let moved: Vec<f64> = r.iter().zip(&pert).map(|(a, b)| a + b).collect();
            let e = gl_energy(&DiscreteField::new(level, moved).unwrap(), &w).unwrap();
            prop_assert!(e >= base);
            if pert.iter().any(|p| *p != 0.0) {
                prop_assert!(e > base);
            }
        }

        #[test]
        fn prolongation_preserves_dirichlet_energy(
            coarse in prop::collection::vec(-2.0..2.0f64, 7),
            v0 in -1.0..1.0f64, v1 in -1.0..1.0f64, extra in 0u32..4,
        ) {
            let w = no_wells(2.0);
            let coarse_level = FeLevel::new(3, v0, v1).unwrap();
            let fine_level = FeLevel::new(3 + extra, v0, v1).unwrap();
            let fine = prolongate(&coarse, 3, 3 + extra, v0, v1).unwrap();
            let ec = gl_energy(&DiscreteField::new(coarse_level, coarse).unwrap(), &w).unwrap();
            let ef = gl_energy(&DiscreteField::new(fine_level, fine).unwrap(), &w).unwrap();
            prop_assert!((ec - ef).abs() <= 1e-12 * ec.max(1.0));
        }
    }
}
