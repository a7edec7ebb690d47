//! First-order finite elements for the 1D p-Ginzburg–Landau energy
//!
//! ```text
//! E(v) = ∫₀¹ (1/p)|v'|^p + ε⁻² (v - w₁)²(v - w₂)² ds,   v(0) = v₀, v(1) = v₁
//! ```
//!
//! on uniform meshes with `M = 2^m` elements, pointwise obstacles, and a
//! coarse-to-fine consensus driver that keeps the state on the finest mesh
//! and refines only the noise and the active obstacle nodes.

mod energy;
mod multigrid;

pub use energy::{
    apply_obstacle, double_well, element_potential, gl_energy, prolongate, DiscreteField,
    FeLevel, GlEnergy, Obstacle, WellParams,
};
pub use multigrid::{
    coarse_initial_ensemble, multigrid_solve, AllenCahnProblem, LevelResult, MultigridOutcome,
    MultigridSchedule,
};
