//! Experiment configuration, execution and persistence.

pub mod config;
pub mod experiment;
pub mod persist;
pub mod presets;
pub mod sweep;

pub use config::{
    load_allen_cahn, load_experiment, load_sweep, AllenCahnConfig, DomainSpec, ExperimentConfig,
    HeuristicsSpec, InitSpec, LogRange, NoiseSpec, ObjectiveSpec, ObstacleBound, ObstacleSpec,
    ParamsSpec, SweepConfig, SweepGrid,
};
pub use experiment::{run_allen_cahn, run_experiment, AllenCahnResult, ExperimentResult, Summary};
pub use persist::{persist_allen_cahn, persist_experiment, persist_sweep};
pub use presets::{preset, PresetJob, Scale};
pub use sweep::{run_sweep, SweepResult};
