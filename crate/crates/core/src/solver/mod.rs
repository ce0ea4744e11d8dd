//! Explicit time evolution of Wigner states and hierarchies.

mod config;
mod evolve;
mod hierarchy;
mod resolution;

pub use config::{
    Compression, EvolveConfig, Integrator, StabilityReport, ADVECTIVE_LIMIT, NORM_DRIFT_TOLERANCE, SPECTRAL_LIMIT,
};
pub use evolve::{evolve, evolve_compressed, evolve_observed, step, Snapshot, StepObserver, Trajectory};
pub use hierarchy::{evolve_hierarchy, HierarchySnapshot, HierarchyTrajectory};
pub use resolution::{restrict, select_resolution, ResolutionChoice};
