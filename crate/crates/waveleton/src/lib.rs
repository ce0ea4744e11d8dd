//! Scenario runner for `waveleton-core`: config files, run directories,
//! dump formats, the split-operator reference solver and offline analysis.

pub mod analyze;
pub mod config;
pub mod error;
pub mod formats;
pub mod oracle;
pub mod runner;
pub mod sweep;

pub use config::ScenarioConfig;
pub use error::{RunError, RunResult};
pub use runner::{run_oracle, run_scenario, RunSummary};

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 7] = [
    ("harmonic_coherent", include_str!("../scenarios/harmonic_coherent.toml")),
    ("cat_decoherence", include_str!("../scenarios/cat_decoherence.toml")),
    ("quartic_oracle", include_str!("../scenarios/quartic_oracle.toml")),
    ("free_particle", include_str!("../scenarios/free_particle.toml")),
    ("hierarchy", include_str!("../scenarios/hierarchy.toml")),
    ("harmonic_ladder", include_str!("../scenarios/harmonic_ladder.toml")),
    ("cat_decoherence_fine", include_str!("../scenarios/cat_decoherence_fine.toml")),
];

pub fn bundled(name: &str) -> Option<ScenarioConfig> {
    BUNDLED.iter().find(|b| b.0 == name).map(|b| ScenarioConfig::from_toml(b.1).expect("bundled scenarios are valid"))
}
