//! Observables and pattern classification.

mod classify;
mod measures;
mod observables;

pub use classify::{classify, diagnose, DiagnosticsRecord, DiagnosticsSettings, Label, Thresholds};
pub use measures::{
    default_packet_depth, localization, negativity_volume, packet_entropy, purity, shannon_entropy, DEFAULT_LOCALIZATION_LEVEL,
};
pub use observables::{expectation, scale_spectrum, ObservableSpec, PhasePolynomial, ScaleSpectrum};
