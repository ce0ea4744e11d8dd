//! Polynomial Hamiltonians and the Wigner–Moyal right-hand side.

mod poly;
mod rhs;
mod spectral;

pub use poly::{poly_derivative, HamiltonianSpec, OpenSystemSpec, Polynomial};
pub use rhs::{
    chord_band, classical_liouville_rhs, moyal_rhs, moyal_term, open_system_rhs, series_coefficient, MoyalOperator,
    SeriesTerms,
};
pub use spectral::{
    derivatives_along, spectral_derivative, spectral_derivative_bounded, AxisGeometry, DerivativeRequest, PhaseAxis,
    DEFAULT_MAX_ORDER,
};
