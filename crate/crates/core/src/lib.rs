//! Wigner–Moyal phase-space dynamics with multiresolution wavelet analysis.
//!
//! The crate is organised bottom-up:
//!
//! * [`phasespace`]: grids, Wigner states, the Weyl transform and presets.
//! * [`moyal`]: polynomial Hamiltonians and the truncated Moyal right-hand side.
//! * [`mra`]: Daubechies transforms, scale decompositions, packets, the Fock-like norm.
//! * [`solver`]: explicit time stepping of states and hierarchies.
//! * [`diagnostics`]: purity, negativity, localization, entropy and pattern labels.

pub mod diagnostics;
pub mod error;
pub mod moyal;
pub mod mra;
pub mod phasespace;
pub mod solver;

pub use error::{Error, Result};
