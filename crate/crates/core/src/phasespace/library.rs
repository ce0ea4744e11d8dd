//! Preset initial states.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::PhaseGrid;
use super::state::{Wavefunction, WignerState};
use super::wigner::wignerize_with_mass;
use crate::error::{Error, Result};

/// A named preset with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StatePreset {
    /// Minimum-uncertainty Gaussian centred at `(q0, p0)`.
    Coherent { q0: f64, p0: f64, omega: f64 },
    /// Gaussian with position width scaled by `e^{-r}`.
    Squeezed { q0: f64, p0: f64, omega: f64, r: f64 },
    /// `N (|q0,p0⟩ + parity |−q0,−p0⟩)`.
    Cat { q0: f64, p0: f64, omega: f64, parity: f64 },
    /// Mixed Gaussian with the given purity, both variances scaled by `1/purity`.
    Thermal { q0: f64, p0: f64, omega: f64, purity: f64 },
}

/// Output of [`initial_state_library`]: pure presets stay wave functions.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(Wavefunction),
    Mixed(WignerState),
}

impl InitialState {
    pub fn into_wigner(self, grid: &PhaseGrid, hbar: f64, mass: f64) -> Result<WignerState> {
        match self {
            InitialState::Pure(psi) => wignerize_with_mass(&psi, grid, hbar, mass),
            InitialState::Mixed(w) => Ok(w),
        }
    }

    pub fn wavefunction(&self) -> Option<&Wavefunction> {
        match self {
            InitialState::Pure(psi) => Some(psi),
            InitialState::Mixed(_) => None,
        }
    }
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

impl StatePreset {
    pub const NAMES: [&'static str; 4] = ["coherent", "squeezed", "cat", "thermal"];

    /// Resolves a preset by name. Missing parameters take their defaults
    /// (`q0 = p0 = r = 0`, `omega = 1`, `parity = 1`, `purity = 1`).
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let q0 = param(params, "q0", 0.0);
        let p0 = param(params, "p0", 0.0);
        let omega = param(params, "omega", 1.0);
        if !(omega > 0.0) {
            return Err(Error::Config(format!("omega must be positive (got {omega})")));
        }
        let known = ["q0", "p0", "omega", "r", "parity", "purity"];
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown initial-state parameter '{k}'")));
        }
        match name {
            "coherent" => Ok(StatePreset::Coherent { q0, p0, omega }),
            "squeezed" => Ok(StatePreset::Squeezed { q0, p0, omega, r: param(params, "r", 0.0) }),
            "cat" => {
                let parity = param(params, "parity", 1.0);
                if parity != 1.0 && parity != -1.0 {
                    return Err(Error::Config(format!("cat parity must be +1 or -1 (got {parity})")));
                }
                Ok(StatePreset::Cat { q0, p0, omega, parity })
            }
            "thermal" => {
                let purity = param(params, "purity", 1.0);
                if !(purity > 0.0 && purity <= 1.0) {
                    return Err(Error::Config(format!("thermal purity must lie in (0, 1] (got {purity})")));
                }
                Ok(StatePreset::Thermal { q0, p0, omega, purity })
            }
            other => Err(Error::Config(format!("unknown initial state '{other}'"))),
        }
    }
}

fn gaussian(q: f64, q0: f64, p0: f64, sigma: f64, hbar: f64) -> Complex64 {
    let amp = (2.0 * PI * sigma * sigma).powf(-0.25) * (-(q - q0).powi(2) / (4.0 * sigma * sigma)).exp();
    Complex64::from_polar(amp, p0 * q / hbar)
}

/// Builds a normalised preset state on `grid`.
pub fn initial_state_library(preset: &StatePreset, grid: &PhaseGrid, hbar: f64, mass: f64) -> Result<InitialState> {
    // ground-state position standard deviation
    let sigma0 = |omega: f64| (hbar / (2.0 * mass * omega)).sqrt();
    match *preset {
        StatePreset::Coherent { q0, p0, omega } => {
            let s = sigma0(omega);
            let psi = Wavefunction::from_fn(grid, |q| gaussian(q, q0, p0, s, hbar));
            Ok(InitialState::Pure(psi.normalize()?))
        }
        StatePreset::Squeezed { q0, p0, omega, r } => {
            let s = sigma0(omega) * (-r).exp();
            let psi = Wavefunction::from_fn(grid, |q| gaussian(q, q0, p0, s, hbar));
            Ok(InitialState::Pure(psi.normalize()?))
        }
        StatePreset::Cat { q0, p0, omega, parity } => {
            let s = sigma0(omega);
            let psi = Wavefunction::from_fn(grid, |q| gaussian(q, q0, p0, s, hbar) + gaussian(q, -q0, -p0, s, hbar) * parity);
            Ok(InitialState::Pure(psi.normalize()?))
        }
        StatePreset::Thermal { q0, p0, omega, purity } => {
            let vq = hbar / (2.0 * mass * omega * purity);
            let vp = hbar * mass * omega / (2.0 * purity);
            let norm = 1.0 / (2.0 * PI * (vq * vp).sqrt());
            let w = WignerState::from_fn(*grid, hbar, mass, |q, p| {
                norm * (-(q - q0).powi(2) / (2.0 * vq) - (p - p0).powi(2) / (2.0 * vp)).exp()
            })?;
            let total = w.integral();
            Ok(InitialState::Mixed(w.with_values(w.values.mapv(|v| v / total))))
        }
    }
}
