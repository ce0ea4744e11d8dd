use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::grid::PhaseGrid;
use super::state::{check_physical, Wavefunction, WignerState};
use crate::error::{Error, Result};

/// Largest |p| representable by chord sampling at step `2 dq`.
pub fn chord_nyquist(grid: &PhaseGrid, hbar: f64) -> f64 {
    PI * hbar / (2.0 * grid.dq())
}

/// Weyl transform of a pure state,
/// `W(q,p) = (2πħ)⁻¹ ∫ ψ*(q+y/2) ψ(q−y/2) e^{ipy/ħ} dy`.
///
/// The chord `y` is sampled at `2 dq` so both arguments stay on grid nodes;
/// the Fourier sum is evaluated directly at the grid momenta. Pairing `m`
/// with `-m` makes the result exactly real. Chords never wrap around the
/// `q` period: on a ring, `q` and its antipode share every chord and the
/// transform would carry a ghost copy of the state.
pub fn wignerize(psi: &Wavefunction, grid: &PhaseGrid, hbar: f64) -> Result<WignerState> {
    wignerize_with_mass(psi, grid, hbar, 1.0)
}

pub fn wignerize_with_mass(psi: &Wavefunction, grid: &PhaseGrid, hbar: f64, mass: f64) -> Result<WignerState> {
    check_physical(hbar, mass)?;
    if !psi.matches(grid) {
        return Err(Error::Dimension(format!(
            "wavefunction with {} points on [{}, {}) does not match grid q axis ({} points on [{}, {}))",
            psi.len(),
            psi.q_min,
            psi.q_max,
            grid.n_q,
            grid.q_min,
            grid.q_max
        )));
    }
    let nyquist = chord_nyquist(grid, hbar);
    if grid.max_abs_p() > nyquist {
        return Err(Error::Config(format!(
            "momentum range exceeds chord Nyquist bound {nyquist:.6} (pi*hbar/(2 dq))"
        )));
    }
    let n = grid.n_q;
    let half = n / 2;
    let dq = grid.dq();

    // phase[k][m] = exp(2i p_k m dq / ħ), m = 0..=half
    let mut phase = vec![Complex64::new(0.0, 0.0); grid.n_p * (half + 1)];
    for k in 0..grid.n_p {
        let theta = 2.0 * grid.p(k) * dq / hbar;
        for m in 0..=half {
            phase[k * (half + 1) + m] = Complex64::from_polar(1.0, theta * m as f64);
        }
    }

    let at = |i: isize| -> Complex64 {
        if i < 0 || i >= n as isize {
            Complex64::new(0.0, 0.0)
        } else {
            psi.values[i as usize]
        }
    };

    let scale = dq / (PI * hbar);
    let mut values = Array2::<f64>::zeros(grid.shape());
    let mut chord = vec![Complex64::new(0.0, 0.0); half + 1];
    for i in 0..n {
        for (m, c) in chord.iter_mut().enumerate() {
            let m = m as isize;
            *c = at(i as isize + m).conj() * at(i as isize - m);
        }
        for k in 0..grid.n_p {
            let row = &phase[k * (half + 1)..(k + 1) * (half + 1)];
            let mut acc = chord[0].re;
            for m in 1..=half {
                acc += 2.0 * (chord[m] * row[m]).re;
            }
            values[[i, k]] = scale * acc;
        }
    }
    WignerState::new(*grid, values, hbar, mass, 0.0)
}

/// Position and momentum densities `(∫W dp, ∫W dq)`.
pub fn marginals(w: &WignerState) -> (Array1<f64>, Array1<f64>) {
    let dq = w.grid.dq();
    let dp = w.grid.dp();
    let pos = w.values.sum_axis(ndarray::Axis(1)).mapv(|v| v * dp);
    let mom = w.values.sum_axis(ndarray::Axis(0)).mapv(|v| v * dq);
    (pos, mom)
}

/// `2πħ ∬ W₁ W₂ dq dp`.
pub fn overlap(w1: &WignerState, w2: &WignerState) -> Result<f64> {
    if !w1.grid.same_nodes(&w2.grid) {
        return Err(Error::Dimension("overlap: grids differ".into()));
    }
    if w1.hbar != w2.hbar {
        return Err(Error::Dimension("overlap: hbar differs".into()));
    }
    let s: f64 = w1.values.iter().zip(w2.values.iter()).map(|(a, b)| a * b).sum();
    Ok(2.0 * PI * w1.hbar * w1.grid.cell_measure() * s)
}
