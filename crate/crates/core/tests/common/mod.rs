#![allow(dead_code)]

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use waveleton_core::phasespace::{make_grid, Boundary, PhaseGrid, Wavefunction, WignerState};

pub fn grid(n: usize, l: f64) -> PhaseGrid {
    make_grid(n, n, (-l, l), (-l, l), Boundary::Periodic).unwrap()
}

/// Analytic harmonic ground state (m = ω = ħ = 1) displaced to `(q0, p0)`.
pub fn coherent_psi(q0: f64, p0: f64) -> impl Fn(f64) -> Complex64 {
    move |q| Complex64::from_polar(PI.powf(-0.25) * (-(q - q0).powi(2) / 2.0).exp(), p0 * q)
}

pub fn sample(grid: &PhaseGrid, f: impl Fn(f64) -> Complex64) -> Wavefunction {
    Wavefunction::from_fn(grid, f)
}

/// Analytic Wigner function of a coherent state (m = ω = ħ = 1).
pub fn gaussian_w(grid: PhaseGrid, q0: f64, p0: f64) -> WignerState {
    WignerState::from_fn(grid, 1.0, 1.0, |q, p| (-(q - q0).powi(2) - (p - p0).powi(2)).exp() / PI).unwrap()
}

pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Composite trapezoid on `[a, b]` with `n` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..n {
        s += f(a + i as f64 * h);
    }
    s * h
}

/// Eighth-order centred first derivative along an axis, periodic wrap.
pub fn fd8_first(values: &Array2<f64>, axis: usize, h: f64) -> Array2<f64> {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let (n0, n1) = values.dim();
    Array2::from_shape_fn((n0, n1), |(i, k)| {
        let mut acc = 0.0;
        for (s, c) in C.iter().enumerate() {
            let s = s + 1;
            let (plus, minus) = if axis == 0 {
                (values[[(i + s) % n0, k]], values[[(i + n0 - s) % n0, k]])
            } else {
                (values[[i, (k + s) % n1]], values[[i, (k + n1 - s) % n1]])
            };
            acc += c * (plus - minus);
        }
        acc / h
    })
}

/// Analytic Wigner function of the even cat `|q0⟩ + |−q0⟩` (m = ω = ħ = 1).
pub fn cat_w_exact(q0: f64) -> impl Fn(f64, f64) -> f64 {
    let n2 = 1.0 / (2.0 * (1.0 + (-q0 * q0).exp()));
    move |q, p| {
        n2 / PI
            * ((-(q - q0).powi(2) - p * p).exp() + (-(q + q0).powi(2) - p * p).exp() + 2.0 * (-q * q - p * p).exp() * (2.0 * q0 * p).cos())
    }
}

pub fn cat_w(grid: PhaseGrid, q0: f64) -> WignerState {
    WignerState::from_fn(grid, 1.0, 1.0, cat_w_exact(q0)).unwrap()
}
