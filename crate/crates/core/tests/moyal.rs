mod common;

use std::f64::consts::PI;

use common::*;
use ndarray::Array2;
use proptest::prelude::*;
use waveleton_core::moyal::{
    classical_liouville_rhs, moyal_rhs, moyal_term, open_system_rhs, poly_derivative, series_coefficient, spectral_derivative,
    HamiltonianSpec, OpenSystemSpec, PhaseAxis, Polynomial,
};
use waveleton_core::phasespace::{make_grid, Boundary, WignerState};
use waveleton_core::Error;

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec()).unwrap()
}

fn ham(c: &[f64]) -> HamiltonianSpec {
    HamiltonianSpec::new(1.0, poly(c), "test").unwrap()
}

fn rel(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    max_abs_diff(a, b) / max_abs(b).max(1e-300)
}

/// A smooth, non-symmetric test field: two displaced Gaussians of different widths.
fn lumpy(n: usize, l: f64) -> WignerState {
    let g = grid(n, l);
    WignerState::from_fn(g, 1.0, 1.0, |q, p| {
        (-(q - 1.0).powi(2) - (p + 0.5).powi(2)).exp() / PI + 0.3 * (-0.5 * (q + 1.5).powi(2) - 2.0 * (p - 1.0).powi(2)).exp()
    })
    .unwrap()
}

#[test]
fn poly_derivative_examples() {
    let d = poly_derivative(&poly(&[0.0, 0.0, 0.0, 0.0, 1.0]), 3);
    assert_eq!(d.coeffs, vec![0.0, 24.0]);
    assert!(poly_derivative(&poly(&[1.0, 2.0, 3.0]), 3).is_zero());
    assert!(poly_derivative(&poly(&[0.0, 0.0, 0.5]), 3).is_zero());
    let p = poly(&[1.0, -2.0, 0.5, 3.0, 0.25]);
    for k in 0..=4 {
        assert_eq!(p.derivative(k).degree(), Some(4 - k));
    }
    assert!(p.derivative(5).is_zero());
}

#[test]
fn free_streaming_matches_finite_differences() {
    let w = lumpy(256, 8.0);
    let rhs = moyal_rhs(&w, &HamiltonianSpec::free(1.0)).unwrap();
    let dq = fd8_first(&w.values, 0, w.grid.dq());
    let expect = Array2::from_shape_fn(w.values.dim(), |(i, k)| -w.grid.p(k) * dq[[i, k]]);
    assert!(rel(&rhs, &expect) < 1e-6, "{}", rel(&rhs, &expect));
}

#[test]
fn harmonic_ground_state_is_stationary() {
    let w = gaussian_w(grid(128, 8.0), 0.0, 0.0);
    let rhs = moyal_rhs(&w, &HamiltonianSpec::harmonic(1.0, 1.0)).unwrap();
    assert!(max_abs(&rhs) <= 1e-8 * max_abs(&w.values), "{}", max_abs(&rhs));
}

#[test]
fn quartic_correction_coefficient() {
    // U = λ q⁴: ℓ = 1 term is −(ħ²/4)/3! · 24λ q ∂³_p W = −ħ²λ q ∂³_p W
    assert!((series_coefficient(1, 1.0) * 24.0 + 1.0).abs() < 1e-15);
    let w = lumpy(256, 8.0);
    let h = ham(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    assert_eq!(h.max_moyal_index(), Some(1));
    let term = moyal_term(&w, &h, 1).unwrap();
    let dp = w.grid.dp();
    let d3 = fd8_first(&fd8_first(&fd8_first(&w.values, 1, dp), 1, dp), 1, dp);
    let expect = Array2::from_shape_fn(w.values.dim(), |(i, k)| -w.grid.q(i) * d3[[i, k]]);
    assert!(rel(&term, &expect) < 1e-6, "{}", rel(&term, &expect));
}

#[test]
fn classical_and_full_differ_by_first_correction() {
    let w = lumpy(128, 8.0);
    let quartic = ham(&[0.0, 0.3, 0.5, 0.0, 0.25]);
    let full = moyal_rhs(&w, &quartic).unwrap();
    let classical = classical_liouville_rhs(&w, &quartic).unwrap();
    let term = moyal_term(&w, &quartic, 1).unwrap();
    assert!(max_abs_diff(&(&full - &classical), &term) < 1e-13 * max_abs(&full));

    for h in [HamiltonianSpec::harmonic(1.0, 1.0), HamiltonianSpec::free(1.0)] {
        let a = moyal_rhs(&w, &h).unwrap();
        let b = classical_liouville_rhs(&w, &h).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn open_system_moment_rates() {
    let g = grid(128, 8.0);
    let w = WignerState::from_fn(g, 1.0, 1.0, |q, p| (-(q * q) - (p - 0.7).powi(2)).exp() / PI).unwrap();
    assert!(max_abs(&open_system_rhs(&w, &OpenSystemSpec::closed()).unwrap()) == 0.0);

    let moment = |a: &Array2<f64>, f: &dyn Fn(f64) -> f64| -> f64 {
        let mut s = 0.0;
        for ((_, k), v) in a.indexed_iter() {
            s += f(g.p(k)) * v;
        }
        s * g.cell_measure()
    };

    // pure diffusion: d<p²>/dt = 2D, variance rate likewise since d<p>/dt = 0
    let d = 0.3;
    let rhs = open_system_rhs(&w, &OpenSystemSpec::new(0.0, d).unwrap()).unwrap();
    assert!((moment(&rhs, &|p| p * p) - 2.0 * d).abs() < 1e-8);
    assert!(moment(&rhs, &|p| p).abs() < 1e-10);
    let expect = spectral_derivative(&w.values, PhaseAxis::P, 2, &g).unwrap() * d;
    assert!(max_abs_diff(&rhs, &expect) < 1e-14);

    // friction: d<p>/dt = −2γ p0
    let gamma = 0.4;
    let rhs = open_system_rhs(&w, &OpenSystemSpec::new(gamma, 0.0).unwrap()).unwrap();
    assert!((moment(&rhs, &|p| p) + 2.0 * gamma * 0.7).abs() < 1e-8);
    assert!(moment(&rhs, &|_| 1.0).abs() < 1e-10);
}

#[test]
fn spectral_derivative_examples() {
    let g = grid(64, 4.0);
    // k = 2π·3/8
    let k = 2.0 * PI * 3.0 / 8.0;
    let f = Array2::from_shape_fn(g.shape(), |(_, j)| (k * g.p(j)).sin());
    let d = spectral_derivative(&f, PhaseAxis::P, 1, &g).unwrap();
    let exact = Array2::from_shape_fn(g.shape(), |(_, j)| k * (k * g.p(j)).cos());
    assert!(max_abs_diff(&d, &exact) < 1e-10);

    let c = Array2::from_elem(g.shape(), 2.5);
    for order in 1..=7 {
        assert!(max_abs(&spectral_derivative(&c, PhaseAxis::Q, order, &g).unwrap()) < 1e-12);
    }
    assert!(matches!(spectral_derivative(&c, PhaseAxis::Q, 8, &g), Err(Error::Resolution(_))));

    let w = lumpy(256, 8.0);
    let h = w.grid.dp();
    let spec = spectral_derivative(&w.values, PhaseAxis::P, 3, &w.grid).unwrap();
    let fd = fd8_first(&fd8_first(&fd8_first(&w.values, 1, h), 1, h), 1, h);
    assert!(rel(&spec, &fd) < 1e-6, "{}", rel(&spec, &fd));
    let spec = spectral_derivative(&w.values, PhaseAxis::Q, 1, &w.grid).unwrap();
    let fd = fd8_first(&w.values, 0, w.grid.dq());
    assert!(rel(&spec, &fd) < 1e-6);
}

#[test]
fn high_degree_potential_exceeds_safety_bound() {
    let mut c = vec![0.0; 11];
    c[10] = 1.0;
    let w = lumpy(64, 8.0);
    assert!(matches!(moyal_rhs(&w, &ham(&c)), Err(Error::Resolution(_))));
    // degree 8 needs ∂⁷ and is accepted
    let mut c = vec![0.0; 9];
    c[8] = 1e-4;
    assert!(moyal_rhs(&w, &ham(&c)).is_ok());
}

#[test]
fn truncation_is_exact() {
    let w = lumpy(128, 8.0);
    for (d, c) in [(2, vec![0.1, 0.0, 0.5]), (4, vec![0.0, 0.2, 0.5, 0.1, 0.25]), (6, vec![0.0, 0.0, 1.0, 0.0, 0.1, 0.0, 0.01])] {
        let h = ham(&c);
        let lmax = (d - 1) / 2;
        assert_eq!(h.max_moyal_index(), Some(lmax));
        for ell in lmax + 1..lmax + 3 {
            let t = moyal_term(&w, &h, ell).unwrap();
            assert!(max_abs(&t) <= 1e-14 * max_abs(&w.values));
        }
    }
}

#[test]
fn hbar_squared_scaling() {
    let base = lumpy(128, 8.0);
    let h = ham(&[0.0, 0.0, 0.0, 0.0, 0.25]);
    let hbars = [0.2, 0.1, 0.05];
    let norms: Vec<f64> = hbars
        .iter()
        .map(|&hb| {
            let w = WignerState::new(base.grid, base.values.clone(), hb, 1.0, 0.0).unwrap();
            let diff = moyal_rhs(&w, &h).unwrap() - classical_liouville_rhs(&w, &h).unwrap();
            diff.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();
    for i in 0..2 {
        let slope = (norms[i] / norms[i + 1]).ln() / (hbars[i] / hbars[i + 1]).ln();
        assert!((slope - 2.0).abs() < 0.1, "{slope}");
    }
}

#[test]
fn decay_padded_derivative_matches_periodic_for_localized_field() {
    let gp = make_grid(128, 128, (-8.0, 8.0), (-8.0, 8.0), Boundary::Periodic).unwrap();
    let gd = make_grid(128, 128, (-8.0, 8.0), (-8.0, 8.0), Boundary::DecayPadded).unwrap();
    let w = gaussian_w(gp, 0.5, -0.5);
    let a = spectral_derivative(&w.values, PhaseAxis::P, 3, &gp).unwrap();
    let b = spectral_derivative(&w.values, PhaseAxis::P, 3, &gd).unwrap();
    assert!(rel(&b, &a) < 1e-8);
}

fn gaussian_field(n: usize, parts: &[(f64, f64, f64)]) -> WignerState {
    let g = grid(n, 8.0);
    WignerState::from_fn(g, 1.0, 1.0, |q, p| {
        parts.iter().map(|&(a, q0, p0)| a * (-(q - q0).powi(2) - (p - p0).powi(2)).exp()).sum()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rhs_conserves_mass(
        parts in prop::collection::vec((-1.0f64..1.0, -3.0f64..3.0, -3.0f64..3.0), 1..4),
        coeffs in prop::collection::vec(-0.5f64..0.5, 1..7),
        gamma in 0.0f64..1.0,
        diff in 0.0f64..1.0,
    ) {
        let w = gaussian_field(64, &parts);
        let h = ham(&coeffs);
        let mu = w.grid.cell_measure();
        let total = moyal_rhs(&w, &h).unwrap().sum() * mu;
        prop_assert!(total.abs() < 1e-10);
        let open = open_system_rhs(&w, &OpenSystemSpec::new(gamma, diff).unwrap()).unwrap().sum() * mu;
        prop_assert!(open.abs() < 1e-10);
    }

    #[test]
    fn rhs_is_linear(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        p1 in prop::collection::vec((-1.0f64..1.0, -3.0f64..3.0, -3.0f64..3.0), 1..3),
        p2 in prop::collection::vec((-1.0f64..1.0, -3.0f64..3.0, -3.0f64..3.0), 1..3),
    ) {
        let w1 = gaussian_field(64, &p1);
        let w2 = gaussian_field(64, &p2);
        let h = ham(&[0.0, 0.1, 0.5, -0.1, 0.25]);
        let combo = w1.with_values(&w1.values * a + &w2.values * b);
        let lhs = moyal_rhs(&combo, &h).unwrap();
        let rhs = moyal_rhs(&w1, &h).unwrap() * a + moyal_rhs(&w2, &h).unwrap() * b;
        let scale = max_abs(&lhs).max(max_abs(&rhs)).max(1.0);
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-13 * scale);
    }
}
