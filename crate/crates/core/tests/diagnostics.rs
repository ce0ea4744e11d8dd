mod common;

use std::f64::consts::PI;

use common::*;
use ndarray::{Array1, ArrayD, IxDyn};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use waveleton_core::diagnostics::{
    classify, diagnose, expectation, localization, negativity_volume, purity, scale_spectrum, DiagnosticsRecord, DiagnosticsSettings,
    Label, ObservableSpec, PhasePolynomial, Thresholds, DEFAULT_LOCALIZATION_LEVEL,
};
use waveleton_core::mra::WaveletSpec;
use waveleton_core::phasespace::{pair_grid, Boundary, HierarchyState, Level, PairState, WignerState};
use waveleton_core::Error;

fn mixture_w(g: waveleton_core::phasespace::PhaseGrid, q0: f64) -> WignerState {
    let a = gaussian_w(g, q0, 0.0);
    let b = gaussian_w(g, -q0, 0.0);
    a.with_values((&a.values + &b.values) * 0.5)
}

fn record(purity: f64, entropy_fraction: f64, negativity: f64, localization: f64) -> DiagnosticsRecord {
    let count = 128 * 128;
    DiagnosticsRecord {
        time: 0.0,
        norm: 1.0,
        purity,
        entropy: entropy_fraction * (count as f64).ln(),
        negativity,
        localization,
        count,
        label: Label::Unclassified,
    }
}

#[test]
fn purity_examples() {
    let g = grid(128, 8.0);
    assert!((purity(&gaussian_w(g, 1.0, 0.5)) - 1.0).abs() < 1e-6);
    // cross term e^{−q0²/2} with separation 6 is ~1.5e-8
    let p = purity(&mixture_w(g, 3.0));
    assert!((p - 0.5).abs() < 1e-3, "{p}");
    assert_eq!(purity(&WignerState::zeros(g, 1.0, 1.0).unwrap()), 0.0);
}

#[test]
fn negativity_examples() {
    let g = grid(128, 8.0);
    assert!(negativity_volume(&gaussian_w(g, 0.0, 0.0)) <= 1e-10);
    let neg = negativity_volume(&cat_w(g, 3.0));
    // dense midpoint quadrature of the analytic function
    let f = cat_w_exact(3.0);
    let n = 2000;
    let h = 16.0 / n as f64;
    let mut oracle = 0.0;
    for i in 0..n {
        for k in 0..n {
            oracle += (-f(-8.0 + (i as f64 + 0.5) * h, -8.0 + (k as f64 + 0.5) * h)).max(0.0);
        }
    }
    oracle *= h * h;
    assert!(neg > 0.0);
    assert!((neg - oracle).abs() < 2e-3, "{neg} vs {oracle}");
    // baseline
    assert!((neg - 0.298).abs() < 5e-3, "{neg}");
}

#[test]
fn expectation_examples() {
    let g = grid(128, 8.0);
    let ground = HierarchyState::single(0.0, gaussian_w(g, 0.0, 0.0));
    let one = ObservableSpec::single(PhasePolynomial::constant(1.0, 2));
    assert!((expectation(&one, &ground).unwrap() - 1.0).abs() < 1e-8);
    let e = expectation(&ObservableSpec::harmonic_energy(1.0, 1.0), &ground).unwrap();
    assert!((e - 0.5).abs() < 1e-4, "{e}");
    let q = ObservableSpec::single(PhasePolynomial::default().term(1.0, &[1, 0]));
    let even = HierarchyState::single(0.0, cat_w(g, 2.0));
    assert!(expectation(&q, &even).unwrap().abs() < 1e-10);
    // A0 counts through w0
    let with_vacuum = HierarchyState::single(0.25, gaussian_w(g, 0.0, 0.0));
    let a = ObservableSpec { a0: 2.0, ..one.clone() };
    assert!((expectation(&a, &with_vacuum).unwrap() - 1.5).abs() < 1e-8);
}

#[test]
fn expectation_level_errors_and_pair_weight() {
    let g = grid(64, 8.0);
    let single = HierarchyState::single(0.0, gaussian_w(g, 0.0, 0.0));
    let pair_obs = ObservableSpec { a0: 0.0, kernels: vec![None, Some(PhasePolynomial::constant(1.0, 4))] };
    assert!(matches!(expectation(&pair_obs, &single), Err(Error::Dimension(_))));
    let wrong_vars = ObservableSpec::single(PhasePolynomial::constant(1.0, 4));
    assert!(matches!(expectation(&wrong_vars, &single), Err(Error::Dimension(_))));

    let pg = pair_grid(16, (-6.0, 6.0), (-6.0, 6.0), Boundary::Periodic).unwrap();
    let w = gaussian_w(pg, 0.0, 0.0);
    let pair = PairState::product(&w, &w).unwrap();
    let h = HierarchyState::new(0.0, vec![Level::One(w.clone()), Level::Two(pair)]).unwrap();
    // ∫W₂ = 1 with weight 1/2!
    let v = expectation(&pair_obs, &h).unwrap();
    assert!((v - 0.5).abs() < 1e-6, "{v}");
}

#[test]
fn scale_spectrum_of_constant_trace() {
    let trace = ArrayD::from_elem(IxDyn(&[256]), 3.0);
    let s = scale_spectrum(trace.view(), &WaveletSpec::default(), 2).unwrap();
    assert!(s.details.iter().all(|&(_, e)| e <= 1e-12));
    assert!((s.approximation - 9.0 * 256.0).abs() < 1e-9);
    assert_eq!(s.frequencies().first(), Some(&8.0));
}

#[test]
fn sinusoid_energy_sits_near_its_scale() {
    let n = 1024usize;
    for j in 4..=9 {
        // D_j covers 2^{j-2}..2^{j-1} cycles per trace
        let cycles = 1usize << (j - 2);
        let trace = ArrayD::from_shape_fn(IxDyn(&[n]), |i| (2.0 * PI * cycles as f64 * i[0] as f64 / n as f64).sin());
        let s = scale_spectrum(trace.view(), &WaveletSpec::daubechies(6).unwrap(), 2).unwrap();
        let near: f64 = s.details.iter().filter(|&&(l, _)| l + 1 >= j && l <= j + 1).map(|d| d.1).sum();
        assert!(near >= 0.8 * s.total(), "j = {j}: {near} of {}", s.total());
    }
}

#[test]
fn white_noise_detail_energy_doubles_per_scale() {
    let n = 1024usize;
    let seeds = 100;
    let spec = WaveletSpec::default();
    let mut mean: Vec<f64> = Vec::new();
    let mut levels = Vec::new();
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = ArrayD::from_shape_fn(IxDyn(&[n]), |_| {
            // unit-variance Gaussian via Box-Muller
            let (u, v): (f64, f64) = (rng.gen::<f64>().max(1e-300), rng.gen());
            (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
        });
        let s = scale_spectrum(trace.view(), &spec, 2).unwrap();
        if mean.is_empty() {
            mean = vec![0.0; s.details.len()];
            levels = s.details.iter().map(|d| d.0).collect();
        }
        for (m, d) in mean.iter_mut().zip(&s.details) {
            *m += d.1 / seeds as f64;
        }
    }
    for (&j, &m) in levels.iter().zip(&mean) {
        // E_j ~ χ² with 2^{j-1} degrees of freedom
        let count = (1usize << (j - 1)) as f64;
        let sigma = (2.0 * count / seeds as f64).sqrt();
        assert!((m - count).abs() <= 3.0 * sigma, "j = {j}: {m} vs {count} ± {sigma}");
    }
    for w in mean.windows(2) {
        assert!((w[1] / w[0] - 2.0).abs() < 0.5);
    }
}

#[test]
fn classify_examples() {
    let t = Thresholds::default();
    let settings = DiagnosticsSettings::default();
    for n in [128, 256] {
        let g = grid(n, 8.0);
        let r = diagnose(&gaussian_w(g, 2.0, 0.0), &settings).unwrap();
        assert_eq!(r.label, Label::Waveleton, "coherent at {n}: {r:?}");
        let r = diagnose(&cat_w(g, 3.0), &settings).unwrap();
        assert_eq!(r.label, Label::EntangledLike, "cat at {n}: {r:?}");
        let r = diagnose(&mixture_w(g, 3.0), &settings).unwrap();
        assert_eq!(r.label, Label::Decoherent, "mixture at {n}: {r:?}");
    }
    assert_eq!(classify(&record(0.5, 0.25, 0.0, 0.06), &t).unwrap(), Label::Decoherent);
    assert_eq!(classify(&record(0.8, 0.5, 0.02, 0.001), &t).unwrap(), Label::Delocalized);
    assert_eq!(classify(&record(0.8, 0.5, 0.02, 0.02), &t).unwrap(), Label::Unclassified);
}

#[test]
fn classify_errors() {
    let bad = Thresholds { purity_lo: 0.96, ..Thresholds::default() };
    assert!(matches!(classify(&record(1.0, 0.1, 0.0, 0.1), &bad), Err(Error::Config(_))));
    let bad = Thresholds { negativity_hi: f64::NAN, ..Thresholds::default() };
    assert!(classify(&record(1.0, 0.1, 0.0, 0.1), &bad).is_err());
    assert!(classify(&record(f64::NAN, 0.1, 0.0, 0.1), &Thresholds::default()).is_err());
    for l in Label::ALL {
        assert_eq!(Label::from_name(l.name()).unwrap(), l);
    }
    assert!(Label::from_name("chaotic").is_err());
}

#[test]
fn localization_separates_families_and_is_grid_stable() {
    let level = DEFAULT_LOCALIZATION_LEVEL;
    let a = localization(&gaussian_w(grid(128, 8.0), 2.0, 0.0), level).unwrap();
    let b = localization(&gaussian_w(grid(256, 8.0), 2.0, 0.0), level).unwrap();
    assert!((a - b).abs() < 0.01 * a, "{a} vs {b}");
    // a broad flat state spreads over every cell
    let flat = WignerState::from_fn(grid(128, 8.0), 1.0, 1.0, |_, _| 1.0 / 256.0).unwrap();
    let l = localization(&flat, level).unwrap();
    assert!((l - 1.0 / 256.0).abs() < 1e-12);
    assert!(a > localization(&cat_w(grid(128, 8.0), 3.0), level).unwrap());
}

fn field(seed: u64) -> WignerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<(f64, f64, f64)> = (0..3).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0))).collect();
    WignerState::from_fn(grid(64, 8.0), 1.0, 1.0, |q, p| c.iter().map(|&(a, b, w)| w * (-(q - a).powi(2) - (p - b).powi(2)).exp()).sum()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn purity_and_negativity_homogeneity(seed in 0u64..1000, a in 0.1f64..5.0) {
        let w = field(seed);
        let scaled = w.with_values(&w.values * a);
        prop_assert!((purity(&scaled) - a * a * purity(&w)).abs() <= 1e-12 * purity(&scaled).max(1.0));
        prop_assert!((negativity_volume(&scaled) - a * negativity_volume(&w)).abs() <= 1e-12);
        prop_assert!(negativity_volume(&w) >= -1e-12);
    }

    #[test]
    fn expectation_is_linear(s1 in 0u64..1000, s2 in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (w1, w2) = (field(s1), field(s2));
        let obs1 = ObservableSpec::single(PhasePolynomial::default().term(1.0, &[2, 0]).term(0.5, &[1, 1]));
        let obs2 = ObservableSpec::single(PhasePolynomial::default().term(-1.0, &[0, 3]));
        let e = |o: &ObservableSpec, w: &WignerState| expectation(o, &HierarchyState::single(0.0, w.clone())).unwrap();
        let combo = w1.with_values(&w1.values * a + &w2.values * b);
        prop_assert!((e(&obs1, &combo) - a * e(&obs1, &w1) - b * e(&obs1, &w2)).abs() < 1e-9);
        let sum = ObservableSpec::single(PhasePolynomial { terms: [obs1.kernels[0].clone().unwrap().terms, obs2.kernels[0].clone().unwrap().terms].concat() });
        prop_assert!((e(&sum, &w1) - e(&obs1, &w1) - e(&obs2, &w1)).abs() < 1e-9);
    }

    #[test]
    fn scale_spectrum_partitions_energy(values in prop::collection::vec(-10.0f64..10.0, 128), order in 2usize..8) {
        let trace = Array1::from(values).into_dyn();
        let s = scale_spectrum(trace.view(), &WaveletSpec::daubechies(order).unwrap(), 1).unwrap();
        let e: f64 = trace.iter().map(|v| v * v).sum();
        prop_assert!((s.total() - e).abs() <= 1e-10 * e.max(1.0));
    }

    #[test]
    fn raising_negativity_threshold_never_creates_entangled_labels(
        p in 0.0f64..1.0, s in 0.0f64..1.0, n in 0.0f64..0.5, l in 0.0f64..0.5, bump in 0.0f64..0.4
    ) {
        let r = record(p, s, n, l);
        let t = Thresholds::default();
        let raised = Thresholds { negativity_hi: t.negativity_hi + bump, ..t };
        let before = classify(&r, &t).unwrap();
        let after = classify(&r, &raised).unwrap();
        if after == Label::EntangledLike {
            prop_assert_eq!(before, Label::EntangledLike);
        }
        // stored numbers reproduce the label bitwise
        prop_assert_eq!(classify(&r, &t).unwrap(), before);
    }
}
