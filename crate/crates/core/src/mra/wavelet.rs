//! Daubechies orthonormal filters built by spectral factorisation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveletFamily {
    #[default]
    Daubechies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    #[default]
    Periodic,
}

/// Orthonormal compactly supported wavelet with its filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub vanishing_moments: usize,
    pub extension: Extension,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

pub const MIN_MOMENTS: usize = 2;
pub const MAX_MOMENTS: usize = 10;
pub const DEFAULT_MOMENTS: usize = 3;

impl Default for WaveletSpec {
    fn default() -> Self {
        WaveletSpec::daubechies(DEFAULT_MOMENTS).expect("default wavelet")
    }
}

impl WaveletSpec {
    /// Daubechies wavelet with `moments` vanishing moments (`2 * moments` taps).
    pub fn daubechies(moments: usize) -> Result<Self> {
        if !(MIN_MOMENTS..=MAX_MOMENTS).contains(&moments) {
            return Err(Error::Config(format!(
                "vanishing moments must lie in {MIN_MOMENTS}..={MAX_MOMENTS} (got {moments})"
            )));
        }
        let lowpass = daubechies_lowpass(moments);
        let len = lowpass.len();
        // g_n = (−1)^n h_{L−1−n}
        let highpass = (0..len)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * lowpass[len - 1 - n])
            .collect();
        Ok(WaveletSpec {
            family: WaveletFamily::Daubechies,
            vanishing_moments: moments,
            extension: Extension::Periodic,
            lowpass,
            highpass,
        })
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn filter_len(&self) -> usize {
        self.lowpass.len()
    }

    /// Numeric identifier used in dump headers.
    pub fn filter_id(&self) -> u32 {
        self.vanishing_moments as u32
    }

    pub fn from_filter_id(id: u32) -> Result<Self> {
        Self::daubechies(id as usize)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Roots of `Σ c_k x^k` via companion-matrix eigenvalues, polished by Newton.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    eig.iter()
        .map(|&z0| {
            let mut z = Complex64::new(z0.re, z0.im);
            for _ in 0..8 {
                let (mut f, mut df) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for &c in coeffs.iter().rev() {
                    df = df * z + f;
                    f = f * z + c;
                }
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                z -= step;
                if step.norm() < 1e-17 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect()
}

/// Minimum-phase Daubechies lowpass filter, normalised to `Σ h = √2`.
///
/// `|m₀(ξ)|² = cos^{2N}(ξ/2) P(sin²(ξ/2))` with
/// `P(y) = Σ_{k<N} C(N−1+k, k) y^k`; each root `y_k` of `P` contributes the
/// root of `z² − (2 − 4y_k) z + 1` inside the unit circle.
fn daubechies_lowpass(moments: usize) -> Vec<f64> {
    let p: Vec<f64> = (0..moments).map(|k| binomial(moments - 1 + k, k)).collect();
    let y_roots = poly_roots(&p);
    // polynomial in z, lowest power first
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let mul = |poly: &mut Vec<Complex64>, root: Complex64| {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] -= c * root;
            next[i + 1] += c;
        }
        *poly = next;
    };
    for _ in 0..moments {
        mul(&mut poly, Complex64::new(-1.0, 0.0));
    }
    for y in y_roots {
        let b = Complex64::new(1.0, 0.0) - y * 2.0;
        let disc = (b * b - 1.0).sqrt();
        let z1 = b + disc;
        let z2 = b - disc;
        let z = if z1.norm() < 1.0 { z1 } else { z2 };
        mul(&mut poly, z);
    }
    let h: Vec<f64> = poly.iter().map(|c| c.re).collect();
    let s: f64 = h.iter().sum();
    let scale = std::f64::consts::SQRT_2 / s;
    h.into_iter().map(|v| v * scale).collect()
}
