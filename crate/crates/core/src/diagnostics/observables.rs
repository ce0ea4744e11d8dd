//! Hierarchy expectation values and the dyadic scale spectrum.

use ndarray::ArrayViewD;

use crate::error::{Error, Result};
use crate::mra::{dwt_forward_to, WaveletSpec};
use crate::phasespace::{HierarchyState, Level};

/// Polynomial in phase-space variables: `Σ c · Π x_i^{e_i}`. For level `s`
/// the variables are `(q₁, p₁, …, q_s, p_s)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhasePolynomial {
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl PhasePolynomial {
    pub fn constant(c: f64, nvars: usize) -> Self {
        PhasePolynomial { terms: vec![(c, vec![0; nvars])] }
    }

    pub fn term(mut self, c: f64, powers: &[u32]) -> Self {
        self.terms.push((c, powers.to_vec()));
        self
    }

    pub fn nvars(&self) -> Option<usize> {
        self.terms.first().map(|t| t.1.len())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }
}

/// `A = (A₀, A₁, A₂)`; missing kernels count as zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSpec {
    pub a0: f64,
    pub kernels: Vec<Option<PhasePolynomial>>,
}

impl ObservableSpec {
    pub fn single(a1: PhasePolynomial) -> Self {
        ObservableSpec { a0: 0.0, kernels: vec![Some(a1)] }
    }

    /// `p²/2m + m ω² q²/2` on level one.
    pub fn harmonic_energy(mass: f64, omega: f64) -> Self {
        Self::single(PhasePolynomial::default().term(0.5 / mass, &[0, 2]).term(0.5 * mass * omega * omega, &[2, 0]))
    }
}

/// `A₀ w₀ + Σ_s (s!)⁻¹ ∫ A_s W_s Π dμ`.
pub fn expectation(a: &ObservableSpec, h: &HierarchyState) -> Result<f64> {
    if a.kernels.len() > h.levels.len() && a.kernels[h.levels.len()..].iter().any(Option::is_some) {
        return Err(Error::Dimension(format!(
            "observable has kernels up to level {} but the hierarchy stops at {}",
            a.kernels.len(),
            h.levels.len()
        )));
    }
    let mut total = a.a0 * h.w0;
    for (kernel, level) in a.kernels.iter().zip(&h.levels) {
        let Some(kernel) = kernel else { continue };
        let s = level.order();
        if kernel.nvars().is_some_and(|n| n != 2 * s) {
            return Err(Error::Dimension(format!("level-{s} kernel must use {} variables", 2 * s)));
        }
        let (sum, measure) = match level {
            Level::One(w) => {
                let g = w.grid;
                let (qs, ps) = (g.q_nodes(), g.p_nodes());
                let sum: f64 = w.values.indexed_iter().map(|((i, k), v)| kernel.eval(&[qs[i], ps[k]]) * v).sum();
                (sum, g.cell_measure())
            }
            Level::Two(w) => {
                let g = w.grid;
                let (qs, ps) = (g.q_nodes(), g.p_nodes());
                let sum: f64 = w
                    .values
                    .indexed_iter()
                    .map(|((i, k, j, l), v)| kernel.eval(&[qs[i], ps[k], qs[j], ps[l]]) * v)
                    .sum();
                (sum, w.cell_measure())
            }
        };
        let fact: f64 = (1..=s).map(|x| x as f64).product();
        total += sum * measure / fact;
    }
    Ok(total)
}

/// Energy per dyadic scale of a field or time trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSpectrum {
    pub coarsest_level: usize,
    /// Energy of the approximation ("slow") block.
    pub approximation: f64,
    /// `(j, E_j)` for `j = i_c + 1 ..= J`.
    pub details: Vec<(usize, f64)>,
}

impl ScaleSpectrum {
    pub fn total(&self) -> f64 {
        self.approximation + self.details.iter().map(|d| d.1).sum::<f64>()
    }

    /// Characteristic frequency `2^j` of each detail scale.
    pub fn frequencies(&self) -> Vec<f64> {
        self.details.iter().map(|&(j, _)| (j as f64).exp2()).collect()
    }
}

pub fn scale_spectrum(field: ArrayViewD<'_, f64>, spec: &WaveletSpec, coarsest: usize) -> Result<ScaleSpectrum> {
    if field.ndim() == 0 {
        return Err(Error::Dimension("scale spectrum needs at least one axis".into()));
    }
    let d = dwt_forward_to(field, spec, coarsest)?;
    let details = d.detail_levels().map(|j| (j, d.detail_energy(j).expect("level in range"))).collect();
    Ok(ScaleSpectrum { coarsest_level: d.coarsest_level, approximation: d.approximation_energy(), details })
}
