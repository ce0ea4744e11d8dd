use ndarray::Array2;
use num_complex::Complex64;

use super::grid::PhaseGrid;
use crate::error::{Error, Result};

/// Real quasiprobability density sampled on a [`PhaseGrid`].
///
/// `values[[i, k]]` is W at `(grid.q(i), grid.p(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerState {
    pub grid: PhaseGrid,
    pub values: Array2<f64>,
    pub hbar: f64,
    pub mass: f64,
    pub time: f64,
}

pub(crate) fn check_physical(hbar: f64, mass: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Config(format!("hbar must be positive (got {hbar})")));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Config(format!("mass must be positive (got {mass})")));
    }
    Ok(())
}

impl WignerState {
    pub fn new(grid: PhaseGrid, values: Array2<f64>, hbar: f64, mass: f64, time: f64) -> Result<Self> {
        check_physical(hbar, mass)?;
        if values.dim() != grid.shape() {
            return Err(Error::Dimension(format!(
                "values shape {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("Wigner values must be finite".into()));
        }
        Ok(WignerState { grid, values, hbar, mass, time })
    }

    pub fn zeros(grid: PhaseGrid, hbar: f64, mass: f64) -> Result<Self> {
        Self::new(grid, Array2::zeros(grid.shape()), hbar, mass, 0.0)
    }

    /// Fills the grid from a closure of `(q, p)`.
    pub fn from_fn(grid: PhaseGrid, hbar: f64, mass: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(i, k)| f(grid.q(i), grid.p(k)));
        Self::new(grid, values, hbar, mass, 0.0)
    }

    /// Copy with replaced values; grid and metadata are kept.
    pub fn with_values(&self, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), self.grid.shape());
        WignerState { grid: self.grid, values, hbar: self.hbar, mass: self.mass, time: self.time }
    }

    /// ∬W dq dp.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.cell_measure()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid ℓ² norm `sqrt(μ Σ W²)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_measure()).sqrt()
    }

    /// First moments `(⟨q⟩, ⟨p⟩)` normalised by ∬W.
    pub fn mean(&self) -> (f64, f64) {
        let (mut sq, mut sp, mut s) = (0.0, 0.0, 0.0);
        for ((i, k), &w) in self.values.indexed_iter() {
            sq += self.grid.q(i) * w;
            sp += self.grid.p(k) * w;
            s += w;
        }
        (sq / s, sp / s)
    }

    /// Central second moments `(var q, var p, cov qp)` normalised by ∬W.
    pub fn covariance(&self) -> (f64, f64, f64) {
        let (mq, mp) = self.mean();
        let (mut vq, mut vp, mut c, mut s) = (0.0, 0.0, 0.0, 0.0);
        for ((i, k), &w) in self.values.indexed_iter() {
            let dq = self.grid.q(i) - mq;
            let dp = self.grid.p(k) - mp;
            vq += dq * dq * w;
            vp += dp * dp * w;
            c += dq * dp * w;
            s += w;
        }
        (vq / s, vp / s, c / s)
    }
}

/// Complex wave function sampled on the position axis of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub q_min: f64,
    pub q_max: f64,
    pub values: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(q_min: f64, q_max: f64, values: Vec<Complex64>) -> Result<Self> {
        if q_max <= q_min {
            return Err(Error::Config("wavefunction bounds inverted".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Argument("wavefunction values must be finite".into()));
        }
        Ok(Wavefunction { q_min, q_max, values })
    }

    /// Samples `f(q)` on the position nodes of `grid`.
    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(f64) -> Complex64) -> Self {
        Wavefunction {
            q_min: grid.q_min,
            q_max: grid.q_max,
            values: (0..grid.n_q).map(|i| f(grid.q(i))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.values.len() as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    /// ∫|ψ|² dq.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dq()
    }

    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::Argument("cannot normalize a zero wavefunction".into()));
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(self)
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn matches(&self, grid: &PhaseGrid) -> bool {
        self.values.len() == grid.n_q && self.q_min == grid.q_min && self.q_max == grid.q_max
    }
}
