use ndarray::{Array2, Array4, ArrayD, ArrayViewD, IxDyn};

use super::poly::{HamiltonianSpec, OpenSystemSpec};
use super::spectral::{axpy_along, derivatives_along, scale_along, AxisGeometry, DerivativeRequest, PhaseAxis, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::phasespace::{PhaseGrid, WignerState};

/// Which parts of the Moyal series an operator evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesTerms {
    /// Streaming plus every nonvanishing `ℓ`.
    Full,
    /// Streaming plus `ℓ = 0` only (classical Liouville).
    Classical,
    /// The single force term of index `ℓ`, without streaming.
    Single(usize),
    /// No Hamiltonian part; only the open-system generator.
    None,
}

/// `(−1)^ℓ (ħ/2)^{2ℓ} / (2ℓ+1)!`.
pub fn series_coefficient(ell: usize, hbar: f64) -> f64 {
    let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=(2 * ell + 1)).map(|j| j as f64).product();
    sign * (hbar / 2.0).powi(2 * ell as i32) / fact
}

/// Largest wavenumber along `p` a Wigner function built on this `q` axis can
/// carry: the chord `y = ħk` cannot exceed the `q` period.
pub fn chord_band(grid: &PhaseGrid, hbar: f64) -> f64 {
    grid.q_len() / hbar
}

#[derive(Debug, Clone)]
struct ForceTerm {
    ell: usize,
    request: DerivativeRequest,
    /// Coefficient at each `q` node.
    coef: Vec<f64>,
}

/// Right-hand side of the Wigner–Moyal equation for a polynomial Hamiltonian,
/// optionally with the Caldeira–Leggett generator:
///
/// `∂W/∂t = −(p/m) ∂_q W + Σ_ℓ (−1)^ℓ (ħ/2)^{2ℓ}/(2ℓ+1)! U^{(2ℓ+1)}(q) ∂_p^{2ℓ+1} W
///          + 2γ ∂_p(pW) + D ∂²_p W`.
///
/// The sum stops at `ℓ_max = ⌊(d−1)/2⌋`; higher terms vanish identically.
/// Quantum corrections (`ℓ ≥ 1`) act only on `|k_p| ≤ L_q/ħ`, the chord band
/// of the grid; nothing physical lives above it and the high odd multipliers
/// there would otherwise dominate the explicit stability limit.
#[derive(Debug, Clone)]
pub struct MoyalOperator {
    grid: PhaseGrid,
    hbar: f64,
    mass: f64,
    streaming: Option<Vec<f64>>,
    force: Vec<ForceTerm>,
    open: OpenSystemSpec,
    p_nodes: Vec<f64>,
    max_order: usize,
}

impl MoyalOperator {
    pub fn new(grid: PhaseGrid, h: &HamiltonianSpec, hbar: f64, open: OpenSystemSpec, terms: SeriesTerms) -> Result<Self> {
        Self::with_max_order(grid, h, hbar, open, terms, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(
        grid: PhaseGrid,
        h: &HamiltonianSpec,
        hbar: f64,
        open: OpenSystemSpec,
        terms: SeriesTerms,
        max_order: usize,
    ) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive (got {hbar})")));
        }
        let open = OpenSystemSpec::new(open.gamma, open.diffusion)?;
        let streaming = match terms {
            SeriesTerms::Full | SeriesTerms::Classical => {
                Some(grid.p_nodes().into_iter().map(|p| -p / h.mass).collect())
            }
            _ => None,
        };
        let ells: Vec<usize> = match (terms, h.max_moyal_index()) {
            (SeriesTerms::None, _) | (_, None) => Vec::new(),
            (SeriesTerms::Full, Some(lmax)) => (0..=lmax).collect(),
            (SeriesTerms::Classical, Some(_)) => vec![0],
            (SeriesTerms::Single(l), Some(lmax)) => {
                if l <= lmax {
                    vec![l]
                } else {
                    Vec::new()
                }
            }
        };
        let band = chord_band(&grid, hbar);
        let mut force = Vec::new();
        for ell in ells {
            let order = 2 * ell + 1;
            let deriv = h.potential.derivative(order);
            if deriv.is_zero() {
                continue;
            }
            if order > max_order {
                return Err(Error::Resolution(format!(
                    "potential of degree {:?} needs ∂_p^{order}, beyond the safety bound {max_order}",
                    h.potential.degree()
                )));
            }
            let c = series_coefficient(ell, hbar);
            let coef = grid.q_nodes().into_iter().map(|q| c * deriv.eval(q)).collect();
            let request = DerivativeRequest { order, band: (ell > 0).then_some(band) };
            force.push(ForceTerm { ell, request, coef });
        }
        Ok(MoyalOperator {
            grid,
            hbar,
            mass: h.mass,
            streaming,
            force,
            open,
            p_nodes: grid.p_nodes(),
            max_order,
        })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn open(&self) -> OpenSystemSpec {
        self.open
    }

    /// Indices `ℓ` of the force terms that are evaluated.
    pub fn active_terms(&self) -> Vec<usize> {
        self.force.iter().map(|f| f.ell).collect()
    }

    /// Largest rate `|λ|` of the `ℓ ≥ 1` terms on the chord band; bounds the
    /// explicit time step for dispersive corrections.
    pub fn dispersive_rate(&self) -> f64 {
        self.force
            .iter()
            .filter(|f| f.ell > 0)
            .map(|f| {
                let cmax = f.coef.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                let kmax = (std::f64::consts::PI / self.grid.dp()).min(f.request.band.unwrap_or(f64::INFINITY));
                cmax * kmax.powi(f.request.order as i32)
            })
            .sum()
    }

    /// Largest `|U'(q)|` over the grid (the ℓ = 0 force speed along `p`).
    pub fn max_force(&self) -> f64 {
        self.force
            .iter()
            .find(|f| f.ell == 0)
            .map(|f| f.coef.iter().fold(0.0f64, |m, c| m.max(c.abs())))
            .unwrap_or(0.0)
    }

    /// Applies the operator to a field whose particle `i` occupies axes
    /// `particles[i] = (q_axis, p_axis)`.
    pub fn apply_dyn(&self, values: ArrayViewD<'_, f64>, particles: &[(usize, usize)]) -> Result<ArrayD<f64>> {
        let shape = values.shape().to_vec();
        for &(qa, pa) in particles {
            if qa >= shape.len() || pa >= shape.len() || shape[qa] != self.grid.n_q || shape[pa] != self.grid.n_p {
                return Err(Error::Dimension(format!("field shape {shape:?} does not match operator grid")));
            }
        }
        let mut out = vec![0.0; values.len()];
        let gq = AxisGeometry::of(&self.grid, PhaseAxis::Q);
        let gp = AxisGeometry::of(&self.grid, PhaseAxis::P);
        for &(qa, pa) in particles {
            if let Some(stream) = &self.streaming {
                let d = derivatives_along(values.view(), qa, gq, &[DerivativeRequest::order(1)], self.max_order)?;
                axpy_along(&mut out, d[0].as_slice().unwrap(), &shape, pa, stream);
            }
            let mut requests: Vec<DerivativeRequest> = self.force.iter().map(|f| f.request).collect();
            if self.open.diffusion > 0.0 {
                requests.push(DerivativeRequest::order(2));
            }
            if !requests.is_empty() {
                let d = derivatives_along(values.view(), pa, gp, &requests, self.max_order)?;
                for (term, dd) in self.force.iter().zip(&d) {
                    axpy_along(&mut out, dd.as_slice().unwrap(), &shape, qa, &term.coef);
                }
                if self.open.diffusion > 0.0 {
                    let dd = d.last().unwrap();
                    for (o, v) in out.iter_mut().zip(dd.iter()) {
                        *o += self.open.diffusion * v;
                    }
                }
            }
            if self.open.gamma > 0.0 {
                let mut pw: Vec<f64> = values.as_standard_layout().iter().copied().collect();
                scale_along(&mut pw, &shape, pa, &self.p_nodes);
                let pw = ArrayD::from_shape_vec(IxDyn(&shape), pw).expect("shape");
                let d = derivatives_along(pw.view(), pa, gp, &[DerivativeRequest::order(1)], self.max_order)?;
                let g2 = 2.0 * self.open.gamma;
                for (o, v) in out.iter_mut().zip(d[0].iter()) {
                    *o += g2 * v;
                }
            }
        }
        Ok(ArrayD::from_shape_vec(IxDyn(&shape), out).expect("shape"))
    }

    pub fn apply(&self, values: &Array2<f64>) -> Result<Array2<f64>> {
        Ok(self.apply_dyn(values.view().into_dyn(), &[(0, 1)])?.into_dimensionality().expect("2-d"))
    }

    /// Two-particle field `(q₁, p₁, q₂, p₂)`: sum of the one-particle operators.
    pub fn apply_pair(&self, values: &Array4<f64>) -> Result<Array4<f64>> {
        Ok(self
            .apply_dyn(values.view().into_dyn(), &[(0, 1), (2, 3)])?
            .into_dimensionality()
            .expect("4-d"))
    }
}

fn check_state(w: &WignerState, h: &HamiltonianSpec) -> Result<()> {
    if w.mass != h.mass {
        return Err(Error::Config(format!("state mass {} differs from Hamiltonian mass {}", w.mass, h.mass)));
    }
    Ok(())
}

/// Full truncated Moyal right-hand side of a closed system.
pub fn moyal_rhs(w: &WignerState, h: &HamiltonianSpec) -> Result<Array2<f64>> {
    check_state(w, h)?;
    MoyalOperator::new(w.grid, h, w.hbar, OpenSystemSpec::closed(), SeriesTerms::Full)?.apply(&w.values)
}

/// Moyal right-hand side restricted to `ℓ = 0`.
pub fn classical_liouville_rhs(w: &WignerState, h: &HamiltonianSpec) -> Result<Array2<f64>> {
    check_state(w, h)?;
    MoyalOperator::new(w.grid, h, w.hbar, OpenSystemSpec::closed(), SeriesTerms::Classical)?.apply(&w.values)
}

/// The `ℓ`-th force term alone; identically zero for `ℓ > ℓ_max`.
pub fn moyal_term(w: &WignerState, h: &HamiltonianSpec, ell: usize) -> Result<Array2<f64>> {
    check_state(w, h)?;
    MoyalOperator::new(w.grid, h, w.hbar, OpenSystemSpec::closed(), SeriesTerms::Single(ell))?.apply(&w.values)
}

/// `2γ ∂_p(pW) + D ∂²_p W`.
pub fn open_system_rhs(w: &WignerState, spec: &OpenSystemSpec) -> Result<Array2<f64>> {
    let h = HamiltonianSpec::free(w.mass);
    MoyalOperator::new(w.grid, &h, w.hbar, *spec, SeriesTerms::None)?.apply(&w.values)
}
