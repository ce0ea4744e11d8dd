//! Choosing a grid from a dyadic ladder by the refinement cutoff.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::mra::refine_until;
use crate::phasespace::{PhaseGrid, WignerState};

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionChoice {
    /// Index into the ladder.
    pub index: usize,
    pub grid: PhaseGrid,
    /// `residuals[k]` compares ladder entries `k` and `k + 1` on the coarsest grid.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Samples `w` at the nodes of the coarser grid `coarse` (injection).
pub fn restrict(w: &WignerState, coarse: &PhaseGrid) -> Result<Array2<f64>> {
    let k = w
        .grid
        .refinement_of(coarse)
        .ok_or_else(|| Error::Dimension("state grid is not a dyadic refinement of the target grid".into()))?;
    let r = 1usize << k;
    Ok(Array2::from_shape_fn(coarse.shape(), |(i, j)| w.values[[i * r, j * r]]))
}

/// Runs `scenario` on successive ladder grids and returns the first grid
/// whose final state differs from the next one by at most `epsilon` in the
/// measure-weighted ℓ² norm on the coarsest grid.
pub fn select_resolution(
    mut scenario: impl FnMut(&PhaseGrid) -> Result<WignerState>,
    epsilon: f64,
    ladder: &[PhaseGrid],
) -> Result<ResolutionChoice> {
    if ladder.is_empty() {
        return Err(Error::Config("resolution ladder is empty".into()));
    }
    for pair in ladder.windows(2) {
        if !matches!(pair[1].refinement_of(&pair[0]), Some(k) if k >= 1) {
            return Err(Error::Config("resolution ladder must be strictly dyadic over equal bounds".into()));
        }
    }
    let base = ladder[0];
    let make = |idx: usize| -> Result<Array2<f64>> {
        let w = scenario(&ladder[idx])?;
        restrict(&w, &base)
    };
    let mu = base.cell_measure();
    let dist = |a: &Array2<f64>, b: &Array2<f64>| (a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * mu).sqrt();
    let r = refine_until(make, dist, 0, ladder.len() - 1, epsilon)?;
    Ok(ResolutionChoice { index: r.level, grid: ladder[r.level], residuals: r.residuals, converged: r.converged })
}
