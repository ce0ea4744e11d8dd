use ndarray::Array4;

use super::grid::{PhaseGrid, MIN_AXIS_LEN};
use super::state::{check_physical, WignerState};
use crate::error::{Error, Result};

/// Default per-axis size of the pair (s = 2) grid.
pub const PAIR_GRID_LEN: usize = 32;

/// Two-particle Wigner function `W₂(q₁,p₁,q₂,p₂)`; both particles share `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub grid: PhaseGrid,
    pub values: Array4<f64>,
    pub hbar: f64,
    pub mass: f64,
    pub time: f64,
}

impl PairState {
    pub fn new(grid: PhaseGrid, values: Array4<f64>, hbar: f64, mass: f64, time: f64) -> Result<Self> {
        check_physical(hbar, mass)?;
        let want = (grid.n_q, grid.n_p, grid.n_q, grid.n_p);
        if values.dim() != want {
            return Err(Error::Dimension(format!("pair values {:?} do not match grid {:?}", values.dim(), want)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("pair values must be finite".into()));
        }
        Ok(PairState { grid, values, hbar, mass, time })
    }

    /// `W₂ = W(x₁) W(x₂)`.
    pub fn product(a: &WignerState, b: &WignerState) -> Result<Self> {
        if a.grid != b.grid || a.hbar != b.hbar || a.mass != b.mass {
            return Err(Error::Dimension("product state factors must share grid and metadata".into()));
        }
        let (nq, np) = a.grid.shape();
        let values = Array4::from_shape_fn((nq, np, nq, np), |(i, k, j, l)| a.values[[i, k]] * b.values[[j, l]]);
        Self::new(a.grid, values, a.hbar, a.mass, a.time)
    }

    /// Measure of one pair cell, `(dq dp)²`.
    pub fn cell_measure(&self) -> f64 {
        self.grid.cell_measure().powi(2)
    }

    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_measure()
    }
}

/// One level `W_s` of the hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub enum Level {
    One(WignerState),
    Two(PairState),
}

impl Level {
    pub fn order(&self) -> usize {
        match self {
            Level::One(_) => 1,
            Level::Two(_) => 2,
        }
    }

    /// `∫ W_s² Π μ`.
    pub fn squared_norm(&self) -> f64 {
        match self {
            Level::One(w) => w.values.iter().map(|v| v * v).sum::<f64>() * w.grid.cell_measure(),
            Level::Two(w) => w.values.iter().map(|v| v * v).sum::<f64>() * w.cell_measure(),
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Level::One(w) => w.time,
            Level::Two(w) => w.time,
        }
    }
}

/// The set `{W₀, W₁, W₂}`; `levels[s - 1]` holds `W_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyState {
    pub w0: f64,
    pub levels: Vec<Level>,
}

/// Highest supported hierarchy order.
pub const MAX_LEVEL: usize = 2;

impl HierarchyState {
    pub fn new(w0: f64, levels: Vec<Level>) -> Result<Self> {
        if !w0.is_finite() {
            return Err(Error::Argument("w0 must be finite".into()));
        }
        if levels.len() > MAX_LEVEL {
            return Err(Error::Dimension(format!("at most {MAX_LEVEL} hierarchy levels are supported")));
        }
        for (idx, level) in levels.iter().enumerate() {
            if level.order() != idx + 1 {
                return Err(Error::Dimension(format!(
                    "hierarchy slot {} holds a level of order {}",
                    idx + 1,
                    level.order()
                )));
            }
        }
        Ok(HierarchyState { w0, levels })
    }

    pub fn single(w0: f64, w1: WignerState) -> Self {
        HierarchyState { w0, levels: vec![Level::One(w1)] }
    }

    pub fn level_one(&self) -> Option<&WignerState> {
        match self.levels.first() {
            Some(Level::One(w)) => Some(w),
            _ => None,
        }
    }

    pub fn level_two(&self) -> Option<&PairState> {
        match self.levels.get(1) {
            Some(Level::Two(w)) => Some(w),
            _ => None,
        }
    }
}

/// Builds a coarse single-particle grid for pair levels (axis length may go
/// below the usual 16-point minimum down to 8).
pub fn pair_grid(n: usize, q_bounds: (f64, f64), p_bounds: (f64, f64), boundary: super::grid::Boundary) -> Result<PhaseGrid> {
    PhaseGrid::with_min_size(n, n, q_bounds, p_bounds, boundary, MIN_AXIS_LEN / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::grid::{make_grid, Boundary};

    #[test]
    fn level_order_is_checked() {
        let g = make_grid(16, 16, (-4.0, 4.0), (-4.0, 4.0), Boundary::Periodic).unwrap();
        let w = WignerState::zeros(g, 1.0, 1.0).unwrap();
        let pair = PairState::product(&w, &w).unwrap();
        assert!(HierarchyState::new(1.0, vec![Level::Two(pair.clone())]).is_err());
        assert!(HierarchyState::new(1.0, vec![Level::One(w.clone()), Level::Two(pair)]).is_ok());
        assert!(HierarchyState::new(1.0, vec![Level::One(w.clone()), Level::One(w)]).is_err());
    }
}
