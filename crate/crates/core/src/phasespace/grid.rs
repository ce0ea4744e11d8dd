use crate::error::{Error, Result};

/// Treatment of the domain edges along both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Both axes wrap around.
    #[default]
    Periodic,
    /// Fields are zero-padded by one grid width before spectral operations.
    DecayPadded,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::DecayPadded => "decay-padded",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "periodic" => Ok(Boundary::Periodic),
            "decay-padded" | "decay_padded" => Ok(Boundary::DecayPadded),
            other => Err(Error::Config(format!("unknown boundary '{other}'"))),
        }
    }
}

/// Uniform rectangular phase-space grid.
///
/// Nodes sit at `q_min + i * dq` for `i in 0..n_q` (the upper bound is the
/// periodic image of the lower one), and likewise for `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub n_q: usize,
    pub n_p: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub boundary: Boundary,
}

/// Smallest axis length accepted by [`make_grid`].
pub const MIN_AXIS_LEN: usize = 16;

pub(crate) fn check_axis(n: usize, what: &str, min: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::Config(format!("{what}: size must be power of two (got {n})")));
    }
    if n < min {
        return Err(Error::Config(format!("{what}: size must be at least {min} (got {n})")));
    }
    Ok(())
}

fn check_bounds(lo: f64, hi: f64, what: &str) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config(format!("{what}: bounds must be finite")));
    }
    if hi <= lo {
        return Err(Error::Config(format!("{what}: bounds inverted ({lo} >= {hi})")));
    }
    Ok(())
}

/// Builds a validated grid. Sizes must be powers of two, at least 16.
pub fn make_grid(
    n_q: usize,
    n_p: usize,
    q_bounds: (f64, f64),
    p_bounds: (f64, f64),
    boundary: Boundary,
) -> Result<PhaseGrid> {
    PhaseGrid::with_min_size(n_q, n_p, q_bounds, p_bounds, boundary, MIN_AXIS_LEN)
}

impl PhaseGrid {
    /// Like [`make_grid`] with a custom lower limit on the axis length; used
    /// for the coarse pair grids of the hierarchy.
    pub fn with_min_size(
        n_q: usize,
        n_p: usize,
        q_bounds: (f64, f64),
        p_bounds: (f64, f64),
        boundary: Boundary,
        min_len: usize,
    ) -> Result<Self> {
        check_axis(n_q, "n_q", min_len.max(2))?;
        check_axis(n_p, "n_p", min_len.max(2))?;
        check_bounds(q_bounds.0, q_bounds.1, "q")?;
        check_bounds(p_bounds.0, p_bounds.1, "p")?;
        let grid = PhaseGrid {
            n_q,
            n_p,
            q_min: q_bounds.0,
            q_max: q_bounds.1,
            p_min: p_bounds.0,
            p_max: p_bounds.1,
            boundary,
        };
        if !(grid.cell_measure() > 0.0) {
            return Err(Error::Config("cell measure must be positive".into()));
        }
        Ok(grid)
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n_q as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n_p as f64
    }

    pub fn q_len(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn p_len(&self) -> f64 {
        self.p_max - self.p_min
    }

    /// Cell measure `dq * dp`.
    pub fn cell_measure(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    pub fn p(&self, k: usize) -> f64 {
        self.p_min + k as f64 * self.dp()
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        (0..self.n_q).map(|i| self.q(i)).collect()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        (0..self.n_p).map(|k| self.p(k)).collect()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_q, self.n_p)
    }

    /// Largest |p| over the grid nodes.
    pub fn max_abs_p(&self) -> f64 {
        self.p_min.abs().max(self.p(self.n_p - 1).abs())
    }

    /// Largest |q| over the grid nodes.
    pub fn max_abs_q(&self) -> f64 {
        self.q_min.abs().max(self.q(self.n_q - 1).abs())
    }

    /// True when `other` is this grid refined by `2^k` on both axes over the
    /// same bounds; returns the refinement exponent.
    pub fn refinement_of(&self, other: &PhaseGrid) -> Option<u32> {
        if self.q_min != other.q_min
            || self.q_max != other.q_max
            || self.p_min != other.p_min
            || self.p_max != other.p_max
            || self.boundary != other.boundary
            || other.n_q > self.n_q
            || other.n_p > self.n_p
        {
            return None;
        }
        let rq = self.n_q / other.n_q;
        let rp = self.n_p / other.n_p;
        if rq != rp || rq * other.n_q != self.n_q || !rq.is_power_of_two() {
            return None;
        }
        Some(rq.trailing_zeros())
    }

    /// True when both grids describe the same nodes.
    pub fn same_nodes(&self, other: &PhaseGrid) -> bool {
        self == other
    }
}
