//! The `‖W^{N+1} − W^N‖ ≤ ε` cutoff search.

use crate::error::{Error, Result};

/// Result of [`refine_until`].
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement<T> {
    /// Selected level.
    pub level: usize,
    /// State built at `level`.
    pub state: T,
    /// `residuals[k] = ‖W^{c+k+1} − W^{c+k}‖` for every pair examined.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Builds states at levels `coarsest, coarsest + 1, …` and returns the first
/// `N` with `‖W^{N+1} − W^N‖ ≤ ε`. If no level up to `n_max − 1` qualifies,
/// `n_max` is returned with `converged = false`. A zero `ε` never converges.
pub fn refine_until<T>(
    mut make: impl FnMut(usize) -> Result<T>,
    distance: impl Fn(&T, &T) -> f64,
    coarsest: usize,
    n_max: usize,
    epsilon: f64,
) -> Result<Refinement<T>> {
    if !(epsilon >= 0.0) {
        return Err(Error::Argument(format!("epsilon must be nonnegative (got {epsilon})")));
    }
    if n_max < coarsest {
        return Err(Error::Argument(format!("n_max {n_max} is below the coarsest level {coarsest}")));
    }
    let mut residuals = Vec::new();
    let mut current = make(coarsest)?;
    for level in coarsest..n_max {
        let next = make(level + 1)?;
        let r = distance(&next, &current);
        residuals.push(r);
        if epsilon > 0.0 && r <= epsilon {
            return Ok(Refinement { level, state: current, residuals, converged: true });
        }
        current = next;
    }
    Ok(Refinement { level: n_max, state: current, residuals, converged: false })
}

/// Plain ℓ² distance between equally shaped arrays.
pub fn l2_distance(a: &ndarray::ArrayD<f64>, b: &ndarray::ArrayD<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
