//! The Fock-like norm on hierarchy states.

use crate::phasespace::HierarchyState;

/// `w0² + Σ_s ∫ W_s² Π μ`.
pub fn fock_norm(h: &HierarchyState) -> f64 {
    h.w0 * h.w0 + h.levels.iter().map(|l| l.squared_norm()).sum::<f64>()
}

/// Fock-like distance between two hierarchies with matching levels; levels
/// present in only one of them count in full.
pub fn fock_distance(a: &HierarchyState, b: &HierarchyState) -> f64 {
    use crate::phasespace::Level;
    let mut s = (a.w0 - b.w0).powi(2);
    let n = a.levels.len().max(b.levels.len());
    for idx in 0..n {
        s += match (a.levels.get(idx), b.levels.get(idx)) {
            (Some(Level::One(x)), Some(Level::One(y))) => {
                x.values.iter().zip(y.values.iter()).map(|(u, v)| (u - v).powi(2)).sum::<f64>() * x.grid.cell_measure()
            }
            (Some(Level::Two(x)), Some(Level::Two(y))) => {
                x.values.iter().zip(y.values.iter()).map(|(u, v)| (u - v).powi(2)).sum::<f64>() * x.cell_measure()
            }
            (Some(l), None) | (None, Some(l)) => l.squared_norm(),
            _ => f64::INFINITY,
        };
    }
    s.sqrt()
}
