//! Scalar observables of a single Wigner state.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::mra::{best_basis_from_table, PacketBasis, PacketTable, WaveletSpec, DEFAULT_COARSEST_LEVEL};
use crate::phasespace::WignerState;

/// `2πħ ∬ W²`.
pub fn purity(w: &WignerState) -> f64 {
    2.0 * PI * w.hbar * w.grid.cell_measure() * w.values.iter().map(|v| v * v).sum::<f64>()
}

/// `∬ max(−W, 0)`.
pub fn negativity_volume(w: &WignerState) -> f64 {
    w.grid.cell_measure() * w.values.iter().map(|&v| (-v).max(0.0)).sum::<f64>()
}

/// Default partition for [`localization`]: `2^4 × 2^4` coarse cells.
pub const DEFAULT_LOCALIZATION_LEVEL: usize = 4;

/// Inverse participation ratio of `|W|` over a `2^level × 2^level`
/// partition of the box: `Σ_c v_c²` with `v_c = ∫_c |W| / ∬ |W|`.
///
/// The partition is physical (fixed cells of the box), so the value does not
/// drift under grid refinement. Range `[4^{−level}, 1]`; zero for `W ≡ 0`.
pub fn localization(w: &WignerState, level: usize) -> Result<f64> {
    coarse_ipr(&w.values, level)
}

pub(crate) fn coarse_ipr(values: &Array2<f64>, level: usize) -> Result<f64> {
    let (nq, np) = values.dim();
    let cells = 1usize << level;
    if nq % cells != 0 || np % cells != 0 {
        return Err(Error::Dimension(format!("grid {nq}x{np} cannot be split into {cells}x{cells} cells")));
    }
    let (bq, bp) = (nq / cells, np / cells);
    let mut mass = vec![0.0; cells * cells];
    for ((i, k), v) in values.indexed_iter() {
        mass[(i / bq) * cells + k / bp] += v.abs();
    }
    let total: f64 = mass.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(mass.iter().map(|m| (m / total).powi(2)).sum())
}

/// Packet depth used by [`shannon_entropy`] by default: down to an
/// `2^{i_c}`-point approximation on the shorter axis.
pub fn default_packet_depth(w: &WignerState) -> usize {
    let n = w.grid.n_q.min(w.grid.n_p);
    (n.trailing_zeros() as usize).saturating_sub(DEFAULT_COARSEST_LEVEL)
}

/// Shannon entropy of the normalised squared coefficients in the
/// minimum-entropy packet basis, with the basis itself.
pub fn packet_entropy(w: &WignerState, spec: &WaveletSpec, depth: usize) -> Result<(f64, PacketBasis)> {
    let table = PacketTable::build(w.values.view().into_dyn(), spec, depth)?;
    let basis = best_basis_from_table(&table);
    Ok((basis.entropy, basis))
}

pub fn shannon_entropy(w: &WignerState, spec: &WaveletSpec, depth: usize) -> Result<f64> {
    Ok(packet_entropy(w, spec, depth)?.0)
}
