//! Phase-space grids, Wigner states and the Weyl transform.

mod grid;
mod hierarchy;
mod library;
mod state;
mod wigner;

pub use grid::{make_grid, Boundary, PhaseGrid, MIN_AXIS_LEN};
pub use hierarchy::{pair_grid, HierarchyState, Level, PairState, MAX_LEVEL, PAIR_GRID_LEN};
pub use library::{initial_state_library, InitialState, StatePreset};
pub use state::{Wavefunction, WignerState};
pub use wigner::{chord_nyquist, marginals, overlap, wignerize, wignerize_with_mass};
