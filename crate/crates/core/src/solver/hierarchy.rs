//! Evolution of `{W₀, W₁, W₂}`: every level under its own Moyal operator.

use ndarray::ArrayD;

use super::config::{EvolveConfig, StabilityReport};
use super::evolve::{check_finite, operator_for, Stepper};
use crate::error::{Error, Result};
use crate::moyal::{HamiltonianSpec, MoyalOperator, OpenSystemSpec, SeriesTerms};
use crate::mra::fock_norm;
use crate::phasespace::{HierarchyState, Level, PairState};

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchySnapshot {
    pub step: usize,
    pub time: f64,
    pub state: HierarchyState,
    pub fock_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyTrajectory {
    pub snapshots: Vec<HierarchySnapshot>,
    pub steps: usize,
}

impl HierarchyTrajectory {
    pub fn last(&self) -> &HierarchySnapshot {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    /// `max_t |‖W(t)‖_F − ‖W(0)‖_F| / ‖W(0)‖_F` over snapshots.
    pub fn fock_norm_drift(&self) -> f64 {
        let f0 = self.snapshots[0].fock_norm;
        self.snapshots.iter().map(|s| (s.fock_norm - f0).abs()).fold(0.0, f64::max) / f0.abs().max(f64::MIN_POSITIVE)
    }
}

fn pair_operator(w: &PairState, h: &HamiltonianSpec, open: &OpenSystemSpec) -> Result<MoyalOperator> {
    if w.mass != h.mass {
        return Err(Error::Config(format!("pair mass {} differs from Hamiltonian mass {}", w.mass, h.mass)));
    }
    MoyalOperator::new(w.grid, h, w.hbar, *open, SeriesTerms::Full)
}

const ONE: [(usize, usize); 1] = [(0, 1)];
const TWO: [(usize, usize); 2] = [(0, 1), (2, 3)];

/// Evolves every level independently; `potentials[s − 1]` drives `W_s`.
/// A pair level evolves under the sum of the one-particle operators.
pub fn evolve_hierarchy(
    h0: &HierarchyState,
    potentials: &[HamiltonianSpec],
    open: &OpenSystemSpec,
    cfg: &EvolveConfig,
) -> Result<HierarchyTrajectory> {
    cfg.validate()?;
    if cfg.compression.is_some() {
        return Err(Error::Unsupported("compressed stepping of hierarchy levels".into()));
    }
    if potentials.len() != h0.levels.len() {
        return Err(Error::Dimension(format!(
            "{} potentials given for {} hierarchy levels",
            potentials.len(),
            h0.levels.len()
        )));
    }
    let ops: Vec<MoyalOperator> = h0
        .levels
        .iter()
        .zip(potentials)
        .map(|(level, h)| match level {
            Level::One(w) => operator_for(w, h, open),
            Level::Two(w) => pair_operator(w, h, open),
        })
        .collect::<Result<_>>()?;
    for op in &ops {
        StabilityReport::of(op, cfg.dt).check()?;
    }
    let mut steppers: Vec<Stepper<'_>> = h0
        .levels
        .iter()
        .zip(&ops)
        .map(|(level, op)| {
            let particles: &[(usize, usize)] = match level {
                Level::One(_) => &ONE,
                Level::Two(_) => &TWO,
            };
            Stepper::new(op, particles, cfg.integrator, None)
        })
        .collect();

    let n = cfg.steps();
    let snapshot = |step: usize, time: f64, state: HierarchyState| HierarchySnapshot { step, time, fock_norm: fock_norm(&state), state };
    let mut state = h0.clone();
    for level in state.levels.iter_mut() {
        set_time(level, 0.0);
    }
    let mut traj = HierarchyTrajectory { snapshots: vec![snapshot(0, 0.0, state.clone())], steps: n };
    let mut fields: Vec<ArrayD<f64>> = h0
        .levels
        .iter()
        .map(|l| match l {
            Level::One(w) => w.values.clone().into_dyn(),
            Level::Two(w) => w.values.clone().into_dyn(),
        })
        .collect();
    for k in 0..n {
        let dt = cfg.step_size(k);
        let t = cfg.time_after(k + 1);
        for (field, stepper) in fields.iter_mut().zip(steppers.iter_mut()) {
            *field = stepper.advance(field, dt)?;
            check_finite(field, k + 1, t)?;
        }
        if (k + 1) % cfg.snapshot_stride == 0 || k + 1 == n {
            for (level, field) in state.levels.iter_mut().zip(&fields) {
                match level {
                    Level::One(w) => w.values = field.view().into_dimensionality().expect("2-d").to_owned(),
                    Level::Two(w) => w.values = field.view().into_dimensionality().expect("4-d").to_owned(),
                }
                set_time(level, t);
            }
            traj.snapshots.push(snapshot(k + 1, t, state.clone()));
        }
    }
    Ok(traj)
}

fn set_time(level: &mut Level, t: f64) {
    match level {
        Level::One(w) => w.time = t,
        Level::Two(w) => w.time = t,
    }
}
