//! Explicit stepping of Wigner states.

use ndarray::{ArrayD, ArrayView2, ArrayViewD, Zip};

use super::config::{Compression, EvolveConfig, Integrator, StabilityReport, NORM_DRIFT_TOLERANCE};
use crate::diagnostics::{diagnose, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::moyal::{HamiltonianSpec, MoyalOperator, OpenSystemSpec, SeriesTerms};
use crate::mra::{dwt_forward_to, dwt_inverse};
use crate::phasespace::WignerState;

/// Right-hand side on an n-dimensional field, optionally thresholded in a
/// wavelet basis.
pub(crate) struct Stepper<'a> {
    pub op: &'a MoyalOperator,
    pub particles: &'a [(usize, usize)],
    pub integrator: Integrator,
    pub compression: Option<&'a Compression>,
    /// `(kept, total)` coefficient counts since the last reset.
    pub kept: (usize, usize),
}

impl<'a> Stepper<'a> {
    pub fn new(op: &'a MoyalOperator, particles: &'a [(usize, usize)], integrator: Integrator, compression: Option<&'a Compression>) -> Self {
        Stepper { op, particles, integrator, compression, kept: (0, 0) }
    }

    fn rhs(&mut self, values: ArrayViewD<'_, f64>) -> Result<ArrayD<f64>> {
        let r = self.op.apply_dyn(values, self.particles)?;
        let Some(c) = self.compression else { return Ok(r) };
        let mut d = dwt_forward_to(r.view(), &c.wavelet, c.coarsest_level)?;
        let max = d.coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cut = c.epsilon_c * max;
        let mut kept = 0;
        for v in d.coeffs.iter_mut() {
            if v.abs() < cut {
                *v = 0.0;
            } else {
                kept += 1;
            }
        }
        self.kept.0 += kept;
        self.kept.1 += d.coeffs.len();
        dwt_inverse(&d)
    }

    /// Ratio of total to retained coefficients since the last call.
    pub fn take_ratio(&mut self) -> Option<f64> {
        self.compression?;
        let (k, t) = std::mem::take(&mut self.kept);
        Some(if k == 0 { f64::INFINITY } else { t as f64 / k as f64 })
    }

    pub fn advance(&mut self, y: &ArrayD<f64>, dt: f64) -> Result<ArrayD<f64>> {
        match self.integrator {
            Integrator::Euler => {
                let k1 = self.rhs(y.view())?;
                Ok(y + &(k1 * dt))
            }
            Integrator::Rk4 => {
                let k1 = self.rhs(y.view())?;
                let y2 = axpy(y, 0.5 * dt, &k1);
                let k2 = self.rhs(y2.view())?;
                let y3 = axpy(y, 0.5 * dt, &k2);
                let k3 = self.rhs(y3.view())?;
                let y4 = axpy(y, dt, &k3);
                let k4 = self.rhs(y4.view())?;
                let mut out = y.clone();
                let h = dt / 6.0;
                Zip::from(&mut out).and(&k1).and(&k2).and(&k3).and(&k4).for_each(|o, a, b, c, d| {
                    *o += h * (a + 2.0 * (b + c) + d);
                });
                Ok(out)
            }
        }
    }
}

fn axpy(y: &ArrayD<f64>, a: f64, x: &ArrayD<f64>) -> ArrayD<f64> {
    let mut out = y.clone();
    Zip::from(&mut out).and(x).for_each(|o, v| *o += a * v);
    out
}

pub(crate) fn check_finite(values: &ArrayD<f64>, step: usize, time: f64) -> Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Instability {
            step,
            time,
            detail: format!("non-finite value at flat index {pos}"),
        });
    }
    Ok(())
}

pub(crate) fn operator_for(w: &WignerState, h: &HamiltonianSpec, open: &OpenSystemSpec) -> Result<MoyalOperator> {
    if w.mass != h.mass {
        return Err(Error::Config(format!("state mass {} differs from Hamiltonian mass {}", w.mass, h.mass)));
    }
    MoyalOperator::new(w.grid, h, w.hbar, *open, SeriesTerms::Full)
}

/// One explicit step of `∂W/∂t = moyal_rhs + open_system_rhs`.
pub fn step(w: &WignerState, h: &HamiltonianSpec, open: &OpenSystemSpec, dt: f64, integrator: Integrator) -> Result<WignerState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive (got {dt})")));
    }
    let op = operator_for(w, h, open)?;
    StabilityReport::of(&op, dt).check()?;
    let mut s = Stepper::new(&op, &[(0, 1)], integrator, None);
    let next = s.advance(&w.values.clone().into_dyn(), dt)?;
    check_finite(&next, 1, w.time + dt)?;
    let mut out = w.with_values(next.into_dimensionality().expect("2-d"));
    out.time = w.time + dt;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub state: WignerState,
    /// Total over retained coefficients since the previous snapshot.
    pub compression_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub steps: usize,
    /// Largest `|∬W(t) − ∬W(0)|` seen at any step.
    pub max_norm_drift: f64,
    pub norm_drift_flagged: bool,
}

impl Trajectory {
    pub fn last(&self) -> &WignerState {
        &self.snapshots.last().expect("trajectory holds the initial state").state
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.state.time).collect()
    }
}

/// Called after every step with `(step, time, values)`.
pub type StepObserver<'a> = dyn FnMut(usize, f64, ArrayView2<'_, f64>) -> Result<()> + 'a;

pub fn evolve(w0: &WignerState, h: &HamiltonianSpec, open: &OpenSystemSpec, cfg: &EvolveConfig) -> Result<Trajectory> {
    evolve_observed(w0, h, open, cfg, &mut |_, _, _| Ok(()))
}

/// Like [`evolve`] with the RHS thresholded in the wavelet basis.
pub fn evolve_compressed(w0: &WignerState, h: &HamiltonianSpec, open: &OpenSystemSpec, cfg: &EvolveConfig) -> Result<Trajectory> {
    match &cfg.compression {
        Some(c) if c.epsilon_c >= 0.0 => evolve(w0, h, open, cfg),
        _ => Err(Error::Config("compressed evolution needs a compression section".into())),
    }
}

pub fn evolve_observed(
    w0: &WignerState,
    h: &HamiltonianSpec,
    open: &OpenSystemSpec,
    cfg: &EvolveConfig,
    observer: &mut StepObserver<'_>,
) -> Result<Trajectory> {
    cfg.validate()?;
    let op = operator_for(w0, h, open)?;
    StabilityReport::of(&op, cfg.dt).check()?;
    let mut stepper = Stepper::new(&op, &[(0, 1)], cfg.integrator, cfg.compression.as_ref());
    let n = cfg.steps();
    let norm0 = w0.integral();
    let mu = w0.grid.cell_measure();

    let mut traj = Trajectory { snapshots: Vec::new(), diagnostics: Vec::new(), steps: n, max_norm_drift: 0.0, norm_drift_flagged: false };
    let record = |traj: &mut Trajectory, step: usize, state: WignerState, ratio: Option<f64>| -> Result<()> {
        if let Some(settings) = &cfg.diagnostics {
            traj.diagnostics.push(diagnose(&state, settings)?);
        }
        traj.snapshots.push(Snapshot { step, state, compression_ratio: ratio });
        Ok(())
    };
    let mut start = w0.clone();
    start.time = 0.0;
    record(&mut traj, 0, start, None)?;

    let mut y = w0.values.clone().into_dyn();
    for k in 0..n {
        y = stepper.advance(&y, cfg.step_size(k))?;
        let t = cfg.time_after(k + 1);
        check_finite(&y, k + 1, t)?;
        let drift = (y.sum() * mu - norm0).abs();
        traj.max_norm_drift = traj.max_norm_drift.max(drift);
        let view: ArrayView2<'_, f64> = y.view().into_dimensionality().expect("2-d");
        observer(k + 1, t, view)?;
        if (k + 1) % cfg.snapshot_stride == 0 || k + 1 == n {
            let mut state = w0.with_values(view.to_owned());
            state.time = t;
            let ratio = stepper.take_ratio();
            record(&mut traj, k + 1, state, ratio)?;
        }
    }
    traj.norm_drift_flagged = traj.max_norm_drift > NORM_DRIFT_TOLERANCE * norm0.abs().max(1.0);
    Ok(traj)
}
