//! Independent reference solution: Strang split-operator propagation of the
//! Schrödinger equation, Weyl-transformed at the solver's snapshot times.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use waveleton_core::moyal::HamiltonianSpec;
use waveleton_core::phasespace::{wignerize_with_mass, Wavefunction, WignerState};
use waveleton_core::solver::EvolveConfig;
use waveleton_core::Error;

use crate::config::ScenarioConfig;
use crate::error::RunResult;
use crate::runner::prepare;

/// Split steps per solver step.
pub const ORACLE_SUBSTEPS: usize = 4;

/// Step indices at which the solver records snapshots.
pub fn snapshot_steps(cfg: &EvolveConfig) -> Vec<usize> {
    let n = cfg.steps();
    let mut v: Vec<usize> = (0..=n).step_by(cfg.snapshot_stride).collect();
    if *v.last().expect("step 0 is always present") != n {
        v.push(n);
    }
    v
}

/// Propagates `psi` and returns it at every step listed in `at`.
pub fn split_operator(psi: &Wavefunction, h: &HamiltonianSpec, hbar: f64, cfg: &EvolveConfig, at: &[usize]) -> Vec<Wavefunction> {
    let n = psi.len();
    let length = psi.q_max - psi.q_min;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let k: Vec<f64> = (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * m / length
        })
        .collect();
    let potential: Vec<f64> = (0..n).map(|i| h.potential.eval(psi.q(i))).collect();
    let phases = |dt: f64| -> (Vec<Complex64>, Vec<Complex64>) {
        let half_v = potential.iter().map(|u| Complex64::from_polar(1.0, -u * dt / (2.0 * hbar))).collect();
        let kin = k.iter().map(|k| Complex64::from_polar(1.0 / n as f64, -hbar * k * k * dt / (2.0 * h.mass))).collect();
        (half_v, kin)
    };

    let mut values = psi.values.clone();
    let mut out = Vec::with_capacity(at.len());
    let mut cached: Option<(f64, Vec<Complex64>, Vec<Complex64>)> = None;
    let emit = |values: &[Complex64], out: &mut Vec<Wavefunction>| {
        out.push(Wavefunction { q_min: psi.q_min, q_max: psi.q_max, values: values.to_vec() });
    };
    if at.first() == Some(&0) {
        emit(&values, &mut out);
    }
    for step in 0..cfg.steps() {
        let h_sub = cfg.step_size(step) / ORACLE_SUBSTEPS as f64;
        if cached.as_ref().map(|c| c.0) != Some(h_sub) {
            let (v, t) = phases(h_sub);
            cached = Some((h_sub, v, t));
        }
        let (_, half_v, kin) = cached.as_ref().expect("just set");
        for _ in 0..ORACLE_SUBSTEPS {
            for (x, p) in values.iter_mut().zip(half_v) {
                *x *= p;
            }
            fwd.process(&mut values);
            for (x, p) in values.iter_mut().zip(kin) {
                *x *= p;
            }
            inv.process(&mut values);
            for (x, p) in values.iter_mut().zip(half_v) {
                *x *= p;
            }
        }
        if at.contains(&(step + 1)) {
            emit(&values, &mut out);
        }
    }
    out
}

/// Reference trajectory on the scenario's grid and snapshot times.
pub fn oracle_schrodinger(sc: &ScenarioConfig) -> RunResult<Vec<WignerState>> {
    if sc.hierarchy.is_some() {
        return Err(Error::Unsupported("the oracle propagates single states only".into()).into());
    }
    let run = prepare(sc)?;
    if !run.open.is_closed() {
        return Err(Error::Unsupported("the oracle covers closed systems only (gamma = diffusion = 0)".into()).into());
    }
    let psi = run
        .initial
        .wavefunction()
        .ok_or_else(|| Error::Unsupported("the oracle needs a pure initial state".into()))?;
    let steps = snapshot_steps(&run.evolve);
    let hbar = sc.hamiltonian.hbar;
    split_operator(psi, &run.hamiltonian, hbar, &run.evolve, &steps)
        .iter()
        .zip(&steps)
        .map(|(psi, &s)| {
            let mut w = wignerize_with_mass(psi, &run.grid, hbar, run.hamiltonian.mass)?;
            w.time = run.evolve.time_after(s);
            Ok(w)
        })
        .collect()
}

/// `max|a − b| / max|b|`.
pub fn relative_max_difference(a: &WignerState, b: &WignerState) -> f64 {
    let d = a.values.iter().zip(b.values.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    d / b.max_abs().max(f64::MIN_POSITIVE)
}

