//! Time-stepping configuration and the explicit stability bounds.

use std::f64::consts::PI;

use crate::diagnostics::DiagnosticsSettings;
use crate::error::{Error, Result};
use crate::moyal::MoyalOperator;
use crate::mra::{WaveletSpec, DEFAULT_COARSEST_LEVEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Rk4,
    Euler,
}

impl Integrator {
    pub fn name(self) -> &'static str {
        match self {
            Integrator::Rk4 => "rk4",
            Integrator::Euler => "euler",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "rk4" => Ok(Integrator::Rk4),
            "euler" => Ok(Integrator::Euler),
            other => Err(Error::Config(format!("unknown integrator '{other}' (expected rk4 or euler)"))),
        }
    }
}

/// Wavelet thresholding of every right-hand-side evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Compression {
    /// Coefficients below `epsilon_c · max|c|` are dropped.
    pub epsilon_c: f64,
    pub wavelet: WaveletSpec,
    pub coarsest_level: usize,
}

impl Compression {
    pub fn new(epsilon_c: f64) -> Self {
        Compression { epsilon_c, wavelet: WaveletSpec::default(), coarsest_level: DEFAULT_COARSEST_LEVEL }
    }
}

/// Bound on `dt · max|p| / (m Δq)` and `dt · max|U'| / Δp`.
pub const ADVECTIVE_LIMIT: f64 = 0.5;
/// Bound on `dt` times the summed spectral radius of all terms; RK4's
/// stability region reaches about 2.8 along both the real and imaginary axes.
pub const SPECTRAL_LIMIT: f64 = 2.5;
/// Relative mass drift beyond which a run is flagged.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub compression: Option<Compression>,
    pub snapshot_stride: usize,
    /// ε for resolution selection across grid levels.
    pub resolution_epsilon: Option<f64>,
    /// Record diagnostics at each snapshot when set.
    pub diagnostics: Option<DiagnosticsSettings>,
}

impl EvolveConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        EvolveConfig {
            dt,
            t_final,
            integrator: Integrator::Rk4,
            compression: None,
            snapshot_stride: 1,
            resolution_epsilon: None,
            diagnostics: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive (got {})", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive (got {})", self.t_final)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot_stride must be at least 1".into()));
        }
        if let Some(c) = &self.compression {
            if !(c.epsilon_c >= 0.0 && c.epsilon_c.is_finite()) {
                return Err(Error::Config(format!("compression epsilon must be nonnegative (got {})", c.epsilon_c)));
            }
        }
        if let Some(e) = self.resolution_epsilon {
            if !(e >= 0.0) {
                return Err(Error::Config(format!("resolution epsilon must be nonnegative (got {e})")));
            }
        }
        if let Some(d) = &self.diagnostics {
            d.thresholds.validate()?;
        }
        Ok(())
    }

    /// Number of steps; the last step is shortened to land on `t_final`.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// Size of step `k` (zero-based).
    pub fn step_size(&self, k: usize) -> f64 {
        let n = self.steps();
        if k + 1 < n {
            self.dt
        } else {
            self.t_final - (n - 1) as f64 * self.dt
        }
    }

    /// Time after `k` steps.
    pub fn time_after(&self, k: usize) -> f64 {
        if k >= self.steps() {
            self.t_final
        } else {
            k as f64 * self.dt
        }
    }
}

/// `dt` times each rate that limits an explicit step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `dt · max|p| / (m Δq)`.
    pub advective_q: f64,
    /// `dt · max|U'| / Δp`.
    pub advective_p: f64,
    /// `dt` times the sum of the spectral radii of every term.
    pub spectral: f64,
}

impl StabilityReport {
    pub fn of(op: &MoyalOperator, dt: f64) -> Self {
        let g = op.grid();
        let max_p = g.max_abs_p();
        let kq = PI / g.dq();
        let kp = PI / g.dp();
        let open = op.open();
        let streaming = max_p / op.mass() * kq;
        let force = op.max_force() * kp;
        let friction = 2.0 * open.gamma * (max_p * kp + 1.0);
        let diffusion = open.diffusion * kp * kp;
        StabilityReport {
            advective_q: dt * max_p / (op.mass() * g.dq()),
            advective_p: dt * op.max_force() / g.dp(),
            spectral: dt * (streaming + force + op.dispersive_rate() + friction + diffusion),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.advective_q > ADVECTIVE_LIMIT {
            return Err(Error::Cfl(format!(
                "dt*max|p|/(m*dq) = {:.4} exceeds {ADVECTIVE_LIMIT}",
                self.advective_q
            )));
        }
        if self.advective_p > ADVECTIVE_LIMIT {
            return Err(Error::Cfl(format!("dt*max|U'|/dp = {:.4} exceeds {ADVECTIVE_LIMIT}", self.advective_p)));
        }
        if self.spectral > SPECTRAL_LIMIT {
            return Err(Error::Cfl(format!(
                "dt times the spectral radius of the right-hand side = {:.4} exceeds {SPECTRAL_LIMIT}",
                self.spectral
            )));
        }
        Ok(())
    }
}
