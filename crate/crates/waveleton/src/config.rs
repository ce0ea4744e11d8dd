//! Scenario files: sectioned TOML with a default for every optional field.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use waveleton_core::diagnostics::{DiagnosticsSettings, Thresholds};
use waveleton_core::moyal::{HamiltonianSpec, OpenSystemSpec, Polynomial};
use waveleton_core::mra::{WaveletSpec, DEFAULT_COARSEST_LEVEL, DEFAULT_MOMENTS};
use waveleton_core::phasespace::{make_grid, Boundary, PhaseGrid};
use waveleton_core::solver::{Compression, EvolveConfig, Integrator};

use crate::error::{RunError, RunResult};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Run directory name under the output root.
    #[serde(default = "default_name")]
    pub name: String,
    /// Recorded in the manifest; no stochastic feature consumes it yet.
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub hamiltonian: HamiltonianSection,
    pub initial_state: InitialStateSection,
    #[serde(default)]
    pub open_system: OpenSystemSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<HierarchySection>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_q: usize,
    pub n_p: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// `periodic` or `decay_padded`.
    #[serde(default = "default_boundary")]
    pub boundary: String,
}

fn default_boundary() -> String {
    Boundary::Periodic.name().into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    /// Coefficients `c_k` of `U(q) = Σ c_k q^k`, lowest order first.
    #[serde(default)]
    pub potential: Vec<f64>,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSection {
    /// A preset name (`coherent`, `squeezed`, `cat`, `thermal`) or
    /// `wavefunction` together with `file`.
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// CSV with columns `q, re, im` on the grid's position nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSystemSection {
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub diffusion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    /// Omitted: half the largest stable step, rounded so steps land on `t_final`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub t_final: f64,
    #[serde(default = "default_integrator")]
    pub integrator: String,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Enables right-hand-side thresholding at this relative level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compression: Option<f64>,
    #[serde(default = "default_moments")]
    pub compression_moments: usize,
    /// Cutoff ε of the scale refinement of the final state, also used for
    /// the resolution ladder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Grid sizes (same bounds) tried coarse to fine before the main run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolution_ladder: Vec<usize>,
}

fn default_integrator() -> String {
    Integrator::Rk4.name().into()
}

fn default_stride() -> usize {
    10
}

fn default_moments() -> usize {
    DEFAULT_MOMENTS
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection {
            dt: None,
            t_final: 1.0,
            integrator: default_integrator(),
            snapshot_stride: default_stride(),
            compression: None,
            compression_moments: DEFAULT_MOMENTS,
            epsilon: None,
            resolution_ladder: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsSection {
    pub localization_hi: f64,
    pub localization_lo: f64,
    pub entropy_lo: f64,
    pub entropy_hi: f64,
    pub purity_hi: f64,
    pub purity_lo: f64,
    pub negativity_hi: f64,
    pub negativity_lo: f64,
}

impl Default for ThresholdsSection {
    fn default() -> Self {
        Thresholds::default().into()
    }
}

impl From<Thresholds> for ThresholdsSection {
    fn from(t: Thresholds) -> Self {
        ThresholdsSection {
            localization_hi: t.localization_hi,
            localization_lo: t.localization_lo,
            entropy_lo: t.entropy_lo,
            entropy_hi: t.entropy_hi,
            purity_hi: t.purity_hi,
            purity_lo: t.purity_lo,
            negativity_hi: t.negativity_hi,
            negativity_lo: t.negativity_lo,
        }
    }
}

impl From<&ThresholdsSection> for Thresholds {
    fn from(t: &ThresholdsSection) -> Self {
        Thresholds {
            localization_hi: t.localization_hi,
            localization_lo: t.localization_lo,
            entropy_lo: t.entropy_lo,
            entropy_hi: t.entropy_hi,
            purity_hi: t.purity_hi,
            purity_lo: t.purity_lo,
            negativity_hi: t.negativity_hi,
            negativity_lo: t.negativity_lo,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Vanishing moments of the Daubechies wavelet used for entropy,
    /// scale spectra, dumps and the refinement cutoff.
    #[serde(default = "default_moments")]
    pub wavelet_moments: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_depth: Option<usize>,
    #[serde(default = "default_localization_level")]
    pub localization_level: usize,
    #[serde(default = "default_coarsest")]
    pub coarsest_level: usize,
    #[serde(default)]
    pub thresholds: ThresholdsSection,
}

fn default_localization_level() -> usize {
    waveleton_core::diagnostics::DEFAULT_LOCALIZATION_LEVEL
}

fn default_coarsest() -> usize {
    DEFAULT_COARSEST_LEVEL
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            wavelet_moments: DEFAULT_MOMENTS,
            packet_depth: None,
            localization_level: default_localization_level(),
            coarsest_level: DEFAULT_COARSEST_LEVEL,
            thresholds: ThresholdsSection::default(),
        }
    }
}

/// Snapshot formats besides the always-written `wigr` dumps.
pub const FORMATS: [&str; 4] = ["wigr", "mrad", "csv", "ppm"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output root; `--output-dir` and `WAVELETON_OUTPUT_DIR` take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["wigr".into()]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: None, formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchySection {
    #[serde(default = "one")]
    pub w0: f64,
    /// Adds `W₂ = W₁ ⊗ W₁` on a coarse pair grid.
    #[serde(default)]
    pub pair: bool,
    #[serde(default = "default_pair_n")]
    pub pair_n: usize,
    /// Pair-level potential; defaults to the main one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_potential: Option<Vec<f64>>,
}

fn default_pair_n() -> usize {
    waveleton_core::phasespace::PAIR_GRID_LEN
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> RunResult<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| RunError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn load(path: &std::path::Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked without building states.
    pub fn validate(&self) -> RunResult<()> {
        self.phase_grid()?;
        self.hamiltonian()?;
        self.open_system()?;
        self.thresholds().validate()?;
        self.wavelet()?;
        Integrator::from_name(&self.evolve.integrator)?;
        if let Some(f) = self.output.formats.iter().find(|f| !FORMATS.contains(&f.as_str())) {
            return Err(RunError::Core(waveleton_core::Error::Config(format!("unknown output format '{f}'"))));
        }
        if self.evolve.snapshot_stride == 0 {
            return Err(RunError::Core(waveleton_core::Error::Config("snapshot_stride must be at least 1".into())));
        }
        Ok(())
    }

    pub fn phase_grid(&self) -> RunResult<PhaseGrid> {
        self.grid_of_size(self.grid.n_q, self.grid.n_p)
    }

    pub fn grid_of_size(&self, n_q: usize, n_p: usize) -> RunResult<PhaseGrid> {
        let g = &self.grid;
        Ok(make_grid(n_q, n_p, (g.q_min, g.q_max), (g.p_min, g.p_max), Boundary::from_name(&g.boundary)?)?)
    }

    pub fn hamiltonian(&self) -> RunResult<HamiltonianSpec> {
        self.hamiltonian_with(&self.hamiltonian.potential)
    }

    pub fn hamiltonian_with(&self, potential: &[f64]) -> RunResult<HamiltonianSpec> {
        let h = &self.hamiltonian;
        Ok(HamiltonianSpec::new(h.mass, Polynomial::new(potential.to_vec())?, h.label.clone())?)
    }

    pub fn open_system(&self) -> RunResult<OpenSystemSpec> {
        Ok(OpenSystemSpec::new(self.open_system.gamma, self.open_system.diffusion)?)
    }

    pub fn thresholds(&self) -> Thresholds {
        (&self.diagnostics.thresholds).into()
    }

    pub fn wavelet(&self) -> RunResult<WaveletSpec> {
        Ok(WaveletSpec::daubechies(self.diagnostics.wavelet_moments)?)
    }

    pub fn diagnostics_settings(&self) -> RunResult<DiagnosticsSettings> {
        Ok(DiagnosticsSettings {
            wavelet: self.wavelet()?,
            packet_depth: self.diagnostics.packet_depth,
            localization_level: self.diagnostics.localization_level,
            thresholds: self.thresholds(),
        })
    }

    /// Solver settings with `dt` resolved (see [`EvolveSection::dt`]).
    pub fn evolve_config(&self, auto_dt: impl FnOnce() -> RunResult<f64>) -> RunResult<EvolveConfig> {
        let e = &self.evolve;
        let dt = match e.dt {
            Some(dt) => dt,
            None => {
                let max = auto_dt()?;
                e.t_final / (e.t_final / (0.5 * max)).ceil()
            }
        };
        let compression = match e.compression {
            Some(eps) => Some(Compression { wavelet: WaveletSpec::daubechies(e.compression_moments)?, ..Compression::new(eps) }),
            None => None,
        };
        let cfg = EvolveConfig {
            integrator: Integrator::from_name(&e.integrator)?,
            compression,
            snapshot_stride: e.snapshot_stride,
            resolution_epsilon: e.epsilon,
            diagnostics: Some(self.diagnostics_settings()?),
            ..EvolveConfig::new(dt, e.t_final)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets a value by dotted path (`open_system.diffusion`), re-validating.
    pub fn with_override(&self, path: &str, value: toml::Value) -> RunResult<Self> {
        let mut root = toml::Value::try_from(self).expect("scenario configs always serialize");
        let mut node = &mut root;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, key) in parts.iter().enumerate() {
            let table = node
                .as_table_mut()
                .ok_or_else(|| RunError::Parse(format!("'{path}': '{}' is not a section", parts[..i].join("."))))?;
            if i + 1 == parts.len() {
                table.insert(key.to_string(), value.clone());
                break;
            }
            node = table.entry(key.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let text = toml::to_string(&root).expect("toml values serialize");
        Self::from_toml(&text)
    }
}
