//! Scenario execution and the run-directory layout.
//!
//! A run directory holds `manifest.json` (config echo, run id, checksums),
//! `NNNN.wigr` snapshots plus any optional exports, `diagnostics.csv` and
//! `report.json` with the final classification.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use waveleton_core::diagnostics::{diagnose, DiagnosticsRecord};
use waveleton_core::moyal::{HamiltonianSpec, MoyalOperator, OpenSystemSpec, SeriesTerms};
use waveleton_core::mra::{dwt_forward_to, dwt_inverse, refine_until, scale_truncate};
use waveleton_core::phasespace::{
    initial_state_library, pair_grid, HierarchyState, InitialState, Level, PairState, PhaseGrid, StatePreset, Wavefunction,
    WignerState,
};
use waveleton_core::solver::{
    evolve, evolve_hierarchy, select_resolution, EvolveConfig, StabilityReport, ADVECTIVE_LIMIT, SPECTRAL_LIMIT,
};
use waveleton_core::Error;

use crate::config::ScenarioConfig;
use crate::error::{RunError, RunResult};
use crate::formats::{diagnostics_csv, encode_mrad, encode_wigr, heatmap_ppm, sha256_hex, snapshot_csv, write_file};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const REPORT_FILE: &str = "report.json";
pub const OUTPUT_ENV: &str = "WAVELETON_OUTPUT_DIR";

/// Everything a run needs, built from a config.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub grid: PhaseGrid,
    pub hamiltonian: HamiltonianSpec,
    pub open: OpenSystemSpec,
    pub initial: InitialState,
    pub w0: WignerState,
    pub evolve: EvolveConfig,
}

fn read_wavefunction(path: &Path, grid: &PhaseGrid) -> RunResult<Wavefunction> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| RunError::format(path, e.to_string()))?;
    let mut values = Vec::new();
    for (i, row) in rd.deserialize::<(f64, f64, f64)>().enumerate() {
        let (q, re, im) = row.map_err(|e| RunError::format(path, e.to_string()))?;
        if i < grid.n_q && (q - grid.q(i)).abs() > 1e-9 * grid.q_len() {
            return Err(RunError::format(path, format!("row {i}: q = {q} is not grid node {}", grid.q(i))));
        }
        values.push(num_complex::Complex64::new(re, im));
    }
    let psi = Wavefunction::new(grid.q_min, grid.q_max, values)?;
    if !psi.matches(grid) {
        return Err(Error::Dimension(format!("wave function has {} samples, grid has {}", psi.len(), grid.n_q)).into());
    }
    Ok(psi)
}

fn initial_state(sc: &ScenarioConfig, grid: &PhaseGrid) -> RunResult<InitialState> {
    let init = &sc.initial_state;
    if init.kind == "wavefunction" {
        let file = init
            .file
            .as_ref()
            .ok_or_else(|| Error::Config("initial_state.kind = \"wavefunction\" needs initial_state.file".into()))?;
        return Ok(InitialState::Pure(read_wavefunction(file, grid)?));
    }
    let preset = StatePreset::from_name(&init.kind, &init.params)?;
    Ok(initial_state_library(&preset, grid, sc.hamiltonian.hbar, sc.hamiltonian.mass)?)
}

/// Largest `dt` meeting every stability bound on `grid`.
pub fn max_stable_dt(grid: PhaseGrid, h: &HamiltonianSpec, hbar: f64, open: OpenSystemSpec) -> RunResult<f64> {
    let op = MoyalOperator::new(grid, h, hbar, open, SeriesTerms::Full)?;
    let r = StabilityReport::of(&op, 1.0);
    let bound = |limit: f64, rate: f64| if rate > 0.0 { limit / rate } else { f64::INFINITY };
    let dt = bound(ADVECTIVE_LIMIT, r.advective_q).min(bound(ADVECTIVE_LIMIT, r.advective_p)).min(bound(SPECTRAL_LIMIT, r.spectral));
    if !dt.is_finite() {
        return Err(Error::Config("cannot infer dt: every rate vanishes".into()).into());
    }
    Ok(dt)
}

pub fn prepare(sc: &ScenarioConfig) -> RunResult<Prepared> {
    prepare_on(sc, sc.phase_grid()?)
}

pub fn prepare_on(sc: &ScenarioConfig, grid: PhaseGrid) -> RunResult<Prepared> {
    sc.validate()?;
    let hamiltonian = sc.hamiltonian()?;
    let open = sc.open_system()?;
    let hbar = sc.hamiltonian.hbar;
    let initial = initial_state(sc, &grid)?;
    let w0 = initial.clone().into_wigner(&grid, hbar, sc.hamiltonian.mass)?;
    let evolve = sc.evolve_config(|| max_stable_dt(grid, &hamiltonian, hbar, open))?;
    Ok(Prepared { grid, hamiltonian, open, initial, w0, evolve })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub step: usize,
    pub time: f64,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// sha256 of `config`.
    pub run_id: String,
    pub name: String,
    /// `moyal`, `hierarchy` or `oracle`.
    pub kind: String,
    pub seed: u64,
    /// Canonical TOML echo of the effective config.
    pub config: String,
    pub dt: f64,
    pub steps: usize,
    pub grid: [usize; 2],
    pub snapshots: Vec<SnapshotEntry>,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn load(run_dir: &Path) -> RunResult<Self> {
        let path = run_dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| RunError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| RunError::format(&path, e.to_string()))
    }

    pub fn scenario(&self) -> RunResult<ScenarioConfig> {
        ScenarioConfig::from_toml(&self.config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub t: f64,
    pub norm: f64,
    pub purity: f64,
    pub entropy: f64,
    pub negativity: f64,
    pub localization: f64,
    pub label: String,
}

impl From<&DiagnosticsRecord> for RecordRow {
    fn from(r: &DiagnosticsRecord) -> Self {
        RecordRow {
            t: r.time,
            norm: r.norm,
            purity: r.purity,
            entropy: r.entropy,
            negativity: r.negativity,
            localization: r.localization,
            label: r.label.name().into(),
        }
    }
}

/// Scale refinement of the final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub epsilon: f64,
    pub level: usize,
    pub finest_level: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub ladder: Vec<usize>,
    pub chosen: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: String,
    pub final_label: String,
    /// Labels in order of appearance with consecutive repeats removed.
    pub label_path: Vec<String>,
    pub final_record: RecordRow,
    pub max_norm_drift: f64,
    pub norm_drift_flagged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compression_ratios: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_norm_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionReport>,
}

/// Result of [`run_scenario`]; the snapshot states are kept for callers
/// that compare runs.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub report: RunReport,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<WignerState>,
}

/// `--output-dir`, then `WAVELETON_OUTPUT_DIR`, then `output.directory`, then `runs`.
pub fn output_root(cli: Option<&Path>, sc: &ScenarioConfig) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    sc.output.directory.clone().unwrap_or_else(|| PathBuf::from("runs"))
}

pub fn label_path(records: &[DiagnosticsRecord]) -> Vec<String> {
    let mut path: Vec<String> = Vec::new();
    for r in records {
        if path.last().map(String::as_str) != Some(r.label.name()) {
            path.push(r.label.name().into());
        }
    }
    path
}

/// Scale refinement `‖W^{N+1} − W^N‖ ≤ ε` of one state, measure-weighted.
pub fn scale_cutoff(w: &WignerState, sc: &ScenarioConfig, epsilon: f64) -> RunResult<CutoffReport> {
    let d = dwt_forward_to(w.values.view().into_dyn(), &sc.wavelet()?, sc.diagnostics.coarsest_level)?;
    let mu = w.grid.cell_measure();
    let make = |n: usize| dwt_inverse(&scale_truncate(&d, n)?);
    let dist = |a: &ndarray::ArrayD<f64>, b: &ndarray::ArrayD<f64>| (a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * mu).sqrt();
    let r = refine_until(make, dist, d.coarsest_level, d.finest_level(), epsilon)?;
    Ok(CutoffReport { epsilon, level: r.level, finest_level: d.finest_level(), residuals: r.residuals, converged: r.converged })
}

/// Final state of a plain run of `sc` on `grid` (no diagnostics, no output).
pub fn final_state_on(sc: &ScenarioConfig, grid: &PhaseGrid) -> RunResult<WignerState> {
    let run = prepare_on(sc, *grid)?;
    let cfg = EvolveConfig { diagnostics: None, snapshot_stride: run.evolve.steps(), ..run.evolve.clone() };
    Ok(evolve(&run.w0, &run.hamiltonian, &run.open, &cfg)?.last().clone())
}

struct Outcome {
    snapshots: Vec<(usize, WignerState)>,
    records: Vec<DiagnosticsRecord>,
    max_norm_drift: f64,
    norm_drift_flagged: bool,
    compression_ratios: Vec<f64>,
    fock: Option<(Vec<(f64, f64)>, f64)>,
}

fn run_single(run: &Prepared) -> RunResult<Outcome> {
    let traj = evolve(&run.w0, &run.hamiltonian, &run.open, &run.evolve)?;
    Ok(Outcome {
        compression_ratios: traj.snapshots.iter().filter_map(|s| s.compression_ratio).collect(),
        snapshots: traj.snapshots.into_iter().map(|s| (s.step, s.state)).collect(),
        records: traj.diagnostics,
        max_norm_drift: traj.max_norm_drift,
        norm_drift_flagged: traj.norm_drift_flagged,
        fock: None,
    })
}

fn run_hierarchy(sc: &ScenarioConfig, run: &Prepared) -> RunResult<Outcome> {
    let hs = sc.hierarchy.as_ref().expect("hierarchy section present");
    let mut levels = vec![Level::One(run.w0.clone())];
    let mut potentials = vec![run.hamiltonian.clone()];
    if hs.pair {
        let g = &sc.grid;
        let pg = pair_grid(hs.pair_n, (g.q_min, g.q_max), (g.p_min, g.p_max), run.grid.boundary)?;
        let single = initial_state(sc, &pg)?.into_wigner(&pg, sc.hamiltonian.hbar, sc.hamiltonian.mass)?;
        levels.push(Level::Two(PairState::product(&single, &single)?));
        potentials.push(sc.hamiltonian_with(hs.pair_potential.as_deref().unwrap_or(&sc.hamiltonian.potential))?);
    }
    let h0 = HierarchyState::new(hs.w0, levels)?;
    let cfg = EvolveConfig { diagnostics: None, ..run.evolve.clone() };
    let traj = evolve_hierarchy(&h0, &potentials, &run.open, &cfg)?;
    let settings = sc.diagnostics_settings()?;
    let mut snapshots = Vec::new();
    let mut records = Vec::new();
    let norm0 = run.w0.integral();
    let mut drift = 0.0f64;
    for s in &traj.snapshots {
        let w = s.state.level_one().expect("level one present").clone();
        drift = drift.max((w.integral() - norm0).abs());
        records.push(diagnose(&w, &settings)?);
        snapshots.push((s.step, w));
    }
    let fock: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| (s.time, s.fock_norm)).collect();
    Ok(Outcome {
        snapshots,
        records,
        max_norm_drift: drift,
        norm_drift_flagged: drift > waveleton_core::solver::NORM_DRIFT_TOLERANCE * norm0.abs().max(1.0),
        compression_ratios: Vec::new(),
        fock: Some((fock, traj.fock_norm_drift())),
    })
}

struct Writer {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Writer {
    fn put(&mut self, name: &str, bytes: &[u8]) -> RunResult<String> {
        write_file(&self.dir.join(name), bytes)?;
        let sha = sha256_hex(bytes);
        self.files.push(FileEntry { file: name.into(), sha256: sha.clone() });
        Ok(sha)
    }
}

fn prepare_dir(dir: &Path) -> RunResult<()> {
    if dir.join(MANIFEST_FILE).exists() {
        std::fs::remove_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    }
    std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))
}

/// Writes a finished run. Snapshot states must carry their times.
#[allow(clippy::too_many_arguments)]
fn write_run(
    sc: &ScenarioConfig,
    kind: &str,
    root: &Path,
    evolve_cfg: &EvolveConfig,
    outcome: &Outcome,
    cutoff: Option<CutoffReport>,
    resolution: Option<ResolutionReport>,
) -> RunResult<RunSummary> {
    let echo = sc.to_toml();
    let run_id = sha256_hex(echo.as_bytes());
    let dir = root.join(&sc.name);
    prepare_dir(&dir)?;
    let mut w = Writer { dir: dir.clone(), files: Vec::new() };
    let formats = &sc.output.formats;
    let wavelet = sc.wavelet()?;
    let mut entries = Vec::new();
    for (index, (step, state)) in outcome.snapshots.iter().enumerate() {
        let file = format!("{index:04}.wigr");
        let bytes = encode_wigr(state);
        write_file(&dir.join(&file), &bytes)?;
        entries.push(SnapshotEntry { index, step: *step, time: state.time, file, sha256: sha256_hex(&bytes) });
        if formats.iter().any(|f| f == "mrad") {
            let d = dwt_forward_to(state.values.view().into_dyn(), &wavelet, sc.diagnostics.coarsest_level)?;
            w.put(&format!("{index:04}.mrad"), &encode_mrad(&d))?;
        }
        if formats.iter().any(|f| f == "csv") {
            w.put(&format!("{index:04}.csv"), snapshot_csv(state).as_bytes())?;
        }
        if formats.iter().any(|f| f == "ppm") {
            w.put(&format!("{index:04}.ppm"), &heatmap_ppm(state))?;
        }
    }
    w.put(DIAGNOSTICS_FILE, diagnostics_csv(&outcome.records).as_bytes())?;
    if let Some((fock, _)) = &outcome.fock {
        let mut s = String::from("t,fock_norm\n");
        for (t, f) in fock {
            s.push_str(&format!("{t},{f}\n"));
        }
        w.put("fock.csv", s.as_bytes())?;
    }
    let last = outcome.records.last().expect("initial record present");
    let report = RunReport {
        run_id: run_id.clone(),
        final_label: last.label.name().into(),
        label_path: label_path(&outcome.records),
        final_record: last.into(),
        max_norm_drift: outcome.max_norm_drift,
        norm_drift_flagged: outcome.norm_drift_flagged,
        compression_ratios: outcome.compression_ratios.clone(),
        fock_norm_drift: outcome.fock.as_ref().map(|f| f.1),
        cutoff,
        resolution,
    };
    w.put(REPORT_FILE, serde_json::to_string_pretty(&report).expect("report serializes").as_bytes())?;
    let grid = outcome.snapshots[0].1.grid;
    let manifest = Manifest {
        run_id,
        name: sc.name.clone(),
        kind: kind.into(),
        seed: sc.seed,
        config: echo,
        dt: evolve_cfg.dt,
        steps: evolve_cfg.steps(),
        grid: [grid.n_q, grid.n_p],
        snapshots: entries,
        files: w.files,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(RunSummary {
        dir,
        manifest,
        report,
        records: outcome.records.clone(),
        snapshots: outcome.snapshots.iter().map(|s| s.1.clone()).collect(),
    })
}

/// Runs a scenario and writes its directory under `root/<name>`. Nothing is
/// written when the run fails.
pub fn run_scenario(sc: &ScenarioConfig, root: &Path) -> RunResult<RunSummary> {
    sc.validate()?;
    let mut sc = sc.clone();
    let mut resolution = None;
    if let (Some(eps), false) = (sc.evolve.epsilon, sc.evolve.resolution_ladder.is_empty()) {
        let ladder: Vec<PhaseGrid> = sc
            .evolve
            .resolution_ladder
            .iter()
            .map(|&n| sc.grid_of_size(n, n))
            .collect::<RunResult<_>>()?;
        let mut failure = None;
        let choice = select_resolution(
            |g| {
                final_state_on(&sc, g).map_err(|e| match e {
                    RunError::Core(c) => c,
                    other => {
                        let msg = other.to_string();
                        failure = Some(other);
                        Error::Config(msg)
                    }
                })
            },
            eps,
            &ladder,
        );
        if let Some(f) = failure {
            return Err(f);
        }
        let choice = choice?;
        resolution = Some(ResolutionReport {
            ladder: sc.evolve.resolution_ladder.clone(),
            chosen: sc.evolve.resolution_ladder[choice.index],
            residuals: choice.residuals,
            converged: choice.converged,
        });
        sc.grid.n_q = choice.grid.n_q;
        sc.grid.n_p = choice.grid.n_p;
    }
    let run = prepare(&sc)?;
    let outcome = if sc.hierarchy.is_some() { run_hierarchy(&sc, &run)? } else { run_single(&run)? };
    let cutoff = match sc.evolve.epsilon {
        Some(eps) => Some(scale_cutoff(&outcome.snapshots.last().expect("final snapshot").1, &sc, eps)?),
        None => None,
    };
    let kind = if sc.hierarchy.is_some() { "hierarchy" } else { "moyal" };
    write_run(&sc, kind, root, &run.evolve, &outcome, cutoff, resolution)
}

/// Runs the split-operator oracle and writes it like a run, under
/// `root/<name>_oracle`.
pub fn run_oracle(sc: &ScenarioConfig, root: &Path) -> RunResult<RunSummary> {
    let states = crate::oracle::oracle_schrodinger(sc)?;
    let run = prepare(sc)?;
    let settings = sc.diagnostics_settings()?;
    let steps = crate::oracle::snapshot_steps(&run.evolve);
    let records = states.iter().map(|w| diagnose(w, &settings)).collect::<Result<Vec<_>, _>>()?;
    let norm0 = states[0].integral();
    let drift = states.iter().fold(0.0f64, |m, w| m.max((w.integral() - norm0).abs()));
    let outcome = Outcome {
        snapshots: steps.into_iter().zip(states).collect(),
        records,
        max_norm_drift: drift,
        norm_drift_flagged: drift > waveleton_core::solver::NORM_DRIFT_TOLERANCE * norm0.abs().max(1.0),
        compression_ratios: Vec::new(),
        fock: None,
    };
    let named = ScenarioConfig { name: format!("{}_oracle", sc.name), ..sc.clone() };
    write_run(&named, "oracle", root, &run.evolve, &outcome, None, None)
}
