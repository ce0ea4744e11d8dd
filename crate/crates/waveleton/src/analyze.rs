//! Offline passes over finished run directories.

use std::path::{Path, PathBuf};

use waveleton_core::diagnostics::{classify, diagnose, scale_spectrum, DiagnosticsRecord, ScaleSpectrum, Thresholds};
use waveleton_core::phasespace::Boundary;

use crate::error::{RunError, RunResult};
use crate::formats::{decode_wigr, diagnostics_csv, parse_diagnostics_csv, read_file, sha256_hex, write_file};
use crate::runner::{Manifest, DIAGNOSTICS_FILE};

pub const ANALYSIS_DIR: &str = "analysis";

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub records: Vec<DiagnosticsRecord>,
    pub spectra: Vec<ScaleSpectrum>,
    /// Regenerated `diagnostics.csv` text.
    pub diagnostics: String,
    /// Whether the regenerated table equals the stored one byte for byte.
    pub reproduced: bool,
    pub out_dir: PathBuf,
}

/// Verifies every checksum listed in the manifest.
pub fn verify(run_dir: &Path, manifest: &Manifest) -> RunResult<()> {
    for s in &manifest.snapshots {
        let path = run_dir.join(&s.file);
        if !path.exists() {
            return Err(RunError::MissingSnapshot { index: s.index, file: path });
        }
        if sha256_hex(&read_file(&path)?) != s.sha256 {
            return Err(RunError::Checksum(path));
        }
    }
    for f in &manifest.files {
        let path = run_dir.join(&f.file);
        if sha256_hex(&read_file(&path)?) != f.sha256 {
            return Err(RunError::Checksum(path));
        }
    }
    Ok(())
}

fn spectrum_csv(s: &ScaleSpectrum) -> String {
    let mut out = format!("block,level,frequency,energy\napproximation,{},,{}\n", s.coarsest_level, s.approximation);
    for ((j, e), f) in s.details.iter().zip(s.frequencies()) {
        out.push_str(&format!("detail,{j},{f},{e}\n"));
    }
    out
}

/// Recomputes diagnostics from the dumps (optionally with other
/// thresholds) and writes them with per-snapshot scale spectra to
/// `analysis/`.
pub fn analyze(run_dir: &Path, thresholds: Option<Thresholds>) -> RunResult<AnalysisReport> {
    let manifest = Manifest::load(run_dir)?;
    verify(run_dir, &manifest)?;
    let sc = manifest.scenario()?;
    let mut settings = sc.diagnostics_settings()?;
    if let Some(t) = thresholds {
        t.validate()?;
        settings.thresholds = t;
    }
    let boundary = Boundary::from_name(&sc.grid.boundary)?;
    let out_dir = run_dir.join(ANALYSIS_DIR);
    std::fs::create_dir_all(&out_dir).map_err(|e| RunError::io(&out_dir, e))?;
    let mut records = Vec::new();
    let mut spectra = Vec::new();
    for s in &manifest.snapshots {
        let path = run_dir.join(&s.file);
        let dump = decode_wigr(&read_file(&path)?, &path)?;
        let w = dump.into_state(boundary, sc.hamiltonian.hbar, sc.hamiltonian.mass, s.time)?;
        records.push(diagnose(&w, &settings)?);
        let spec = scale_spectrum(w.values.view().into_dyn(), &settings.wavelet, sc.diagnostics.coarsest_level)?;
        write_file(&out_dir.join(format!("{:04}_scales.csv", s.index)), spectrum_csv(&spec).as_bytes())?;
        spectra.push(spec);
    }
    let diagnostics = diagnostics_csv(&records);
    write_file(&out_dir.join(DIAGNOSTICS_FILE), diagnostics.as_bytes())?;
    let stored = read_file(&run_dir.join(DIAGNOSTICS_FILE))?;
    Ok(AnalysisReport { reproduced: stored == diagnostics.as_bytes(), records, spectra, diagnostics, out_dir })
}

/// Re-labels the stored diagnostics table with `thresholds`.
pub fn classify_run(run_dir: &Path, thresholds: &Thresholds) -> RunResult<Vec<DiagnosticsRecord>> {
    let manifest = Manifest::load(run_dir)?;
    let path = run_dir.join(DIAGNOSTICS_FILE);
    let text = String::from_utf8(read_file(&path)?).map_err(|_| RunError::format(&path, "not utf-8"))?;
    let count = manifest.grid[0] * manifest.grid[1];
    let mut records = parse_diagnostics_csv(&text, count, &path)?;
    for r in records.iter_mut() {
        r.label = classify(r, thresholds)?;
    }
    Ok(records)
}
