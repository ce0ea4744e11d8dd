//! Batches of scenario variants differing in one config value.

use std::path::Path;

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{RunError, RunResult};
use crate::formats::write_file;
use crate::runner::run_scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: String,
    pub run_id: String,
    pub final_label: String,
    pub purity: f64,
    pub negativity: f64,
    pub entropy: f64,
    pub localization: f64,
}

/// Parses a command-line value as a TOML literal, falling back to a string.
pub fn parse_value(text: &str) -> toml::Value {
    #[derive(serde::Deserialize)]
    struct Holder {
        v: toml::Value,
    }
    toml::from_str::<Holder>(&format!("v = {text}")).map(|h| h.v).unwrap_or_else(|_| toml::Value::String(text.into()))
}

/// Runs one variant per value, each in `root/<name>_<k>`, on up to
/// `threads` worker threads, and writes `root/<name>_sweep.csv`.
pub fn sweep(sc: &ScenarioConfig, param: &str, values: &[String], root: &Path, threads: usize) -> RunResult<Vec<SweepRow>> {
    let variants: Vec<ScenarioConfig> = values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut c = sc.with_override(param, parse_value(v))?;
            c.name = format!("{}_{k}", sc.name);
            Ok(c)
        })
        .collect::<RunResult<_>>()?;
    let threads = threads.max(1).min(variants.len().max(1));
    let mut results: Vec<Option<RunResult<SweepRow>>> = (0..variants.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        for (chunk, out) in variants.chunks(variants.len().div_ceil(threads).max(1)).zip(results.chunks_mut(variants.len().div_ceil(threads).max(1))) {
            s.spawn(move || {
                for (c, slot) in chunk.iter().zip(out.iter_mut()) {
                    *slot = Some(run_scenario(c, root).map(|r| {
                        let f = &r.report.final_record;
                        SweepRow {
                            value: String::new(),
                            run_id: r.manifest.run_id.clone(),
                            final_label: r.report.final_label.clone(),
                            purity: f.purity,
                            negativity: f.negativity,
                            entropy: f.entropy,
                            localization: f.localization,
                        }
                    }));
                }
            });
        }
    });
    let mut rows = Vec::new();
    for (r, v) in results.into_iter().zip(values) {
        let mut row = r.expect("every variant ran")?;
        row.value = v.clone();
        rows.push(row);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| RunError::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().expect("in-memory flush");
    std::fs::create_dir_all(root).map_err(|e| RunError::io(root, e))?;
    write_file(&root.join(format!("{}_sweep.csv", sc.name)), &bytes)?;
    Ok(rows)
}
