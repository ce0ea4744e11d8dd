use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use waveleton::analyze::{analyze, classify_run};
use waveleton::config::ScenarioConfig;
use waveleton::runner::{output_root, run_oracle, run_scenario, Manifest};
use waveleton::sweep::sweep;
use waveleton::RunResult;

#[derive(Parser)]
#[command(name = "waveleton", version, about = "Wigner-Moyal phase-space runs with wavelet diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; defaults to $WAVELETON_OUTPUT_DIR, then output.directory, then ./runs.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Overrides evolve.epsilon.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Overrides the recorded seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write its run directory.
    Run,
    /// Split-operator reference run on the same grid and time stamps.
    Oracle,
    /// Recompute diagnostics and scale spectra from a run's dumps.
    Analyze {
        run_dir: PathBuf,
    },
    /// Re-label a run's diagnostics with the thresholds of --config (or the defaults).
    Classify {
        run_dir: PathBuf,
    },
    /// Run one variant per value of a dotted config key.
    Sweep {
        /// e.g. open_system.diffusion
        #[arg(long)]
        param: String,
        /// Comma-separated TOML literals.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

fn scenario(cli: &Cli) -> RunResult<ScenarioConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| waveleton::RunError::Parse("--config is required for this command".into()))?;
    let mut sc = ScenarioConfig::load(path)?;
    if let Some(e) = cli.epsilon {
        sc.evolve.epsilon = Some(e);
    }
    if let Some(s) = cli.seed {
        sc.seed = s;
    }
    sc.validate()?;
    Ok(sc)
}

fn thresholds_for(cli: &Cli, run_dir: &Path) -> RunResult<waveleton_core::diagnostics::Thresholds> {
    match &cli.config {
        Some(_) => Ok(scenario(cli)?.thresholds()),
        None => Ok(Manifest::load(run_dir)?.scenario()?.thresholds()),
    }
}

fn execute(cli: &Cli) -> RunResult<()> {
    match &cli.command {
        Command::Run => {
            let sc = scenario(cli)?;
            let r = run_scenario(&sc, &output_root(cli.output_dir.as_deref(), &sc))?;
            println!("run {} -> {}", r.manifest.run_id, r.dir.display());
            println!("labels: {}", r.report.label_path.join(" -> "));
            println!("final: {}", r.report.final_label);
            if r.report.norm_drift_flagged {
                println!("warning: norm drift {:.3e} exceeds tolerance", r.report.max_norm_drift);
            }
        }
        Command::Oracle => {
            let sc = scenario(cli)?;
            let r = run_oracle(&sc, &output_root(cli.output_dir.as_deref(), &sc))?;
            println!("oracle {} -> {}", r.manifest.run_id, r.dir.display());
        }
        Command::Analyze { run_dir } => {
            let thresholds = match &cli.config {
                Some(_) => Some(scenario(cli)?.thresholds()),
                None => None,
            };
            let r = analyze(run_dir, thresholds)?;
            println!("analysis -> {}", r.out_dir.display());
            println!("diagnostics reproduced bitwise: {}", r.reproduced);
        }
        Command::Classify { run_dir } => {
            let t = thresholds_for(cli, run_dir)?;
            println!("t,label");
            for r in classify_run(run_dir, &t)? {
                println!("{},{}", r.time, r.label);
            }
        }
        Command::Sweep { param, values } => {
            let sc = scenario(cli)?;
            let root = output_root(cli.output_dir.as_deref(), &sc);
            for row in sweep(&sc, param, values, &root, cli.threads)? {
                println!("{} = {}: {} (purity {:.4})", param, row.value, row.final_label, row.purity);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
