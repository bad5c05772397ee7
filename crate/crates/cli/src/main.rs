use std::path::PathBuf;
use std::process::ExitCode;

use catspin::config::{validate_config, ScenarioId};
use catspin::output::write_tables;
use catspin::scenario::run_scenario;
use clap::Parser;

/// Runs one simulation scenario and writes its CSV tables.
#[derive(Debug, Parser)]
#[command(name = "catspin", version)]
struct Args {
    /// One of: ramsey-classical, fringes-vs-phirf, fringes-vs-phimw, phase-vs-tau,
    /// sensitivity-vs-tau, qfunc-snapshots, pulse-optimize.
    scenario: String,
    /// TOML scenario config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `sampling.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Replace existing output files.
    #[arg(long)]
    overwrite: bool,
    /// Also write a gnuplot script.
    #[arg(long)]
    emit_plots: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: Args) -> Result<(), String> {
    let scenario: ScenarioId = args.scenario.parse()?;
    let text = std::fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut cfg = validate_config(&text, scenario).map_err(|e| format!("{}:\n{e}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(dir) = args.out {
        cfg.output.dir = dir.display().to_string();
    }
    cfg.output.emit_plots |= args.emit_plots;
    let out = run_scenario(&cfg).map_err(|e| e.to_string())?;
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }
    let written = write_tables(&cfg, &out.tables, std::path::Path::new(&cfg.output.dir), args.overwrite)
        .map_err(|e| e.to_string())?;
    for (name, value) in &out.report.entries {
        println!("{name} = {value:e}");
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
