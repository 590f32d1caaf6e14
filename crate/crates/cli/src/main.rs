use std::path::PathBuf;
use std::process::ExitCode;

use advq_cli::config::{self, ExperimentConfig};
use advq_cli::{run, CliError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "advq", version, about = "Schrodingerised advection-diffusion emulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` config file, applied after the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Permit full-scale presets.
    #[arg(long, global = true)]
    allow_long: bool,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evolve once and write field, energy trace and metrics.
    Simulate,
    /// Gate counts per block and their scaling.
    Gatecount,
    /// Shot sampling with threshold and smoothing.
    Sample,
    /// Emulator vs classical solver vs closed form.
    Compare,
    /// Error against the oracle for each `sweep_dt`.
    Sweep,
    /// List the shipped presets.
    Presets,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(name) = &cli.preset {
        cfg.apply(config::preset(name)?)?;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        cfg.apply(&text)?;
    }
    for kv in &cli.set {
        cfg.apply(kv)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Command::Presets = cli.command {
        for (name, text) in config::PRESETS {
            println!("[{name}]\n{text}");
        }
        return Ok(());
    }
    let cfg = load(cli)?;
    cfg.validate(cli.allow_long)?;
    if cfg.long {
        eprintln!(
            "full-scale run: {} qubits, {} state",
            cfg.total_qubits(),
            config::human_bytes(cfg.total_qubits())
        );
    }
    let metrics = match cli.command {
        Command::Simulate => run::simulate(&cfg)?,
        Command::Gatecount => run::gatecount(&cfg)?,
        Command::Sample => run::sample(&cfg)?,
        Command::Compare => run::compare(&cfg)?,
        Command::Sweep => run::sweep(&cfg)?,
        Command::Presets => unreachable!(),
    };
    for (k, v) in metrics {
        println!("{k} = {v}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("advq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
