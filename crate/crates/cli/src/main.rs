//! `vbslab`: sweeps, acceptance checks and tables for valence-bond chains.
//!
//! Exit codes: 0 success, 1 failed acceptance criterion, 2 usage or input
//! error.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::{Model, SweepConfig};
use config::{parse_f64, parse_n_list, parse_u64, parse_usize, ConfigFile};
use vbslab::verify::Level;

#[derive(Parser, Debug)]
#[command(name = "vbslab", version, about = "Valence-bond chains: correlation and entanglement lengths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlation and entanglement lengths of the deformed family over a phi grid.
    SweepPhi(SweepArgs),
    /// Run the acceptance criteria and print a pass/fail table.
    Verify(VerifyArgs),
    /// LE and gap of Heisenberg spin-1 chains with spin-1/2 ends.
    HeisenbergLe(HeisenbergArgs),
    /// String order and reduced end operator per chain size.
    StringOrder(StringOrderArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// key=value file with the same keys as the long flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_negative_numbers = true)]
    phi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Sizes for the LE columns, e.g. `4,8,12` or `4:20`.
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// fast or full.
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, hide = true, default_value_t = 1.0)]
    pauli_scale: f64,
}

#[derive(Args, Debug)]
struct HeisenbergArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = commands::HEISENBERG_MAX)]
    n_max: usize,
}

#[derive(Args, Debug)]
struct StringOrderArgs {
    #[command(flatten)]
    common: Common,
    /// aklt or deformed.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long)]
    n_list: Option<String>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

fn parse_level(text: &str) -> Result<Level> {
    match text.trim() {
        "fast" => Ok(Level::Fast),
        "full" => Ok(Level::Full),
        other => bail!("level must be fast or full, got {other:?}"),
    }
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let file = ConfigFile::load_opt(args.common.config.as_deref())?;
    let defaults = SweepConfig::default();
    let config = SweepConfig {
        phi_min: file.pick(args.phi_min, "phi-min", parse_f64)?.unwrap_or(defaults.phi_min),
        phi_max: file.pick(args.phi_max, "phi-max", parse_f64)?.unwrap_or(defaults.phi_max),
        steps: file.pick(args.steps, "steps", parse_usize)?.unwrap_or(defaults.steps),
        n_list: match file.pick(args.n_list, "n-list", |s| Ok(s.to_string()))? {
            Some(text) => parse_n_list(&text)?,
            None => defaults.n_list,
        },
        seed: file.pick(args.seed, "seed", parse_u64)?.unwrap_or(defaults.seed),
    };
    let out = file.pick_path(args.common.out)?;
    let csv = commands::sweep_phi(&config)?;
    emit(out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let file = ConfigFile::load_opt(args.common.config.as_deref())?;
    let level = file.pick(args.level.as_deref().map(parse_level).transpose()?, "level", parse_level)?;
    let seed = file.pick(args.seed, "seed", parse_u64)?.unwrap_or(0);
    if !args.pauli_scale.is_finite() || args.pauli_scale == 0.0 {
        bail!("pauli scale must be finite and nonzero");
    }
    let out = file.pick_path(args.common.out)?;
    let (table, results) = commands::verify_table(level.unwrap_or(Level::Fast), args.pauli_scale, seed);
    emit(out.as_deref(), &table)?;
    if out.is_some() {
        print!("{table}");
    }
    Ok(if results.iter().all(|c| c.acceptable()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn heisenberg(args: HeisenbergArgs) -> Result<ExitCode> {
    let file = ConfigFile::load_opt(args.common.config.as_deref())?;
    let out = file.pick_path(args.common.out)?;
    let csv = commands::heisenberg_le(args.n_max)?;
    emit(out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn string_order(args: StringOrderArgs) -> Result<ExitCode> {
    let file = ConfigFile::load_opt(args.common.config.as_deref())?;
    let name = file.pick(args.model, "model", |s| Ok(s.to_string()))?.unwrap_or_else(|| "aklt".into());
    let phi = file.pick(args.phi, "phi", parse_f64)?;
    let model = Model::parse(&name, phi)?;
    let n_list = match file.pick(args.n_list, "n-list", |s| Ok(s.to_string()))? {
        Some(text) => parse_n_list(&text)?,
        None => (1..=8).collect(),
    };
    let out = file.pick_path(args.common.out)?;
    let csv = commands::string_order_table(model, &n_list)?;
    emit(out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors by itself
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SweepPhi(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::HeisenbergLe(a) => heisenberg(a),
        Command::StringOrder(a) => string_order(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
