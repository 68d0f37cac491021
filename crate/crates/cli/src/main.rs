//! `casimir-de`: PFA and derivative-expansion energies from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod params;
mod report;

use params::Params;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] casimir_de::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use casimir_de::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(E::InvalidInput(_) | E::Parse(_) | E::NotIntegrable(_) | E::DeInapplicable(_)) => 1,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "casimir-de", version, about = "Proximity force approximation and derivative expansion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PFA and DE energy of a geometry
    Energy(Params),
    /// Derjaguin and DE forces
    Force(Params),
    /// Fit the DE coefficient against an exact energy
    BetaExtract(Params),
    /// Second-order form factor scan and its small-k coefficient
    FormFactor(Params),
    /// Thermal DE coefficients or free energies
    Thermal(Params),
    /// Casimir-Polder potential near a curved surface
    Cp(Params),
    /// Stored and recomputed coefficient tables
    Tables(Params),
}

fn run(cmd: Command) -> Result<(), CliError> {
    let (name, raw) = match cmd {
        Command::Energy(p) => ("energy", p),
        Command::Force(p) => ("force", p),
        Command::BetaExtract(p) => ("beta-extract", p),
        Command::FormFactor(p) => ("form-factor", p),
        Command::Thermal(p) => ("thermal", p),
        Command::Cp(p) => ("cp", p),
        Command::Tables(p) => ("tables", p),
    };
    let p = raw.resolve()?;
    let report = match name {
        "energy" => commands::energy(&p),
        "force" => commands::force(&p),
        "beta-extract" => commands::beta_extract(&p),
        "form-factor" => commands::form_factor(&p),
        "thermal" => commands::thermal(&p),
        "cp" => commands::cp(&p),
        _ => commands::tables(&p),
    }?;
    report.emit(&p, commands::default_format(name))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
