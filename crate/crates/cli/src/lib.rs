//! The `shapeinv` command line: argument parsing, configuration and the
//! subcommands.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Outcome, SpectrumMode, Suite};
use config::{Format, Overrides, RunConfig};
use report::CliError;

#[derive(Debug, Parser)]
#[command(name = "shapeinv", version, about = "Shape-invariant potentials: closed forms, spectra and checks")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Bound on analytic against numeric energies.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the effective configuration and exit.
    #[arg(long = "dump-config", global = true)]
    pub dump_config: bool,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the preset families and their free constants.
    Families,
    /// Sample W, V and Vtilde on the grid.
    Eval,
    /// Analytic and finite-difference levels of H and its partner.
    Spectrum {
        #[arg(value_enum, default_value = "analytic")]
        mode: SpectrumMode,
    },
    /// Run residual suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        /// Seed of the random parameter draws.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The k-th state of H built by the ladder chain.
    Wavefunction {
        #[arg(long)]
        k: usize,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    let mut cfg = cli.overrides.apply(base)?;
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    if cli.format.is_some() {
        cfg.output.format = cli.format;
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format;
    match &cli.command {
        Command::Families => commands::families(cli.overrides.preset.as_deref(), format),
        Command::Eval => commands::eval(cfg, format),
        Command::Spectrum { mode } => commands::spectrum(cfg, *mode, format),
        Command::Verify { suite, seed } => {
            commands::verify(cfg, *suite, seed.unwrap_or(shapeinv_core::verify::DEFAULT_SEED), format)
        }
        Command::Wavefunction { k } => commands::wavefunction(cfg, *k, format),
    }
}

fn fail(err: &CliError, stderr: &mut dyn Write) -> u8 {
    let _ = writeln!(stderr, "{}", err.to_json());
    err.exit.code()
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            return fail(&CliError::usage(e.to_string().trim_end()), stderr);
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e, stderr),
    };
    if cli.dump_config {
        let text = serde_json::to_string_pretty(&cfg).expect("config serializes");
        let _ = writeln!(stdout, "{text}");
        return 0;
    }
    let outcome = match dispatch(&cli, &cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e, stderr),
    };
    if let Err(e) = commands::write_outcome(&outcome, cfg.output.path.as_deref(), stdout) {
        return fail(&e, stderr);
    }
    match &outcome.failure {
        Some(e) => fail(e, stderr),
        None => 0,
    }
}
