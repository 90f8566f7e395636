//! Argument handling and exit codes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::app::{exit, run, Subcommand};
use crate::config::{parse_config, RunConfig};

/// Kernels on compact Lie groups: duals, symbols, RKHS checks, counting,
/// entropy bounds and empirical covering numbers.
#[derive(Debug, Parser)]
#[command(name = "liecover", version)]
#[command(after_help = "Subcommands: dual, symbol, kernel, count, bounds, cover, all.\n\
Exit codes: 0 success, 2 validation failure, 3 certification failure,\n\
64 unknown subcommand, 74 unwritable output.")]
pub struct Cli {
    /// One of dual, symbol, kernel, count, bounds, cover, all.
    pub subcommand: String,
    /// Configuration file (`key = value` lines); defaults apply without one.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed, overriding `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress the stdout summary.
    #[arg(long)]
    pub quiet: bool,
}

/// Parse arguments, run, print, and return the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::VALIDATION,
            };
        }
    };
    let Some(cmd) = Subcommand::from_name(&cli.subcommand) else {
        eprintln!("error: unknown subcommand `{}` (dual, symbol, kernel, count, bounds, cover, all)", cli.subcommand);
        return exit::UNKNOWN_SUBCOMMAND;
    };
    let mut cfg = match &cli.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return exit::VALIDATION;
                }
            };
            match parse_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return exit::VALIDATION;
                }
            }
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    match run(cmd, &cfg, &out) {
        Ok(summary) => {
            if !cli.quiet {
                for line in &summary.summary {
                    println!("{line}");
                }
            }
            for w in &summary.manifest.warnings {
                eprintln!("warning: {w}");
            }
            summary.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
