mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Framed toric principal GL(r)-bundles: fans, piecewise linear maps to the
/// building, characteristic classes and the moduli membership test.
///
/// Exit codes: 0 valid/ACCEPTED, 1 invalid/REJECTED, 2 INDETERMINATE,
/// 3 input error.
#[derive(Debug, Parser)]
#[command(name = "toric-moduli", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u16).range(1..))]
    parallel: Option<u16>,

    /// Write the JSON result here instead of stdout.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Print the JSON schema of a file format (all formats without a name).
    #[arg(long, value_name = "NAME", num_args = 0..=1, default_missing_value = "")]
    schema: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fan checks.
    #[command(subcommand)]
    Fan(FanCmd),
    /// One-parameter subgroups.
    #[command(subcommand)]
    Onepar(OneparCmd),
    /// Piecewise linear maps.
    #[command(subcommand)]
    Plmap(PlmapCmd),
    /// The piecewise polynomial e_k(Φ).
    Chern(ChernArgs),
    /// Characteristic class data.
    #[command(subcommand)]
    Psi(PsiCmd),
    /// Membership test and census.
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Klyachko filtrations.
    #[command(subcommand)]
    Klyachko(KlyachkoCmd),
}

#[derive(Debug, Subcommand)]
pub enum FanCmd {
    /// Check the fan axioms.
    Validate { fan: PathBuf },
    /// Check completeness.
    Complete { fan: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum OneparCmd {
    /// Whether two one-parameter subgroups are equivalent.
    Equiv { first: PathBuf, second: PathBuf },
    /// The weighted flag of a one-parameter subgroup.
    Flag { lambda: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum PlmapCmd {
    /// Check integrality and face agreement.
    Validate {
        #[arg(long)]
        fan: PathBuf,
        phi: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ChernArgs {
    #[arg(long)]
    fan: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    /// Index k of the elementary symmetric polynomial e_k.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    generator: u32,
}

#[derive(Debug, Subcommand)]
pub enum PsiCmd {
    /// The classes e_1(Φ), ..., e_r(Φ) as a Ψ file.
    FromMap {
        #[arg(long)]
        fan: PathBuf,
        phi: PathBuf,
    },
    /// Dominant weights and parabolic types at every ray.
    Rays {
        #[arg(long)]
        fan: PathBuf,
        psi: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ModuliInputs {
    #[arg(long)]
    fan: PathBuf,
    #[arg(long)]
    psi: PathBuf,
    /// Check the conditions at ray generators only, without integrality and
    /// the class identity on each cone.
    #[arg(long)]
    ray_values_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum ModuliCmd {
    /// Verdict for a candidate tuple of flags.
    Check {
        #[command(flatten)]
        inputs: ModuliInputs,
        #[arg(long)]
        cand: PathBuf,
        /// Omit splitting bases and cocharacters from the verdict.
        #[arg(long)]
        no_witnesses: bool,
    },
    /// All torus-fixed points.
    Census {
        #[command(flatten)]
        inputs: ModuliInputs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        census_limit: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum KlyachkoCmd {
    /// Klyachko filtration to weighted flag.
    Import { filtration: PathBuf },
    /// Weighted flag to Klyachko filtration.
    Export { flag: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli))
}
