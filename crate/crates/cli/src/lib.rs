//! `nematic`: compute, check and render point-defect profiles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use nematic_core::Branch;

use crate::config::CommonArgs;
use crate::error::CliError;
use crate::render::{ColorMap, GlyphStyle};

#[derive(Parser, Debug)]
#[command(
    name = "nematic",
    version,
    about = "Point defects of index k/2 in 2D nematics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimise the reduced energy; writes profile.csv and report.json
    Solve(SolveArgs),
    /// Explicit L = 0 solutions and their energies (b2 = 0)
    Limit(SolveArgs),
    /// ODE and 2D residuals of a profile; writes residual.csv and residual.json
    Residual(ResidualArgs),
    /// Glyph field and eigenvalue chart as SVG
    Render(RenderArgs),
    /// Solve along a list of L or b2 values; writes sweep.json
    Sweep(SweepArgs),
    /// Print energies of a profile or explicit branch as JSON
    Energy(SourceArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Profile CSV with header r,u,v
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Profile CSV with header r,u,v
    #[arg(long, conflicts_with = "branch")]
    pub input: Option<PathBuf>,
    /// Explicit branch: minus, plus or uniaxial
    #[arg(long)]
    pub branch: Option<Branch>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "rod")]
    pub style: GlyphStyle,
    /// Glyph lattice points per radius (at least 4)
    #[arg(long, default_value_t = 8)]
    pub density: usize,
    #[arg(long, value_enum, default_value = "viridis")]
    pub colormap: ColorMap,
    /// Image size in pixels
    #[arg(long, default_value_t = 600)]
    pub size: u32,
    /// Eigenvalue shift for box glyphs (default 1.1 max|lambda_min|)
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated, strictly monotone L values
    #[arg(long = "l-list", conflicts_with = "b2_list")]
    pub l_list: Option<String>,
    /// Comma-separated, strictly increasing b2 values starting at 0
    #[arg(long = "b2-list")]
    pub b2_list: Option<String>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        2
                    } else {
                        0
                    }
                }
                _ => {
                    let text = e.to_string();
                    let line = text
                        .lines()
                        .next()
                        .unwrap_or("invalid arguments")
                        .trim_start_matches("error: ");
                    eprintln!("error[E_USAGE]: {line}");
                    2
                }
            };
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            report(&e);
            e.exit_code()
        }
    }
}

pub fn report(e: &CliError) {
    eprintln!("{e}");
}
