//! Run configuration: optional JSON file, overridden by flags.

use std::path::{Path, PathBuf};

use clap::Args;
use nematic_core::grid::RadialGrid;
use nematic_core::reduced::{Init, SolverOptions};
use nematic_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub b2: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    /// Elastic constant; 0 is the harmonic-map limit (see `limit`)
    #[arg(long = "L", value_name = "L")]
    pub l: Option<f64>,
    /// Disk radius
    #[arg(long = "R", value_name = "R")]
    pub r: Option<f64>,
    /// Defect index is k/2
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    /// Radial intervals
    #[arg(long)]
    pub n: Option<usize>,
    /// Angular nodes
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// explicit, linear, or a profile CSV path
    #[arg(long)]
    pub init: Option<String>,
    /// JSON file with any of the above keys
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
}

/// Keys accepted in a config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub a2: Option<f64>,
    pub b2: Option<f64>,
    pub c2: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub k: Option<i32>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub init: Option<String>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub k: i32,
    pub n: usize,
    pub m: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub init: String,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            a2: args.a2.or(file.a2).unwrap_or(1.0),
            b2: args.b2.or(file.b2).unwrap_or(0.0),
            c2: args.c2.or(file.c2).unwrap_or(1.0),
            l: args.l.or(file.l).unwrap_or(0.1),
            r: args.r.or(file.r).unwrap_or(1.0),
            k: args.k.or(file.k).unwrap_or(1),
            n: args.n.or(file.n).unwrap_or(512),
            m: args.m.or(file.m).unwrap_or(128),
            tol: args.tol.or(file.tol).unwrap_or(1e-9),
            max_iter: args.max_iter.or(file.max_iter).unwrap_or(100_000),
            init: args
                .init
                .clone()
                .or(file.init)
                .unwrap_or_else(|| "explicit".into()),
        };
        cfg.params()?;
        if !(cfg.tol > 0.0) {
            return Err(CliError::Config(format!(
                "tol must be positive, got {}",
                cfg.tol
            )));
        }
        Ok(cfg)
    }

    /// Model parameters; validated (including `k ≠ 0`).
    pub fn params(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(
            self.a2, self.b2, self.c2, self.l, self.r, self.k,
        )?)
    }

    /// Parameters for commands that need `L > 0`.
    pub fn finite_l_params(&self, command: &str) -> CliResult<ModelParams> {
        let p = self.params()?;
        if p.l <= 0.0 {
            return Err(CliError::Config(format!(
                "`{command}` needs L > 0; for the L = 0 harmonic-map problem use the `limit` command"
            )));
        }
        Ok(p)
    }

    pub fn radial_grid(&self) -> CliResult<RadialGrid> {
        Ok(RadialGrid::default_for(self.k, self.r, self.n)?)
    }

    pub fn solver_options(&self, grid: &RadialGrid) -> CliResult<SolverOptions> {
        let init = match self.init.as_str() {
            "explicit" => Init::ExplicitLimit,
            "linear" => Init::Linear,
            path => {
                let p = nematic_core::io::read_profile(Path::new(path))?;
                if !p.grid.same_nodes(grid) {
                    return Err(CliError::Input(format!(
                        "initial profile {path} is not sampled on the solver grid (n = {}, R = {})",
                        self.n, self.r
                    )));
                }
                Init::Profile(p)
            }
        };
        Ok(SolverOptions {
            tol: self.tol,
            max_flow_iter: self.max_iter,
            init,
            ..Default::default()
        })
    }
}

fn load_file(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}
