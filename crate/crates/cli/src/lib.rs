//! Command-line front end for the `orthoglide` kinematics library.
//!
//! Exit codes: `0` success, `1` geometrically infeasible query, `2` usage,
//! parse or configuration error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use orthoglide::{
    BranchTriple, CartesianPoint, JointVector, KinematicsError, ManipulatorParams, PostureIndex,
};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod report;
pub mod trajectory;

use config::{Config, CONFIG_ENV};
use report::{Format, Output};
use trajectory::{SingularityPolicy, TrajectoryRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

#[derive(Debug, Parser)]
#[command(
    name = "orthoglide",
    version,
    about = "Orthoglide kinematics and workspace queries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Leg length L.
    #[arg(short = 'L', long = "leg-length")]
    pub leg_length: f64,
    /// key=value config file.
    #[arg(long, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub eps_geom: Option<f64>,
    /// Absolute branch tolerance (length).
    #[arg(long)]
    pub eps_branch: Option<f64>,
    #[arg(long)]
    pub direction_floor: Option<f64>,
    /// JSON output (default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inverse kinematics of one point.
    Ik {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'p', long = "point", allow_hyphen_values = true, value_parser = parse_triple)]
        point: [f64; 3],
        #[arg(long)]
        branch: Option<BranchTriple>,
    },
    /// Direct kinematics of one joint vector.
    Dk {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'r', long = "rho", allow_hyphen_values = true, value_parser = parse_triple)]
        rho: [f64; 3],
        #[arg(long, allow_hyphen_values = true)]
        posture: Option<PostureIndex>,
    },
    /// Check a polyline of waypoints with the branch held fixed.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Waypoint x,y,z; repeat for each waypoint.
        #[arg(short = 'w', long = "waypoint", allow_hyphen_values = true, value_parser = parse_triple)]
        waypoints: Vec<[f64; 3]>,
        /// JSON request file; flags given alongside override its fields.
        #[arg(long)]
        request: Option<PathBuf>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        branch: Option<BranchTriple>,
        #[arg(long, value_enum)]
        policy: Option<SingularityPolicy>,
    },
    /// Closed-form workspace volumes, optionally with Monte-Carlo estimates.
    Volumes {
        #[command(flatten)]
        common: Common,
        /// Number of Monte-Carlo samples.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Joint-space feasibility queries.
    Jointspace {
        #[command(subcommand)]
        command: JointspaceCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum JointspaceCommand {
    /// Feasibility of one joint vector.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'r', long = "rho", allow_hyphen_values = true, value_parser = parse_triple)]
        rho: [f64; 3],
    },
    /// Boundary surface over an n x n interior grid of directions.
    BoundarySample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: usize,
    },
}

/// Parses `x,y,z` into three finite numbers.
pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, part) in out.iter_mut().zip(&parts) {
        let v: f64 = part.parse().map_err(|e| format!("{part:?}: {e}"))?;
        if !v.is_finite() {
            return Err(format!("{part:?} is not finite"));
        }
        *o = v;
    }
    Ok(out)
}

impl Common {
    fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else {
            Format::Json
        }
    }

    fn config(&self, seed: Option<u64>) -> Result<Config, CliError> {
        let file = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        Ok(file.merged(&Config {
            eps_geom: self.eps_geom,
            eps_branch: self.eps_branch,
            direction_floor: self.direction_floor,
            seed,
        }))
    }
}

fn load_request(path: &PathBuf) -> Result<TrajectoryRequest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn build_request(
    waypoints: &[[f64; 3]],
    request: Option<&PathBuf>,
    step: Option<f64>,
    branch: Option<BranchTriple>,
    policy: Option<SingularityPolicy>,
) -> Result<TrajectoryRequest, CliError> {
    let mut req = match request {
        Some(path) => load_request(path)?,
        None => TrajectoryRequest {
            waypoints: Vec::new(),
            step: step
                .ok_or_else(|| CliError::Usage("--step is required without --request".into()))?,
            initial_branch: BranchTriple::PPP,
            policy: SingularityPolicy::default(),
        },
    };
    if !waypoints.is_empty() {
        req.waypoints = waypoints
            .iter()
            .map(|w| CartesianPoint::from_array(*w))
            .collect();
    }
    if let Some(s) = step {
        req.step = s;
    }
    if let Some(b) = branch {
        req.initial_branch = b;
    }
    if let Some(p) = policy {
        req.policy = p;
    }
    req.validate()?;
    Ok(req)
}

/// Runs a parsed command, returning the output and its render format.
pub fn execute(cli: &Cli) -> Result<(Output, Format), CliError> {
    let setup =
        |common: &Common, seed: Option<u64>| -> Result<(ManipulatorParams, Config), CliError> {
            let cfg = common.config(seed)?;
            Ok((cfg.params(common.leg_length)?, cfg))
        };
    match &cli.command {
        Command::Ik {
            common,
            point,
            branch,
        } => {
            let (params, _) = setup(common, None)?;
            let out = commands::ik(CartesianPoint::from_array(*point), *branch, &params);
            Ok((out, common.format()))
        }
        Command::Dk {
            common,
            rho,
            posture,
        } => {
            let (params, _) = setup(common, None)?;
            let out = commands::dk(JointVector::from_array(*rho), *posture, &params);
            Ok((out, common.format()))
        }
        Command::Trajectory {
            common,
            waypoints,
            request,
            step,
            branch,
            policy,
        } => {
            let (params, _) = setup(common, None)?;
            let req = build_request(waypoints, request.as_ref(), *step, *branch, *policy)?;
            Ok((commands::trajectory(&req, &params)?, common.format()))
        }
        Command::Volumes { common, mc, seed } => {
            let (params, cfg) = setup(common, *seed)?;
            let out = commands::volumes(*mc, cfg.seed.unwrap_or(0), &params)?;
            Ok((out, common.format()))
        }
        Command::Jointspace { command } => match command {
            JointspaceCommand::Check { common, rho } => {
                let (params, _) = setup(common, None)?;
                let out = commands::jointspace_check(JointVector::from_array(*rho), &params);
                Ok((out, common.format()))
            }
            JointspaceCommand::BoundarySample { common, grid } => {
                let (params, _) = setup(common, None)?;
                Ok((
                    commands::jointspace_boundary_sample(*grid, &params)?,
                    common.format(),
                ))
            }
        },
    }
}

/// Full CLI entry: parses `args`, prints to stdout/stderr and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((out, format)) => {
            print!("{}", out.render(format));
            if out.feasible() {
                EXIT_OK
            } else {
                EXIT_INFEASIBLE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
