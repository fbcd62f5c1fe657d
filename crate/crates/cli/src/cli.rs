use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "srrw", version, about = "Experiments with the self-repelling walk with directed edges")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory [default: runs/<command>-<unix time>].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file with the command's settings; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one walk and write its local times.
    Simulate(SimulateArgs),
    /// Stationary law of the eta chain.
    Stationary(StationaryArgs),
    /// Sample a local-time profile at T+_(x,m) with the Ray-Knight sampler.
    Profile(ProfileArgs),
    /// Exact bivariate law of partial sums against its Gaussian prediction.
    Lclt(LcltArgs),
    /// Run a Monte Carlo campaign from a config file.
    Campaign,
    /// Re-run the job recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Weight spec: exp:<rate>, ramp:<slope>,<floor> or table:<start>:<v0>,<v1>,...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct StationaryArgs {
    /// Weight spec: exp:<rate>, ramp:<slope>,<floor> or table:<start>:<v0>,<v1>,...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Half width of the state window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    /// Weight spec: exp:<rate>, ramp:<slope>,<floor> or table:<start>:<v0>,<v1>,...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Target site, at most 0.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    /// Local-time level.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawSource {
    /// Law of r = eta + 1/2 under the stationary law of w.
    FromStationary,
    /// r = +-1/2 with equal probability.
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossSign {
    Minus,
    Plus,
}

#[derive(Debug, Args, Serialize)]
pub struct LcltArgs {
    /// Weight spec: exp:<rate>, ramp:<slope>,<floor> or table:<start>:<v0>,<v1>,...
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Number of summands.
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<LawSource>,
    /// Half width of the comparison box in scaled units.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Sign of the cross term in the Gaussian exponent.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross: Option<CrossSign>,
    /// Also compare conditional laws on |a| <= 2 sqrt(N), |b| <= 2 N^1.5.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub conditional: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by a previous run.
    pub manifest: PathBuf,
    /// Compare every output byte for byte with the original run.
    #[arg(long)]
    pub check: bool,
}
