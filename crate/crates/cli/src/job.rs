//! Resolved jobs: every setting explicit, so a job fully determines its
//! outputs.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use srrw::expectations::Expectations;
use srrw::harness::{run_campaign, CampaignConfig, WINDOW};
use srrw::lclt::{compare_bivariate, conditional_sup_error, exact_bivariate_pmf, BivariateOptions, CrossTerm};
use srrw::ray_knight::{
    rk_profile_sampler, stationary_distribution, EtaKernel, Lattice1DDistribution, LatticeOffset, StationaryOptions,
    DEFAULT_EPS_TAIL,
};
use srrw::rng::replica_rng;
use srrw::walk::{LocalTimeTable, Walker};
use srrw::WeightFunction;

use crate::cli::{CrossSign, LawSource};

/// Stationary mean must sit within this of -1/2.
pub const MEAN_TOL: f64 = 1e-6;
/// Largest tolerated asymmetry of the law of `r`.
pub const SYMMETRY_TOL: f64 = 1e-8;

fn default_weight() -> WeightFunction {
    WeightFunction::exponential(1.0).expect("exp:1 is valid")
}
fn default_seed() -> u64 {
    1
}
fn default_steps() -> u64 {
    100
}
fn default_window() -> i64 {
    WINDOW.1
}
fn default_m() -> u64 {
    1
}
fn default_n() -> usize {
    100
}
fn default_law() -> LawSource {
    LawSource::FromStationary
}
fn default_half_width() -> f64 {
    3.0
}
fn default_cross() -> CrossSign {
    CrossSign::Minus
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateJob {
    #[serde(default = "default_weight")]
    pub w: WeightFunction,
    #[serde(default = "default_steps")]
    pub steps: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryJob {
    #[serde(default = "default_weight")]
    pub w: WeightFunction,
    #[serde(default = "default_window")]
    pub window: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJob {
    #[serde(default = "default_weight")]
    pub w: WeightFunction,
    #[serde(default)]
    pub x: i64,
    #[serde(default = "default_m")]
    pub m: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcltJob {
    #[serde(default = "default_weight")]
    pub w: WeightFunction,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default = "default_law")]
    pub law: LawSource,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_cross")]
    pub cross: CrossSign,
    #[serde(default)]
    pub conditional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Simulate(SimulateJob),
    Stationary(StationaryJob),
    Profile(ProfileJob),
    Lclt(LcltJob),
    Campaign(CampaignConfig),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate(_) => "simulate",
            Self::Stationary(_) => "stationary",
            Self::Profile(_) => "profile",
            Self::Lclt(_) => "lclt",
            Self::Campaign(_) => "campaign",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Simulate(j) => Some(j.seed),
            Self::Profile(j) => Some(j.seed),
            Self::Campaign(c) => Some(c.seed),
            Self::Stationary(_) | Self::Lclt(_) => None,
        }
    }

    /// Files the job writes, relative to the output directory.
    pub fn outputs(&self) -> Vec<String> {
        let names: Vec<&str> = match self {
            Self::Simulate(_) => vec!["local_times.csv", "summary.json"],
            Self::Stationary(_) => vec!["nu.csv", "stationary.json"],
            Self::Profile(_) => vec!["profile.csv", "summary.json"],
            Self::Lclt(_) => vec!["lclt_grid.csv", "lclt.json"],
            Self::Campaign(_) => vec!["report.json"],
        };
        names.into_iter().map(String::from).collect()
    }

    /// Builds the job for `command` from an optional config document
    /// overlaid with flag values.
    pub fn resolve(command: &str, config: Option<Value>, flags: Value) -> Result<Self> {
        let mut merged = match config {
            Some(Value::Object(map)) => map,
            Some(_) => bail!("config file must hold a table of settings"),
            None => Default::default(),
        };
        if let Value::Object(over) = flags {
            merged.extend(over);
        }
        merged.insert("command".into(), Value::String(command.into()));
        serde_json::from_value(Value::Object(merged)).with_context(|| format!("invalid settings for `{command}`"))
    }

    /// Runs the job into `dir`; returns whether every tolerance held.
    pub fn run(&self, dir: &Path, threads: usize, exp: &Expectations) -> Result<bool> {
        match self {
            Self::Simulate(j) => simulate(j, dir),
            Self::Stationary(j) => stationary(j, dir),
            Self::Profile(j) => profile(j, dir),
            Self::Lclt(j) => lclt(j, dir, exp),
            Self::Campaign(cfg) => {
                let cfg = CampaignConfig { threads, ..cfg.clone() };
                let report = run_campaign(&cfg, exp)?;
                report.write_to(dir)?;
                Ok(report.passed())
            }
        }
    }

    /// Output files actually produced, once the job has run.
    pub fn produced(&self, dir: &Path) -> Vec<String> {
        let mut names = self.outputs();
        if let Self::Campaign(_) = self {
            if let Ok(entries) = std::fs::read_dir(dir) {
                let mut csv: Vec<String> = entries
                    .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
                    .filter(|n| n.ends_with(".csv"))
                    .collect();
                csv.sort();
                names.extend(csv);
            }
        }
        names
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<()> {
    write(dir, name, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn local_time_csv(t: &LocalTimeTable) -> String {
    let mut out = String::from("site,l_plus,l_minus\n");
    for (x, p, m) in t.iter() {
        let _ = writeln!(out, "{x},{p},{m}");
    }
    out
}

fn simulate(j: &SimulateJob, dir: &Path) -> Result<bool> {
    let mut walker = Walker::new(&j.w)?;
    let endpoint = walker.run(&mut replica_rng(j.seed, 0), j.steps)?;
    let t = walker.local_times();
    write(dir, "local_times.csv", &local_time_csv(&t))?;
    write_json(
        dir,
        "summary.json",
        &json!({
            "weight": j.w.to_string(),
            "steps": j.steps,
            "seed": j.seed,
            "endpoint": endpoint,
            "rho": t.rho().to_string(),
            "lambda": t.lambda().to_string(),
        }),
    )?;
    Ok(true)
}

fn stationary(j: &StationaryJob, dir: &Path) -> Result<bool> {
    if j.window < 1 {
        bail!("window must be at least 1, got {}", j.window);
    }
    let window = (-j.window, j.window);
    let kernel = EtaKernel::new(&j.w, window, DEFAULT_EPS_TAIL)?;
    let st = stationary_distribution(&kernel, window, StationaryOptions::default())?;
    let mut csv = String::from("eta,nu\n");
    for (i, p) in st.nu.iter() {
        let _ = writeln!(csv, "{i},{p:e}");
    }
    write(dir, "nu.csv", &csv)?;
    let asymmetry = st.r_law.asymmetry();
    let mean_ok = (st.mean + 0.5).abs() < MEAN_TOL;
    let sym_ok = asymmetry < SYMMETRY_TOL;
    write_json(
        dir,
        "stationary.json",
        &json!({
            "weight": j.w.to_string(),
            "window": j.window,
            "mean": st.mean,
            "sigma2": st.sigma2,
            "r_asymmetry": asymmetry,
            "residual": st.residual,
            "iterations": st.iterations,
            "leakage": st.leakage,
            "boundary_mass": st.boundary_mass,
            "checks": {
                "mean": { "value": st.mean, "criterion": format!("|mean + 0.5| < {MEAN_TOL}"), "passed": mean_ok },
                "symmetry": { "value": asymmetry, "criterion": format!("< {SYMMETRY_TOL}"), "passed": sym_ok },
            },
        }),
    )?;
    Ok(mean_ok && sym_ok)
}

fn profile(j: &ProfileJob, dir: &Path) -> Result<bool> {
    let t = rk_profile_sampler(&j.w, j.x, j.m, j.seed)?;
    write(dir, "profile.csv", &local_time_csv(&t))?;
    write_json(
        dir,
        "summary.json",
        &json!({
            "weight": j.w.to_string(),
            "x": j.x,
            "m": j.m,
            "seed": j.seed,
            "inverse_time": t.total(),
            "rho": t.rho().to_string(),
            "lambda": t.lambda().to_string(),
        }),
    )?;
    Ok(true)
}

fn step_law(j: &LcltJob) -> Result<Lattice1DDistribution> {
    Ok(match j.law {
        LawSource::FromStationary => {
            let kernel = EtaKernel::new(&j.w, WINDOW, DEFAULT_EPS_TAIL)?;
            stationary_distribution(&kernel, WINDOW, StationaryOptions::default())?.r_law
        }
        LawSource::TwoPoint => Lattice1DDistribution::new(LatticeOffset::Half, -1, vec![0.5, 0.5]),
    })
}

fn lclt(j: &LcltJob, dir: &Path, exp: &Expectations) -> Result<bool> {
    let law = step_law(j)?;
    let pmf = exact_bivariate_pmf(&law, j.n, &BivariateOptions::default())?;
    let cross = match j.cross {
        CrossSign::Minus => CrossTerm::Minus,
        CrossSign::Plus => CrossTerm::Plus,
    };
    let cmp = compare_bivariate(&pmf, j.half_width, cross, None, 61)?;
    write(dir, "lclt_grid.csv", &cmp.to_csv())?;
    let max = exp.lclt.bivariate_sup_max;
    let mut passed = cmp.sup_scaled_error < max;
    let mut summary = json!({
        "weight": j.w.to_string(),
        "N": j.n,
        "law": j.law,
        "cross": j.cross,
        "sigma2": cmp.sigma2,
        "half_width": j.half_width,
        "lattice_points": cmp.lattice_points,
        "sup_scaled_error": cmp.sup_scaled_error,
        "argsup": [cmp.argsup.0, cmp.argsup.1],
        "pruned_mass": cmp.pruned_mass,
        "criterion": format!("< {max}"),
    });
    if j.conditional {
        let nf = j.n as f64;
        let c = conditional_sup_error(&pmf, 2.0 * nf.sqrt(), 2.0 * nf.powf(1.5), None)?;
        let cmax = exp.lclt.conditional_sup_max;
        passed &= c.sup_scaled_error < cmax;
        summary["conditional"] = json!({
            "rows": c.rows,
            "lattice_points": c.lattice_points,
            "sup_scaled_error": c.sup_scaled_error,
            "argsup": [c.argsup.0, c.argsup.1],
            "criterion": format!("< {cmax}"),
        });
    }
    summary["passed"] = Value::Bool(passed);
    write_json(dir, "lclt.json", &summary)?;
    Ok(passed)
}
