mod cli;
mod job;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::Value;
use srrw::expectations::Expectations;
use srrw::harness::CampaignConfig;

use cli::{Cli, Command, Common, ReplayArgs};
use job::Job;
use manifest::{RunManifest, MANIFEST_FILE};

/// Exit status: 0 all tolerances held, 1 a tolerance failed, 2 usage or
/// input error.
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    let Cli { common, command } = cli;
    if let Command::Replay(args) = &command {
        return replay(args, &common);
    }
    let job = resolve(&command, &common)?;
    let dir = common.out.clone().unwrap_or_else(|| default_out(job.name()));
    execute(&job, &dir, common.threads.unwrap_or(0))
}

fn read_config(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    } else {
        let v: toml::Value = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(serde_json::to_value(v)?)
    }
}

fn resolve(command: &Command, common: &Common) -> Result<Job> {
    let config = common.config.as_deref().map(read_config).transpose()?;
    let seeded = |mut flags: Value| {
        if let (Some(seed), Value::Object(map)) = (common.seed, &mut flags) {
            map.insert("seed".into(), seed.into());
        }
        flags
    };
    match command {
        Command::Simulate(a) => Job::resolve("simulate", config, seeded(serde_json::to_value(a)?)),
        Command::Stationary(a) => Job::resolve("stationary", config, serde_json::to_value(a)?),
        Command::Profile(a) => Job::resolve("profile", config, seeded(serde_json::to_value(a)?)),
        Command::Lclt(a) => Job::resolve("lclt", config, serde_json::to_value(a)?),
        Command::Campaign => {
            let value = config.context("campaign needs --config <file>")?;
            let mut cfg: CampaignConfig = serde_json::from_value(value).context("invalid campaign config")?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            cfg.threads = 0;
            cfg.validate()?;
            Ok(Job::Campaign(cfg))
        }
        Command::Replay(_) => unreachable!("handled by the caller"),
    }
}

fn default_out(name: &str) -> PathBuf {
    let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    PathBuf::from("runs").join(format!("{name}-{secs}"))
}

/// Writes the manifest, runs the job, then records the wall clock.
fn execute(job: &Job, dir: &Path, threads: usize) -> Result<bool> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = RunManifest::new(job.clone(), threads);
    manifest.write(dir)?;
    let started = Instant::now();
    let exp = Expectations::load()?;
    let passed = job.run(dir, threads, &exp)?;
    manifest.outputs = job.produced(dir);
    manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    manifest.write(dir)?;
    println!("{} -> {} ({})", job.name(), dir.display(), if passed { "pass" } else { "FAIL" });
    Ok(passed)
}

fn replay(args: &ReplayArgs, common: &Common) -> Result<bool> {
    let original = RunManifest::read(&args.manifest)?;
    let dir = common.out.clone().unwrap_or_else(|| default_out(&format!("replay-{}", original.subcommand)));
    let threads = common.threads.unwrap_or(original.threads);
    let passed = execute(&original.job, &dir, threads)?;
    if !args.check {
        return Ok(passed);
    }
    let source = args.manifest.parent().unwrap_or(Path::new("."));
    let mut identical = true;
    for name in original.outputs.iter().filter(|n| n.as_str() != MANIFEST_FILE) {
        let a = std::fs::read(source.join(name)).with_context(|| format!("reading original {name}"))?;
        let b = std::fs::read(dir.join(name)).with_context(|| format!("reading replayed {name}"))?;
        if a != b {
            eprintln!("mismatch: {name}");
            identical = false;
        }
    }
    println!("replay check: {}", if identical { "identical" } else { "DIFFERENT" });
    Ok(identical)
}
