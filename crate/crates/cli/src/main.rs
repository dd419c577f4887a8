//! `grushin`: file-driven experiments for the critical Grushin problem.
//!
//! Exit status: 0 success, 2 flagged (concentration or uncertified result),
//! 1 error.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{ExperimentConfig, Kind};
use output::OutputDir;

#[derive(Parser)]
#[command(name = "grushin", version, about = "Experiments for the critical semilinear Grushin problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (overrides `out` in the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// cells per axis, comma separated (overrides `resolutions`)
    #[arg(long, global = true, value_delimiter = ',')]
    resolution: Option<Vec<usize>>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// principal eigenpair of -Δ_G u = λ|x|^{2β} u
    Eigen,
    /// sharp Sobolev constant and the extremal family
    Sobolev,
    /// ε-asymptotics of the cutoff family
    Asymptotics,
    /// Case 1: f = λ|x|^{2β} u
    SolveCase1,
    /// Case 2: f = μ|x|^{2β} u^q + |x|^{2k} h
    SolveCase2,
    /// Pohozaev identity on computed solutions
    Pohozaev,
    /// G-star-shape test of the domain
    Starshape,
    /// interpolation, Hardy and weak-norm inequalities
    Inequalities,
    /// existence/nonexistence regime of the configured problem
    Classify,
    /// convergence study over a geometric resolution ladder
    Converge,
}

impl Command {
    fn kind(self) -> Kind {
        match self {
            Command::Eigen => Kind::Eigen,
            Command::Sobolev => Kind::Sobolev,
            Command::Asymptotics => Kind::Asymptotics,
            Command::SolveCase1 => Kind::Case1,
            Command::SolveCase2 => Kind::Case2,
            Command::Pohozaev => Kind::Pohozaev,
            Command::Starshape => Kind::Starshape,
            Command::Inequalities => Kind::Inequalities,
            Command::Classify => Kind::Classify,
            Command::Converge => Kind::Convergence,
        }
    }
}

#[derive(Serialize)]
struct Versions {
    cli: &'static str,
    core: &'static str,
}

#[derive(Serialize)]
struct ExperimentReport<'a> {
    kind: &'static str,
    versions: Versions,
    config: &'a ExperimentConfig,
    domain: String,
    flagged: bool,
    flags: &'a [String],
    results: serde_json::Value,
    /// artifacts written before this report, in order
    files: Vec<String>,
}

#[derive(Serialize)]
struct Timing {
    kind: &'static str,
    wall_clock_s: f64,
}

enum Outcome {
    Clean,
    Flagged,
}

fn run(cli: Cli) -> Result<Outcome> {
    let kind = cli.command.kind();
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(r) = cli.resolution {
        cfg.resolutions = r;
    }
    cfg.resolve(kind);
    let errs = cfg.validate(kind);
    if !errs.is_empty() {
        anyhow::bail!("invalid configuration:\n  {}", errs.join("\n  "));
    }
    cfg.resolutions.sort_unstable();
    cfg.resolutions.dedup();

    let start = Instant::now();
    let mut out = OutputDir::create(&PathBuf::from(cfg.out_dir()))?;
    out.text("config.toml", &cfg.to_toml()?)?;
    let mut ctx = experiments::Ctx { cfg: &cfg, kind, out, flags: Vec::new() };
    let results = experiments::run(&mut ctx)?;
    let experiments::Ctx { mut out, flags, .. } = ctx;

    let report = ExperimentReport {
        kind: kind.name(),
        versions: Versions { cli: env!("CARGO_PKG_VERSION"), core: grushin_core::VERSION },
        config: &cfg,
        domain: cfg.domain_shape()?.label(),
        flagged: !flags.is_empty(),
        flags: &flags,
        results,
        files: out.manifest(),
    };
    out.json(&format!("{}.json", kind.name()), &report)?;
    out.timing(&Timing { kind: kind.name(), wall_clock_s: start.elapsed().as_secs_f64() })?;

    for f in &flags {
        eprintln!("flagged: {f}");
    }
    Ok(if flags.is_empty() { Outcome::Clean } else { Outcome::Flagged })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
