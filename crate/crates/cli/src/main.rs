//! `ecp`: configuration-driven runner for the conformal-prediction
//! navigation benchmark.

mod audit;
mod output;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ecp_core::config::ConfigMap;
use ecp_core::dataset::{load_annotations, write_timeline_cache, FormatSpec};
use ecp_core::runner::run_experiment;

#[derive(Parser)]
#[command(name = "ecp", version, about = "Egocentric conformal prediction MPC benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run configured episodes; writes per-episode logs, metrics, and a
    /// summary table.
    Run(RunArgs),
    /// Recompute per-input (or per-horizon) running coverage from
    /// finished run logs.
    CoverageAudit(AuditArgs),
    /// Parse a raw annotation file and cache the canonical resampled
    /// timeline.
    Ingest(IngestArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Override the controller: ecp or acp.
    #[arg(long)]
    controller: Option<String>,
    /// Override the episode repeat count.
    #[arg(long)]
    repeat: Option<usize>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config `out_dir`, then
    /// $ECP_OUT_DIR, then ./out.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Extra `key=value` config overrides, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct AuditArgs {
    /// Directory holding *.log.json files from a finished run.
    #[arg(long)]
    run_dir: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    /// Raw annotation file (frame, id, x, y columns).
    #[arg(long)]
    input: PathBuf,
    /// Scene name recorded in the cache.
    #[arg(long)]
    name: String,
    /// Column order, e.g. "frame id x y".
    #[arg(long)]
    columns: Option<String>,
    /// Native frame stride; inferred when omitted.
    #[arg(long)]
    stride: Option<i64>,
    /// Cache path; defaults to <out_dir>/<name>.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 8)]
    seed: u64,
}

fn default_out_dir(explicit: Option<PathBuf>, from_config: Option<PathBuf>) -> PathBuf {
    explicit
        .or(from_config)
        .or_else(|| std::env::var_os("ECP_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut map = ConfigMap::load(&args.config)
        .with_context(|| format!("loading config {}", args.config.display()))?;
    for pair in &args.sets {
        let Some((key, value)) = pair.split_once('=') else {
            bail!("--set expects KEY=VALUE, got {pair:?}");
        };
        map.set(key.trim(), value.trim())?;
    }
    if let Some(controller) = &args.controller {
        map.set("controller", controller)?;
    }
    if let Some(repeat) = args.repeat {
        map.set("repeat", &repeat.to_string())?;
    }
    if let Some(seed) = args.seed {
        map.set("seed", &seed.to_string())?;
    }
    let experiment = map.build()?;
    let out_dir = default_out_dir(args.out_dir, experiment.out_dir.clone());
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let outcomes = run_experiment(&experiment, None)?;
    for outcome in &outcomes {
        output::write_episode_files(&out_dir, outcome)?;
    }
    output::write_summary(&out_dir)?;
    println!(
        "wrote {} episode(s) to {}",
        outcomes.len(),
        out_dir.display()
    );
    print!("{}", output::render_summary_table(&out_dir)?);
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut format = match &args.columns {
        Some(cols) => FormatSpec::from_columns(cols)?,
        None => FormatSpec::default(),
    };
    format.frame_stride = args.stride;
    let timeline = load_annotations::<f64>(&args.input, &format, &args.name)
        .with_context(|| format!("ingesting {}", args.input.display()))?;

    let out = match args.out {
        Some(p) => p,
        None => default_out_dir(None, None).join(format!("{}.jsonl", args.name)),
    };
    if let Some(parent) = out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut bytes = Vec::new();
    write_timeline_cache(&mut bytes, &timeline)?;
    std::fs::write(&out, &bytes)?;

    let mut ids = std::collections::BTreeSet::new();
    for frame in timeline.frames() {
        for (id, _) in frame.iter() {
            ids.insert(id.clone());
        }
    }
    let b = timeline.scene_bounds;
    println!("scene {}: {} frames, {} tracked pedestrians", args.name, timeline.len(), ids.len());
    println!("bounds: [{}, {}] x [{}, {}]", b.min_x, b.max_x, b.min_y, b.max_y);
    println!("cache: {}", out.display());
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> Result<()> {
    let results = ecp_core::selftest::run_all(args.seed);
    let mut failures = 0;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", r.name, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        bail!("{failures} selftest check(s) failed");
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::CoverageAudit(args) => audit::cmd_coverage_audit(args.run_dir),
        Command::Ingest(args) => cmd_ingest(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}
