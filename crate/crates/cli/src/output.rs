//! Per-episode output files and the run summary table.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use ecp_core::harness::{write_radii_csv, write_steps_csv};
use ecp_core::runner::EpisodeOutcome;

/// Flat metrics record: the report fields plus run identifiers, one
/// JSON file per episode. The summary table is rebuilt purely from
/// these files.
#[derive(Debug, Serialize, Deserialize)]
pub struct MetricsFile {
    pub scenario: String,
    pub controller: String,
    pub episode: usize,
    pub seed: u64,
    pub travel_time: usize,
    pub collision_rate: f64,
    pub average_cost: f64,
    pub infeasibility_rate: f64,
}

pub fn episode_stem(outcome: &EpisodeOutcome) -> String {
    format!(
        "{}_{}_ep{:02}",
        outcome.config.scenario_name, outcome.config.controller, outcome.episode_index
    )
}

/// Writes the four per-episode artifacts: steps CSV, radii CSV, metrics
/// JSON, and the full log JSON.
pub fn write_episode_files(out_dir: &Path, outcome: &EpisodeOutcome) -> Result<()> {
    let stem = episode_stem(outcome);

    let mut steps = Vec::new();
    write_steps_csv(&mut steps, &outcome.log)?;
    fs::write(out_dir.join(format!("{stem}.steps.csv")), steps)?;

    let mut radii = Vec::new();
    write_radii_csv(&mut radii, &outcome.log)?;
    fs::write(out_dir.join(format!("{stem}.radii.csv")), radii)?;

    let metrics = MetricsFile {
        scenario: outcome.config.scenario_name.clone(),
        controller: outcome.config.controller.to_string(),
        episode: outcome.episode_index,
        seed: outcome.log.seed,
        travel_time: outcome.metrics.travel_time,
        collision_rate: outcome.metrics.collision_rate,
        average_cost: outcome.metrics.average_cost,
        infeasibility_rate: outcome.metrics.infeasibility_rate,
    };
    let mut metrics_json = serde_json::to_string_pretty(&metrics)?;
    metrics_json.push('\n');
    fs::write(out_dir.join(format!("{stem}.metrics.json")), metrics_json)?;

    let mut log_json = serde_json::to_string(&outcome.log)?;
    log_json.push('\n');
    fs::write(out_dir.join(format!("{stem}.log.json")), log_json)?;
    Ok(())
}

fn read_all_metrics(out_dir: &Path) -> Result<Vec<MetricsFile>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(out_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().ends_with(".metrics.json")))
        .collect();
    paths.sort();
    let mut all = Vec::with_capacity(paths.len());
    for path in paths {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        all.push(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?);
    }
    Ok(all)
}

/// Rebuilds `summary.csv` from every metrics file in the directory:
/// per-episode rows plus one mean row per (scenario, controller).
pub fn write_summary(out_dir: &Path) -> Result<()> {
    let all = read_all_metrics(out_dir)?;
    let mut csv = String::from("scenario,controller,episode,collision_rate,average_cost,travel_time,infeasibility_rate\n");
    for m in &all {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            m.scenario,
            m.controller,
            m.episode,
            m.collision_rate,
            m.average_cost,
            m.travel_time,
            m.infeasibility_rate
        ));
    }
    for ((scenario, controller), group) in group_by_run(&all) {
        let n = group.len() as f64;
        let collis: f64 = group.iter().map(|m| m.collision_rate).sum::<f64>() / n;
        let cost: f64 = group.iter().map(|m| m.average_cost).sum::<f64>() / n;
        let trav: f64 = group.iter().map(|m| m.travel_time as f64).sum::<f64>() / n;
        let infeas: f64 = group.iter().map(|m| m.infeasibility_rate).sum::<f64>() / n;
        csv.push_str(&format!(
            "{scenario},{controller},mean,{collis},{cost},{trav},{infeas}\n"
        ));
    }
    fs::write(out_dir.join("summary.csv"), csv)?;
    Ok(())
}

fn group_by_run(all: &[MetricsFile]) -> Vec<((String, String), Vec<&MetricsFile>)> {
    let mut groups: std::collections::BTreeMap<(String, String), Vec<&MetricsFile>> =
        Default::default();
    for m in all {
        groups
            .entry((m.scenario.clone(), m.controller.clone()))
            .or_default()
            .push(m);
    }
    groups.into_iter().collect()
}

/// Plain-text mean table in the benchmark's column order.
pub fn render_summary_table(out_dir: &Path) -> Result<String> {
    let all = read_all_metrics(out_dir)?;
    let mut table = String::from("scenario   controller   Collis.   Cost        Trav.    Infeas.\n");
    for ((scenario, controller), group) in group_by_run(&all) {
        let n = group.len() as f64;
        let collis: f64 = group.iter().map(|m| m.collision_rate).sum::<f64>() / n;
        let cost: f64 = group.iter().map(|m| m.average_cost).sum::<f64>() / n;
        let trav: f64 = group.iter().map(|m| m.travel_time as f64).sum::<f64>() / n;
        let infeas: f64 = group.iter().map(|m| m.infeasibility_rate).sum::<f64>() / n;
        table.push_str(&format!(
            "{scenario:<10} {controller:<12} {collis:<9.3} {cost:<11.2} {trav:<8.2} {infeas:.3}\n"
        ));
    }
    Ok(table)
}
