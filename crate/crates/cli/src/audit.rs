//! Coverage audit: replays staged checks from run logs and emits
//! plot-ready running-coverage series.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use ecp_core::harness::{recompute_coverage, ControllerKind, EpisodeLog};

pub fn cmd_coverage_audit(run_dir: PathBuf) -> Result<()> {
    let mut logs: Vec<PathBuf> = fs::read_dir(&run_dir)
        .with_context(|| format!("reading {}", run_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().ends_with(".log.json")))
        .collect();
    logs.sort();
    if logs.is_empty() {
        bail!("no *.log.json files found in {}", run_dir.display());
    }

    for path in logs {
        let text = fs::read_to_string(&path)?;
        let log: EpisodeLog<f64> =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if log.resolved.is_empty() {
            bail!("{} holds no resolved coverage checks", path.display());
        }

        // The recomputation from staged checks and realizations must
        // reproduce the recorded events bit for bit.
        let replayed = recompute_coverage(&log);
        if replayed != log.resolved {
            bail!(
                "{}: recomputed coverage events disagree with the recorded ones",
                path.display()
            );
        }

        let out_path = path.with_file_name(format!(
            "{}.coverage.csv",
            path.file_name()
                .unwrap()
                .to_string_lossy()
                .trim_end_matches(".log.json")
        ));
        let mut csv = String::from("step,series,running_coverage\n");
        let mut finals: Vec<(String, f64)> = Vec::new();
        match log.controller {
            ControllerKind::Ecp => {
                // One series per first-epoch input, horizon-1 checks.
                let mut inputs: Vec<u16> = log
                    .resolved
                    .iter()
                    .filter(|e| e.horizon == 1 && !e.prefix.is_empty())
                    .map(|e| e.prefix[0])
                    .collect();
                inputs.sort_unstable();
                inputs.dedup();
                for input in inputs {
                    let mut covered = 0usize;
                    let mut total = 0usize;
                    let mut running = 0.0;
                    for event in log
                        .resolved
                        .iter()
                        .filter(|e| e.horizon == 1 && e.prefix.first() == Some(&input))
                    {
                        total += 1;
                        if event.covered {
                            covered += 1;
                        }
                        running = covered as f64 / total as f64;
                        csv.push_str(&format!("{},{input},{running}\n", event.due_frame));
                    }
                    finals.push((format!("input {input}"), running));
                }
            }
            ControllerKind::Acp => {
                // One series per horizon.
                let mut horizons: Vec<usize> = log.resolved.iter().map(|e| e.horizon).collect();
                horizons.sort_unstable();
                horizons.dedup();
                for horizon in horizons {
                    let mut covered = 0usize;
                    let mut total = 0usize;
                    let mut running = 0.0;
                    for event in log.resolved.iter().filter(|e| e.horizon == horizon) {
                        total += 1;
                        if event.covered {
                            covered += 1;
                        }
                        running = covered as f64 / total as f64;
                        csv.push_str(&format!("{},{horizon},{running}\n", event.due_frame));
                    }
                    finals.push((format!("horizon {horizon}"), running));
                }
            }
        }
        fs::write(&out_path, csv)?;
        let summary: Vec<String> = finals
            .iter()
            .map(|(series, value)| format!("{series}: {value:.3}"))
            .collect();
        println!(
            "{} [{}] -> {} ({})",
            path.file_name().unwrap().to_string_lossy(),
            log.controller,
            out_path.file_name().unwrap().to_string_lossy(),
            summary.join(", ")
        );
    }
    Ok(())
}
