//! Executes configured experiments: scenario loading, predictor
//! selection, and per-episode fan-out.

use std::fs::File;
use std::io::BufReader;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{builtin_synthetic, Experiment, ScenarioSource};
use crate::dataset::{load_annotations, read_timeline_cache, DatasetError, ScenarioTimeline};
use crate::harness::{
    compute_metrics, run_episode, ControllerKind, EpisodeConfig, EpisodeLog, HarnessError,
    MetricsReport,
};
use crate::predictor::{ConstantVelocityPredictor, PrecomputedPredictions, PredictError, Predictor};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Harness(#[from] HarnessError<f64>),
    #[error("unknown built-in synthetic scenario {0:?}")]
    UnknownSynthetic(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One finished episode with its effective config and metrics.
#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub episode_index: usize,
    pub config: EpisodeConfig<f64>,
    pub log: EpisodeLog<f64>,
    pub metrics: MetricsReport<f64>,
}

/// Loads the scenario a file-backed experiment names; synthetic sources
/// are generated per episode instead.
pub fn load_file_scenario(experiment: &Experiment) -> Result<Option<ScenarioTimeline<f64>>, RunError> {
    match &experiment.scenario {
        ScenarioSource::Raw { path, format } => Ok(Some(load_annotations(
            path,
            format,
            &experiment.episode.scenario_name,
        )?)),
        ScenarioSource::Cache { path } => {
            let reader = BufReader::new(File::open(path)?);
            Ok(Some(read_timeline_cache(reader, &experiment.episode.scenario_name)?))
        }
        ScenarioSource::Synthetic { .. } => Ok(None),
    }
}

/// Runs every episode of the experiment (seeds `base..base+repeat`,
/// scenario offset advancing by `episode_frame_offset`), in parallel.
pub fn run_experiment(
    experiment: &Experiment,
    controller_override: Option<ControllerKind>,
) -> Result<Vec<EpisodeOutcome>, RunError> {
    let base_scenario = load_file_scenario(experiment)?;
    (0..experiment.repeat)
        .into_par_iter()
        .map(|k| {
            let mut config = experiment.episode.clone();
            config.seed = experiment.episode.seed + k as u64;
            if let Some(controller) = controller_override {
                config.controller = controller;
            }
            let scenario = match (&experiment.scenario, &base_scenario) {
                (ScenarioSource::Synthetic { name }, _) => {
                    let frames = config.warmup_frames() + config.t_max + 1;
                    builtin_synthetic(name, frames, config.seed)
                        .ok_or_else(|| RunError::UnknownSynthetic(name.clone()))?
                }
                (_, Some(base)) => base.suffix(k * experiment.episode_frame_offset),
                _ => unreachable!("file-backed sources were loaded above"),
            };
            if !experiment.explicit_bounds {
                config.safety.state_bounds = scenario.scene_bounds;
            }
            let predictor: Box<dyn Predictor<f64>> = match &experiment.predictions {
                Some(path) => Box::new(PrecomputedPredictions::load(path, config.horizon)?),
                None => Box::new(ConstantVelocityPredictor::new(config.horizon)),
            };
            let log = run_episode(&config, &scenario, predictor.as_ref())?;
            let metrics = compute_metrics(&log, &config)?;
            Ok(EpisodeOutcome { episode_index: k, config, log, metrics })
        })
        .collect()
}
