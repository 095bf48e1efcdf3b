//! Plain-text experiment configuration: one `key = value` per line,
//! `#` comments, versionable alongside the scenario data it names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dataset::{synthetic_scenario, AgentSpec, FormatSpec, ScenarioTimeline, SyntheticSpec};
use crate::geometry::{ControlInput, GoalSpec, Point2, Rect, VehicleState};
use crate::harness::{ConfigError, ControllerKind, EpisodeConfig};
use crate::planner::{InputCatalog, SafetyConfig};

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("io error reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },
    #[error("missing required config key `{key}`")]
    Missing { key: String },
    #[error(transparent)]
    Field(#[from] ConfigError),
}

fn field_err(field: &str, message: impl Into<String>) -> ConfigFileError {
    ConfigFileError::Field(ConfigError { field: field.into(), message: message.into() })
}

/// Where the obstacle data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    /// Raw annotation text file plus its column layout.
    Raw { path: PathBuf, format: FormatSpec },
    /// Canonical cached timeline (one JSON object per line).
    Cache { path: PathBuf },
    /// A named built-in synthetic scene, regenerated per episode seed.
    Synthetic { name: String },
}

/// A fully resolved experiment: episode template plus run-level knobs.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub episode: EpisodeConfig<f64>,
    pub scenario: ScenarioSource,
    /// Precomputed-prediction file; the constant-velocity predictor is
    /// used when absent.
    pub predictions: Option<PathBuf>,
    pub repeat: usize,
    /// Scenario frame offset between consecutive episodes.
    pub episode_frame_offset: usize,
    pub out_dir: Option<PathBuf>,
    /// Whether the config pinned state bounds; otherwise the scene
    /// bounds apply.
    pub explicit_bounds: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "scenario_name",
    "scenario_columns",
    "scenario_stride",
    "predictions",
    "controller",
    "start",
    "goal",
    "arrival_radius",
    "input_cost_weight",
    "terminal_weight",
    "t_max",
    "history_len",
    "horizon",
    "decision_epochs",
    "window_len",
    "gamma",
    "target_alpha",
    "r_safe",
    "bounds",
    "fallback",
    "input_linear",
    "input_angular",
    "repeat",
    "seed",
    "episode_frame_offset",
    "out_dir",
];

/// Raw parsed key/value pairs, before typing. Flags override file keys
/// by writing into this map.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
    base_dir: PathBuf,
}

impl ConfigMap {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigFileError> {
        let mut values = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigFileError::Parse {
                    line: line_no,
                    message: format!("expected `key = value`, found {line:?}"),
                });
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigFileError::UnknownKey { key });
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigMap { values, base_dir: base_dir.into() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        Self::parse(&text, base)
    }

    /// Overrides or sets one key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigFileError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigFileError::UnknownKey { key: key.into() });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parse_f64(&self, key: &str, default: f64) -> Result<f64, ConfigFileError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| field_err(key, format!("{e}"))),
        }
    }

    fn parse_usize(&self, key: &str, default: usize) -> Result<usize, ConfigFileError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| field_err(key, format!("{e}"))),
        }
    }

    fn parse_numbers(&self, key: &str, expected: usize) -> Result<Option<Vec<f64>>, ConfigFileError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let nums: Result<Vec<f64>, _> = v.split_whitespace().map(|t| t.parse()).collect();
        let nums = nums.map_err(|e| field_err(key, format!("{e}")))?;
        if expected > 0 && nums.len() != expected {
            return Err(field_err(key, format!("expected {expected} numbers, got {}", nums.len())));
        }
        Ok(Some(nums))
    }

    fn resolve_path(&self, value: &str) -> PathBuf {
        let p = Path::new(value);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Types and validates the whole map.
    pub fn build(&self) -> Result<Experiment, ConfigFileError> {
        let scenario_raw = self
            .get("scenario")
            .ok_or(ConfigFileError::Missing { key: "scenario".into() })?;
        let scenario = if let Some(name) = scenario_raw.strip_prefix("synthetic:") {
            ScenarioSource::Synthetic { name: name.to_string() }
        } else if scenario_raw.ends_with(".jsonl") {
            ScenarioSource::Cache { path: self.resolve_path(scenario_raw) }
        } else {
            let mut format = match self.get("scenario_columns") {
                Some(cols) => FormatSpec::from_columns(cols)
                    .map_err(|e| field_err("scenario_columns", e.to_string()))?,
                None => FormatSpec::default(),
            };
            if let Some(stride) = self.get("scenario_stride") {
                let stride: i64 =
                    stride.parse().map_err(|e| field_err("scenario_stride", format!("{e}")))?;
                format.frame_stride = Some(stride);
            }
            ScenarioSource::Raw { path: self.resolve_path(scenario_raw), format }
        };

        let scenario_name = match self.get("scenario_name") {
            Some(n) => n.to_string(),
            None => match &scenario {
                ScenarioSource::Synthetic { name } => name.clone(),
                ScenarioSource::Raw { path, .. } | ScenarioSource::Cache { path } => path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "scene".into()),
            },
        };

        let controller = match self.get("controller").unwrap_or("ecp") {
            "ecp" => ControllerKind::Ecp,
            "acp" => ControllerKind::Acp,
            other => return Err(field_err("controller", format!("unknown controller {other:?}"))),
        };

        let start = self
            .parse_numbers("start", 3)?
            .unwrap_or_else(|| vec![0.0, 0.0, 0.0]);
        let goal = self
            .parse_numbers("goal", 2)?
            .ok_or(ConfigFileError::Missing { key: "goal".into() })?;

        let goal_spec = GoalSpec {
            goal_x: goal[0],
            goal_y: goal[1],
            arrival_radius: self.parse_f64("arrival_radius", 0.5)?,
            input_cost_weight: self.parse_f64("input_cost_weight", 1e-3)?,
            terminal_weight: self.parse_f64("terminal_weight", 10.0)?,
        };

        let bounds_numbers = self.parse_numbers("bounds", 4)?;
        let explicit_bounds = bounds_numbers.is_some();
        let bounds = bounds_numbers
            .map(|b| Rect::new(b[0], b[1], b[2], b[3]))
            .unwrap_or_else(|| Rect::new(-1.0, -1.0, 1.0, 1.0));

        let fallback = self
            .parse_numbers("fallback", 2)?
            .unwrap_or_else(|| vec![0.0, 0.0]);

        let linear = self
            .parse_numbers("input_linear", 0)?
            .unwrap_or_else(|| vec![-0.8, 0.0, 0.8]);
        let angular = self
            .parse_numbers("input_angular", 0)?
            .unwrap_or_else(|| vec![-0.7, 0.0, 0.7]);
        let catalog = InputCatalog::cross_product(&linear, &angular)
            .map_err(|e| field_err("input_linear", e.to_string()))?;

        let episode = EpisodeConfig {
            scenario_name,
            start_state: VehicleState::new(start[0], start[1], start[2]),
            goal: goal_spec,
            controller,
            t_max: self.parse_usize("t_max", 100)?,
            history_len: self.parse_usize("history_len", 8)?,
            horizon: self.parse_usize("horizon", 12)?,
            decision_epochs: self.parse_usize("decision_epochs", 3)?,
            window_len: self.parse_usize("window_len", 30)?,
            gamma: self.parse_f64("gamma", 0.03)?,
            safety: SafetyConfig {
                r_safe: self.parse_f64("r_safe", 0.3)?,
                state_bounds: bounds,
                target_alpha: self.parse_f64("target_alpha", 0.1)?,
                fallback_input: ControlInput::new(fallback[0], fallback[1]),
            },
            catalog,
            step_seconds: 0.4,
            seed: self.parse_usize("seed", 0)? as u64,
        };

        let experiment = Experiment {
            episode,
            scenario,
            predictions: self.get("predictions").map(|p| self.resolve_path(p)),
            repeat: self.parse_usize("repeat", 1)?,
            episode_frame_offset: self.parse_usize("episode_frame_offset", 0)?,
            out_dir: self.get("out_dir").map(|p| self.resolve_path(p)),
            explicit_bounds,
        };
        if experiment.repeat == 0 {
            return Err(field_err("repeat", "must be at least 1"));
        }
        experiment.episode.validate()?;
        Ok(experiment)
    }
}

/// Built-in synthetic scenes addressable from configs as
/// `scenario = synthetic:<name>`.
pub fn builtin_synthetic(name: &str, frames: usize, seed: u64) -> Option<ScenarioTimeline<f64>> {
    let spec = match name {
        // Pedestrian streams crossing the corridor between start and
        // goal, with occasional direction changes.
        "crossing" => SyntheticSpec {
            name: "crossing".into(),
            frames,
            frame_period: 0.4,
            agents: (0..6usize)
                .map(|k| {
                    let lane = k as f64 - 2.5;
                    AgentSpec::Linear {
                        id: format!("walker{k}"),
                        start: Point2::new(2.0 + lane * 0.8, -6.0 - k as f64),
                        velocity: Point2::new(0.0, 0.9),
                        jumps: vec![
                            (30 + 10 * k, Point2::new(0.3, -0.9)),
                            (70 + 10 * k, Point2::new(-0.3, 0.9)),
                        ],
                        active: None,
                    }
                })
                .collect(),
            noise_std: 0.06,
        },
        // Jittered standing crowd; the stationary process used by the
        // coverage audits.
        "stationary_noise" => SyntheticSpec {
            name: "stationary_noise".into(),
            frames,
            frame_period: 0.4,
            agents: (0..4)
                .map(|k| AgentSpec::Stationary {
                    id: format!("post{k}"),
                    position: Point2::new(1.5 * (k % 2) as f64, 1.5 * (k / 2) as f64),
                    active: None,
                })
                .collect(),
            noise_std: 0.15,
        },
        // A tight orbiting ring that pins the vehicle in place.
        "ring" => SyntheticSpec {
            name: "ring".into(),
            frames,
            frame_period: 0.4,
            agents: (0..8)
                .map(|k| AgentSpec::Circular {
                    id: format!("ring{k}"),
                    center: Point2::new(0.0, 0.0),
                    radius: 0.8,
                    angular_velocity: 2.2,
                    phase: k as f64 * std::f64::consts::FRAC_PI_4,
                    active: None,
                })
                .collect(),
            noise_std: 0.05,
        },
        _ => return None,
    };
    Some(synthetic_scenario(&spec, seed))
}
