//! Pluggable N-step obstacle motion forecasters.
//!
//! The calibration and planning layers only consume the [`Predictor`]
//! interface, so any external model can be plugged in. Two
//! implementations ship here: a constant-velocity extrapolator and a
//! loader for predictions precomputed by an external model.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ObstacleId, ObstacleSet, Point2};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed prediction file at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing prediction: no sheet stored for frame {frame}")]
    MissingFrame { frame: i64 },
    #[error("missing prediction: frame {frame} has no entries for step {step}")]
    MissingStep { frame: i64, step: usize },
    #[error("prediction for frame {frame} step {step} names obstacle {id:?} absent from the history")]
    ForeignObstacle { frame: i64, step: usize, id: String },
    #[error("history must hold at least one frame")]
    EmptyHistory,
}

/// Motion history: the most recent `H` obstacle observations, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct History<T> {
    frames: Vec<ObstacleSet<T>>,
    frame_of_last: i64,
}

impl<T: Scalar> History<T> {
    /// `frames` are consecutive observations ending at `frame_of_last`.
    pub fn new(frames: Vec<ObstacleSet<T>>, frame_of_last: i64) -> Result<Self, PredictError> {
        if frames.is_empty() {
            return Err(PredictError::EmptyHistory);
        }
        Ok(History { frames, frame_of_last })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frame_of_last(&self) -> i64 {
        self.frame_of_last
    }

    pub fn last(&self) -> &ObstacleSet<T> {
        self.frames.last().expect("history is nonempty")
    }

    pub fn frames(&self) -> &[ObstacleSet<T>] {
        &self.frames
    }
}

/// The N per-horizon obstacle sets forecast from one history window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSheet<T> {
    steps: Vec<ObstacleSet<T>>,
    issued_at: i64,
}

impl<T: Scalar> PredictionSheet<T> {
    pub fn new(steps: Vec<ObstacleSet<T>>, issued_at: i64) -> Self {
        PredictionSheet { steps, issued_at }
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn issued_at(&self) -> i64 {
        self.issued_at
    }

    /// Predicted set for horizon step `i` in `1..=N`.
    pub fn step(&self, i: usize) -> &ObstacleSet<T> {
        &self.steps[i - 1]
    }

    pub fn steps(&self) -> &[ObstacleSet<T>] {
        &self.steps
    }
}

/// An N-step obstacle forecaster queried once per control step.
pub trait Predictor<T: Scalar>: Send + Sync {
    fn horizon(&self) -> usize;
    fn predict(&self, history: &History<T>) -> Result<PredictionSheet<T>, PredictError>;
}

/// Extrapolates each obstacle of the last frame at the velocity
/// estimated from the two most recent frames it appears in.
#[derive(Debug, Clone)]
pub struct ConstantVelocityPredictor {
    horizon: usize,
}

impl ConstantVelocityPredictor {
    pub fn new(horizon: usize) -> Self {
        ConstantVelocityPredictor { horizon }
    }
}

impl<T: Scalar> Predictor<T> for ConstantVelocityPredictor {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&self, history: &History<T>) -> Result<PredictionSheet<T>, PredictError> {
        let frames = history.frames();
        let last = history.last();
        // Per-step displacement for each obstacle of the last frame;
        // zero when the obstacle has no earlier appearance.
        let mut deltas: Vec<(ObstacleId, Point2<T>, Point2<T>)> = Vec::with_capacity(last.len());
        for (id, pos) in last.iter() {
            let mut delta = Point2::new(T::zero(), T::zero());
            for (gap, earlier) in frames.iter().rev().skip(1).enumerate() {
                if let Some(prev) = earlier.get(id) {
                    let steps = T::from_usize(gap + 1).expect("small usize fits scalar");
                    delta = (pos - prev) * (T::one() / steps);
                    break;
                }
            }
            deltas.push((id.clone(), pos, delta));
        }

        let steps = (1..=self.horizon)
            .map(|i| {
                let scale = T::from_usize(i).expect("small usize fits scalar");
                ObstacleSet::from_entries(
                    deltas
                        .iter()
                        .map(|(id, pos, delta)| (id.clone(), *pos + *delta * scale))
                        .collect(),
                )
                .expect("ids unique in source frame")
            })
            .collect();
        Ok(PredictionSheet::new(steps, history.frame_of_last()))
    }
}

#[derive(Serialize, Deserialize)]
struct PredictionRow<T> {
    issue_frame: i64,
    step: usize,
    obstacle_id: String,
    x: T,
    y: T,
}

/// Prediction sheets loaded from a file of one JSON object per line,
/// served by issue frame.
#[derive(Debug, Clone)]
pub struct PrecomputedPredictions<T> {
    horizon: usize,
    sheets: BTreeMap<i64, Vec<Option<ObstacleSet<T>>>>,
}

impl<T: Scalar + serde::de::DeserializeOwned> PrecomputedPredictions<T> {
    pub fn load(path: impl AsRef<Path>, horizon: usize) -> Result<Self, PredictError> {
        let reader = BufReader::new(File::open(path)?);
        Self::read(reader, horizon)
    }

    pub fn read(reader: impl BufRead, horizon: usize) -> Result<Self, PredictError> {
        type Staging<T> = BTreeMap<i64, Vec<Vec<(ObstacleId, Point2<T>)>>>;
        let mut staging: Staging<T> = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: PredictionRow<T> =
                serde_json::from_str(&line).map_err(|e| PredictError::Malformed {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if row.step < 1 || row.step > horizon {
                return Err(PredictError::Malformed {
                    line: line_no,
                    message: format!("step {} outside 1..={horizon}", row.step),
                });
            }
            let slots = staging
                .entry(row.issue_frame)
                .or_insert_with(|| vec![Vec::new(); horizon]);
            slots[row.step - 1].push((ObstacleId::new(row.obstacle_id), Point2::new(row.x, row.y)));
        }

        let mut sheets = BTreeMap::new();
        for (frame, slots) in staging {
            let mut per_step = Vec::with_capacity(horizon);
            for (i, entries) in slots.into_iter().enumerate() {
                if entries.is_empty() {
                    per_step.push(None);
                } else {
                    let set = ObstacleSet::from_entries(entries).map_err(|e| {
                        PredictError::Malformed {
                            line: 0,
                            message: format!("frame {frame} step {}: {e}", i + 1),
                        }
                    })?;
                    per_step.push(Some(set));
                }
            }
            sheets.insert(frame, per_step);
        }
        Ok(PrecomputedPredictions { horizon, sheets })
    }
}

impl<T: Scalar> Predictor<T> for PrecomputedPredictions<T> {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&self, history: &History<T>) -> Result<PredictionSheet<T>, PredictError> {
        let frame = history.frame_of_last();
        let slots = self
            .sheets
            .get(&frame)
            .ok_or(PredictError::MissingFrame { frame })?;
        let last = history.last();
        let mut steps = Vec::with_capacity(self.horizon);
        for (i, slot) in slots.iter().enumerate() {
            let step = i + 1;
            let set = slot
                .as_ref()
                .ok_or(PredictError::MissingStep { frame, step })?;
            for (id, _) in set.iter() {
                if !last.contains_id(id) {
                    return Err(PredictError::ForeignObstacle {
                        frame,
                        step,
                        id: id.to_string(),
                    });
                }
            }
            steps.push(set.clone());
        }
        Ok(PredictionSheet::new(steps, frame))
    }
}

/// Writes prediction sheets as one JSON object per line, ordered by
/// (issue frame, step, obstacle id) so identical inputs produce
/// identical bytes.
pub fn export_predictions<'a, T, I>(mut writer: impl Write, sheets: I) -> std::io::Result<()>
where
    T: Scalar + Serialize + 'a,
    I: IntoIterator<Item = (i64, &'a [ObstacleSet<T>])>,
{
    for (frame, steps) in sheets {
        for (i, set) in steps.iter().enumerate() {
            for (id, pos) in set.iter() {
                let row = PredictionRow {
                    issue_frame: frame,
                    step: i + 1,
                    obstacle_id: id.to_string(),
                    x: pos.x,
                    y: pos.y,
                };
                let json = serde_json::to_string(&row).expect("row serializes");
                writeln!(writer, "{json}")?;
            }
        }
    }
    Ok(())
}
