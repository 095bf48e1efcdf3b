//! Score functions, empirical quantiles, sliding-window calibration,
//! and the delayed-feedback adaptive miscoverage updates for both the
//! obstacle-centric and egocentric pipelines.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{min_distance, ObstacleSet, Point2};
use crate::predictor::PredictionSheet;
use crate::scalar::{ExtReal, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum ConformalError {
    #[error("empirical quantile of an empty score multiset")]
    EmptyScores,
    #[error("no horizon-{horizon} prediction/observation pairs recorded yet; warm-up incomplete")]
    WarmUp { horizon: usize },
    #[error("a check for prefix {prefix:?} at horizon {horizon} was already staged at frame {frame}")]
    DuplicateCheck {
        prefix: Vec<u16>,
        horizon: usize,
        frame: i64,
    },
}

/// How much closer the obstacles came to `candidate` than predicted:
/// `[d(candidate, predicted) - d(candidate, realized)]₊`.
///
/// Conventions on empty sets: both empty scores 0; an empty prediction
/// against a nonempty realization scores `+inf`; a nonempty prediction
/// against an empty realization scores 0.
pub fn egocentric_score<T: Scalar>(
    candidate: Point2<T>,
    predicted: &ObstacleSet<T>,
    realized: &ObstacleSet<T>,
) -> ExtReal<T> {
    min_distance(candidate, predicted).sub_clamped(min_distance(candidate, realized))
}

/// Largest per-obstacle prediction error over ids present in both sets.
///
/// Ids present in only one set are ignored, and an empty id
/// intersection scores 0; without this the tracking churn of real data
/// would saturate every radius at `+inf`.
pub fn obstacle_centric_score<T: Scalar>(
    predicted: &ObstacleSet<T>,
    realized: &ObstacleSet<T>,
) -> ExtReal<T> {
    let mut worst = T::zero();
    let pred = predicted.entries();
    let real = realized.entries();
    let (mut i, mut j) = (0, 0);
    while i < pred.len() && j < real.len() {
        match pred[i].0.cmp(&real[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let err = pred[i].1.distance(real[j].1);
                if err > worst {
                    worst = err;
                }
                i += 1;
                j += 1;
            }
        }
    }
    ExtReal::finite(worst)
}

/// Empirical quantile `inf{s : F(s) >= q}` of a finite score multiset,
/// i.e. the 1-based `ceil(q*M)`-th smallest element for `q` in `(0, 1]`.
/// Out-of-range levels return the corresponding infinity.
pub fn empirical_quantile<T: Scalar>(
    scores: &[ExtReal<T>],
    q: T,
) -> Result<ExtReal<T>, ConformalError> {
    if scores.is_empty() {
        return Err(ConformalError::EmptyScores);
    }
    if q > T::one() {
        return Ok(ExtReal::PosInf);
    }
    if q <= T::zero() {
        return Ok(ExtReal::NegInf);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_order(b));
    let m = T::from_usize(sorted.len()).expect("multiset size fits scalar");
    for (k, s) in sorted.iter().enumerate() {
        let reached = T::from_usize(k + 1).expect("index fits scalar") / m;
        if reached >= q {
            return Ok(*s);
        }
    }
    // q <= 1 always stops at the last element; kept for totality.
    Ok(*sorted.last().expect("nonempty"))
}

/// One calibrated frame: the realization together with the prediction
/// of it issued `i` steps earlier, for every horizon that has one.
#[derive(Debug, Clone)]
struct FrameRecord<T> {
    frame: i64,
    realized: ObstacleSet<T>,
    predicted: Vec<Option<ObstacleSet<T>>>,
}

/// Ring of the most recent `M` realized frames, each paired with the
/// per-horizon predictions that targeted it.
#[derive(Debug, Clone)]
pub struct CalibrationWindow<T> {
    capacity: usize,
    horizon: usize,
    records: VecDeque<FrameRecord<T>>,
    /// Predictions for frames not yet realized, keyed by target frame.
    inbox: BTreeMap<i64, Vec<Option<ObstacleSet<T>>>>,
}

impl<T: Scalar> CalibrationWindow<T> {
    /// `capacity` is the score-window length M, `horizon` the prediction
    /// length N.
    pub fn new(capacity: usize, horizon: usize) -> Self {
        assert!(capacity >= 1 && horizon >= 1);
        CalibrationWindow {
            capacity,
            horizon,
            records: VecDeque::with_capacity(capacity + 1),
            inbox: BTreeMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Files a single horizon-`i` prediction under the frame it targets.
    /// Predictions for frames already realized are dropped.
    pub fn record_prediction(&mut self, target_frame: i64, horizon: usize, predicted: ObstacleSet<T>) {
        debug_assert!((1..=self.horizon).contains(&horizon));
        if let Some(last) = self.records.back() {
            if target_frame <= last.frame {
                return;
            }
        }
        let slots = self
            .inbox
            .entry(target_frame)
            .or_insert_with(|| vec![None; self.horizon]);
        slots[horizon - 1] = Some(predicted);
    }

    /// Files each step of a freshly issued sheet under the frame it targets.
    pub fn record_prediction_sheet(&mut self, sheet: &PredictionSheet<T>) {
        debug_assert_eq!(sheet.horizon(), self.horizon);
        for i in 1..=sheet.horizon().min(self.horizon) {
            self.record_prediction(sheet.issued_at() + i as i64, i, sheet.step(i).clone());
        }
    }

    /// Appends the realization of `frame`, consuming any predictions
    /// filed for it; the oldest record beyond M drops off.
    pub fn record_realized(&mut self, frame: i64, realized: ObstacleSet<T>) {
        if let Some(last) = self.records.back() {
            debug_assert!(frame > last.frame, "frames must arrive in order");
        }
        let predicted = self
            .inbox
            .remove(&frame)
            .unwrap_or_else(|| vec![None; self.horizon]);
        self.records.push_back(FrameRecord { frame, realized, predicted });
        while self.records.len() > self.capacity {
            self.records.pop_front();
        }
    }

    /// `(predicted, realized)` pairs usable for horizon `i`, oldest first.
    pub fn eligible_pairs(&self, horizon: usize) -> impl Iterator<Item = (&ObstacleSet<T>, &ObstacleSet<T>)> {
        self.records.iter().filter_map(move |r| {
            r.predicted
                .get(horizon - 1)
                .and_then(|p| p.as_ref())
                .map(|p| (p, &r.realized))
        })
    }

    /// True once at least one horizon-`i` pair exists.
    pub fn is_warm(&self, horizon: usize) -> bool {
        self.eligible_pairs(horizon).next().is_some()
    }
}

/// Calibrated clearance slack at `candidate` for horizon `i`: the
/// `(1 - alpha)`-quantile of the most recent egocentric scores. An
/// `alpha_value <= 0` yields an infinite radius, which later forces the
/// deferred check to count as covered.
pub fn egocentric_radius<T: Scalar>(
    candidate: Point2<T>,
    horizon: usize,
    window: &CalibrationWindow<T>,
    alpha_value: T,
) -> Result<ExtReal<T>, ConformalError> {
    let mut scores = Vec::with_capacity(window.len());
    for (predicted, realized) in window.eligible_pairs(horizon) {
        scores.push(egocentric_score(candidate, predicted, realized));
    }
    if scores.is_empty() {
        return Err(ConformalError::WarmUp { horizon });
    }
    if alpha_value <= T::zero() {
        return Ok(ExtReal::PosInf);
    }
    empirical_quantile(&scores, T::one() - alpha_value)
}

/// Obstacle-centric counterpart of [`egocentric_radius`]: one radius per
/// horizon shared by every candidate state.
pub fn obstacle_centric_radius<T: Scalar>(
    horizon: usize,
    window: &CalibrationWindow<T>,
    alpha_value: T,
) -> Result<ExtReal<T>, ConformalError> {
    let mut scores = Vec::with_capacity(window.len());
    for (predicted, realized) in window.eligible_pairs(horizon) {
        scores.push(obstacle_centric_score(predicted, realized));
    }
    if scores.is_empty() {
        return Err(ConformalError::WarmUp { horizon });
    }
    if alpha_value <= T::zero() {
        return Ok(ExtReal::PosInf);
    }
    empirical_quantile(&scores, T::one() - alpha_value)
}

/// A deferred confidence-set membership test: decided `horizon` frames
/// after it was staged, once the realization arrives.
#[derive(Debug, Clone, Serialize)]
pub struct PendingCheck<T> {
    pub due_frame: i64,
    pub horizon: usize,
    pub prefix: Vec<u16>,
    pub candidate_position: Point2<T>,
    pub predicted_distance: ExtReal<T>,
    pub radius: ExtReal<T>,
}

/// Outcome of one resolved check, emitted for coverage bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CoverageEvent<T> {
    pub due_frame: i64,
    pub horizon: usize,
    /// Plan prefix for the egocentric pipeline; empty for the
    /// obstacle-centric one.
    pub prefix: Vec<u16>,
    pub score: ExtReal<T>,
    pub radius: ExtReal<T>,
    pub covered: bool,
    pub alpha_after: T,
}

/// Per-(plan-prefix, horizon) miscoverage parameter snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct AlphaEntry<T> {
    pub horizon: usize,
    pub prefix: Vec<u16>,
    pub alpha: T,
}

/// Adaptive miscoverage parameters for the egocentric pipeline, keyed
/// by (plan prefix, horizon), plus the ring of deferred checks.
///
/// Entries start at the target level and move by `gamma` per resolved
/// check, which keeps each horizon-`i` entry inside
/// `[-(i+1)*gamma, 1+(i+1)*gamma]` under any coverage sequence.
#[derive(Debug, Clone)]
pub struct AcpLedger<T> {
    gamma: T,
    target_alpha: T,
    alpha: BTreeMap<(usize, Vec<u16>), T>,
    pending: BTreeMap<i64, Vec<PendingCheck<T>>>,
}

impl<T: Scalar> AcpLedger<T> {
    pub fn new(gamma: T, target_alpha: T) -> Self {
        AcpLedger {
            gamma,
            target_alpha,
            alpha: BTreeMap::new(),
            pending: BTreeMap::new(),
        }
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn target_alpha(&self) -> T {
        self.target_alpha
    }

    /// Current parameter for a (prefix, horizon) pair; unseen pairs sit
    /// at the target level.
    pub fn alpha(&self, prefix: &[u16], horizon: usize) -> T {
        self.alpha
            .get(&(horizon, prefix.to_vec()))
            .copied()
            .unwrap_or(self.target_alpha)
    }

    pub fn alpha_snapshot(&self) -> Vec<AlphaEntry<T>> {
        self.alpha
            .iter()
            .map(|((horizon, prefix), alpha)| AlphaEntry {
                horizon: *horizon,
                prefix: prefix.clone(),
                alpha: *alpha,
            })
            .collect()
    }

    /// Overwrites one entry, e.g. to warm-start from a saved snapshot.
    pub fn set_alpha(&mut self, prefix: &[u16], horizon: usize, value: T) {
        self.alpha.insert((horizon, prefix.to_vec()), value);
    }

    /// Number of future frames with at least one deferred check.
    pub fn pending_depth(&self) -> usize {
        self.pending.len()
    }

    /// Defers the membership test for a confidence set staged at
    /// `frame`; it resolves at `frame + horizon`.
    pub fn stage_pending(
        &mut self,
        prefix: &[u16],
        horizon: usize,
        candidate_position: Point2<T>,
        predicted_distance: ExtReal<T>,
        radius: ExtReal<T>,
        frame: i64,
    ) -> Result<(), ConformalError> {
        let due_frame = frame + horizon as i64;
        let bucket = self.pending.entry(due_frame).or_default();
        if bucket
            .iter()
            .any(|c| c.horizon == horizon && c.prefix == prefix)
        {
            return Err(ConformalError::DuplicateCheck {
                prefix: prefix.to_vec(),
                horizon,
                frame,
            });
        }
        bucket.push(PendingCheck {
            due_frame,
            horizon,
            prefix: prefix.to_vec(),
            candidate_position,
            predicted_distance,
            radius,
        });
        Ok(())
    }

    /// Resolves every check due at `frame` against the realization and
    /// applies `alpha <- alpha + gamma * (target - 1[miscovered])` to
    /// the matching entry.
    pub fn record_frame(&mut self, realized: &ObstacleSet<T>, frame: i64) -> Vec<CoverageEvent<T>> {
        let Some(bucket) = self.pending.remove(&frame) else {
            return Vec::new();
        };
        let mut events = Vec::with_capacity(bucket.len());
        for check in bucket {
            let realized_clearance = min_distance(check.candidate_position, realized);
            let score = check.predicted_distance.sub_clamped(realized_clearance);
            let covered = score.total_order(&check.radius).is_le();
            let miss = if covered { T::zero() } else { T::one() };
            let entry = self
                .alpha
                .entry((check.horizon, check.prefix.clone()))
                .or_insert(self.target_alpha);
            *entry += self.gamma * (self.target_alpha - miss);
            events.push(CoverageEvent {
                due_frame: frame,
                horizon: check.horizon,
                prefix: check.prefix,
                score,
                radius: check.radius,
                covered,
                alpha_after: *entry,
            });
        }
        events
    }
}

/// Deferred check of the obstacle-centric pipeline; the id-matched
/// score needs the full predicted set.
#[derive(Debug, Clone)]
pub struct ObstaclePendingCheck<T> {
    pub due_frame: i64,
    pub horizon: usize,
    pub predicted: ObstacleSet<T>,
    pub radius: ExtReal<T>,
}

/// Per-horizon adaptive miscoverage parameters for the obstacle-centric
/// baseline, with the same delayed-feedback update as [`AcpLedger`].
#[derive(Debug, Clone)]
pub struct ObstacleAcpState<T> {
    gamma: T,
    target_alpha: T,
    alpha: Vec<T>,
    pending: BTreeMap<i64, Vec<ObstaclePendingCheck<T>>>,
}

impl<T: Scalar> ObstacleAcpState<T> {
    pub fn new(horizon: usize, gamma: T, target_alpha: T) -> Self {
        ObstacleAcpState {
            gamma,
            target_alpha,
            alpha: vec![target_alpha; horizon],
            pending: BTreeMap::new(),
        }
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn target_alpha(&self) -> T {
        self.target_alpha
    }

    pub fn alpha(&self, horizon: usize) -> T {
        self.alpha[horizon - 1]
    }

    pub fn alpha_snapshot(&self) -> Vec<AlphaEntry<T>> {
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, alpha)| AlphaEntry {
                horizon: i + 1,
                prefix: Vec::new(),
                alpha: *alpha,
            })
            .collect()
    }

    /// Overwrites one per-horizon entry.
    pub fn set_alpha(&mut self, horizon: usize, value: T) {
        self.alpha[horizon - 1] = value;
    }

    pub fn pending_depth(&self) -> usize {
        self.pending.len()
    }

    pub fn stage_pending(
        &mut self,
        horizon: usize,
        predicted: ObstacleSet<T>,
        radius: ExtReal<T>,
        frame: i64,
    ) -> Result<(), ConformalError> {
        let due_frame = frame + horizon as i64;
        let bucket = self.pending.entry(due_frame).or_default();
        if bucket.iter().any(|c| c.horizon == horizon) {
            return Err(ConformalError::DuplicateCheck {
                prefix: Vec::new(),
                horizon,
                frame,
            });
        }
        bucket.push(ObstaclePendingCheck { due_frame, horizon, predicted, radius });
        Ok(())
    }

    pub fn record_frame(&mut self, realized: &ObstacleSet<T>, frame: i64) -> Vec<CoverageEvent<T>> {
        let Some(bucket) = self.pending.remove(&frame) else {
            return Vec::new();
        };
        let mut events = Vec::with_capacity(bucket.len());
        for check in bucket {
            let score = obstacle_centric_score(&check.predicted, realized);
            let covered = score.total_order(&check.radius).is_le();
            let miss = if covered { T::zero() } else { T::one() };
            let entry = &mut self.alpha[check.horizon - 1];
            *entry += self.gamma * (self.target_alpha - miss);
            events.push(CoverageEvent {
                due_frame: frame,
                horizon: check.horizon,
                prefix: Vec::new(),
                score,
                radius: check.radius,
                covered,
                alpha_after: *entry,
            });
        }
        events
    }
}
