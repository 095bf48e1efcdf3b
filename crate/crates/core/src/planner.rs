//! Discrete plan enumeration over decision epochs and the
//! feasibility/cost optimization for the egocentric and
//! obstacle-centric controllers, plus the grid-based safe-set
//! approximation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{
    egocentric_radius, obstacle_centric_radius, AcpLedger, CalibrationWindow, ConformalError,
    ObstacleAcpState,
};
use crate::geometry::{
    min_distance, stage_cost, terminal_cost, unicycle_step, ControlInput, GoalSpec, ObstacleSet,
    Point2, Rect, VehicleState,
};
use crate::predictor::PredictionSheet;
use crate::scalar::{is_positive_finite, ExtReal, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("decision epochs {epochs} do not divide the horizon {horizon}")]
    EpochMismatch { epochs: usize, horizon: usize },
    #[error("input catalog must be nonempty and duplicate-free")]
    BadCatalog,
    #[error("plan space of {0} rollouts is too large to enumerate")]
    PlanSpaceOverflow(String),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
}

/// The finite set of control inputs available to the planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputCatalog<T> {
    inputs: Vec<ControlInput<T>>,
}

impl<T: Scalar> InputCatalog<T> {
    pub fn new(inputs: Vec<ControlInput<T>>) -> Result<Self, PlannerError> {
        if inputs.is_empty() {
            return Err(PlannerError::BadCatalog);
        }
        for (i, a) in inputs.iter().enumerate() {
            if inputs[i + 1..].iter().any(|b| b == a) {
                return Err(PlannerError::BadCatalog);
            }
        }
        Ok(InputCatalog { inputs })
    }

    /// Cross product of linear and angular velocity levels, linear
    /// velocity varying slowest.
    pub fn cross_product(linear: &[T], angular: &[T]) -> Result<Self, PlannerError> {
        let mut inputs = Vec::with_capacity(linear.len() * angular.len());
        for &v in linear {
            for &omega in angular {
                inputs.push(ControlInput::new(v, omega));
            }
        }
        Self::new(inputs)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn get(&self, index: usize) -> ControlInput<T> {
        self.inputs[index]
    }

    pub fn inputs(&self) -> &[ControlInput<T>] {
        &self.inputs
    }
}

impl Default for InputCatalog<f64> {
    fn default() -> Self {
        InputCatalog::cross_product(&[-0.8, 0.0, 0.8], &[-0.7, 0.0, 0.7])
            .expect("default catalog is valid")
    }
}

/// Multi-index over decision epochs: one catalog choice per epoch, each
/// held for `epoch_len` timesteps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlanIndex {
    pub epochs: Vec<u16>,
    pub epoch_len: usize,
}

impl PlanIndex {
    /// Catalog index applied at timestep `k` in `0..N`.
    pub fn input_at_step(&self, k: usize) -> usize {
        self.epochs[k / self.epoch_len] as usize
    }

    /// The epoch choices that determine the state at horizon `i`.
    pub fn prefix_for_horizon(&self, horizon: usize) -> &[u16] {
        let len = horizon.div_ceil(self.epoch_len);
        &self.epochs[..len.min(self.epochs.len())]
    }

    /// Formats like `2-0-1`; handy for log keys.
    pub fn prefix_label(prefix: &[u16]) -> String {
        prefix
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// One candidate open-loop plan rolled through the vehicle dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRollout<T> {
    pub index: PlanIndex,
    /// N+1 states, the first being the query state.
    pub states: Vec<VehicleState<T>>,
    pub inputs: Vec<ControlInput<T>>,
    pub total_cost: Option<T>,
    pub feasible: bool,
    pub first_violation: Option<(usize, ViolationReason)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationReason {
    OutOfBounds,
    InsufficientClearance,
}

/// Safety margin, admissible state region, miscoverage target, and the
/// input executed when no plan is feasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyConfig<T> {
    pub r_safe: T,
    pub state_bounds: Rect<T>,
    pub target_alpha: T,
    pub fallback_input: ControlInput<T>,
}

impl<T: Scalar> SafetyConfig<T> {
    pub fn validate(&self) -> Result<(), String> {
        if !is_positive_finite(self.r_safe) {
            return Err("r_safe must be positive".into());
        }
        if self.state_bounds.is_empty() {
            return Err("state_bounds must be nonempty".into());
        }
        Ok(())
    }
}

fn plan_space_size(n_u: usize, epochs: usize) -> Result<usize, PlannerError> {
    let mut total: usize = 1;
    for _ in 0..epochs {
        total = total
            .checked_mul(n_u)
            .filter(|t| *t <= 1 << 24)
            .ok_or_else(|| PlannerError::PlanSpaceOverflow(format!("{n_u}^{epochs}")))?;
    }
    Ok(total)
}

/// Expands every multi-index epoch-wise through the unicycle dynamics.
/// Rollouts come back in lexicographic plan order with costs unset.
pub fn enumerate_rollouts<T: Scalar>(
    state: VehicleState<T>,
    catalog: &InputCatalog<T>,
    decision_epochs: usize,
    horizon: usize,
    step_seconds: T,
) -> Result<Vec<PlanRollout<T>>, PlannerError> {
    if decision_epochs == 0 || !horizon.is_multiple_of(decision_epochs) {
        return Err(PlannerError::EpochMismatch { epochs: decision_epochs, horizon });
    }
    let n_u = catalog.len();
    let epoch_len = horizon / decision_epochs;
    let total = plan_space_size(n_u, decision_epochs)?;

    let rollouts = (0..total)
        .into_par_iter()
        .map(|rank| {
            let mut epochs = vec![0u16; decision_epochs];
            let mut rest = rank;
            for e in (0..decision_epochs).rev() {
                epochs[e] = (rest % n_u) as u16;
                rest /= n_u;
            }
            let index = PlanIndex { epochs, epoch_len };
            let mut states = Vec::with_capacity(horizon + 1);
            let mut inputs = Vec::with_capacity(horizon);
            states.push(state);
            for k in 0..horizon {
                let input = catalog.get(index.input_at_step(k));
                inputs.push(input);
                let next = unicycle_step(states[k], input, step_seconds);
                states.push(next);
            }
            PlanRollout {
                index,
                states,
                inputs,
                total_cost: None,
                feasible: true,
                first_violation: None,
            }
        })
        .collect();
    Ok(rollouts)
}

/// Open-loop objective of a state/input sequence.
pub fn rollout_objective<T: Scalar>(
    states: &[VehicleState<T>],
    inputs: &[ControlInput<T>],
    goal: &GoalSpec<T>,
) -> T {
    let mut cost = T::zero();
    for (state, input) in states.iter().zip(inputs.iter()) {
        cost += stage_cost(state, input, goal);
    }
    cost + terminal_cost(states.last().expect("rollout has a terminal state"), goal)
}

/// Calibrated radii shared across rollouts: per horizon, one value per
/// plan prefix (a single shared value per horizon for the
/// obstacle-centric controller).
#[derive(Debug, Clone)]
pub struct RadiusTable<T> {
    n_u: usize,
    decision_epochs: usize,
    epoch_len: usize,
    values: Vec<Vec<ExtReal<T>>>,
}

impl<T: Scalar> RadiusTable<T> {
    fn prefix_len(&self, horizon: usize) -> usize {
        horizon.div_ceil(self.epoch_len)
    }

    /// Radius seen by the plan of lexicographic `rank` at `horizon`.
    pub fn radius(&self, rank: usize, horizon: usize) -> ExtReal<T> {
        let row = &self.values[horizon - 1];
        if row.len() == 1 {
            return row[0];
        }
        let k = self.prefix_len(horizon);
        let stride = self.n_u.pow((self.decision_epochs - k) as u32);
        row[rank / stride]
    }
}

fn build_ecp_radius_table<T: Scalar>(
    rollouts: &[PlanRollout<T>],
    window: &CalibrationWindow<T>,
    ledger: &AcpLedger<T>,
    n_u: usize,
    decision_epochs: usize,
    epoch_len: usize,
    horizon: usize,
) -> Result<RadiusTable<T>, ConformalError> {
    let mut tasks = Vec::new();
    for i in 1..=horizon {
        let k = i.div_ceil(epoch_len);
        let count = n_u.pow(k as u32);
        let stride = n_u.pow((decision_epochs - k) as u32);
        for prefix_rank in 0..count {
            tasks.push((i, k, prefix_rank, prefix_rank * stride));
        }
    }
    let computed: Result<Vec<_>, ConformalError> = tasks
        .par_iter()
        .map(|&(i, k, prefix_rank, rep)| {
            let rollout = &rollouts[rep];
            let candidate = rollout.states[i].position();
            let alpha = ledger.alpha(&rollout.index.epochs[..k], i);
            let radius = egocentric_radius(candidate, i, window, alpha)?;
            Ok((i, prefix_rank, radius))
        })
        .collect();
    let mut values: Vec<Vec<ExtReal<T>>> = (1..=horizon)
        .map(|i| vec![ExtReal::zero(); n_u.pow(i.div_ceil(epoch_len) as u32)])
        .collect();
    for (i, prefix_rank, radius) in computed? {
        values[i - 1][prefix_rank] = radius;
    }
    Ok(RadiusTable { n_u, decision_epochs, epoch_len, values })
}

fn assess_rollouts<T: Scalar>(
    rollouts: &mut [PlanRollout<T>],
    radii: &RadiusTable<T>,
    predictions: &PredictionSheet<T>,
    goal: &GoalSpec<T>,
    safety: &SafetyConfig<T>,
) {
    let horizon = predictions.horizon();
    rollouts.par_iter_mut().enumerate().for_each(|(rank, rollout)| {
        rollout.total_cost = Some(rollout_objective(&rollout.states, &rollout.inputs, goal));
        for i in 1..=horizon {
            if !safety.state_bounds.contains(rollout.states[i].position()) {
                rollout.feasible = false;
                rollout.first_violation = Some((i, ViolationReason::OutOfBounds));
                break;
            }
            let clearance = min_distance(rollout.states[i].position(), predictions.step(i));
            let required = radii.radius(rank, i).add_scalar(safety.r_safe);
            if clearance.total_order(&required).is_lt() {
                rollout.feasible = false;
                rollout.first_violation = Some((i, ViolationReason::InsufficientClearance));
                break;
            }
        }
    });
}

fn select_best<T: Scalar>(rollouts: &[PlanRollout<T>]) -> Option<usize> {
    rollouts
        .par_iter()
        .enumerate()
        .filter(|(_, r)| r.feasible)
        .min_by(|(rank_a, a), (rank_b, b)| {
            let ca = a.total_cost.expect("assessed rollout has a cost");
            let cb = b.total_cost.expect("assessed rollout has a cost");
            ca.partial_cmp(&cb)
                .expect("finite costs")
                .then(rank_a.cmp(rank_b))
        })
        .map(|(rank, _)| rank)
}

/// Result of evaluating the whole plan space for one step, before any
/// check is staged.
#[derive(Debug, Clone)]
pub struct PlanEvaluation<T> {
    pub rollouts: Vec<PlanRollout<T>>,
    pub radii: RadiusTable<T>,
    /// Index of the minimum-cost feasible rollout, ties broken by
    /// lexicographic plan index.
    pub best: Option<usize>,
}

impl<T: Scalar> PlanEvaluation<T> {
    pub fn best_rollout(&self) -> Option<&PlanRollout<T>> {
        self.best.map(|rank| &self.rollouts[rank])
    }
}

/// Evaluates every rollout under the egocentric per-prefix radii
/// without mutating the ledger.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_ecp_plans<T: Scalar>(
    state: VehicleState<T>,
    predictions: &PredictionSheet<T>,
    window: &CalibrationWindow<T>,
    ledger: &AcpLedger<T>,
    goal: &GoalSpec<T>,
    safety: &SafetyConfig<T>,
    catalog: &InputCatalog<T>,
    decision_epochs: usize,
    step_seconds: T,
) -> Result<PlanEvaluation<T>, PlannerError> {
    let horizon = predictions.horizon();
    let mut rollouts = enumerate_rollouts(state, catalog, decision_epochs, horizon, step_seconds)?;
    let radii = build_ecp_radius_table(
        &rollouts,
        window,
        ledger,
        catalog.len(),
        decision_epochs,
        horizon / decision_epochs,
        horizon,
    )?;
    assess_rollouts(&mut rollouts, &radii, predictions, goal, safety);
    let best = select_best(&rollouts);
    Ok(PlanEvaluation { rollouts, radii, best })
}

/// Evaluates every rollout under the shared per-horizon
/// obstacle-centric radii without mutating the adaptive state.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_acp_plans<T: Scalar>(
    state: VehicleState<T>,
    predictions: &PredictionSheet<T>,
    window: &CalibrationWindow<T>,
    acp: &ObstacleAcpState<T>,
    goal: &GoalSpec<T>,
    safety: &SafetyConfig<T>,
    catalog: &InputCatalog<T>,
    decision_epochs: usize,
    step_seconds: T,
) -> Result<PlanEvaluation<T>, PlannerError> {
    let horizon = predictions.horizon();
    let mut rollouts = enumerate_rollouts(state, catalog, decision_epochs, horizon, step_seconds)?;
    let per_horizon: Result<Vec<_>, ConformalError> = (1..=horizon)
        .into_par_iter()
        .map(|i| obstacle_centric_radius(i, window, acp.alpha(i)))
        .collect();
    let values = per_horizon?.into_iter().map(|r| vec![r]).collect();
    let radii = RadiusTable {
        n_u: catalog.len(),
        decision_epochs,
        epoch_len: horizon / decision_epochs,
        values,
    };
    assess_rollouts(&mut rollouts, &radii, predictions, goal, safety);
    let best = select_best(&rollouts);
    Ok(PlanEvaluation { rollouts, radii, best })
}

/// A check staged during one solve, kept for the episode log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagedCheckRecord<T> {
    pub issue_frame: i64,
    pub due_frame: i64,
    pub horizon: usize,
    pub prefix: Vec<u16>,
    pub radius: ExtReal<T>,
    pub detail: StagedDetail<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StagedDetail<T> {
    Egocentric {
        candidate: Point2<T>,
        predicted_distance: ExtReal<T>,
    },
    ObstacleCentric {
        predicted: ObstacleSet<T>,
    },
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub best: Option<PlanRollout<T>>,
    pub staged: Vec<StagedCheckRecord<T>>,
}

/// One step of the egocentric controller: evaluate the plan space,
/// pick the cheapest feasible plan, and defer the confidence-set
/// checks: horizon-1 checks for every input so per-input coverage is
/// tracked, deeper checks along the chosen plan's prefixes.
///
/// An infeasible step still returns the staged single-step checks;
/// infeasibility is a measured outcome, not an error.
#[allow(clippy::too_many_arguments)]
pub fn solve_ecp_mpc<T: Scalar>(
    state: VehicleState<T>,
    predictions: &PredictionSheet<T>,
    window: &CalibrationWindow<T>,
    ledger: &mut AcpLedger<T>,
    goal: &GoalSpec<T>,
    safety: &SafetyConfig<T>,
    catalog: &InputCatalog<T>,
    decision_epochs: usize,
    step_seconds: T,
) -> Result<SolveOutcome<T>, PlannerError> {
    let evaluation = evaluate_ecp_plans(
        state,
        predictions,
        window,
        ledger,
        goal,
        safety,
        catalog,
        decision_epochs,
        step_seconds,
    )?;
    let frame = predictions.issued_at();
    let horizon = predictions.horizon();
    let n_u = catalog.len();
    let first_epoch_stride = n_u.pow((decision_epochs - 1) as u32);
    let mut staged = Vec::with_capacity(n_u + horizon - 1);

    for j in 0..n_u {
        let rank = j * first_epoch_stride;
        let candidate = evaluation.rollouts[rank].states[1].position();
        let predicted_distance = min_distance(candidate, predictions.step(1));
        let radius = evaluation.radii.radius(rank, 1);
        let prefix = [j as u16];
        ledger.stage_pending(&prefix, 1, candidate, predicted_distance, radius, frame)?;
        staged.push(StagedCheckRecord {
            issue_frame: frame,
            due_frame: frame + 1,
            horizon: 1,
            prefix: prefix.to_vec(),
            radius,
            detail: StagedDetail::Egocentric { candidate, predicted_distance },
        });
    }

    if let Some(rank) = evaluation.best {
        let chosen = &evaluation.rollouts[rank];
        for i in 2..=horizon {
            let prefix = chosen.index.prefix_for_horizon(i);
            let candidate = chosen.states[i].position();
            let predicted_distance = min_distance(candidate, predictions.step(i));
            let radius = evaluation.radii.radius(rank, i);
            ledger.stage_pending(prefix, i, candidate, predicted_distance, radius, frame)?;
            staged.push(StagedCheckRecord {
                issue_frame: frame,
                due_frame: frame + i as i64,
                horizon: i,
                prefix: prefix.to_vec(),
                radius,
                detail: StagedDetail::Egocentric { candidate, predicted_distance },
            });
        }
    }

    Ok(SolveOutcome { best: evaluation.best_rollout().cloned(), staged })
}

/// One step of the obstacle-centric baseline: shared per-horizon radii,
/// one deferred check per horizon regardless of the chosen plan.
#[allow(clippy::too_many_arguments)]
pub fn solve_acp_mpc<T: Scalar>(
    state: VehicleState<T>,
    predictions: &PredictionSheet<T>,
    window: &CalibrationWindow<T>,
    acp: &mut ObstacleAcpState<T>,
    goal: &GoalSpec<T>,
    safety: &SafetyConfig<T>,
    catalog: &InputCatalog<T>,
    decision_epochs: usize,
    step_seconds: T,
) -> Result<SolveOutcome<T>, PlannerError> {
    let evaluation = evaluate_acp_plans(
        state,
        predictions,
        window,
        acp,
        goal,
        safety,
        catalog,
        decision_epochs,
        step_seconds,
    )?;
    let frame = predictions.issued_at();
    let horizon = predictions.horizon();
    let mut staged = Vec::with_capacity(horizon);
    for i in 1..=horizon {
        let radius = evaluation.radii.radius(0, i);
        let predicted = predictions.step(i).clone();
        acp.stage_pending(i, predicted.clone(), radius, frame)?;
        staged.push(StagedCheckRecord {
            issue_frame: frame,
            due_frame: frame + i as i64,
            horizon: i,
            prefix: Vec::new(),
            radius,
            detail: StagedDetail::ObstacleCentric { predicted },
        });
    }
    Ok(SolveOutcome { best: evaluation.best_rollout().cloned(), staged })
}

/// State-space-discretized safe-set approximation: admits grid point
/// `p` iff `d(p, predicted) >= r_safe + radius(p) + resolution`. Any
/// point within `resolution` of an admitted grid point then satisfies
/// the unpadded constraint, by the triangle inequality.
pub fn grid_safe_set<T: Scalar>(
    grid: &[Point2<T>],
    resolution: T,
    predicted: &ObstacleSet<T>,
    radii: &[ExtReal<T>],
    r_safe: T,
) -> Vec<usize> {
    assert_eq!(grid.len(), radii.len(), "one radius per grid point");
    grid.iter()
        .zip(radii.iter())
        .enumerate()
        .filter(|(_, (p, radius))| {
            let required = radius.add_scalar(r_safe + resolution);
            min_distance(**p, predicted).total_order(&required).is_ge()
        })
        .map(|(idx, _)| idx)
        .collect()
}
