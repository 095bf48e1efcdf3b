//! Closed-loop episode execution and metric computation.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{AcpLedger, AlphaEntry, CalibrationWindow, CoverageEvent, ObstacleAcpState};
use crate::dataset::ScenarioTimeline;
use crate::geometry::{
    min_distance, unicycle_step, ControlInput, GoalSpec, ObstacleSet, VehicleState,
};
use crate::planner::{
    rollout_objective, solve_acp_mpc, solve_ecp_mpc, InputCatalog, PlanIndex, PlannerError,
    SafetyConfig, StagedCheckRecord, StagedDetail,
};
use crate::predictor::{History, PredictError, Predictor};
use crate::scalar::{is_positive_finite, ExtReal, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Ecp,
    Acp,
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerKind::Ecp => write!(f, "ecp"),
            ControllerKind::Acp => write!(f, "acp"),
        }
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ecp" => Ok(ControllerKind::Ecp),
            "acp" => Ok(ControllerKind::Acp),
            other => Err(format!("unknown controller {other:?} (expected ecp or acp)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn config_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { field: field.into(), message: message.into() }
}

/// Everything one episode needs besides the scenario data and predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig<T> {
    pub scenario_name: String,
    pub start_state: VehicleState<T>,
    pub goal: GoalSpec<T>,
    pub controller: ControllerKind,
    /// Maximum number of control steps after warm-up.
    pub t_max: usize,
    /// History length H consumed by the predictor.
    pub history_len: usize,
    /// Prediction horizon N.
    pub horizon: usize,
    /// Decision epochs D; each lasts `horizon / decision_epochs` steps.
    pub decision_epochs: usize,
    /// Calibration window length M.
    pub window_len: usize,
    /// Adaptive step size.
    pub gamma: T,
    pub safety: SafetyConfig<T>,
    pub catalog: InputCatalog<T>,
    /// Control period in seconds.
    pub step_seconds: T,
    pub seed: u64,
}

impl<T: Scalar> EpisodeConfig<T> {
    pub fn target_alpha(&self) -> T {
        self.safety.target_alpha
    }

    pub fn warmup_frames(&self) -> usize {
        self.history_len + self.horizon
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.history_len == 0 {
            return Err(config_err("history_len", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(config_err("horizon", "must be at least 1"));
        }
        if self.decision_epochs == 0 || !self.horizon.is_multiple_of(self.decision_epochs) {
            return Err(config_err("decision_epochs", "must divide the horizon"));
        }
        if self.window_len == 0 {
            return Err(config_err("window_len", "must be at least 1"));
        }
        if self.t_max <= self.history_len + self.horizon {
            return Err(config_err("t_max", "must exceed history_len + horizon"));
        }
        if !is_positive_finite(self.gamma) {
            return Err(config_err("gamma", "must be positive"));
        }
        let alpha = self.target_alpha();
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(config_err("target_alpha", "must lie in (0, 1)"));
        }
        if !is_positive_finite(self.step_seconds) {
            return Err(config_err("step_seconds", "must be positive"));
        }
        self.goal.validate().map_err(|m| config_err("goal", m))?;
        self.safety.validate().map_err(|m| config_err("safety", m))?;
        Ok(())
    }
}

/// One executed control step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord<T> {
    pub frame: i64,
    pub state: VehicleState<T>,
    pub input: ControlInput<T>,
    pub feasible: bool,
    /// Open-loop objective of the executed plan (fallback plan when
    /// infeasible).
    pub plan_cost: T,
    pub plan_index: Option<PlanIndex>,
    pub realized: ObstacleSet<T>,
    /// Distance from the executed state to the realized obstacles.
    pub min_clearance: ExtReal<T>,
    /// Chosen plan's radius per horizon; absent on fallback steps.
    pub plan_radii: Option<Vec<ExtReal<T>>>,
}

/// Full record of one episode, sufficient to recompute every metric and
/// coverage series offline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog<T> {
    pub scenario: String,
    pub controller: ControllerKind,
    pub seed: u64,
    pub gamma: T,
    pub target_alpha: T,
    pub warmup_frames: usize,
    /// Steps executed before arrival; equals t_max when the goal was
    /// never reached.
    pub arrival_step: usize,
    pub arrived: bool,
    pub steps: Vec<StepRecord<T>>,
    pub staged: Vec<StagedCheckRecord<T>>,
    pub resolved: Vec<CoverageEvent<T>>,
    pub final_alpha: Vec<AlphaEntry<T>>,
}

/// Travel time, collision rate, average cost, and infeasibility rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<T> {
    pub travel_time: usize,
    pub collision_rate: T,
    pub average_cost: T,
    pub infeasibility_rate: T,
}

#[derive(Debug, Error)]
pub enum HarnessError<T: Scalar> {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario provides {available} frames but warm-up plus one step needs {needed}")]
    ScenarioTooShort { needed: usize, available: usize },
    #[error("scenario exhausted at frame {frame} after {executed} steps")]
    Truncated {
        frame: i64,
        executed: usize,
        partial: Box<EpisodeLog<T>>,
    },
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error("episode log holds no executed steps")]
    EmptyLog,
    #[error("predictor horizon {predictor} differs from configured horizon {config}")]
    HorizonMismatch { predictor: usize, config: usize },
}

enum Controller<T> {
    Ecp(AcpLedger<T>),
    Acp(ObstacleAcpState<T>),
}

impl<T: Scalar> Controller<T> {
    fn record_frame(&mut self, realized: &ObstacleSet<T>, frame: i64) -> Vec<CoverageEvent<T>> {
        match self {
            Controller::Ecp(ledger) => ledger.record_frame(realized, frame),
            Controller::Acp(state) => state.record_frame(realized, frame),
        }
    }

    fn final_alpha(&self) -> Vec<AlphaEntry<T>> {
        match self {
            Controller::Ecp(ledger) => ledger.alpha_snapshot(),
            Controller::Acp(state) => state.alpha_snapshot(),
        }
    }
}

/// Runs one closed-loop episode: a warm-up of pure observation, then
/// per step record the realization, update the adaptive parameters,
/// predict, solve, and apply the first input (or the fallback input on
/// an infeasible step).
pub fn run_episode<T: Scalar>(
    config: &EpisodeConfig<T>,
    scenario: &ScenarioTimeline<T>,
    predictor: &dyn Predictor<T>,
) -> Result<EpisodeLog<T>, HarnessError<T>> {
    config.validate()?;
    if predictor.horizon() != config.horizon {
        return Err(HarnessError::HorizonMismatch {
            predictor: predictor.horizon(),
            config: config.horizon,
        });
    }
    let warmup = config.warmup_frames();
    if scenario.len() < warmup + 1 {
        return Err(HarnessError::ScenarioTooShort {
            needed: warmup + 1,
            available: scenario.len(),
        });
    }

    let mut window = CalibrationWindow::new(config.window_len, config.horizon);
    let mut history: VecDeque<ObstacleSet<T>> = VecDeque::with_capacity(config.history_len + 1);
    let mut controller = match config.controller {
        ControllerKind::Ecp => Controller::Ecp(AcpLedger::new(config.gamma, config.target_alpha())),
        ControllerKind::Acp => Controller::Acp(ObstacleAcpState::new(
            config.horizon,
            config.gamma,
            config.target_alpha(),
        )),
    };

    let mut log = EpisodeLog {
        scenario: config.scenario_name.clone(),
        controller: config.controller,
        seed: config.seed,
        gamma: config.gamma,
        target_alpha: config.target_alpha(),
        warmup_frames: warmup,
        arrival_step: 0,
        arrived: false,
        steps: Vec::with_capacity(config.t_max),
        staged: Vec::new(),
        resolved: Vec::new(),
        final_alpha: Vec::new(),
    };

    let observe = |window: &mut CalibrationWindow<T>,
                       history: &mut VecDeque<ObstacleSet<T>>,
                       frame: i64,
                       realized: &ObstacleSet<T>,
                       predictor: &dyn Predictor<T>|
     -> Result<Option<crate::predictor::PredictionSheet<T>>, PredictError> {
        window.record_realized(frame, realized.clone());
        history.push_back(realized.clone());
        while history.len() > config.history_len {
            history.pop_front();
        }
        if history.len() == config.history_len {
            let h = History::new(history.iter().cloned().collect(), frame)?;
            let sheet = predictor.predict(&h)?;
            window.record_prediction_sheet(&sheet);
            Ok(Some(sheet))
        } else {
            Ok(None)
        }
    };

    // Warm-up: observe and predict, hold the start state, no control.
    for t in 0..warmup {
        let realized = scenario.frame(t).expect("length checked above");
        observe(&mut window, &mut history, t as i64, realized, predictor)?;
    }

    let mut state = config.start_state;
    let goal_point = config.goal.position();
    if state.position().distance(goal_point) <= config.goal.arrival_radius {
        log.arrived = true;
        log.final_alpha = controller.final_alpha();
        return Ok(log);
    }

    for step in 0..config.t_max {
        let t = warmup + step;
        let Some(realized) = scenario.frame(t) else {
            log.arrival_step = step;
            log.final_alpha = controller.final_alpha();
            return Err(HarnessError::Truncated {
                frame: t as i64,
                executed: step,
                partial: Box::new(log),
            });
        };
        let frame = t as i64;
        let sheet = observe(&mut window, &mut history, frame, realized, predictor)?
            .expect("history is full after warm-up");
        let events = controller.record_frame(realized, frame);
        log.resolved.extend(events);

        let outcome = match &mut controller {
            Controller::Ecp(ledger) => solve_ecp_mpc(
                state,
                &sheet,
                &window,
                ledger,
                &config.goal,
                &config.safety,
                &config.catalog,
                config.decision_epochs,
                config.step_seconds,
            )?,
            Controller::Acp(acp) => solve_acp_mpc(
                state,
                &sheet,
                &window,
                acp,
                &config.goal,
                &config.safety,
                &config.catalog,
                config.decision_epochs,
                config.step_seconds,
            )?,
        };

        let (input, plan_cost, feasible, plan_index, plan_radii) = match &outcome.best {
            Some(best) => {
                let radii: Vec<ExtReal<T>> = (1..=config.horizon)
                    .map(|i| plan_radius_from_staged(&outcome.staged, best, i))
                    .collect();
                (
                    best.inputs[0],
                    best.total_cost.expect("assessed rollout has a cost"),
                    true,
                    Some(best.index.clone()),
                    Some(radii),
                )
            }
            None => {
                let input = config.safety.fallback_input;
                let mut states = Vec::with_capacity(config.horizon + 1);
                states.push(state);
                for k in 0..config.horizon {
                    states.push(unicycle_step(states[k], input, config.step_seconds));
                }
                let inputs = vec![input; config.horizon];
                let cost = rollout_objective(&states, &inputs, &config.goal);
                (input, cost, false, None, None)
            }
        };

        log.steps.push(StepRecord {
            frame,
            state,
            input,
            feasible,
            plan_cost,
            plan_index,
            realized: realized.clone(),
            min_clearance: min_distance(state.position(), realized),
            plan_radii,
        });
        log.staged.extend(outcome.staged);

        state = unicycle_step(state, input, config.step_seconds);
        log.arrival_step = step + 1;
        if state.position().distance(goal_point) <= config.goal.arrival_radius {
            log.arrived = true;
            break;
        }
    }

    log.final_alpha = controller.final_alpha();
    Ok(log)
}

fn plan_radius_from_staged<T: Scalar>(
    staged: &[StagedCheckRecord<T>],
    best: &crate::planner::PlanRollout<T>,
    horizon: usize,
) -> ExtReal<T> {
    let prefix = best.index.prefix_for_horizon(horizon);
    staged
        .iter()
        .find(|c| c.horizon == horizon && (c.prefix.is_empty() || c.prefix == prefix))
        .map(|c| c.radius)
        .expect("solver staged a check for every horizon of the chosen plan")
}

/// Collision, cost, travel-time, and infeasibility metrics of one
/// episode. Collision accounting uses realized obstacle positions only.
pub fn compute_metrics<T: Scalar>(
    log: &EpisodeLog<T>,
    config: &EpisodeConfig<T>,
) -> Result<MetricsReport<T>, HarnessError<T>> {
    if log.steps.is_empty() {
        return Err(HarnessError::EmptyLog);
    }
    let tau = log.steps.len();
    let tau_t = T::from_usize(tau).expect("step count fits scalar");
    let r_safe = ExtReal::finite(config.safety.r_safe);
    let collisions = log
        .steps
        .iter()
        .filter(|s| s.min_clearance.total_order(&r_safe).is_lt())
        .count();
    let infeasible = log.steps.iter().filter(|s| !s.feasible).count();
    let mut cost_sum = T::zero();
    for s in &log.steps {
        cost_sum += s.plan_cost;
    }
    Ok(MetricsReport {
        travel_time: tau,
        collision_rate: T::from_usize(collisions).expect("count fits scalar") / tau_t,
        average_cost: cost_sum / tau_t,
        infeasibility_rate: T::from_usize(infeasible).expect("count fits scalar") / tau_t,
    })
}

/// Replays the staged checks of a log against its recorded
/// realizations, reproducing the coverage events and adaptive updates
/// from scratch. Audit tooling compares this against `log.resolved`.
pub fn recompute_coverage<T: Scalar>(log: &EpisodeLog<T>) -> Vec<CoverageEvent<T>> {
    let Some(last_frame) = log.steps.last().map(|s| s.frame) else {
        return Vec::new();
    };
    let first_frame = log.steps.first().map(|s| s.frame).expect("nonempty");
    let realized_at = |frame: i64| -> Option<&ObstacleSet<T>> {
        let idx = usize::try_from(frame - first_frame).ok()?;
        log.steps.get(idx).map(|s| &s.realized)
    };

    let mut alpha: std::collections::BTreeMap<(usize, Vec<u16>), T> = Default::default();
    let mut events = Vec::new();
    let mut due_sorted: Vec<&StagedCheckRecord<T>> = log.staged.iter().collect();
    due_sorted.sort_by_key(|c| c.due_frame);
    for check in due_sorted {
        if check.due_frame > last_frame {
            continue;
        }
        let Some(realized) = realized_at(check.due_frame) else {
            continue;
        };
        let score = match &check.detail {
            StagedDetail::Egocentric { candidate, predicted_distance } => {
                predicted_distance.sub_clamped(min_distance(*candidate, realized))
            }
            StagedDetail::ObstacleCentric { predicted } => {
                crate::conformal::obstacle_centric_score(predicted, realized)
            }
        };
        let covered = score.total_order(&check.radius).is_le();
        let miss = if covered { T::zero() } else { T::one() };
        let entry = alpha
            .entry((check.horizon, check.prefix.clone()))
            .or_insert(log.target_alpha);
        *entry += log.gamma * (log.target_alpha - miss);
        events.push(CoverageEvent {
            due_frame: check.due_frame,
            horizon: check.horizon,
            prefix: check.prefix.clone(),
            score,
            radius: check.radius,
            covered,
            alpha_after: *entry,
        });
    }
    events
}

/// Fixed column order of the per-step CSV.
pub const STEPS_CSV_HEADER: &str =
    "frame,x,y,theta,v,omega,feasible,plan,plan_cost,n_obstacles,min_clearance";

pub fn write_steps_csv<T: Scalar>(
    mut writer: impl Write,
    log: &EpisodeLog<T>,
) -> std::io::Result<()> {
    writeln!(writer, "{STEPS_CSV_HEADER}")?;
    for s in &log.steps {
        let plan = s
            .plan_index
            .as_ref()
            .map(|p| PlanIndex::prefix_label(&p.epochs))
            .unwrap_or_else(|| "fallback".into());
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.frame,
            s.state.x,
            s.state.y,
            s.state.theta,
            s.input.v,
            s.input.omega,
            s.feasible,
            plan,
            s.plan_cost,
            s.realized.len(),
            s.min_clearance,
        )?;
    }
    Ok(())
}

/// Fixed column order of the radii CSV; the prefix column reads `*` for
/// the obstacle-centric controller's shared radii.
pub const RADII_CSV_HEADER: &str = "frame,horizon,prefix,radius";

pub fn write_radii_csv<T: Scalar>(
    mut writer: impl Write,
    log: &EpisodeLog<T>,
) -> std::io::Result<()> {
    writeln!(writer, "{RADII_CSV_HEADER}")?;
    for c in &log.staged {
        let prefix = if c.prefix.is_empty() {
            "*".to_string()
        } else {
            PlanIndex::prefix_label(&c.prefix)
        };
        writeln!(writer, "{},{},{},{}", c.issue_frame, c.horizon, prefix, c.radius)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthetic_scenario, AgentSpec, SyntheticSpec};
    use crate::geometry::{Point2, Rect};
    use crate::predictor::ConstantVelocityPredictor;

    fn base_config(controller: ControllerKind) -> EpisodeConfig<f64> {
        EpisodeConfig {
            scenario_name: "test".into(),
            start_state: VehicleState::new(0.0, 0.0, 0.0),
            goal: GoalSpec {
                goal_x: 4.0,
                goal_y: 0.0,
                arrival_radius: 0.5,
                input_cost_weight: 1e-3,
                terminal_weight: 10.0,
            },
            controller,
            t_max: 60,
            history_len: 4,
            horizon: 6,
            decision_epochs: 3,
            window_len: 20,
            gamma: 0.03,
            safety: SafetyConfig {
                r_safe: 0.3,
                state_bounds: Rect::new(-20.0, -20.0, 20.0, 20.0),
                target_alpha: 0.1,
                fallback_input: ControlInput::stop(),
            },
            catalog: InputCatalog::default(),
            step_seconds: 0.4,
            seed: 1,
        }
    }

    fn empty_scene(frames: usize) -> ScenarioTimeline<f64> {
        synthetic_scenario(
            &SyntheticSpec {
                name: "empty".into(),
                frames,
                frame_period: 0.4,
                agents: vec![],
                noise_std: 0.0,
            },
            0,
        )
    }

    #[test]
    fn obstacle_free_episode_reaches_goal() {
        let config = base_config(ControllerKind::Ecp);
        let scenario = empty_scene(120);
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        let log = run_episode(&config, &scenario, &predictor).unwrap();
        assert!(log.arrived, "goal should be reachable without obstacles");
        assert!(log.arrival_step < config.t_max);
        let metrics = compute_metrics(&log, &config).unwrap();
        assert_eq!(metrics.collision_rate, 0.0);
        assert_eq!(metrics.infeasibility_rate, 0.0);
        assert_eq!(metrics.travel_time, log.steps.len());
    }

    #[test]
    fn pinned_vehicle_logs_infeasible_fallback_steps() {
        let mut config = base_config(ControllerKind::Ecp);
        // A tight ring of orbiting obstacles around the start leaves no
        // feasible plan once radii calibrate upward.
        config.goal.goal_x = 10.0;
        let ring: Vec<AgentSpec<f64>> = (0..8)
            .map(|k| {
                let angle = k as f64 * std::f64::consts::PI / 4.0;
                AgentSpec::Circular {
                    id: format!("ring{k}"),
                    center: Point2::new(0.0, 0.0),
                    radius: 0.8,
                    angular_velocity: 2.2,
                    phase: angle,
                    active: None,
                }
            })
            .collect();
        let scenario = synthetic_scenario(
            &SyntheticSpec {
                name: "pinned".into(),
                frames: 120,
                frame_period: 0.4,
                agents: ring,
                noise_std: 0.08,
            },
            7,
        );
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        let log = run_episode(&config, &scenario, &predictor).unwrap();
        let infeasible_steps = log.steps.iter().filter(|s| !s.feasible).count();
        assert!(infeasible_steps > 0, "expected fallback stops");
        for s in log.steps.iter().filter(|s| !s.feasible) {
            assert_eq!(s.input, ControlInput::stop());
            assert!(s.plan_index.is_none());
        }
    }

    #[test]
    fn deterministic_replay_is_bit_identical() {
        let config = base_config(ControllerKind::Ecp);
        let scenario = synthetic_scenario(
            &SyntheticSpec {
                name: "walkers".into(),
                frames: 120,
                frame_period: 0.4,
                agents: vec![
                    AgentSpec::Linear {
                        id: "w1".into(),
                        start: Point2::new(5.0, -2.0),
                        velocity: Point2::new(-0.4, 0.4),
                        jumps: vec![(40, Point2::new(0.4, -0.2))],
                        active: None,
                    },
                    AgentSpec::Circular {
                        id: "w2".into(),
                        center: Point2::new(2.0, 1.0),
                        radius: 1.0,
                        angular_velocity: 0.5,
                        phase: 0.3,
                        active: None,
                    },
                ],
                noise_std: 0.05,
            },
            11,
        );
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        let a = run_episode(&config, &scenario, &predictor).unwrap();
        let b = run_episode(&config, &scenario, &predictor).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn controllers_coincide_when_radii_are_zero() {
        let ecp_log = {
            let config = base_config(ControllerKind::Ecp);
            let scenario = empty_scene(120);
            let predictor = ConstantVelocityPredictor::new(config.horizon);
            run_episode(&config, &scenario, &predictor).unwrap()
        };
        let acp_log = {
            let config = base_config(ControllerKind::Acp);
            let scenario = empty_scene(120);
            let predictor = ConstantVelocityPredictor::new(config.horizon);
            run_episode(&config, &scenario, &predictor).unwrap()
        };
        let strip = |log: &EpisodeLog<f64>| {
            log.steps
                .iter()
                .map(|s| (s.frame, s.state, s.input, s.feasible, s.plan_cost, s.plan_index.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&ecp_log), strip(&acp_log));
    }

    #[test]
    fn coverage_bookkeeping_is_self_consistent() {
        let config = base_config(ControllerKind::Ecp);
        let scenario = synthetic_scenario(
            &SyntheticSpec {
                name: "cross".into(),
                frames: 120,
                frame_period: 0.4,
                agents: vec![AgentSpec::Linear {
                    id: "p".into(),
                    start: Point2::new(6.0, -3.0),
                    velocity: Point2::new(-0.5, 0.5),
                    jumps: vec![(30, Point2::new(-0.5, -0.5)), (60, Point2::new(0.5, 0.0))],
                    active: None,
                }],
                noise_std: 0.1,
            },
            3,
        );
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        let log = run_episode(&config, &scenario, &predictor).unwrap();
        assert!(!log.resolved.is_empty());
        let replayed = recompute_coverage(&log);
        assert_eq!(replayed, log.resolved);
    }

    #[test]
    fn truncated_scenario_returns_partial_log() {
        let mut config = base_config(ControllerKind::Ecp);
        config.t_max = 50;
        config.goal.goal_x = 30.0; // unreachable before truncation
        let scenario = empty_scene(config.warmup_frames() + 10);
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        match run_episode(&config, &scenario, &predictor) {
            Err(HarnessError::Truncated { executed, partial, .. }) => {
                assert_eq!(executed, 10);
                assert_eq!(partial.steps.len(), 10);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn too_short_scenario_rejected_up_front() {
        let config = base_config(ControllerKind::Ecp);
        let scenario = empty_scene(config.warmup_frames());
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        assert!(matches!(
            run_episode(&config, &scenario, &predictor),
            Err(HarnessError::ScenarioTooShort { .. })
        ));
    }

    #[test]
    fn metric_counting() {
        let config = base_config(ControllerKind::Ecp);
        let scenario = empty_scene(120);
        let predictor = ConstantVelocityPredictor::new(config.horizon);
        let mut log = run_episode(&config, &scenario, &predictor).unwrap();
        // Mark three steps infeasible by hand and recount.
        for s in log.steps.iter_mut().take(3) {
            s.feasible = false;
        }
        let tau = log.steps.len() as f64;
        let metrics = compute_metrics(&log, &config).unwrap();
        assert!((metrics.infeasibility_rate - 3.0 / tau).abs() < 1e-12);

        let single = EpisodeLog { steps: log.steps[..1].to_vec(), ..log.clone() };
        let m = compute_metrics(&single, &config).unwrap();
        assert_eq!(m.average_cost, single.steps[0].plan_cost);
        assert_eq!(m.travel_time, 1);
    }

    #[test]
    fn config_validation_names_fields() {
        let mut config = base_config(ControllerKind::Ecp);
        config.gamma = -0.1;
        let err = config.validate().unwrap_err();
        assert_eq!(err.field, "gamma");

        let mut config = base_config(ControllerKind::Ecp);
        config.decision_epochs = 5;
        assert_eq!(config.validate().unwrap_err().field, "decision_epochs");

        let mut config = base_config(ControllerKind::Ecp);
        config.t_max = config.history_len + config.horizon;
        assert_eq!(config.validate().unwrap_err().field, "t_max");
    }
}
