//! Egocentric conformal prediction MPC for navigation among dynamic
//! obstacles.
//!
//! The crate provides, generically over the floating-point scalar:
//!
//! - geometric primitives, unicycle kinematics, and tracking costs
//!   ([`geometry`]);
//! - pluggable N-step obstacle forecasters ([`predictor`]);
//! - egocentric and obstacle-centric score functions, sliding-window
//!   quantile calibration, and delayed-feedback adaptive miscoverage
//!   updates ([`conformal`]);
//! - discrete-input MPC over decision epochs for both the egocentric
//!   controller and the obstacle-centric baseline, plus a grid-based
//!   safe-set approximation ([`planner`]);
//! - pedestrian-scene ingestion and synthetic scene generation
//!   ([`dataset`]);
//! - a closed-loop episode harness with collision/cost/infeasibility
//!   metrics and replayable logs ([`harness`]).

pub mod config;
pub mod conformal;
pub mod dataset;
pub mod geometry;
pub mod harness;
pub mod planner;
pub mod predictor;
pub mod runner;
pub mod scalar;
pub mod selftest;

pub use config::{builtin_synthetic, ConfigFileError, ConfigMap, Experiment, ScenarioSource};
pub use conformal::{
    egocentric_radius, egocentric_score, empirical_quantile, obstacle_centric_radius,
    obstacle_centric_score, AcpLedger, CalibrationWindow, ConformalError, CoverageEvent,
    ObstacleAcpState,
};
pub use dataset::{
    load_annotations, read_timeline_cache, synthetic_scenario, write_timeline_cache, AgentSpec,
    DatasetError, FormatSpec, ScenarioTimeline, SyntheticSpec,
};
pub use geometry::{
    hausdorff_distance, min_distance, normalize_angle, stage_cost, terminal_cost, unicycle_step,
    ControlInput, GeometryError, GoalSpec, ObstacleId, ObstacleSet, Point2, Rect, VehicleState,
};
pub use harness::{
    compute_metrics, recompute_coverage, run_episode, ConfigError, ControllerKind, EpisodeConfig,
    EpisodeLog, HarnessError, MetricsReport, StepRecord,
};
pub use planner::{
    enumerate_rollouts, evaluate_acp_plans, evaluate_ecp_plans, grid_safe_set, rollout_objective,
    solve_acp_mpc, solve_ecp_mpc, InputCatalog, PlanIndex, PlanRollout, PlannerError,
    SafetyConfig, SolveOutcome, StagedCheckRecord, StagedDetail,
};
pub use predictor::{
    export_predictions, ConstantVelocityPredictor, History, PrecomputedPredictions, PredictError,
    PredictionSheet, Predictor,
};
pub use runner::{run_experiment, EpisodeOutcome, RunError};
pub use scalar::{ExtReal, Scalar};

// Concrete aliases for the two supported precisions. The simulator and
// CLI run at f64.
pub type Point64 = Point2<f64>;
pub type Point32 = Point2<f32>;
pub type ExtReal64 = ExtReal<f64>;
pub type ExtReal32 = ExtReal<f32>;
pub type VehicleState64 = VehicleState<f64>;
pub type VehicleState32 = VehicleState<f32>;
pub type ControlInput64 = ControlInput<f64>;
pub type ControlInput32 = ControlInput<f32>;
pub type ObstacleSet64 = ObstacleSet<f64>;
pub type ObstacleSet32 = ObstacleSet<f32>;
pub type GoalSpec64 = GoalSpec<f64>;
pub type SafetyConfig64 = SafetyConfig<f64>;
pub type InputCatalog64 = InputCatalog<f64>;
pub type PredictionSheet64 = PredictionSheet<f64>;
pub type CalibrationWindow64 = CalibrationWindow<f64>;
pub type AcpLedger64 = AcpLedger<f64>;
pub type ObstacleAcpState64 = ObstacleAcpState<f64>;
pub type ScenarioTimeline64 = ScenarioTimeline<f64>;
pub type EpisodeConfig64 = EpisodeConfig<f64>;
pub type EpisodeLog64 = EpisodeLog<f64>;
pub type MetricsReport64 = MetricsReport<f64>;
