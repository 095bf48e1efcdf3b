//! Built-in invariant checks behind the CLI `selftest` verb: quick,
//! seeded spot checks of the calibration and planning machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conformal::{
    egocentric_radius, egocentric_score, empirical_quantile, obstacle_centric_score, AcpLedger,
    CalibrationWindow,
};
use crate::geometry::{
    hausdorff_distance, ControlInput, GoalSpec, ObstacleId, ObstacleSet, Point2, Rect,
    VehicleState,
};
use crate::planner::{evaluate_ecp_plans, InputCatalog, SafetyConfig};
use crate::predictor::PredictionSheet;
use crate::scalar::ExtReal;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, passed: true, detail: detail.into() }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, passed: false, detail: detail.into() }
    }
}

fn random_matched_pair(rng: &mut ChaCha8Rng, max_n: usize) -> (ObstacleSet<f64>, ObstacleSet<f64>) {
    let n = rng.gen_range(1..=max_n);
    let mut predicted = Vec::with_capacity(n);
    let mut realized = Vec::with_capacity(n);
    for k in 0..n {
        let id = ObstacleId::new(k.to_string());
        predicted.push((id.clone(), Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))));
        realized.push((id, Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))));
    }
    (
        ObstacleSet::from_entries(predicted).expect("unique ids"),
        ObstacleSet::from_entries(realized).expect("unique ids"),
    )
}

fn score_dominance(rng: &mut ChaCha8Rng) -> CheckResult {
    const NAME: &str = "score-dominance";
    for trial in 0..1000 {
        let (predicted, realized) = random_matched_pair(rng, 20);
        let candidate = Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let ego = egocentric_score(candidate, &predicted, &realized)
            .finite_value()
            .expect("nonempty sets give finite scores");
        let hausdorff = hausdorff_distance(&realized, &predicted)
            .finite_value()
            .expect("nonempty sets give finite distance");
        let obs = obstacle_centric_score(&predicted, &realized)
            .finite_value()
            .expect("finite by construction");
        if ego > hausdorff + 1e-9 || hausdorff > obs + 1e-9 {
            return CheckResult::fail(
                NAME,
                format!("trial {trial}: ego {ego} vs hausdorff {hausdorff} vs obstacle {obs}"),
            );
        }
    }
    CheckResult::pass(NAME, "ego <= hausdorff <= obstacle on 1000 random instances")
}

fn hausdorff_metric_properties(rng: &mut ChaCha8Rng) -> CheckResult {
    const NAME: &str = "hausdorff-metric";
    for trial in 0..300 {
        let (a, b) = random_matched_pair(rng, 8);
        let (c, _) = random_matched_pair(rng, 8);
        let ab = hausdorff_distance(&a, &b).finite_value().unwrap();
        let ba = hausdorff_distance(&b, &a).finite_value().unwrap();
        let ac = hausdorff_distance(&a, &c).finite_value().unwrap();
        let cb = hausdorff_distance(&c, &b).finite_value().unwrap();
        if ab != ba {
            return CheckResult::fail(NAME, format!("trial {trial}: asymmetric {ab} vs {ba}"));
        }
        if ab > ac + cb + 1e-9 {
            return CheckResult::fail(
                NAME,
                format!("trial {trial}: triangle violated {ab} > {ac} + {cb}"),
            );
        }
        if hausdorff_distance(&a, &a) != ExtReal::finite(0.0) {
            return CheckResult::fail(NAME, format!("trial {trial}: self-distance nonzero"));
        }
    }
    CheckResult::pass(NAME, "symmetry, identity, triangle inequality on 300 random triples")
}

fn quantile_against_recount(rng: &mut ChaCha8Rng) -> CheckResult {
    const NAME: &str = "quantile-recount";
    for trial in 0..1000 {
        let m = rng.gen_range(1..=40);
        let scores: Vec<ExtReal<f64>> = (0..m)
            .map(|_| {
                if rng.gen_bool(0.05) {
                    ExtReal::PosInf
                } else {
                    ExtReal::finite((rng.gen_range(-20.0..20.0_f64) * 4.0).round() / 4.0)
                }
            })
            .collect();
        let q: f64 = rng.gen_range(-0.3..1.3);
        let got = empirical_quantile(&scores, q).expect("nonempty");
        // Recount: smallest value whose CDF reaches q.
        let expected = if q > 1.0 {
            ExtReal::PosInf
        } else if q <= 0.0 {
            ExtReal::NegInf
        } else {
            let mut sorted = scores.clone();
            sorted.sort_by(|a, b| a.total_order(b));
            *sorted
                .iter()
                .find(|s| {
                    let below = sorted.iter().filter(|x| x.total_order(s).is_le()).count();
                    below as f64 / m as f64 >= q
                })
                .expect("q <= 1 always reached")
        };
        if got != expected {
            return CheckResult::fail(
                NAME,
                format!("trial {trial}: quantile({q}) = {got} but recount says {expected}"),
            );
        }
    }
    CheckResult::pass(NAME, "matches CDF recount on 1000 random multisets")
}

fn alpha_remains_bounded(rng: &mut ChaCha8Rng) -> CheckResult {
    const NAME: &str = "alpha-bound";
    let gamma = 0.03;
    let target = 0.1;
    let horizons = [1usize, 2, 4, 8];
    let candidate = Point2::new(0.0, 0.0);
    let realized = ObstacleSet::from_entries(vec![(ObstacleId::from("o"), Point2::new(1.0, 0.0))])
        .expect("unique");
    let mut window = CalibrationWindow::new(10, 8);
    for frame in 0..10_i64 {
        for i in 1..=8 {
            window.record_prediction(
                frame,
                i,
                ObstacleSet::from_entries(vec![(
                    ObstacleId::from("o"),
                    Point2::new(1.0 + 0.1 * frame as f64, 0.0),
                )])
                .expect("unique"),
            );
        }
        window.record_realized(frame, realized.clone());
    }

    let mut ledger = AcpLedger::new(gamma, target);
    for step in 0..10_000_i64 {
        for &i in &horizons {
            let alpha = ledger.alpha(&[0], i);
            let radius = egocentric_radius(candidate, i, &window, alpha).expect("warm window");
            // Adversary: force a miscoverage whenever the radius is finite.
            let hostile = rng.gen_bool(0.85);
            let predicted_distance = match radius {
                ExtReal::Finite(r) if hostile => ExtReal::finite(r + 2.0),
                ExtReal::Finite(_) => ExtReal::finite(1.0),
                ExtReal::PosInf => ExtReal::finite(1.0),
                ExtReal::NegInf => ExtReal::finite(1.0),
            };
            ledger
                .stage_pending(&[0], i, candidate, predicted_distance, radius, step)
                .expect("no duplicates");
        }
        ledger.record_frame(&realized, step);
        for &i in &horizons {
            let alpha = ledger.alpha(&[0], i);
            let lo = -((i + 1) as f64) * gamma;
            let hi = 1.0 + ((i + 1) as f64) * gamma;
            if alpha < lo || alpha > hi {
                return CheckResult::fail(
                    NAME,
                    format!("step {step}: alpha[{i}] = {alpha} outside [{lo}, {hi}]"),
                );
            }
        }
    }
    CheckResult::pass(NAME, "all entries stayed in [-(i+1)g, 1+(i+1)g] over 10^4 hostile steps")
}

fn radius_monotone_in_alpha(rng: &mut ChaCha8Rng) -> CheckResult {
    const NAME: &str = "radius-monotone";
    let mut window = CalibrationWindow::new(25, 1);
    for frame in 0..25_i64 {
        let (predicted, realized) = random_matched_pair(rng, 6);
        window.record_prediction(frame, 1, predicted);
        window.record_realized(frame, realized);
    }
    for trial in 0..50 {
        let candidate = Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let mut previous: Option<ExtReal<f64>> = None;
        for k in 0..30 {
            let alpha = -0.2 + 0.05 * k as f64;
            let radius = egocentric_radius(candidate, 1, &window, alpha).expect("warm");
            if let Some(prev) = previous {
                if radius.total_order(&prev).is_gt() {
                    return CheckResult::fail(
                        NAME,
                        format!("trial {trial}: radius rose from {prev} to {radius} as alpha rose"),
                    );
                }
            }
            previous = Some(radius);
        }
    }
    CheckResult::pass(NAME, "nonincreasing in alpha across 50 random candidates")
}

fn planner_is_order_independent(rng: &mut ChaCha8Rng) -> CheckResult {
    const NAME: &str = "planner-determinism";
    let catalog = InputCatalog::<f64>::default();
    let goal = GoalSpec {
        goal_x: rng.gen_range(-5.0..5.0),
        goal_y: rng.gen_range(-5.0..5.0),
        arrival_radius: 0.5,
        input_cost_weight: 1e-3,
        terminal_weight: 10.0,
    };
    let safety = SafetyConfig {
        r_safe: 0.3,
        state_bounds: Rect::new(-30.0, -30.0, 30.0, 30.0),
        target_alpha: 0.1,
        fallback_input: ControlInput::stop(),
    };
    let horizon = 12;
    let mut window = CalibrationWindow::new(15, horizon);
    for frame in 0..15_i64 {
        let (predicted, realized) = random_matched_pair(rng, 10);
        for i in 1..=horizon {
            window.record_prediction(frame, i, predicted.clone());
        }
        window.record_realized(frame, realized);
    }
    let ledger = AcpLedger::new(0.03, 0.1);
    let predictions = PredictionSheet::new(
        (0..horizon).map(|_| random_matched_pair(rng, 10).0).collect(),
        15,
    );
    let state = VehicleState::new(0.0, 0.0, rng.gen_range(-3.0..3.0));
    let a = evaluate_ecp_plans(
        state, &predictions, &window, &ledger, &goal, &safety, &catalog, 3, 0.4,
    )
    .expect("evaluates");
    let b = evaluate_ecp_plans(
        state, &predictions, &window, &ledger, &goal, &safety, &catalog, 3, 0.4,
    )
    .expect("evaluates");
    if a.best != b.best {
        return CheckResult::fail(NAME, "repeated evaluation picked different plans".to_string());
    }
    for (ra, rb) in a.rollouts.iter().zip(b.rollouts.iter()) {
        if ra != rb {
            return CheckResult::fail(NAME, format!("rollout {:?} differs across runs", ra.index));
        }
    }
    CheckResult::pass(NAME, "identical evaluation across repeated parallel runs")
}

/// Runs every built-in check with a fixed seed and returns the results.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        score_dominance(&mut rng),
        hausdorff_metric_properties(&mut rng),
        quantile_against_recount(&mut rng),
        alpha_remains_bounded(&mut rng),
        radius_monotone_in_alpha(&mut rng),
        planner_is_order_independent(&mut rng),
    ]
}
