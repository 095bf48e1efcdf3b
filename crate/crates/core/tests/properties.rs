//! Property tests for the geometric and calibration invariants.

use proptest::prelude::*;

use ecp_core::{
    egocentric_radius, egocentric_score, empirical_quantile, hausdorff_distance, min_distance,
    obstacle_centric_score, synthetic_scenario, unicycle_step, AgentSpec, CalibrationWindow,
    ConstantVelocityPredictor, ControlInput, ExtReal, History, ObstacleId, ObstacleSet, Point2,
    Predictor, SyntheticSpec, VehicleState,
};

fn set_from(points: &[(f64, f64)], tag: &str) -> ObstacleSet<f64> {
    ObstacleSet::from_entries(
        points
            .iter()
            .enumerate()
            .map(|(k, (x, y))| (ObstacleId::new(format!("{tag}{k}")), Point2::new(*x, *y)))
            .collect(),
    )
    .expect("generated ids are unique")
}

fn points(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0, -10.0..10.0), 1..=max_len)
}

fn ext_scores() -> impl Strategy<Value = Vec<ExtReal<f64>>> {
    prop::collection::vec(
        prop_oneof![
            8 => (-20.0..20.0).prop_map(|v: f64| ExtReal::finite((v * 8.0).round() / 8.0)),
            1 => Just(ExtReal::PosInf),
            1 => Just(ExtReal::NegInf),
        ],
        1..=40,
    )
}

proptest! {
    #[test]
    fn min_distance_distributes_over_union(
        a in points(8),
        b in points(8),
        px in -10.0..10.0,
        py in -10.0..10.0,
    ) {
        let p = Point2::new(px, py);
        let set_a = set_from(&a, "a");
        let set_b = set_from(&b, "b");
        let mut union_entries: Vec<_> = set_a.entries().to_vec();
        union_entries.extend_from_slice(set_b.entries());
        let union = ObstacleSet::from_entries(union_entries).unwrap();

        let da = min_distance(p, &set_a);
        let db = min_distance(p, &set_b);
        let expected = if da.total_order(&db).is_le() { da } else { db };
        prop_assert_eq!(min_distance(p, &union), expected);
    }

    #[test]
    fn hausdorff_is_a_metric_on_point_sets(
        a in points(8),
        b in points(8),
        c in points(8),
    ) {
        let sa = set_from(&a, "a");
        let sb = set_from(&b, "b");
        let sc = set_from(&c, "c");
        let ab = hausdorff_distance(&sa, &sb).finite_value().unwrap();
        let ba = hausdorff_distance(&sb, &sa).finite_value().unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);

        // Zero on a relabeled copy of the same point set.
        let relabeled = set_from(&a, "z");
        prop_assert_eq!(
            hausdorff_distance(&sa, &relabeled),
            ExtReal::finite(0.0)
        );

        let ac = hausdorff_distance(&sa, &sc).finite_value().unwrap();
        let cb = hausdorff_distance(&sc, &sb).finite_value().unwrap();
        prop_assert!(ab <= ac + cb + 1e-9);
    }

    #[test]
    fn hausdorff_positive_when_point_sets_differ(
        a in points(8),
        far in 11.0..40.0,
    ) {
        let sa = set_from(&a, "a");
        let mut entries = sa.entries().to_vec();
        entries.push((ObstacleId::new("extra"), Point2::new(far, 0.0)));
        let sb = ObstacleSet::from_entries(entries).unwrap();
        let d = hausdorff_distance(&sa, &sb).finite_value().unwrap();
        prop_assert!(d > 0.0);
    }

    #[test]
    fn clearance_is_lipschitz_in_the_set(
        a in points(8),
        b in points(8),
        px in -10.0..10.0,
        py in -10.0..10.0,
    ) {
        let p = Point2::new(px, py);
        let sa = set_from(&a, "a");
        let sb = set_from(&b, "b");
        let da = min_distance(p, &sa).finite_value().unwrap();
        let db = min_distance(p, &sb).finite_value().unwrap();
        let dh = hausdorff_distance(&sa, &sb).finite_value().unwrap();
        prop_assert!((da - db).abs() <= dh + 1e-9);
    }

    #[test]
    fn score_dominance_chain(
        pred in points(12),
        real_offsets in prop::collection::vec((-3.0..3.0, -3.0..3.0), 12),
        px in -10.0..10.0,
        py in -10.0..10.0,
    ) {
        // Id-matched pair: the realization perturbs each predicted entry.
        let n = pred.len().min(real_offsets.len());
        let predicted = set_from(&pred[..n], "o");
        let realized_points: Vec<(f64, f64)> = pred[..n]
            .iter()
            .zip(&real_offsets[..n])
            .map(|((x, y), (dx, dy))| (x + dx, y + dy))
            .collect();
        let realized = set_from(&realized_points, "o");

        let x = Point2::new(px, py);
        let ego = egocentric_score(x, &predicted, &realized).finite_value().unwrap();
        let dh = hausdorff_distance(&realized, &predicted).finite_value().unwrap();
        let obs = obstacle_centric_score(&predicted, &realized).finite_value().unwrap();
        prop_assert!(ego <= dh + 1e-9, "ego {} > hausdorff {}", ego, dh);
        prop_assert!(dh <= obs + 1e-9, "hausdorff {} > obstacle {}", dh, obs);
    }

    #[test]
    fn stationary_input_is_identity(
        x in -50.0..50.0,
        y in -50.0..50.0,
        theta in -3.0..3.0,
        h in 0.01..2.0,
    ) {
        let state = VehicleState::new(x, y, theta);
        prop_assert_eq!(unicycle_step(state, ControlInput::stop(), h), state);
    }

    #[test]
    fn quantile_matches_cdf_oracle_and_is_monotone(
        scores in ext_scores(),
        q1 in -0.5..1.5,
        q2 in -0.5..1.5,
    ) {
        let m = scores.len();
        let oracle = |q: f64| -> ExtReal<f64> {
            // inf{s : F(s) >= q} with F the empirical CDF. A probe below
            // the minimum has F = 0, so q <= 0 gives -inf; no element
            // reaches q > 1, giving +inf.
            if q <= 0.0 {
                return ExtReal::NegInf;
            }
            let mut sorted = scores.clone();
            sorted.sort_by(|a, b| a.total_order(b));
            for s in &sorted {
                let below = sorted.iter().filter(|x| x.total_order(s).is_le()).count();
                if below as f64 / m as f64 >= q {
                    return *s;
                }
            }
            ExtReal::PosInf
        };
        let v1 = empirical_quantile(&scores, q1).unwrap();
        let v2 = empirical_quantile(&scores, q2).unwrap();
        prop_assert_eq!(v1, oracle(q1));
        prop_assert_eq!(v2, oracle(q2));
        if q1 <= q2 {
            prop_assert!(v1.total_order(&v2).is_le());
        } else {
            prop_assert!(v2.total_order(&v1).is_le());
        }
    }

    #[test]
    fn radius_nonincreasing_in_alpha(
        pairs in prop::collection::vec((points(5), points(5)), 3..20),
        px in -10.0..10.0,
        py in -10.0..10.0,
        alphas in prop::collection::vec(-0.3..1.3, 2..8),
    ) {
        let mut window = CalibrationWindow::new(pairs.len(), 1);
        for (frame, (pred, real)) in pairs.iter().enumerate() {
            window.record_prediction(frame as i64, 1, set_from(pred, "p"));
            window.record_realized(frame as i64, set_from(real, "p"));
        }
        let candidate = Point2::new(px, py);
        let mut sorted = alphas.clone();
        sorted.sort_by(|a: &f64, b| a.partial_cmp(b).unwrap());
        let mut previous: Option<ExtReal<f64>> = None;
        for alpha in sorted {
            let r = egocentric_radius(candidate, 1, &window, alpha).unwrap();
            if let Some(prev) = previous {
                prop_assert!(r.total_order(&prev).is_le(), "radius rose as alpha rose");
            }
            previous = Some(r);
        }
    }
}

/// A truly linear trajectory with dyadic start, velocity, and frame
/// period is extrapolated exactly, so every calibration score is zero.
#[test]
fn linear_trajectories_calibrate_to_zero_scores() {
    let horizon = 12;
    let spec = SyntheticSpec {
        name: "exact-linear".into(),
        frames: 60,
        frame_period: 0.5,
        agents: vec![
            AgentSpec::Linear {
                id: "a".into(),
                start: Point2::new(0.25, -0.5),
                velocity: Point2::new(0.5, 0.25),
                jumps: vec![],
                active: None,
            },
            AgentSpec::Linear {
                id: "b".into(),
                start: Point2::new(-4.0, 2.0),
                velocity: Point2::new(0.75, -0.5),
                jumps: vec![],
                active: None,
            },
        ],
        noise_std: 0.0,
    };
    let timeline = synthetic_scenario(&spec, 0);
    let predictor = ConstantVelocityPredictor::new(horizon);

    let history_len = 4;
    let mut window = CalibrationWindow::new(30, horizon);
    let mut recent: Vec<ObstacleSet<f64>> = Vec::new();
    for (t, frame) in timeline.frames().iter().enumerate() {
        window.record_realized(t as i64, frame.clone());
        recent.push(frame.clone());
        if recent.len() > history_len {
            recent.remove(0);
        }
        if recent.len() == history_len {
            let history = History::new(recent.clone(), t as i64).unwrap();
            let sheet = predictor.predict(&history).unwrap();
            window.record_prediction_sheet(&sheet);
        }
    }

    for i in 1..=horizon {
        for candidate in [Point2::new(0.0, 0.0), Point2::new(3.0, -2.0), Point2::new(-5.0, 5.0)] {
            let radius = egocentric_radius(candidate, i, &window, 0.37).unwrap();
            assert_eq!(radius, ExtReal::finite(0.0), "horizon {i}");
        }
        let mut worst = ExtReal::finite(0.0);
        for (pred, real) in window.eligible_pairs(i) {
            let s = obstacle_centric_score(pred, real);
            if s.total_order(&worst).is_gt() {
                worst = s;
            }
        }
        assert_eq!(worst, ExtReal::finite(0.0), "horizon {i}");
    }
}
