//! Geometric primitives, vehicle kinematics, and cost functions.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{is_positive_finite, ExtReal, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("duplicate obstacle id {0:?} within one observation")]
    DuplicateObstacleId(String),
}

/// A 2D point or displacement, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }
}

impl<T: Scalar> Point2<T> {
    pub fn distance_squared(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Self) -> T {
        self.distance_squared(other).sqrt()
    }

    pub fn norm(self) -> T {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Point2<T>;
    fn add(self, rhs: Self) -> Self {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Point2<T>;
    fn sub(self, rhs: Self) -> Self {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Point2<T>;
    fn mul(self, rhs: T) -> Self {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub min_x: T,
    pub min_y: T,
    pub max_x: T,
    pub max_y: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(min_x: T, min_y: T, max_x: T, max_y: T) -> Self {
        Rect { min_x, min_y, max_x, max_y }
    }

    pub fn is_empty(&self) -> bool {
        !(self.min_x <= self.max_x && self.min_y <= self.max_y)
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn padded(&self, margin: T) -> Self {
        Rect {
            min_x: self.min_x - margin,
            min_y: self.min_y - margin,
            max_x: self.max_x + margin,
            max_y: self.max_y + margin,
        }
    }

    /// Smallest rectangle covering a point cloud; `None` when it is empty.
    pub fn bounding(points: impl IntoIterator<Item = Point2<T>>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut rect = Rect::new(first.x, first.y, first.x, first.y);
        for p in it {
            rect.min_x = rect.min_x.min(p.x);
            rect.min_y = rect.min_y.min(p.y);
            rect.max_x = rect.max_x.max(p.x);
            rect.max_y = rect.max_y.max(p.y);
        }
        Some(rect)
    }
}

/// Opaque label of a tracked obstacle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObstacleId(String);

impl ObstacleId {
    pub fn new(id: impl Into<String>) -> Self {
        ObstacleId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObstacleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<&str> for ObstacleId {
    fn from(s: &str) -> Self {
        ObstacleId(s.to_owned())
    }
}

/// Labeled 2D positions of the obstacles tracked at one timestep.
///
/// Entries are kept sorted by id; a set may be empty when every obstacle
/// has left the scene.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObstacleSet<T> {
    entries: Vec<(ObstacleId, Point2<T>)>,
}

impl<T> ObstacleSet<T> {
    pub fn new() -> Self {
        ObstacleSet { entries: Vec::new() }
    }

    pub fn from_entries(
        mut entries: Vec<(ObstacleId, Point2<T>)>,
    ) -> Result<Self, GeometryError> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(GeometryError::DuplicateObstacleId(pair[0].0.to_string()));
            }
        }
        Ok(ObstacleSet { entries })
    }

    pub fn insert(&mut self, id: ObstacleId, position: Point2<T>) -> Result<(), GeometryError> {
        match self.entries.binary_search_by(|(e, _)| e.cmp(&id)) {
            Ok(_) => Err(GeometryError::DuplicateObstacleId(id.to_string())),
            Err(idx) => {
                self.entries.insert(idx, (id, position));
                Ok(())
            }
        }
    }

    pub fn contains_id(&self, id: &ObstacleId) -> bool {
        self.entries.binary_search_by(|(e, _)| e.cmp(id)).is_ok()
    }

    /// Entries sorted by id.
    pub fn entries(&self) -> &[(ObstacleId, Point2<T>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<T: Copy> ObstacleSet<T> {
    pub fn get(&self, id: &ObstacleId) -> Option<Point2<T>> {
        self.entries
            .binary_search_by(|(e, _)| e.cmp(id))
            .ok()
            .map(|idx| self.entries[idx].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ObstacleId, Point2<T>)> {
        self.entries.iter().map(|(id, p)| (id, *p))
    }

    pub fn positions(&self) -> impl Iterator<Item = Point2<T>> + '_ {
        self.entries.iter().map(|(_, p)| *p)
    }
}

#[derive(Serialize)]
struct ObstacleEntryRef<'a, T> {
    id: &'a ObstacleId,
    x: &'a T,
    y: &'a T,
}

#[derive(Deserialize)]
struct ObstacleEntry<T> {
    id: ObstacleId,
    x: T,
    y: T,
}

impl<T: Serialize> Serialize for ObstacleSet<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.entries.iter().map(|(id, p)| ObstacleEntryRef {
            id,
            x: &p.x,
            y: &p.y,
        }))
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for ObstacleSet<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<ObstacleEntry<T>>::deserialize(deserializer)?;
        ObstacleSet::from_entries(
            entries
                .into_iter()
                .map(|e| (e.id, Point2::new(e.x, e.y)))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Ego-vehicle pose: position plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
}

impl<T: Scalar> VehicleState<T> {
    /// Builds a state with the heading normalized to `(-pi, pi]`.
    pub fn new(x: T, y: T, theta: T) -> Self {
        VehicleState { x, y, theta: normalize_angle(theta) }
    }

    pub fn position(&self) -> Point2<T> {
        Point2::new(self.x, self.y)
    }
}

/// Linear and angular velocity command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInput<T> {
    pub v: T,
    pub omega: T,
}

impl<T: Scalar> ControlInput<T> {
    pub fn new(v: T, omega: T) -> Self {
        ControlInput { v, omega }
    }

    pub fn stop() -> Self {
        ControlInput { v: T::zero(), omega: T::zero() }
    }
}

/// Goal position with the cost weights of the tracking objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec<T> {
    pub goal_x: T,
    pub goal_y: T,
    pub arrival_radius: T,
    /// Diagonal of the input-energy weight matrix.
    pub input_cost_weight: T,
    pub terminal_weight: T,
}

impl<T: Scalar> GoalSpec<T> {
    pub fn position(&self) -> Point2<T> {
        Point2::new(self.goal_x, self.goal_y)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !is_positive_finite(self.arrival_radius) {
            return Err("arrival_radius must be positive".into());
        }
        if self.input_cost_weight < T::zero() || self.terminal_weight < T::zero() {
            return Err("cost weights must be nonnegative".into());
        }
        Ok(())
    }
}

/// Wraps an angle into `(-pi, pi]`. In-range angles come back
/// unchanged, so normalization is idempotent at the bit level.
pub fn normalize_angle<T: Scalar>(theta: T) -> T {
    if theta > -T::PI() && theta <= T::PI() {
        return theta;
    }
    let two_pi = T::PI() + T::PI();
    let mut a = (theta + T::PI()) % two_pi;
    if a <= T::zero() {
        a += two_pi;
    }
    a - T::PI()
}

/// Minimum Euclidean distance from `point` to the set; `+inf` for an
/// empty set, which makes distance constraints vacuously satisfiable.
pub fn min_distance<T: Scalar>(point: Point2<T>, obstacles: &ObstacleSet<T>) -> ExtReal<T> {
    let mut best: Option<T> = None;
    for p in obstacles.positions() {
        let d2 = point.distance_squared(p);
        best = Some(match best {
            Some(b) if b <= d2 => b,
            _ => d2,
        });
    }
    match best {
        Some(d2) => ExtReal::finite(d2.sqrt()),
        None => ExtReal::PosInf,
    }
}

fn directed_distance<T: Scalar>(from: &ObstacleSet<T>, to: &ObstacleSet<T>) -> ExtReal<T> {
    // sup over an empty `from` is 0 by convention.
    let mut worst = ExtReal::zero();
    for p in from.positions() {
        let d = min_distance(p, to);
        if d.total_order(&worst).is_gt() {
            worst = d;
        }
    }
    worst
}

/// Symmetric Hausdorff distance: the max of the two directed sup-inf
/// distances. 0 for two empty sets, `+inf` when exactly one is empty.
pub fn hausdorff_distance<T: Scalar>(a: &ObstacleSet<T>, b: &ObstacleSet<T>) -> ExtReal<T> {
    let ab = directed_distance(a, b);
    let ba = directed_distance(b, a);
    if ab.total_order(&ba).is_ge() {
        ab
    } else {
        ba
    }
}

/// One step of the unicycle model over `h` seconds, heading renormalized.
pub fn unicycle_step<T: Scalar>(
    state: VehicleState<T>,
    input: ControlInput<T>,
    h: T,
) -> VehicleState<T> {
    VehicleState::new(
        state.x + h * input.v * state.theta.cos(),
        state.y + h * input.v * state.theta.sin(),
        state.theta + h * input.omega,
    )
}

/// Quadratic goal-distance cost plus weighted input energy.
pub fn stage_cost<T: Scalar>(
    state: &VehicleState<T>,
    input: &ControlInput<T>,
    goal: &GoalSpec<T>,
) -> T {
    let dx = state.x - goal.goal_x;
    let dy = state.y - goal.goal_y;
    dx * dx + dy * dy + goal.input_cost_weight * (input.v * input.v + input.omega * input.omega)
}

/// Terminal weight times squared goal distance.
pub fn terminal_cost<T: Scalar>(state: &VehicleState<T>, goal: &GoalSpec<T>) -> T {
    let dx = state.x - goal.goal_x;
    let dy = state.y - goal.goal_y;
    goal.terminal_weight * (dx * dx + dy * dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn set(points: &[(&str, f64, f64)]) -> ObstacleSet<f64> {
        ObstacleSet::from_entries(
            points
                .iter()
                .map(|(id, x, y)| (ObstacleId::from(*id), Point2::new(*x, *y)))
                .collect(),
        )
        .unwrap()
    }

    fn goal(x: f64, y: f64, input_w: f64, terminal_w: f64) -> GoalSpec<f64> {
        GoalSpec {
            goal_x: x,
            goal_y: y,
            arrival_radius: 0.5,
            input_cost_weight: input_w,
            terminal_weight: terminal_w,
        }
    }

    #[test]
    fn min_distance_three_four_five() {
        let d = min_distance(Point2::new(0.0, 0.0), &set(&[("a", 3.0, 4.0)]));
        assert_eq!(d, ExtReal::finite(5.0));
    }

    #[test]
    fn min_distance_empty_set_is_infinite() {
        let d = min_distance(Point2::new(0.0, 0.0), &ObstacleSet::<f64>::new());
        assert_eq!(d, ExtReal::PosInf);
    }

    #[test]
    fn min_distance_picks_nearer_entry() {
        let d = min_distance(
            Point2::new(0.0, 0.0),
            &set(&[("a", 1.0, 0.0), ("b", 0.0, 2.0)]),
        );
        assert_eq!(d, ExtReal::finite(1.0));
    }

    #[test]
    fn hausdorff_identical_singletons_and_offsets() {
        let a = set(&[("a", 0.0, 0.0)]);
        assert_eq!(hausdorff_distance(&a, &a), ExtReal::finite(0.0));
        let b = set(&[("b", 1.0, 0.0)]);
        assert_eq!(hausdorff_distance(&a, &b), ExtReal::finite(1.0));
    }

    #[test]
    fn hausdorff_max_of_directed_distances() {
        let a = set(&[("a", 0.0, 0.0), ("b", 2.0, 0.0)]);
        let b = set(&[("c", 0.0, 0.0)]);
        assert_eq!(hausdorff_distance(&a, &b), ExtReal::finite(2.0));
    }

    #[test]
    fn hausdorff_empty_conventions() {
        let empty = ObstacleSet::<f64>::new();
        let a = set(&[("a", 0.0, 0.0)]);
        assert_eq!(hausdorff_distance(&empty, &empty), ExtReal::finite(0.0));
        assert_eq!(hausdorff_distance(&a, &empty), ExtReal::PosInf);
        assert_eq!(hausdorff_distance(&empty, &a), ExtReal::PosInf);
    }

    #[test]
    fn unicycle_straight_motion() {
        let next: VehicleState<f64> = unicycle_step(
            VehicleState::new(0.0, 0.0, 0.0),
            ControlInput::new(1.0, 0.0),
            0.4,
        );
        assert!((next.x - 0.4).abs() < 1e-12);
        assert!(next.y.abs() < 1e-12);
        assert!(next.theta.abs() < 1e-12);
    }

    #[test]
    fn unicycle_pure_rotation() {
        let next: VehicleState<f64> = unicycle_step(
            VehicleState::new(0.0, 0.0, 0.0),
            ControlInput::new(0.0, 0.7),
            0.4,
        );
        assert!((next.theta - 0.28).abs() < 1e-12);
        assert_eq!((next.x, next.y), (0.0, 0.0));
    }

    #[test]
    fn unicycle_heading_aligned_translation() {
        let next = unicycle_step(
            VehicleState::new(1.0, 1.0, FRAC_PI_2),
            ControlInput::new(0.8, 0.0),
            0.4,
        );
        assert!((next.x - 1.0).abs() < 1e-12);
        assert!((next.y - 1.32).abs() < 1e-12);
        assert!((next.theta - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn zero_input_is_identity() {
        let state = VehicleState::new(2.5, -1.0, 1.1);
        let next = unicycle_step(state, ControlInput::stop(), 0.4);
        assert_eq!(next, state);
    }

    #[test]
    fn heading_normalization_range() {
        for k in -20..20 {
            let theta = 0.7 * k as f64;
            let n = normalize_angle(theta);
            assert!(n > -PI && n <= PI, "normalized {n} out of range");
            let diff = normalize_angle(n - theta);
            assert!(diff.abs() < 1e-9);
        }
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
    }

    #[test]
    fn stage_cost_examples() {
        let at_goal = stage_cost(
            &VehicleState::new(0.0, 0.0, 0.3),
            &ControlInput::new(2.0, 1.0),
            &goal(0.0, 0.0, 0.0, 10.0),
        );
        assert_eq!(at_goal, 0.0);

        let c = stage_cost(
            &VehicleState::new(1.0, 2.0, 0.0),
            &ControlInput::new(0.8, 0.7),
            &goal(0.0, 0.0, 1e-3, 10.0),
        );
        assert!((c - 5.00113).abs() < 1e-12);

        let pure_distance = stage_cost(
            &VehicleState::new(3.0, 4.0, 0.0),
            &ControlInput::stop(),
            &goal(0.0, 0.0, 1e-3, 10.0),
        );
        assert_eq!(pure_distance, 25.0);
    }

    #[test]
    fn terminal_cost_examples() {
        let g = goal(0.0, 0.0, 1e-3, 10.0);
        assert_eq!(terminal_cost(&VehicleState::new(0.0, 0.0, 0.1), &g), 0.0);
        assert_eq!(terminal_cost(&VehicleState::new(1.0, 0.0, 0.1), &g), 10.0);
        assert_eq!(terminal_cost(&VehicleState::new(1.0, 2.0, 0.1), &g), 50.0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = ObstacleSet::from_entries(vec![
            (ObstacleId::from("7"), Point2::new(0.0, 0.0)),
            (ObstacleId::from("7"), Point2::new(1.0, 1.0)),
        ])
        .unwrap_err();
        assert_eq!(err, GeometryError::DuplicateObstacleId("7".into()));
    }

    #[test]
    fn obstacle_set_serde_round_trip() {
        let a = set(&[("7", 1.0, 2.0), ("9#1", -0.5, 0.25)]);
        let json = serde_json::to_string(&a).unwrap();
        let back: ObstacleSet<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
