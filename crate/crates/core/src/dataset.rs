//! Loading recorded pedestrian scenes and generating synthetic ones,
//! both resampled onto a uniform 2.5 Hz frame grid.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ObstacleId, ObstacleSet, Point2, Rect};
use crate::scalar::{cast, Scalar};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed annotation at line {line}: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("annotation file contains no rows")]
    EmptyFile,
    #[error("invalid format spec: {0}")]
    BadSpec(String),
}

/// Column layout and resampling knobs for one raw annotation file; the
/// five recorded scenes do not share a layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormatSpec {
    pub frame_col: usize,
    pub id_col: usize,
    pub x_col: usize,
    pub y_col: usize,
    /// Native frame stride between annotations; inferred when absent.
    pub frame_stride: Option<i64>,
    /// Longest absence (in resampled frames) bridged by linear
    /// interpolation; longer gaps split the track.
    pub max_gap_fill: usize,
}

impl Default for FormatSpec {
    fn default() -> Self {
        FormatSpec {
            frame_col: 0,
            id_col: 1,
            x_col: 2,
            y_col: 3,
            frame_stride: None,
            max_gap_fill: 2,
        }
    }
}

impl FormatSpec {
    /// Parses a layout like `"frame id x y"` naming the column order.
    pub fn from_columns(columns: &str) -> Result<Self, DatasetError> {
        let names: Vec<&str> = columns.split_whitespace().collect();
        if names.len() != 4 {
            return Err(DatasetError::BadSpec(format!(
                "expected 4 column names, got {}",
                names.len()
            )));
        }
        let mut spec = FormatSpec::default();
        let mut seen = [false; 4];
        for (idx, name) in names.iter().enumerate() {
            let slot = match *name {
                "frame" => {
                    spec.frame_col = idx;
                    0
                }
                "id" => {
                    spec.id_col = idx;
                    1
                }
                "x" => {
                    spec.x_col = idx;
                    2
                }
                "y" => {
                    spec.y_col = idx;
                    3
                }
                other => {
                    return Err(DatasetError::BadSpec(format!("unknown column {other:?}")));
                }
            };
            if seen[slot] {
                return Err(DatasetError::BadSpec(format!("column {name:?} repeated")));
            }
            seen[slot] = true;
        }
        Ok(spec)
    }

    fn max_col(&self) -> usize {
        self.frame_col.max(self.id_col).max(self.x_col).max(self.y_col)
    }
}

/// A recorded or generated scene resampled to the uniform grid: frame
/// `k` holds the obstacle set at time `k * frame_period`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTimeline<T> {
    pub name: String,
    pub frame_period: T,
    pub scene_bounds: Rect<T>,
    frames: Vec<ObstacleSet<T>>,
}

impl<T: Scalar> ScenarioTimeline<T> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, index: usize) -> Option<&ObstacleSet<T>> {
        self.frames.get(index)
    }

    pub fn frames(&self) -> &[ObstacleSet<T>] {
        &self.frames
    }

    /// The same scene starting `offset` frames in; episode repeats use
    /// this to replay different segments.
    pub fn suffix(&self, offset: usize) -> ScenarioTimeline<T> {
        ScenarioTimeline {
            name: self.name.clone(),
            frame_period: self.frame_period,
            scene_bounds: self.scene_bounds,
            frames: self.frames.get(offset..).unwrap_or(&[]).to_vec(),
        }
    }

    fn from_frames(name: String, frames: Vec<ObstacleSet<T>>, pad: T) -> Self {
        let bounds = Rect::bounding(frames.iter().flat_map(|f| f.positions()))
            .unwrap_or_else(|| Rect::new(T::zero(), T::zero(), T::zero(), T::zero()))
            .padded(pad);
        ScenarioTimeline {
            name,
            frame_period: cast(0.4),
            scene_bounds: bounds,
            frames,
        }
    }
}

struct RawRow<T> {
    line: usize,
    frame: i64,
    id: i64,
    position: Point2<T>,
}

fn parse_integral(field: &str, what: &str, line: usize) -> Result<i64, DatasetError> {
    let value: f64 = field.parse().map_err(|e| DatasetError::MalformedRow {
        line,
        message: format!("{what} {field:?}: {e}"),
    })?;
    if value.fract() != 0.0 {
        return Err(DatasetError::MalformedRow {
            line,
            message: format!("{what} {field:?} is not an integer"),
        });
    }
    Ok(value as i64)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Loads raw `(frame, pedestrian_id, x, y)` annotations, resamples them
/// onto a consecutive frame grid, interpolates short occlusions, and
/// splits tracks across long ones.
pub fn load_annotations<T: Scalar>(
    path: impl AsRef<Path>,
    spec: &FormatSpec,
    name: &str,
) -> Result<ScenarioTimeline<T>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    read_annotations(reader, spec, name)
}

pub fn read_annotations<T: Scalar>(
    reader: impl BufRead,
    spec: &FormatSpec,
    name: &str,
) -> Result<ScenarioTimeline<T>, DatasetError> {
    let mut rows: Vec<RawRow<T>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() <= spec.max_col() {
            return Err(DatasetError::MalformedRow {
                line: line_no,
                message: format!(
                    "expected at least {} columns, found {}",
                    spec.max_col() + 1,
                    fields.len()
                ),
            });
        }
        let frame = parse_integral(fields[spec.frame_col], "frame", line_no)?;
        let id = parse_integral(fields[spec.id_col], "pedestrian id", line_no)?;
        let x: f64 = fields[spec.x_col].parse().map_err(|e| DatasetError::MalformedRow {
            line: line_no,
            message: format!("x {:?}: {e}", fields[spec.x_col]),
        })?;
        let y: f64 = fields[spec.y_col].parse().map_err(|e| DatasetError::MalformedRow {
            line: line_no,
            message: format!("y {:?}: {e}", fields[spec.y_col]),
        })?;
        rows.push(RawRow { line: line_no, frame, id, position: Point2::new(cast(x), cast(y)) });
    }
    if rows.is_empty() {
        return Err(DatasetError::EmptyFile);
    }

    let first_frame = rows.iter().map(|r| r.frame).min().expect("nonempty");
    let stride = match spec.frame_stride {
        Some(s) if s >= 1 => s,
        Some(s) => {
            return Err(DatasetError::BadSpec(format!("frame_stride {s} must be >= 1")));
        }
        None => {
            let mut frames: Vec<i64> = rows.iter().map(|r| r.frame).collect();
            frames.sort_unstable();
            frames.dedup();
            let mut g = 0;
            for pair in frames.windows(2) {
                g = gcd(g, pair[1] - pair[0]);
            }
            if g == 0 {
                1
            } else {
                g
            }
        }
    };

    // (resampled index, position) per pedestrian, then gap handling.
    let mut tracks: std::collections::BTreeMap<i64, Vec<(usize, Point2<T>, usize)>> =
        std::collections::BTreeMap::new();
    let mut last_index = 0usize;
    for row in &rows {
        let offset = row.frame - first_frame;
        if offset % stride != 0 {
            return Err(DatasetError::MalformedRow {
                line: row.line,
                message: format!(
                    "frame {} is not on the stride-{stride} grid starting at {first_frame}",
                    row.frame
                ),
            });
        }
        let index = (offset / stride) as usize;
        last_index = last_index.max(index);
        tracks.entry(row.id).or_default().push((index, row.position, row.line));
    }

    let mut frames: Vec<Vec<(ObstacleId, Point2<T>)>> = vec![Vec::new(); last_index + 1];
    for (id, mut samples) in tracks {
        samples.sort_by_key(|(idx, _, _)| *idx);
        for pair in samples.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(DatasetError::MalformedRow {
                    line: pair[1].2,
                    message: format!("pedestrian {id} annotated twice at one frame"),
                });
            }
        }
        let mut segment = 0usize;
        let segment_label = |segment: usize| {
            if segment == 0 {
                ObstacleId::new(id.to_string())
            } else {
                ObstacleId::new(format!("{id}#{segment}"))
            }
        };
        frames[samples[0].0].push((segment_label(segment), samples[0].1));
        for pair in samples.windows(2) {
            let (prev_idx, prev_pos, _) = pair[0];
            let (next_idx, next_pos, _) = pair[1];
            let gap = next_idx - prev_idx;
            if gap == 1 {
                frames[next_idx].push((segment_label(segment), next_pos));
            } else if gap - 1 <= spec.max_gap_fill {
                let span = T::from_usize(gap).expect("gap fits scalar");
                for k in 1..gap {
                    let blend = T::from_usize(k).expect("step fits scalar") / span;
                    let interp = prev_pos + (next_pos - prev_pos) * blend;
                    frames[prev_idx + k].push((segment_label(segment), interp));
                }
                frames[next_idx].push((segment_label(segment), next_pos));
            } else {
                segment += 1;
                frames[next_idx].push((segment_label(segment), next_pos));
            }
        }
    }

    let frames = frames
        .into_iter()
        .map(|entries| ObstacleSet::from_entries(entries).expect("composite ids are unique"))
        .collect();
    Ok(ScenarioTimeline::from_frames(name.to_owned(), frames, T::one()))
}

#[derive(Serialize, Deserialize)]
struct TimelineRow<T> {
    frame: usize,
    id: String,
    x: T,
    y: T,
}

/// Writes the canonical resampled timeline, one JSON object per line,
/// ordered by (frame, id). Identical timelines yield identical bytes.
pub fn write_timeline_cache<T: Scalar + Serialize>(
    mut writer: impl Write,
    timeline: &ScenarioTimeline<T>,
) -> std::io::Result<()> {
    for (frame, set) in timeline.frames().iter().enumerate() {
        for (id, pos) in set.iter() {
            let row = TimelineRow { frame, id: id.to_string(), x: pos.x, y: pos.y };
            let json = serde_json::to_string(&row).expect("row serializes");
            writeln!(writer, "{json}")?;
        }
    }
    Ok(())
}

/// Reloads a cached timeline; interior frames with no rows come back as
/// empty sets.
pub fn read_timeline_cache<T: Scalar + serde::de::DeserializeOwned>(
    reader: impl BufRead,
    name: &str,
) -> Result<ScenarioTimeline<T>, DatasetError> {
    let mut rows: Vec<(usize, ObstacleId, Point2<T>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: TimelineRow<T> =
            serde_json::from_str(&line).map_err(|e| DatasetError::MalformedRow {
                line: line_no,
                message: e.to_string(),
            })?;
        rows.push((row.frame, ObstacleId::new(row.id), Point2::new(row.x, row.y)));
    }
    if rows.is_empty() {
        return Err(DatasetError::EmptyFile);
    }
    let last = rows.iter().map(|(f, _, _)| *f).max().expect("nonempty");
    let mut frames: Vec<Vec<(ObstacleId, Point2<T>)>> = vec![Vec::new(); last + 1];
    for (frame, id, pos) in rows {
        frames[frame].push((id, pos));
    }
    let frames: Result<Vec<_>, _> = frames.into_iter().map(ObstacleSet::from_entries).collect();
    let frames = frames.map_err(|e| DatasetError::MalformedRow { line: 0, message: e.to_string() })?;
    Ok(ScenarioTimeline::from_frames(name.to_owned(), frames, T::one()))
}

/// Writes a timeline back out in the raw annotation layout
/// (`frame id x y`, native stride) for fixtures and replays.
pub fn export_raw_annotations<T: Scalar>(
    mut writer: impl Write,
    timeline: &ScenarioTimeline<T>,
    stride: i64,
) -> std::io::Result<()> {
    for (index, set) in timeline.frames().iter().enumerate() {
        for (id, pos) in set.iter() {
            writeln!(writer, "{} {} {} {}", index as i64 * stride, id, pos.x, pos.y)?;
        }
    }
    Ok(())
}

/// Parametric agent of a synthetic scene. Frames outside
/// `active = [appear, vanish)` omit the agent entirely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AgentSpec<T> {
    Linear {
        id: String,
        start: Point2<T>,
        /// Meters per second; integrated at the frame period.
        velocity: Point2<T>,
        /// Velocity replacements applied from the given frame onward.
        jumps: Vec<(usize, Point2<T>)>,
        active: Option<(usize, usize)>,
    },
    Circular {
        id: String,
        center: Point2<T>,
        radius: T,
        /// Radians per second.
        angular_velocity: T,
        phase: T,
        active: Option<(usize, usize)>,
    },
    Stationary {
        id: String,
        position: Point2<T>,
        active: Option<(usize, usize)>,
    },
}

impl<T> AgentSpec<T> {
    fn active(&self) -> Option<(usize, usize)> {
        match self {
            AgentSpec::Linear { active, .. }
            | AgentSpec::Circular { active, .. }
            | AgentSpec::Stationary { active, .. } => *active,
        }
    }

    fn id(&self) -> &str {
        match self {
            AgentSpec::Linear { id, .. }
            | AgentSpec::Circular { id, .. }
            | AgentSpec::Stationary { id, .. } => id,
        }
    }
}

/// Deterministic synthetic scene description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec<T> {
    pub name: String,
    pub frames: usize,
    pub frame_period: T,
    pub agents: Vec<AgentSpec<T>>,
    /// Standard deviation of iid Gaussian position jitter; 0 disables.
    pub noise_std: T,
}

/// Generates the timeline described by `spec`; the same spec and seed
/// always produce the same timeline.
pub fn synthetic_scenario<T: Scalar>(spec: &SyntheticSpec<T>, seed: u64) -> ScenarioTimeline<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0f64, 1.0).expect("unit normal");
    let noisy = spec.noise_std > T::zero();
    let h = spec.frame_period;

    // Linear agents integrate velocity frame by frame so jumps apply
    // exactly at their frame.
    let mut linear_pos: Vec<Option<Point2<T>>> = spec.agents.iter().map(|_| None).collect();

    let mut frames = Vec::with_capacity(spec.frames);
    for t in 0..spec.frames {
        let mut entries = Vec::new();
        for (agent_idx, agent) in spec.agents.iter().enumerate() {
            let active = match agent.active() {
                Some((appear, vanish)) => t >= appear && t < vanish,
                None => true,
            };
            let base = match agent {
                AgentSpec::Linear { start, velocity, jumps, active, .. } => {
                    // Integration starts at the appear frame, so a
                    // windowed walker enters at its stated start point.
                    let appear = active.map(|(a, _)| a).unwrap_or(0);
                    let velocity_now = jumps
                        .iter()
                        .rfind(|(frame, _)| *frame <= t)
                        .map(|(_, v)| *v)
                        .unwrap_or(*velocity);
                    let pos = match linear_pos[agent_idx] {
                        Some(prev) if t > appear => prev + velocity_now * h,
                        _ => *start,
                    };
                    linear_pos[agent_idx] = Some(pos);
                    pos
                }
                AgentSpec::Circular { center, radius, angular_velocity, phase, .. } => {
                    let angle = *phase
                        + *angular_velocity * h * T::from_usize(t).expect("frame fits scalar");
                    Point2::new(
                        center.x + *radius * angle.cos(),
                        center.y + *radius * angle.sin(),
                    )
                }
                AgentSpec::Stationary { position, .. } => *position,
            };
            if !active {
                continue;
            }
            let pos = if noisy {
                let jitter = Point2::new(
                    cast::<T>(normal.sample(&mut rng)) * spec.noise_std,
                    cast::<T>(normal.sample(&mut rng)) * spec.noise_std,
                );
                base + jitter
            } else {
                base
            };
            entries.push((ObstacleId::new(agent.id()), pos));
        }
        frames.push(ObstacleSet::from_entries(entries).expect("agent ids are unique"));
    }
    ScenarioTimeline::from_frames(spec.name.clone(), frames, T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn two_row_example_maps_to_consecutive_frames() {
        let raw = "0 7 1.0 2.0\n10 7 2.0 2.0\n";
        let timeline: ScenarioTimeline<f64> =
            read_annotations(Cursor::new(raw), &FormatSpec::default(), "mini").unwrap();
        assert_eq!(timeline.len(), 2);
        let id = ObstacleId::from("7");
        assert_eq!(timeline.frame(0).unwrap().get(&id), Some(Point2::new(1.0, 2.0)));
        assert_eq!(timeline.frame(1).unwrap().get(&id), Some(Point2::new(2.0, 2.0)));
    }

    #[test]
    fn short_gap_is_interpolated() {
        let raw = "0 7 0.0 0.0\n20 7 2.0 0.0\n";
        let timeline: ScenarioTimeline<f64> = read_annotations(
            Cursor::new(raw),
            &FormatSpec { frame_stride: Some(10), ..FormatSpec::default() },
            "mini",
        )
        .unwrap();
        assert_eq!(timeline.len(), 3);
        let id = ObstacleId::from("7");
        assert_eq!(timeline.frame(1).unwrap().get(&id), Some(Point2::new(1.0, 0.0)));
    }

    #[test]
    fn long_gap_splits_the_track() {
        let raw = "0 7 0.0 0.0\n10 7 0.5 0.0\n70 7 5.0 0.0\n80 7 5.5 0.0\n";
        let timeline: ScenarioTimeline<f64> =
            read_annotations(Cursor::new(raw), &FormatSpec::default(), "mini").unwrap();
        assert_eq!(timeline.len(), 9);
        let original = ObstacleId::from("7");
        let segment = ObstacleId::from("7#1");
        assert!(timeline.frame(1).unwrap().contains_id(&original));
        for k in 2..7 {
            assert!(timeline.frame(k).unwrap().is_empty());
        }
        assert!(timeline.frame(7).unwrap().contains_id(&segment));
        assert!(!timeline.frame(7).unwrap().contains_id(&original));
    }

    #[test]
    fn endpoints_survive_resampling() {
        let raw = "100 3 -1.25 4.5\n110 3 -1.0 4.25\n130 3 0.5 4.0\n";
        let timeline: ScenarioTimeline<f64> =
            read_annotations(Cursor::new(raw), &FormatSpec::default(), "mini").unwrap();
        let id = ObstacleId::from("3");
        assert_eq!(timeline.frame(0).unwrap().get(&id), Some(Point2::new(-1.25, 4.5)));
        assert_eq!(timeline.frame(3).unwrap().get(&id), Some(Point2::new(0.5, 4.0)));
    }

    #[test]
    fn malformed_row_reports_line() {
        let raw = "0 7 1.0 2.0\n10 7 oops 2.0\n";
        match read_annotations::<f64>(Cursor::new(raw), &FormatSpec::default(), "mini") {
            Err(DatasetError::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed row, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        assert!(matches!(
            read_annotations::<f64>(Cursor::new(""), &FormatSpec::default(), "mini"),
            Err(DatasetError::EmptyFile)
        ));
    }

    #[test]
    fn column_permutation_respected() {
        let spec = FormatSpec::from_columns("id frame y x").unwrap();
        let raw = "7 0 2.0 1.0\n";
        let timeline: ScenarioTimeline<f64> =
            read_annotations(Cursor::new(raw), &spec, "mini").unwrap();
        assert_eq!(
            timeline.frame(0).unwrap().get(&ObstacleId::from("7")),
            Some(Point2::new(1.0, 2.0))
        );
    }

    #[test]
    fn bounds_padded_by_one_meter() {
        let raw = "0 1 0.0 0.0\n10 1 2.0 3.0\n";
        let timeline: ScenarioTimeline<f64> =
            read_annotations(Cursor::new(raw), &FormatSpec::default(), "mini").unwrap();
        assert_eq!(timeline.scene_bounds, Rect::new(-1.0, -1.0, 3.0, 4.0));
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let raw = "0 7 1.125 2.5\n10 7 2.0 2.0\n10 9 -3.0 0.125\n";
        let timeline: ScenarioTimeline<f64> =
            read_annotations(Cursor::new(raw), &FormatSpec::default(), "mini").unwrap();
        let mut bytes = Vec::new();
        write_timeline_cache(&mut bytes, &timeline).unwrap();
        let reloaded = read_timeline_cache::<f64>(Cursor::new(&bytes), "mini").unwrap();
        assert_eq!(reloaded.frames(), timeline.frames());
        let mut bytes2 = Vec::new();
        write_timeline_cache(&mut bytes2, &reloaded).unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn linear_mover_positions() {
        let spec = SyntheticSpec {
            name: "line".into(),
            frames: 5,
            frame_period: 0.4,
            agents: vec![AgentSpec::Linear {
                id: "1".into(),
                start: Point2::new(0.0, 0.0),
                velocity: Point2::new(1.0, 0.0),
                jumps: vec![],
                active: None,
            }],
            noise_std: 0.0,
        };
        let timeline = synthetic_scenario(&spec, 0);
        let id = ObstacleId::from("1");
        for t in 0..5 {
            let p = timeline.frame(t).unwrap().get(&id).unwrap();
            assert!((p.x - 0.4 * t as f64).abs() < 1e-12);
            assert_eq!(p.y, 0.0);
        }
    }

    #[test]
    fn velocity_jump_takes_effect_at_its_frame() {
        let spec = SyntheticSpec {
            name: "jump".into(),
            frames: 6,
            frame_period: 0.5,
            agents: vec![AgentSpec::Linear {
                id: "1".into(),
                start: Point2::new(0.0, 0.0),
                velocity: Point2::new(1.0, 0.0),
                jumps: vec![(3, Point2::new(-1.0, 0.0))],
                active: None,
            }],
            noise_std: 0.0,
        };
        let timeline = synthetic_scenario(&spec, 0);
        let id = ObstacleId::from("1");
        let xs: Vec<f64> = (0..6)
            .map(|t| timeline.frame(t).unwrap().get(&id).unwrap().x)
            .collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0, 0.5, 0.0, -0.5]);
    }

    #[test]
    fn empty_spec_gives_empty_frames() {
        let spec: SyntheticSpec<f64> = SyntheticSpec {
            name: "void".into(),
            frames: 3,
            frame_period: 0.4,
            agents: vec![],
            noise_std: 0.0,
        };
        let timeline = synthetic_scenario(&spec, 9);
        assert_eq!(timeline.len(), 3);
        assert!(timeline.frames().iter().all(|f| f.is_empty()));
        assert!(!timeline.scene_bounds.is_empty());
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let spec = SyntheticSpec {
            name: "noisy".into(),
            frames: 20,
            frame_period: 0.4,
            agents: vec![AgentSpec::Circular {
                id: "c".into(),
                center: Point2::new(0.0, 0.0),
                radius: 2.0,
                angular_velocity: 0.3,
                phase: 0.0,
                active: Some((2, 18)),
            }],
            noise_std: 0.05,
        };
        let a = synthetic_scenario(&spec, 42);
        let b = synthetic_scenario(&spec, 42);
        assert_eq!(a, b);
        let c = synthetic_scenario(&spec, 43);
        assert_ne!(a, c);
        assert!(a.frame(0).unwrap().is_empty());
        assert!(!a.frame(2).unwrap().is_empty());
        assert!(a.frame(18).unwrap().is_empty());
    }
}
