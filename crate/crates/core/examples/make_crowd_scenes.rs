//! Regenerates the shipped sidewalk replay files under `data/`.
//!
//! The recorded pedestrian datasets the benchmark configs are modeled
//! on cannot be redistributed here, so these scenes are deterministic
//! synthetic stand-ins with comparable geometry: a corridor of
//! bidirectional walker streams with occasional stops, turns, and
//! standing groups. Run from the workspace root:
//!
//! ```text
//! cargo run -p ecp-core --example make_crowd_scenes
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ecp_core::dataset::{export_raw_annotations, synthetic_scenario, AgentSpec, SyntheticSpec};
use ecp_core::geometry::Point2;

const FRAMES: usize = 620;
const PERIOD: f64 = 0.4;

struct CrowdParams {
    name: &'static str,
    seed: u64,
    /// Frames between walker spawns.
    spawn_every: usize,
    /// Standing groups loitering mid-corridor.
    standers: usize,
    noise_std: f64,
}

fn crowd(params: &CrowdParams) -> SyntheticSpec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut agents = Vec::new();
    let mut next_id = 0usize;

    let mut spawn = params.spawn_every;
    while spawn + 10 < FRAMES {
        let eastbound = rng.gen_bool(0.5);
        let lane: f64 = rng.gen_range(0.8..7.2);
        let speed: f64 = rng.gen_range(0.9..1.4);
        let drift: f64 = rng.gen_range(-0.15..0.15);
        let (entry_x, vx) = if eastbound { (-1.0, speed) } else { (13.0, -speed) };
        let crossing_frames = (14.0 / (speed * PERIOD)).ceil() as usize + 8;

        // One or two mid-crossing velocity changes: a slowdown, a stop,
        // or a lane change.
        let mut jumps = Vec::new();
        let n_jumps = rng.gen_range(1..=2);
        for j in 0..n_jumps {
            let at = spawn + (crossing_frames * (j + 1)) / (n_jumps + 2) + rng.gen_range(0..6);
            let kind: f64 = rng.gen();
            let new_v = if kind < 0.25 {
                Point2::new(0.0, 0.0)
            } else if kind < 0.6 {
                Point2::new(vx * rng.gen_range(0.4..0.8), drift + rng.gen_range(-0.3..0.3))
            } else {
                Point2::new(vx, drift + rng.gen_range(-0.4..0.4))
            };
            jumps.push((at, new_v));
            if new_v.x == 0.0 && new_v.y == 0.0 {
                // Resume after a short pause.
                jumps.push((at + rng.gen_range(5..12), Point2::new(vx, drift)));
            }
        }
        jumps.sort_by_key(|(frame, _)| *frame);

        agents.push(AgentSpec::Linear {
            id: next_id.to_string(),
            start: Point2::new(entry_x, lane),
            velocity: Point2::new(vx, drift),
            jumps,
            active: Some((spawn, (spawn + crossing_frames + 20).min(FRAMES))),
        });
        next_id += 1;
        spawn += params.spawn_every + rng.gen_range(0..4);
    }

    for _ in 0..params.standers {
        let x: f64 = rng.gen_range(3.0..10.0);
        let y: f64 = rng.gen_range(1.5..6.5);
        let appear = rng.gen_range(0..FRAMES / 3);
        let leave_at = appear + rng.gen_range(120..300);
        // Standers eventually walk off toward a corridor end.
        let exit_vx = if rng.gen_bool(0.5) { 1.1 } else { -1.1 };
        agents.push(AgentSpec::Linear {
            id: next_id.to_string(),
            start: Point2::new(x, y),
            velocity: Point2::new(0.0, 0.0),
            jumps: vec![(leave_at, Point2::new(exit_vx, rng.gen_range(-0.2..0.2)))],
            active: Some((appear, (leave_at + 60).min(FRAMES))),
        });
        next_id += 1;
    }

    SyntheticSpec {
        name: params.name.into(),
        frames: FRAMES,
        frame_period: PERIOD,
        agents,
        noise_std: params.noise_std,
    }
}

fn main() -> std::io::Result<()> {
    let scenes = [
        CrowdParams { name: "zara1_synth", seed: 101, spawn_every: 9, standers: 2, noise_std: 0.05 },
        CrowdParams { name: "zara2_synth", seed: 202, spawn_every: 6, standers: 4, noise_std: 0.05 },
    ];
    let out_dir = Path::new("data");
    std::fs::create_dir_all(out_dir)?;
    for params in &scenes {
        let spec = crowd(params);
        let timeline = synthetic_scenario(&spec, params.seed);
        let path = out_dir.join(format!("{}.txt", params.name));
        let mut writer = BufWriter::new(File::create(&path)?);
        export_raw_annotations(&mut writer, &timeline, 10)?;
        let peds = spec.agents.len();
        println!("{}: {} frames, {} agents -> {}", params.name, FRAMES, peds, path.display());
    }
    Ok(())
}
