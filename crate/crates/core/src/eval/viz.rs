//! Top-down trajectory pictures as binary PPM images.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::env::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::world::{static_occupancy, SceneInstance, CELL_SIZE};

pub type Rgb = [u8; 3];

pub const FREE: Rgb = [225, 225, 225];
pub const OCCUPIED: Rgb = [90, 90, 90];
pub const PATH_SUCCESS: Rgb = [30, 160, 60];
pub const PATH_FAIL: Rgb = [200, 40, 40];
pub const SPAWN: Rgb = [40, 90, 220];
pub const GOAL: Rgb = [240, 150, 20];
pub const TARGET: Rgb = [170, 40, 170];

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Image {
        Image { width, height, pixels: vec![fill; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = c;
        }
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut f = std::io::BufWriter::new(fs::File::create(path)?);
        write!(f, "P6\n{} {}\n255\n", self.width, self.height)?;
        for p in &self.pixels {
            f.write_all(p)?;
        }
        f.flush()?;
        Ok(())
    }
}

/// World xy to pixel coordinates; y grows upward in the world.
#[derive(Debug, Clone, Copy)]
pub struct PixelMap {
    pub scale: usize,
    pub height: usize,
}

impl PixelMap {
    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let k = self.scale as f64 / CELL_SIZE;
        (x * k, self.height as f64 - y * k)
    }
}

/// Path vertices in world xy: the spawn, then every pose after a step.
pub fn polyline(scene: &SceneInstance, records: &[TrajectoryRecord]) -> Vec<(f64, f64)> {
    let s = scene.agent_spawn.position;
    std::iter::once((s.x, s.y)).chain(records.iter().map(|r| (r.pose.position.x, r.pose.position.y))).collect()
}

/// Draw occupancy, path, spawn, audio goal and target; the path is green
/// on success and red otherwise. Each grid cell becomes `scale` pixels.
pub fn visualize_trajectory(
    scene: &SceneInstance,
    records: &[TrajectoryRecord],
    audio_goal: Option<(f64, f64)>,
    success: bool,
    scale: usize,
) -> Result<Image> {
    if scale == 0 {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    if records.iter().enumerate().any(|(i, r)| r.step != i + 1) {
        return Err(Error::CorruptLog("steps are not consecutive".into()));
    }
    let occ = static_occupancy(&scene.room, CELL_SIZE);
    let (w, h) = (occ.nx * scale, occ.ny * scale);
    let mut img = Image::new(w, h, FREE);
    for cy in 0..occ.ny {
        for cx in 0..occ.nx {
            if occ.get((cx, cy)) {
                for dy in 0..scale {
                    for dx in 0..scale {
                        img.put((cx * scale + dx) as i64, ((occ.ny - 1 - cy) * scale + dy) as i64, OCCUPIED);
                    }
                }
            }
        }
    }
    let pm = PixelMap { scale, height: h };
    let color = if success { PATH_SUCCESS } else { PATH_FAIL };
    let pts = polyline(scene, records);
    for seg in pts.windows(2) {
        let (a, b) = (pm.to_pixel(seg[0].0, seg[0].1), pm.to_pixel(seg[1].0, seg[1].1));
        let n = ((b.0 - a.0).abs().max((b.1 - a.1).abs()) * 2.0).ceil().max(1.0) as usize;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            img.put((a.0 + (b.0 - a.0) * t).floor() as i64, (a.1 + (b.1 - a.1) * t).floor() as i64, color);
        }
    }
    let r = scale as i64;
    let mut marker = |x: f64, y: f64, c: Rgb| {
        let (px, py) = pm.to_pixel(x, y);
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    img.put(px.floor() as i64 + dx, py.floor() as i64 + dy, c);
                }
            }
        }
    };
    let t = scene.rest_pose.position;
    marker(t.x, t.y, TARGET);
    if let Some((gx, gy)) = audio_goal {
        marker(gx, gy, GOAL);
    }
    let s = scene.agent_spawn.position;
    marker(s.x, s.y, SPAWN);
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{AgentAction, Env, EnvConfig};
    use crate::geom::{Aabb, Vec3};
    use crate::perception::{ExemplarLibrary, GoalEstimate};
    use crate::planning::{Agent, ModularPolicy, OracleFlags};
    use crate::testutil::{open_scene, room_with, scene_with};
    use crate::world::{Furnishing, FurnitureKind, ObjectCategory, Pose};

    fn walk() -> (SceneInstance, Vec<TrajectoryRecord>) {
        let mut env = Env::new(open_scene(), EnvConfig::with_resolution(16)).unwrap();
        for a in [AgentAction::MoveForward, AgentAction::MoveForward, AgentAction::RotateLeft, AgentAction::MoveForward] {
            env.step(a).unwrap();
        }
        (env.scene().clone(), env.trajectory().to_vec())
    }

    #[test]
    fn dims_and_colors() {
        let (scene, recs) = walk();
        let img = visualize_trajectory(&scene, &recs, Some((4.0, 2.0)), true, 3).unwrap();
        let occ = static_occupancy(&scene.room, CELL_SIZE);
        assert_eq!((img.width, img.height), (occ.nx * 3, occ.ny * 3));
        assert!(img.pixels.contains(&PATH_SUCCESS));
        assert!(img.pixels.contains(&GOAL) && img.pixels.contains(&TARGET) && img.pixels.contains(&SPAWN));
        let failed = visualize_trajectory(&scene, &recs, None, false, 3).unwrap();
        assert!(failed.pixels.contains(&PATH_FAIL) && !failed.pixels.contains(&GOAL));
    }

    #[test]
    fn ppm_header() {
        let (scene, recs) = walk();
        let img = visualize_trajectory(&scene, &recs, None, true, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.ppm");
        img.write_ppm(&p).unwrap();
        let bytes = fs::read(&p).unwrap();
        let header = format!("P6\n{} {}\n255\n", img.width, img.height);
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len(), header.len() + img.width * img.height * 3);
    }

    #[test]
    fn corrupt_log_rejected() {
        let (scene, mut recs) = walk();
        recs.remove(1);
        assert!(matches!(visualize_trajectory(&scene, &recs, None, true, 2), Err(Error::CorruptLog(_))));
    }

    /// A pen behind a sofa with the audio goal beside the sofa.
    fn figure3() -> (SceneInstance, Vec<TrajectoryRecord>, (f64, f64), bool) {
        let sofa = Furnishing::new(FurnitureKind::Sofa, Aabb::new(Vec3::new(3.6, 2.5, 0.45), Vec3::new(0.3, 1.0, 0.45)));
        let scene = scene_with(
            room_with(6.0, 5.0, vec![sofa]),
            ObjectCategory::Pen,
            4.4,
            2.5,
            Pose::new(Vec3::new(1.05, 2.55, 0.0), 0.0, 0.0),
        );
        let (mut env, mut obs) = Env::reset(scene.clone(), EnvConfig::default()).unwrap();
        let first = ModularPolicy::new(&scene, &obs, &ExemplarLibrary::build(1, 3), OracleFlags::NONE);
        let mut ranking: Vec<_> = first.state().goal.category_ranking.clone();
        ranking.sort_by_key(|(c, _)| *c != ObjectCategory::Pen);
        let goal = GoalEstimate { position: (4.4, 1.8), bearing: 0.0, distance: 0.0, category_ranking: ranking };
        let mut policy = ModularPolicy::with_goal(&scene, goal, OracleFlags { gt_seg: true, gt_object: true, gt_location: false });
        while !env.state().done {
            let a = policy.act(&obs);
            obs = env.step(a).unwrap().observation;
        }
        let ok = env.state().outcome.is_some_and(|o| o.is_success());
        (scene, env.trajectory().to_vec(), (4.4, 1.8), ok)
    }

    fn nearest(pts: &[(f64, f64)], (x, y): (f64, f64)) -> usize {
        let d = |p: &(f64, f64)| (p.0 - x).hypot(p.1 - y);
        (0..pts.len()).min_by(|&a, &b| d(&pts[a]).total_cmp(&d(&pts[b]))).unwrap()
    }

    #[test]
    fn figure3_landmarks_in_order() {
        let (scene, recs, goal, ok) = figure3();
        assert!(ok);
        let pts = polyline(&scene, &recs);
        let t = scene.rest_pose.position;
        let (g, k) = (nearest(&pts, goal), nearest(&pts, (t.x, t.y)));
        // the closest approach to the goal may be the declaring pose itself
        assert!(0 < g && g <= k, "spawn 0, goal {g}, target {k}");
    }

    #[test]
    fn path_pixels_lie_in_free_cells() {
        let (scene, recs, goal, ok) = figure3();
        let scale = 4;
        let img = visualize_trajectory(&scene, &recs, Some(goal), ok, scale).unwrap();
        let occ = static_occupancy(&scene.room, CELL_SIZE);
        let mut n = 0;
        for py in 0..img.height {
            for px in 0..img.width {
                if img.get(px, py) == PATH_SUCCESS {
                    n += 1;
                    assert!(!occ.get((px / scale, occ.ny - 1 - py / scale)), "path pixel ({px}, {py}) on an obstacle");
                }
            }
        }
        assert!(n > 0);
    }
}
