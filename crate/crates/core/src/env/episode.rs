//! Episode state machine: reset, step, success and reward.

use serde::{Deserialize, Serialize};

use super::action::{AgentAction, LOOK_STEP, MOVE_STEP, TURN_STEP};
use super::log::TrajectoryRecord;
use super::render::{render_views, Views, DEFAULT_RESOLUTION, MAX_RESOLUTION};
use crate::audio::{object_bank, render_episode_audio, BinauralClip, RenderedAudio};
use crate::error::{Error, Result};
use crate::geom::{wrap_deg, Vec3};
use crate::rng;
use crate::world::{
    distance_field, nearest_free_cell, static_occupancy, Cell, GridCost, OccupancyGrid, Pose, SceneGeometry,
    SceneInstance, CELL_SIZE, PITCH_LIMIT,
};

/// Step budget per episode.
pub const MAX_STEPS: usize = 200;
/// Found succeeds only closer than this (horizontal), meters.
pub const SUCCESS_DISTANCE: f64 = 2.0;
/// Spacing of collision probes along a move, meters.
const PROBE_STEP: f64 = 0.025;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub r_closer: f64,
    pub r_farther: f64,
    pub r_found: f64,
    pub r_step: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig { r_closer: 1.0, r_farther: -1.0, r_found: 10.0, r_step: -0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub resolution: usize,
    pub max_steps: usize,
    pub reward: RewardConfig,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig { resolution: DEFAULT_RESOLUTION, max_steps: MAX_STEPS, reward: RewardConfig::default() }
    }
}

impl EnvConfig {
    pub fn with_resolution(resolution: usize) -> EnvConfig {
        EnvConfig { resolution, ..EnvConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 || self.resolution > MAX_RESOLUTION {
            return Err(Error::InvalidArgument(format!("resolution {} not in 1..={MAX_RESOLUTION}", self.resolution)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailReason {
    TooFar,
    NotVisible,
    Timeout,
}

impl FailReason {
    pub fn name(self) -> &'static str {
        match self {
            FailReason::TooFar => "too_far",
            FailReason::NotVisible => "not_visible",
            FailReason::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    Fail(FailReason),
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self == Outcome::Success
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeState {
    pub agent: Pose,
    pub step_index: usize,
    pub done: bool,
    pub outcome: Option<Outcome>,
    /// Meters covered by executed moves.
    pub path_traveled: f64,
    pub collisions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub views: Views,
    /// The fall sound; only at step 0.
    pub audio: Option<BinauralClip>,
    pub pose: Pose,
    pub step_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub collided: bool,
}

/// Seed of the target's mode bank for a scene.
pub fn target_bank_seed(scene: &SceneInstance) -> u64 {
    rng::derive(scene.seed, "target-bank", 0)
}

/// The fall sound as heard from the spawn pose.
pub fn episode_audio(scene: &SceneInstance) -> RenderedAudio {
    let bank = object_bank(&scene.target, target_bank_seed(scene));
    render_episode_audio(&scene.impacts, &bank, &scene.room, &scene.agent_spawn)
}

/// Where a forward move from `position` along `yaw` ends, or `None` if any
/// probe along the way falls outside the room or in an occupied cell.
pub fn try_move(occupancy: &OccupancyGrid, position: Vec3, yaw: f64) -> Option<Vec3> {
    let r = yaw.to_radians();
    let d = Vec3::new(r.cos(), r.sin(), 0.0);
    let n = (MOVE_STEP / PROBE_STEP).round() as usize;
    for k in 1..=n {
        let p = position + d * (MOVE_STEP * k as f64 / n as f64);
        if occupancy.is_occupied_world(p.x, p.y) {
            return None;
        }
    }
    Some(position + d * MOVE_STEP)
}

/// Success test for a Found action taken with `views` as the current
/// render.
pub fn check_success(state: &EpisodeState, views: &Views, target: Vec3, max_steps: usize) -> Outcome {
    if state.step_index > max_steps {
        Outcome::Fail(FailReason::Timeout)
    } else if state.agent.position.dist_xy(target) >= SUCCESS_DISTANCE {
        Outcome::Fail(FailReason::TooFar)
    } else if !views.target_visible() {
        Outcome::Fail(FailReason::NotVisible)
    } else {
        Outcome::Success
    }
}

/// Step reward from the geodesic distance before and after the action.
pub fn compute_reward(before: Option<f64>, after: Option<f64>, succeeded: bool, cfg: &RewardConfig) -> f64 {
    let mut r = cfg.r_step;
    if let (Some(b), Some(a)) = (before, after) {
        if a < b {
            r += cfg.r_closer;
        } else if a > b {
            r += cfg.r_farther;
        }
    }
    if succeeded {
        r += cfg.r_found;
    }
    r
}

/// One running episode.
#[derive(Debug, Clone)]
pub struct Env {
    scene: SceneInstance,
    config: EnvConfig,
    geometry: SceneGeometry,
    occupancy: OccupancyGrid,
    goal_cell: Option<Cell>,
    field: Vec<Option<GridCost>>,
    state: EpisodeState,
    // integer look and turn counts keep rotations exactly invertible
    turns: i64,
    tilt: i64,
    log: Vec<TrajectoryRecord>,
}

impl Env {
    /// Validate the scene and place the agent without rendering anything.
    pub fn new(scene: SceneInstance, config: EnvConfig) -> Result<Env> {
        config.validate()?;
        scene.validate()?;
        let occupancy = static_occupancy(&scene.room, CELL_SIZE);
        let t = scene.rest_pose.position;
        let goal_cell = nearest_free_cell(&occupancy, t.x, t.y);
        let field = distance_field(&occupancy, goal_cell.as_slice());
        let geometry = SceneGeometry::from_scene(&scene);
        let state = EpisodeState {
            agent: scene.agent_spawn.clone(),
            step_index: 0,
            done: false,
            outcome: None,
            path_traveled: 0.0,
            collisions: 0,
        };
        Ok(Env { scene, config, geometry, occupancy, goal_cell, field, state, turns: 0, tilt: 0, log: Vec::new() })
    }

    /// Start an episode; the first observation carries the fall sound.
    pub fn reset(scene: SceneInstance, config: EnvConfig) -> Result<(Env, Observation)> {
        let env = Env::new(scene, config)?;
        let audio = episode_audio(&env.scene).clip;
        let obs = env.observe(Some(audio));
        Ok((env, obs))
    }

    /// Like [`Env::reset`] with a pre-rendered sound, e.g. read from disk.
    pub fn reset_with_audio(scene: SceneInstance, config: EnvConfig, audio: BinauralClip) -> Result<(Env, Observation)> {
        let env = Env::new(scene, config)?;
        let obs = env.observe(Some(audio));
        Ok((env, obs))
    }

    pub fn scene(&self) -> &SceneInstance {
        &self.scene
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &EpisodeState {
        &self.state
    }

    pub fn geometry(&self) -> &SceneGeometry {
        &self.geometry
    }

    pub fn occupancy(&self) -> &OccupancyGrid {
        &self.occupancy
    }

    pub fn trajectory(&self) -> &[TrajectoryRecord] {
        &self.log
    }

    /// Free cell nearest the target, the end point of geodesic distances.
    pub fn goal_cell(&self) -> Option<Cell> {
        self.goal_cell
    }

    /// Geodesic distance in meters from a world position to the target.
    pub fn geodesic_distance(&self, p: Vec3) -> Option<f64> {
        let c = self.occupancy.world_to_cell(p.x, p.y)?;
        self.field[self.occupancy.idx(c)].map(|d| d.cells() * self.occupancy.cell)
    }

    /// Geodesic length from the spawn to the target.
    pub fn shortest_path_length(&self) -> Option<f64> {
        self.geodesic_distance(self.scene.agent_spawn.position)
    }

    pub fn render(&self) -> Views {
        render_views(&self.geometry, &self.state.agent, self.config.resolution)
    }

    fn observe(&self, audio: Option<BinauralClip>) -> Observation {
        Observation { views: self.render(), audio, pose: self.state.agent.clone(), step_index: self.state.step_index }
    }

    fn pose_from_counts(&self, position: Vec3) -> Pose {
        let spawn = &self.scene.agent_spawn;
        Pose {
            position,
            yaw: wrap_deg(spawn.yaw + TURN_STEP * self.turns as f64),
            pitch: (spawn.pitch + LOOK_STEP * self.tilt as f64).clamp(-PITCH_LIMIT, PITCH_LIMIT),
        }
    }

    pub fn step(&mut self, action: AgentAction) -> Result<StepResult> {
        if self.state.done {
            return Err(Error::EpisodeFinished);
        }
        let before = self.geodesic_distance(self.state.agent.position);
        let mut position = self.state.agent.position;
        let mut collided = false;
        match action {
            AgentAction::MoveForward => match try_move(&self.occupancy, position, self.state.agent.yaw) {
                Some(p) => {
                    position = p;
                    self.state.path_traveled += MOVE_STEP;
                }
                None => {
                    collided = true;
                    self.state.collisions += 1;
                }
            },
            AgentAction::RotateLeft => self.turns = (self.turns + 1).rem_euclid(12),
            AgentAction::RotateRight => self.turns = (self.turns - 1).rem_euclid(12),
            AgentAction::LookUp => self.tilt = self.pitch_count(1),
            AgentAction::LookDown => self.tilt = self.pitch_count(-1),
            AgentAction::Found => {}
        }
        self.state.agent = self.pose_from_counts(position);
        self.state.step_index += 1;
        let views = self.render();
        let mut succeeded = false;
        if action == AgentAction::Found {
            let outcome = check_success(&self.state, &views, self.scene.rest_pose.position, self.config.max_steps);
            succeeded = outcome.is_success();
            self.state.outcome = Some(outcome);
            self.state.done = true;
        } else if self.state.step_index >= self.config.max_steps {
            self.state.outcome = Some(Outcome::Fail(FailReason::Timeout));
            self.state.done = true;
        }
        let after = self.geodesic_distance(position);
        let reward = compute_reward(before, after, succeeded, &self.config.reward);
        self.log.push(TrajectoryRecord {
            step: self.state.step_index,
            action,
            pose: self.state.agent.clone(),
            reward,
            collision: collided,
        });
        let observation =
            Observation { views, audio: None, pose: self.state.agent.clone(), step_index: self.state.step_index };
        Ok(StepResult { observation, reward, done: self.state.done, collided })
    }

    /// Tilt count after one look step in direction `dir`, saturating at the
    /// pitch limits.
    fn pitch_count(&self, dir: i64) -> i64 {
        let next = self.tilt + dir;
        let pitch = self.scene.agent_spawn.pitch + LOOK_STEP * next as f64;
        if pitch.abs() > PITCH_LIMIT + 1e-9 {
            self.tilt
        } else {
            next
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Aabb;
    use crate::testutil::{open_scene, room_with, scene_with};
    use crate::world::{Furnishing, FurnitureKind, ObjectCategory};
    use rand::Rng;

    fn cfg() -> EnvConfig {
        EnvConfig::with_resolution(32)
    }

    #[test]
    fn reset_is_deterministic_and_has_audio() {
        let (_, a) = Env::reset(open_scene(), cfg()).unwrap();
        let (mut env, b) = Env::reset(open_scene(), cfg()).unwrap();
        assert_eq!(a, b);
        assert!(a.audio.as_ref().is_some_and(|c| c.peak() > 0.0));
        assert_eq!(a.step_index, 0);
        let s = env.step(AgentAction::RotateLeft).unwrap();
        assert!(s.observation.audio.is_none());
    }

    #[test]
    fn spawn_in_furniture_is_rejected() {
        let table = Furnishing::new(FurnitureKind::Table, Aabb::new(Vec3::new(2.0, 2.0, 0.4), Vec3::new(0.5, 0.5, 0.4)));
        let s = scene_with(
            room_with(6.0, 5.0, vec![table]),
            ObjectCategory::Cup,
            4.5,
            2.5,
            Pose::new(Vec3::new(2.0, 2.0, 0.0), 0.0, 0.0),
        );
        assert!(matches!(Env::new(s, cfg()), Err(Error::SpawnOccupied)));
    }

    #[test]
    fn rotations_invert_exactly() {
        let mut s = open_scene();
        s.agent_spawn = Pose::new(s.agent_spawn.position, 17.3, 0.0);
        let mut env = Env::new(s, cfg()).unwrap();
        let start = env.state().agent.clone();
        for a in [AgentAction::RotateLeft, AgentAction::RotateRight, AgentAction::LookUp, AgentAction::LookDown] {
            env.step(a).unwrap();
        }
        assert_eq!(env.state().agent, start);
        for _ in 0..12 {
            env.step(AgentAction::RotateRight).unwrap();
        }
        assert_eq!(env.state().agent, start);
    }

    #[test]
    fn pitch_saturates() {
        let mut env = Env::new(open_scene(), cfg()).unwrap();
        for _ in 0..4 {
            env.step(AgentAction::LookUp).unwrap();
        }
        assert_eq!(env.state().agent.pitch, 60.0);
        for _ in 0..5 {
            env.step(AgentAction::LookDown).unwrap();
        }
        assert_eq!(env.state().agent.pitch, -60.0);
    }

    #[test]
    fn wall_blocks_moves() {
        let mut s = open_scene();
        s.agent_spawn = Pose::new(Vec3::new(0.25, 2.5, 0.0), 180.0, 0.0);
        let mut env = Env::new(s, cfg()).unwrap();
        let before = env.state().agent.clone();
        let r = env.step(AgentAction::MoveForward).unwrap();
        assert!(r.collided);
        assert_eq!(env.state().agent, before);
        assert_eq!(env.state().collisions, 1);
        assert_eq!(env.state().path_traveled, 0.0);
    }

    #[test]
    fn timeout_after_budget() {
        let mut env = Env::new(open_scene(), cfg()).unwrap();
        for i in 0..MAX_STEPS {
            let r = env.step(AgentAction::RotateLeft).unwrap();
            assert_eq!(r.done, i + 1 == MAX_STEPS);
        }
        assert_eq!(env.state().outcome, Some(Outcome::Fail(FailReason::Timeout)));
        assert!(matches!(env.step(AgentAction::Found), Err(Error::EpisodeFinished)));
    }

    fn found_at(x: f64, pitch: f64) -> (Outcome, f64) {
        let mut s = open_scene();
        s.agent_spawn = Pose::new(Vec3::new(x, 2.5, 0.0), 0.0, pitch);
        let mut env = Env::new(s, EnvConfig::default()).unwrap();
        let r = env.step(AgentAction::Found).unwrap();
        (env.state().outcome.unwrap(), r.reward)
    }

    #[test]
    fn success_thresholds() {
        // target at x = 4.5 on the floor, cup is small: look down
        let (o, r) = found_at(3.0, -30.0);
        assert_eq!(o, Outcome::Success);
        assert!((r - 9.99).abs() < 1e-12);
        assert_eq!(found_at(2.0, -30.0).0, Outcome::Fail(FailReason::TooFar));
    }

    #[test]
    fn container_wall_hides_target() {
        let basket =
            Furnishing::new(FurnitureKind::WasteBasket, Aabb::new(Vec3::new(4.5, 2.5, 0.3), Vec3::new(0.2, 0.2, 0.3)));
        let s = scene_with(
            room_with(6.0, 5.0, vec![basket]),
            ObjectCategory::Key,
            4.5,
            2.5,
            Pose::new(Vec3::new(3.5, 2.5, 0.0), 0.0, -30.0),
        );
        let mut env = Env::new(s, cfg()).unwrap();
        env.step(AgentAction::Found).unwrap();
        assert_eq!(env.state().outcome, Some(Outcome::Fail(FailReason::NotVisible)));
    }

    #[test]
    fn reward_shaping() {
        let cfg = RewardConfig::default();
        assert_eq!(compute_reward(Some(2.0), Some(2.0), false, &cfg), -0.01);
        assert!((compute_reward(Some(2.0), Some(1.75), false, &cfg) - 0.99).abs() < 1e-12);
        assert!((compute_reward(Some(2.0), Some(2.25), false, &cfg) + 1.01).abs() < 1e-12);
        let mut env = Env::new(open_scene(), EnvConfig::with_resolution(16)).unwrap();
        assert_eq!(env.step(AgentAction::RotateLeft).unwrap().reward, -0.01);
        env.step(AgentAction::RotateRight).unwrap();
        assert!((env.step(AgentAction::MoveForward).unwrap().reward - 0.99).abs() < 1e-12);
    }

    #[test]
    fn geodesic_length_matches_grid() {
        let env = Env::new(open_scene(), cfg()).unwrap();
        // spawn cell (10, 25); the target sits on a cell corner, so the tie
        // goes to goal cell (44, 24): 33 straight steps and one diagonal
        assert_eq!(env.goal_cell(), Some((44, 24)));
        let l = 0.1 * (33.0 + std::f64::consts::SQRT_2);
        assert!((env.shortest_path_length().unwrap() - l).abs() < 1e-9);
    }

    #[test]
    fn random_walks_stay_free() {
        let table = Furnishing::new(FurnitureKind::Table, Aabb::new(Vec3::new(3.0, 2.0, 0.4), Vec3::new(0.6, 0.4, 0.4)));
        let s = scene_with(
            room_with(6.0, 5.0, vec![table]),
            ObjectCategory::Cup,
            4.5,
            4.0,
            Pose::new(Vec3::new(1.05, 1.05, 0.0), 0.0, 0.0),
        );
        let mut r = crate::rng::stream(3, "walk", 0);
        for ep in 0..10 {
            let mut env = Env::new(s.clone(), EnvConfig::with_resolution(4)).unwrap();
            for _ in 0..MAX_STEPS {
                let a = AgentAction::ALL[r.gen_range(0..5)];
                env.step(a).unwrap();
                let p = env.state().agent.position;
                assert!(!env.occupancy().is_occupied_world(p.x, p.y), "episode {ep} left free space at {p:?}");
            }
        }
    }
}
