//! The modular agent and the two baselines it is compared with.
//!
//! The modular agent turns the fall sound into a goal estimate, walks there
//! on its own maps, sweeps the view, explores frontiers when nothing turns
//! up, and approaches semantic candidates whose category the sound allows.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::astar::{astar_inflated, INFLATION};
use super::controller::{face, path_to_action};
use super::frontier::{frontiers, is_frontier};
use super::maps::{fuse, mask_anchor, project_local_maps, LocalMaps, MapFrame, OccupancyMap, SemanticGoalMap};
use crate::env::{AgentAction, Camera, Observation, Views, LOOK_STEP, MAX_STEPS};
use crate::perception::{audio_goal_in_room, goal_position, segment, ExemplarLibrary, GoalEstimate, InstanceMask, SegNoiseModel};
use crate::rng;
use crate::world::{Cell, ObjectCategory, Pose, SceneInstance};

/// Categories the sound ranking lets through.
pub const TOP_K: usize = 5;
/// Declaring Found requires a matching mask closer than this, meters.
pub const FOUND_DISTANCE: f64 = 1.5;
/// Arrival radius around the audio goal, meters.
pub const ARRIVAL_RADIUS: f64 = 1.0;
/// Pitch held while navigating, degrees.
pub const CRUISE_PITCH: f64 = -30.0;
/// Give up on the audio goal after this many steps.
const GOAL_STEP_BUDGET: usize = 80;
/// Cells around a rejected candidate or visited frontier that are skipped.
const REJECT_RADIUS: i64 = 3;
/// Steps spent on one frontier before it is written off.
const FRONTIER_STEP_BUDGET: usize = 40;

/// Ground-truth substitutions for ablations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OracleFlags {
    pub gt_seg: bool,
    pub gt_object: bool,
    pub gt_location: bool,
}

impl OracleFlags {
    pub const NONE: OracleFlags = OracleFlags { gt_seg: false, gt_object: false, gt_location: false };
    pub const ALL: OracleFlags = OracleFlags { gt_seg: true, gt_object: true, gt_location: true };

    /// Row label such as `gt_seg+gt_object`, or `none`.
    pub fn label(&self) -> String {
        let parts: Vec<&str> = [(self.gt_seg, "gt_seg"), (self.gt_object, "gt_object"), (self.gt_location, "gt_location")]
            .into_iter()
            .filter_map(|(on, s)| on.then_some(s))
            .collect();
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("+")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    GoToAudioGoal,
    Sweep,
    Explore,
    Approach,
    Declare,
}

/// Anything that maps observations to actions.
pub trait Agent {
    fn act(&mut self, obs: &Observation) -> AgentAction;
}

#[derive(Debug, Clone)]
pub struct PlannerState {
    pub phase: Phase,
    pub goal: GoalEstimate,
    pub current_path: Vec<Cell>,
    pub occupancy: OccupancyMap,
    pub semantic: SemanticGoalMap,
    pub flags: OracleFlags,
}

/// True iff a mask of an allowed category is visible and its
/// back-projected anchor lies within [`FOUND_DISTANCE`] of the agent.
pub fn found_decision(masks: &[InstanceMask], allowed: &[ObjectCategory], views: &Views, pose: &Pose) -> bool {
    let cam = Camera::new(pose, views.size);
    masks.iter().filter(|m| allowed.contains(&m.category)).any(|m| {
        let a = mask_anchor(m, views.size);
        let p = cam.unproject(a / views.size, a % views.size, views.depth[a]);
        (p.x - pose.position.x).hypot(p.y - pose.position.y) < FOUND_DISTANCE
    })
}

/// [`found_decision`] with the top-5 gate of a goal estimate.
pub fn found_for_goal(masks: &[InstanceMask], goal: &GoalEstimate, views: &Views, pose: &Pose) -> bool {
    let allowed: Vec<ObjectCategory> = goal.category_ranking.iter().take(TOP_K).map(|(c, _)| *c).collect();
    found_decision(masks, &allowed, views, pose)
}

fn uninformed_goal(pose: &Pose) -> GoalEstimate {
    GoalEstimate {
        position: (pose.position.x, pose.position.y),
        bearing: 0.0,
        distance: 0.0,
        category_ranking: ObjectCategory::ALL.iter().map(|&c| (c, 0.0)).collect(),
    }
}

/// Goal from the first observation, with oracle substitutions applied and
/// the position pulled inside the room.
pub fn initial_goal(scene: &SceneInstance, first: &Observation, library: &ExemplarLibrary, flags: OracleFlags) -> GoalEstimate {
    let pose = &first.pose;
    let mut goal = first
        .audio
        .as_ref()
        .and_then(|clip| audio_goal_in_room(clip, pose, &scene.room, library).ok())
        .unwrap_or_else(|| uninformed_goal(pose));
    if flags.gt_object {
        let truth = scene.target.category;
        goal.category_ranking.retain(|(c, _)| *c != truth);
        goal.category_ranking.insert(0, (truth, f64::INFINITY));
    }
    if flags.gt_location {
        let t = scene.rest_pose.position;
        goal.position = (t.x, t.y);
    }
    let m = 0.15;
    let d = scene.room.dims;
    goal.position = (goal.position.0.clamp(m, d.x - m), goal.position.1.clamp(m, d.y - m));
    let (dx, dy) = (goal.position.0 - pose.position.x, goal.position.1 - pose.position.y);
    goal.distance = dx.hypot(dy);
    goal.bearing = super::controller::relative_bearing(pose, goal.position.0, goal.position.1);
    goal
}

fn near(a: Cell, b: Cell, r: i64) -> bool {
    (a.0 as i64 - b.0 as i64).abs() <= r && (a.1 as i64 - b.1 as i64).abs() <= r
}

/// Map-building planner with oracle swaps.
#[derive(Debug, Clone)]
pub struct ModularPolicy {
    state: PlannerState,
    /// Categories accepted as the target.
    allowed: Vec<ObjectCategory>,
    scene_seed: u64,
    max_steps: usize,
    goal_steps: usize,
    sweep_step: usize,
    swept: bool,
    /// Frontiers are exhausted; heading back to the audio goal.
    homing: bool,
    looked_down: bool,
    approach_looks: usize,
    target: Option<Cell>,
    rejected: Vec<Cell>,
    visited: Vec<Cell>,
    /// Frontier cell being walked to and the steps spent on it.
    frontier: Option<(Cell, usize)>,
    last: Option<(Pose, AgentAction)>,
    bumps: usize,
    phase_log: Vec<Phase>,
}

impl ModularPolicy {
    pub fn new(scene: &SceneInstance, first: &Observation, library: &ExemplarLibrary, flags: OracleFlags) -> ModularPolicy {
        let goal = initial_goal(scene, first, library, flags);
        ModularPolicy::with_goal(scene, goal, flags)
    }

    /// Start from an already computed goal estimate.
    pub fn with_goal(scene: &SceneInstance, goal: GoalEstimate, flags: OracleFlags) -> ModularPolicy {
        let frame = MapFrame::for_room(scene.room.dims.x, scene.room.dims.y);
        // under gt_object the true category is the only one accepted
        let allowed = if flags.gt_object {
            vec![goal.category_ranking[0].0]
        } else {
            goal.category_ranking.iter().take(TOP_K).map(|(c, _)| *c).collect()
        };
        ModularPolicy {
            state: PlannerState {
                phase: Phase::GoToAudioGoal,
                goal,
                current_path: Vec::new(),
                occupancy: OccupancyMap::new(frame),
                semantic: SemanticGoalMap::new(frame),
                flags,
            },
            allowed,
            scene_seed: scene.seed,
            max_steps: MAX_STEPS,
            goal_steps: 0,
            sweep_step: 0,
            swept: false,
            homing: false,
            looked_down: false,
            approach_looks: 0,
            target: None,
            rejected: Vec::new(),
            visited: Vec::new(),
            frontier: None,
            last: None,
            bumps: 0,
            phase_log: Vec::new(),
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> ModularPolicy {
        self.max_steps = max_steps;
        self
    }

    pub fn state(&self) -> &PlannerState {
        &self.state
    }

    /// Phase in which each action was chosen.
    pub fn phase_log(&self) -> &[Phase] {
        &self.phase_log
    }

    pub fn allowed(&self) -> &[ObjectCategory] {
        &self.allowed
    }

    fn frame(&self) -> MapFrame {
        self.state.occupancy.frame
    }

    fn masks(&self, obs: &Observation) -> Vec<InstanceMask> {
        let v = &obs.views;
        if self.state.flags.gt_seg {
            segment(&v.semantic, &v.instance, None)
        } else {
            let noise = SegNoiseModel::default_with_seed(rng::derive(self.scene_seed, "seg", obs.step_index as u64));
            segment(&v.semantic, &v.instance, Some(&noise))
        }
    }

    /// A blocked move means something the maps missed is right ahead.
    fn note_collision(&mut self, obs: &Observation) {
        let Some((prev, AgentAction::MoveForward)) = &self.last else {
            self.bumps = 0;
            return;
        };
        if prev.position != obs.pose.position {
            self.bumps = 0;
            return;
        }
        self.bumps += 1;
        let (hx, hy) = obs.pose.heading();
        let p = obs.pose.position;
        let f = self.frame();
        let mut probes = vec![0.2];
        if self.bumps > 1 {
            probes.push(0.12);
        }
        for d in probes {
            if let Some(c) = f.cell_of(p.x + hx * d, p.y + hy * d) {
                if Some(c) != f.cell_of(p.x, p.y) {
                    self.state.occupancy.mark_occupied(c);
                }
            }
        }
    }

    fn update_maps(&mut self, obs: &Observation, masks: &[InstanceMask]) {
        let mut local: LocalMaps = project_local_maps(&obs.views, masks, &obs.pose, self.frame());
        local.semantic.retain(|(c, _)| !self.rejected.iter().any(|&r| near(*c, r, REJECT_RADIUS)));
        fuse(&mut self.state.occupancy, &mut self.state.semantic, &local).expect("maps share one frame");
    }

    fn agent_cell(&self, pose: &Pose) -> Cell {
        let f = self.frame();
        f.cell_of(pose.position.x, pose.position.y).expect("agent inside the mapped room")
    }

    fn goal_cell(&self) -> Cell {
        let (x, y) = self.state.goal.position;
        self.frame().cell_of(x, y).expect("goal clamped into the room")
    }

    /// Allowed candidate nearest the audio goal.
    fn best_candidate(&self) -> Option<Cell> {
        let g = self.goal_cell();
        let d2 = |c: Cell| (c.0 as i64 - g.0 as i64).pow(2) + (c.1 as i64 - g.1 as i64).pow(2);
        self.state
            .semantic
            .marked()
            .filter(|(c, k)| self.allowed.contains(k) && !self.rejected.iter().any(|&r| near(*c, r, REJECT_RADIUS)))
            .map(|(c, _)| c)
            .min_by_key(|&c| (d2(c), c))
    }

    fn plan(&mut self, start: Cell, goal: Cell) -> Option<Vec<Cell>> {
        let occ = &self.state.occupancy;
        let (path, _) =
            astar_inflated(occ, start, goal, INFLATION).or_else(|_| astar_inflated(occ, start, goal, 0)).ok()?;
        self.state.current_path = path.clone();
        Some(path)
    }

    fn cruise(&self, pose: &Pose) -> Option<AgentAction> {
        if pose.pitch < CRUISE_PITCH - 1e-9 {
            Some(AgentAction::LookUp)
        } else if pose.pitch > CRUISE_PITCH + 1e-9 {
            Some(AgentAction::LookDown)
        } else {
            None
        }
    }

    /// Cruise pitch, then follow a fresh path to `goal`.
    fn navigate(&mut self, pose: &Pose, goal: Cell) -> Option<AgentAction> {
        let start = self.agent_cell(pose);
        let path = self.plan(start, goal)?;
        if path.len() <= 1 {
            return None;
        }
        let frame = self.frame();
        Some(self.cruise(pose).unwrap_or_else(|| path_to_action(&path, pose, &frame)))
    }

    fn sweep_action(&mut self) -> Option<AgentAction> {
        // rotate a full turn, toggling the view up and down after each step
        let i = self.sweep_step;
        if i >= 24 {
            return None;
        }
        self.sweep_step += 1;
        Some(match (i % 2, (i / 2) % 2) {
            (0, _) => AgentAction::RotateLeft,
            (_, 0) => AgentAction::LookUp,
            _ => AgentAction::LookDown,
        })
    }

    fn explore(&mut self, pose: &Pose) -> Option<AgentAction> {
        self.state.phase = Phase::Explore;
        let here = self.agent_cell(pose);
        // stay with the current frontier so the choice does not flip as the agent moves
        if let Some((t, spent)) = self.frontier.take() {
            if spent < FRONTIER_STEP_BUDGET && is_frontier(&self.state.occupancy, t) && !near(t, here, 2) {
                if let Some(a) = self.navigate(pose, t) {
                    self.frontier = Some((t, spent + 1));
                    return Some(a);
                }
            }
            self.visited.push(t);
        }
        for _ in 0..8 {
            let clusters: Vec<Vec<Cell>> = frontiers(&self.state.occupancy, self.goal_cell())
                .into_iter()
                .map(|cl| cl.into_iter().filter(|&c| !self.visited.iter().any(|&v| near(c, v, REJECT_RADIUS))).collect::<Vec<_>>())
                .filter(|cl| !cl.is_empty())
                .collect();
            let cluster = clusters.first()?;
            let d2 = |c: &Cell| (c.0 as i64 - here.0 as i64).pow(2) + (c.1 as i64 - here.1 as i64).pow(2);
            let target = *cluster.iter().min_by_key(|c| (d2(c), **c)).expect("cluster non-empty");
            if near(target, here, 2) {
                self.visited.push(target);
                continue;
            }
            match self.navigate(pose, target) {
                Some(a) => {
                    self.frontier = Some((target, 1));
                    return Some(a);
                }
                None => self.visited.push(target),
            }
        }
        None
    }

    fn approach(&mut self, pose: &Pose, target: Cell) -> Option<AgentAction> {
        self.state.phase = Phase::Approach;
        if self.target != Some(target) {
            self.target = Some(target);
            self.approach_looks = 0;
        }
        if let Some(a) = self.navigate(pose, target) {
            if self.approach_looks == 0 {
                return Some(a);
            }
        }
        // arrived: face the candidate and look down before giving up on it
        let (x, y) = self.frame().center(target);
        if let Some(a) = face(pose, x, y) {
            return Some(a);
        }
        if self.approach_looks < 2 && pose.pitch > -60.0 + LOOK_STEP / 2.0 {
            self.approach_looks += 1;
            return Some(AgentAction::LookDown);
        }
        self.rejected.push(target);
        self.target = None;
        None
    }

    fn decide(&mut self, obs: &Observation, masks: &[InstanceMask]) -> AgentAction {
        let pose = &obs.pose;
        if obs.step_index + 1 >= self.max_steps {
            return AgentAction::Found;
        }
        if found_decision(masks, &self.allowed, &obs.views, pose) {
            self.state.phase = Phase::Declare;
            return AgentAction::Found;
        }
        if !self.looked_down {
            self.looked_down = true;
            if pose.pitch > CRUISE_PITCH + 1e-9 {
                return AgentAction::LookDown;
            }
        }
        for _ in 0..4 {
            if let Some(c) = self.best_candidate() {
                if let Some(a) = self.approach(pose, c) {
                    return a;
                }
                continue;
            }
            if self.state.phase == Phase::Approach {
                self.state.phase = if self.swept { Phase::Explore } else { Phase::GoToAudioGoal };
            }
            break;
        }
        if self.state.phase == Phase::GoToAudioGoal {
            self.goal_steps += 1;
            let (gx, gy) = self.state.goal.position;
            let close = (gx - pose.position.x).hypot(gy - pose.position.y) < ARRIVAL_RADIUS;
            if close || self.goal_steps > GOAL_STEP_BUDGET {
                self.state.phase = Phase::Sweep;
            } else {
                let g = self.goal_cell();
                match self.navigate(pose, g) {
                    Some(a) => return a,
                    None => self.state.phase = Phase::Explore,
                }
            }
        }
        if self.state.phase == Phase::Sweep {
            if let Some(a) = self.sweep_action() {
                return a;
            }
            self.swept = true;
            self.state.phase = Phase::Explore;
        }
        if !self.homing {
            if let Some(a) = self.explore(pose) {
                return a;
            }
            self.homing = true;
        }
        // nothing left to look at: declare at the best location estimate
        self.state.phase = Phase::Declare;
        let (gx, gy) = self.state.goal.position;
        if (gx - pose.position.x).hypot(gy - pose.position.y) >= ARRIVAL_RADIUS {
            let g = self.goal_cell();
            if let Some(a) = self.navigate(pose, g) {
                return a;
            }
        }
        face(pose, gx, gy).unwrap_or(AgentAction::Found)
    }
}

impl Agent for ModularPolicy {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        self.note_collision(obs);
        let masks = self.masks(obs);
        self.update_maps(obs, &masks);
        let action = self.decide(obs, &masks);
        self.phase_log.push(self.state.phase);
        self.last = Some((obs.pose.clone(), action));
        action
    }
}

/// Uniformly random actions; the floor baseline.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> RandomAgent {
        RandomAgent { rng: rng::stream(seed, "random-agent", 0) }
    }
}

impl Agent for RandomAgent {
    fn act(&mut self, _obs: &Observation) -> AgentAction {
        AgentAction::ALL[self.rng.gen_range(0..AgentAction::ALL.len())]
    }
}

/// Walks straight at the audio goal and declares Found on arrival or when
/// blocked.
#[derive(Debug, Clone)]
pub struct GreedyAudioAgent {
    goal: (f64, f64),
    last: Option<Pose>,
}

impl GreedyAudioAgent {
    pub fn new(goal: &GoalEstimate) -> GreedyAudioAgent {
        GreedyAudioAgent { goal: goal.position, last: None }
    }

    /// Goal at `distance` along `bearing` from `pose`.
    pub fn toward(pose: &Pose, bearing: f64, distance: f64) -> GreedyAudioAgent {
        GreedyAudioAgent { goal: goal_position(pose, bearing, distance), last: None }
    }
}

impl Agent for GreedyAudioAgent {
    fn act(&mut self, obs: &Observation) -> AgentAction {
        let pose = &obs.pose;
        let blocked = self.last.as_ref().is_some_and(|p| p == pose);
        let (gx, gy) = self.goal;
        let action = if blocked || (gx - pose.position.x).hypot(gy - pose.position.y) < ARRIVAL_RADIUS {
            AgentAction::Found
        } else if pose.pitch > CRUISE_PITCH + 1e-9 {
            AgentAction::LookDown
        } else {
            face(pose, gx, gy).unwrap_or(AgentAction::MoveForward)
        };
        self.last = (action == AgentAction::MoveForward).then(|| pose.clone());
        action
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{render_views, Env, EnvConfig};
    use crate::geom::{Aabb, Vec3};
    use crate::testutil::{open_scene, room_with, scene_with};
    use crate::world::{Furnishing, FurnitureKind, SceneGeometry, TARGET_INSTANCE};

    fn cup_views(dist: f64) -> (Views, Pose, Vec<InstanceMask>) {
        let tgt = Aabb::new(Vec3::new(1.0 + dist, 2.5, 0.05), Vec3::new(0.05, 0.05, 0.05));
        let g = SceneGeometry::from_room(&room_with(6.0, 5.0, vec![])).with_object(tgt, ObjectCategory::Cup, TARGET_INSTANCE);
        let pose = Pose::new(Vec3::new(1.0, 2.5, 0.0), 0.0, -30.0);
        let v = render_views(&g, &pose, 128);
        let m = segment(&v.semantic, &v.instance, None);
        (v, pose, m)
    }

    #[test]
    fn found_needs_allowed_category_and_range() {
        let (v, pose, m) = cup_views(1.2);
        assert!(found_decision(&m, &[ObjectCategory::Cup], &v, &pose));
        assert!(!found_decision(&m, &[ObjectCategory::Vase], &v, &pose));
        let (v, pose, m) = cup_views(2.4);
        assert!(!m.is_empty());
        assert!(!found_decision(&m, &[ObjectCategory::Cup], &v, &pose));
    }

    #[test]
    fn oracle_labels() {
        assert_eq!(OracleFlags::NONE.label(), "none");
        assert_eq!(OracleFlags::ALL.label(), "gt_seg+gt_object+gt_location");
    }

    fn run(scene: SceneInstance, flags: OracleFlags) -> (Env, ModularPolicy) {
        let lib = ExemplarLibrary::build(1, 3);
        let (mut env, obs) = Env::reset(scene.clone(), EnvConfig::default()).unwrap();
        let mut policy = ModularPolicy::new(&scene, &obs, &lib, flags);
        let mut obs = obs;
        while !env.state().done {
            let a = policy.act(&obs);
            obs = env.step(a).unwrap().observation;
        }
        (env, policy)
    }

    #[test]
    fn full_oracle_succeeds_in_open_room_within_bound() {
        let (env, _) = run(open_scene(), OracleFlags::ALL);
        let l = env.shortest_path_length().unwrap();
        assert_eq!(env.state().outcome, Some(crate::env::Outcome::Success));
        assert!(env.state().step_index as f64 <= (l / 0.25).ceil() + 24.0, "{} steps for l = {l}", env.state().step_index);
    }

    #[test]
    fn exhaustion_forces_found() {
        // the only accepted category is absent, so the agent runs out of places to look
        let scene = open_scene();
        let (mut env, mut obs) = Env::reset(scene.clone(), EnvConfig::with_resolution(64)).unwrap();
        let mut goal = uninformed_goal(&obs.pose);
        goal.category_ranking.sort_by_key(|(c, _)| *c != ObjectCategory::Vase);
        let mut policy = ModularPolicy::with_goal(&scene, goal, OracleFlags { gt_seg: true, gt_object: true, gt_location: false });
        assert_eq!(policy.allowed(), &[ObjectCategory::Vase]);
        while !env.state().done {
            let a = policy.act(&obs);
            obs = env.step(a).unwrap().observation;
        }
        assert!(env.state().step_index < MAX_STEPS, "exhaustion should end the episode early");
        assert_eq!(env.trajectory().last().unwrap().action, AgentAction::Found);
        assert!(policy.phase_log().contains(&Phase::Explore));
    }

    #[test]
    fn goes_to_audio_goal_before_approach() {
        // a pen behind a sofa: only visible after walking around it
        let sofa = Furnishing::new(FurnitureKind::Sofa, Aabb::new(Vec3::new(3.6, 2.5, 0.45), Vec3::new(0.3, 1.0, 0.45)));
        let s = scene_with(
            room_with(6.0, 5.0, vec![sofa]),
            ObjectCategory::Pen,
            4.4,
            2.5,
            Pose::new(Vec3::new(1.05, 2.55, 0.0), 0.0, 0.0),
        );
        let (env, policy) = run(s, OracleFlags::ALL);
        let log = policy.phase_log();
        let (gx, gy) = policy.state().goal.position;
        let end = log.iter().position(|&p| matches!(p, Phase::Approach | Phase::Declare)).expect("target reached");
        assert!(log[..end].contains(&Phase::GoToAudioGoal));
        let near_goal = env.trajectory()[..end]
            .iter()
            .position(|r| (r.pose.position.x - gx).hypot(r.pose.position.y - gy) < FOUND_DISTANCE);
        assert!(near_goal.is_some_and(|i| i < end));
        assert!(env.state().outcome.is_some_and(|o| o.is_success()));
    }
}
