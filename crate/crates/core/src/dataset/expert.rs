//! Shortest expert demonstrations by breadth-first search over the
//! agent's action lattice.

use std::collections::{HashSet, VecDeque};

use crate::env::{try_move, AgentAction, Camera, Env, LOOK_STEP, SUCCESS_DISTANCE, TURN_STEP};
use crate::error::{Error, Result};
use crate::geom::{wrap_deg, Vec3};
use crate::world::{Pose, PITCH_LIMIT, TARGET_INSTANCE};

/// Safety margin inside the success radius, meters.
const DISTANCE_MARGIN: f64 = 0.05;
/// Position resolution used to merge lattice states, meters.
const MERGE_GRID: f64 = 0.05;
const MAX_NODES: usize = 500_000;

struct Node {
    position: Vec3,
    turns: i64,
    parent: usize,
    action: AgentAction,
    depth: usize,
}

/// Whether some pixel of a `size` image taken from `pose` shows the target.
/// Exact with respect to rendering: the checked pixels are cast like the
/// renderer casts them.
pub fn target_in_view(env: &Env, pose: &Pose, size: usize) -> bool {
    let cam = Camera::new(pose, size);
    let b = env.scene().target_box();
    let (c, h) = (b.center, b.half * 0.8);
    let mut points = vec![c, Vec3::new(c.x, c.y, c.z + h.z)];
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                points.push(Vec3::new(c.x + sx * h.x, c.y + sy * h.y, c.z + sz * h.z));
            }
        }
    }
    points.into_iter().any(|p| {
        let Some((row, col)) = cam.project(p) else { return false };
        if !(0.0..size as f64).contains(&row) || !(0.0..size as f64).contains(&col) {
            return false;
        }
        let (row, col) = (row as usize, col as usize);
        env.geometry().first_hit(cam.eye, cam.ray(row, col)).instance == TARGET_INSTANCE
    })
}

fn pitch_actions(count: i64) -> impl Iterator<Item = AgentAction> {
    let a = if count < 0 { AgentAction::LookDown } else { AgentAction::LookUp };
    std::iter::repeat_n(a, count.unsigned_abs() as usize)
}

/// Fewest actions from the spawn to a Found that succeeds, ending with
/// Found. Pitch changes are only made at the end.
pub fn expert_trajectory(env: &Env) -> Result<Vec<AgentAction>> {
    let spawn = env.scene().agent_spawn.clone();
    let target = env.scene().rest_pose.position;
    let size = env.config().resolution;
    let tilts: Vec<i64> = (-2..=2)
        .filter(|t| (spawn.pitch + LOOK_STEP * *t as f64).abs() <= PITCH_LIMIT + 1e-9)
        .collect();
    let key = |p: Vec3, turns: i64| ((p.x / MERGE_GRID).round() as i64, (p.y / MERGE_GRID).round() as i64, turns);
    let mut nodes = vec![Node { position: spawn.position, turns: 0, parent: usize::MAX, action: AgentAction::Found, depth: 0 }];
    let mut seen = HashSet::from([key(spawn.position, 0)]);
    let mut queue = VecDeque::from([0usize]);
    // (node, tilt, total actions including Found)
    let mut best: Option<(usize, i64, usize)> = None;
    while let Some(i) = queue.pop_front() {
        let (position, turns, depth) = (nodes[i].position, nodes[i].turns, nodes[i].depth);
        if best.is_some_and(|(_, _, total)| depth + 1 >= total) {
            break;
        }
        let yaw = wrap_deg(spawn.yaw + TURN_STEP * turns as f64);
        if (position.x - target.x).hypot(position.y - target.y) < SUCCESS_DISTANCE - DISTANCE_MARGIN {
            let mut by_cost = tilts.clone();
            by_cost.sort_by_key(|t| t.abs());
            for t in by_cost {
                let total = depth + t.unsigned_abs() as usize + 1;
                if best.is_some_and(|(_, _, b)| total >= b) {
                    break;
                }
                let pose = Pose { position, yaw, pitch: spawn.pitch + LOOK_STEP * t as f64 };
                if target_in_view(env, &pose, size) {
                    best = Some((i, t, total));
                    break;
                }
            }
        }
        let mut push = |nodes: &mut Vec<Node>, position: Vec3, turns: i64, action: AgentAction| {
            if seen.insert(key(position, turns)) {
                nodes.push(Node { position, turns, parent: i, action, depth: depth + 1 });
                queue.push_back(nodes.len() - 1);
            }
        };
        push(&mut nodes, position, (turns + 1).rem_euclid(12), AgentAction::RotateLeft);
        push(&mut nodes, position, (turns - 1).rem_euclid(12), AgentAction::RotateRight);
        if let Some(p) = try_move(env.occupancy(), position, yaw) {
            push(&mut nodes, p, turns, AgentAction::MoveForward);
        }
        if nodes.len() > MAX_NODES {
            break;
        }
    }
    let (end, tilt, _) = best.ok_or(Error::Unreachable)?;
    let mut actions = Vec::new();
    let mut i = end;
    while nodes[i].parent != usize::MAX {
        actions.push(nodes[i].action);
        i = nodes[i].parent;
    }
    actions.reverse();
    actions.extend(pitch_actions(tilt));
    actions.push(AgentAction::Found);
    Ok(actions)
}

/// Action budget a demonstration may use: the straight-line move count
/// plus three full turns of rotation and look changes.
pub fn expert_budget(shortest_path: f64) -> usize {
    (shortest_path / crate::env::MOVE_STEP).ceil() as usize + 36
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvConfig;
    use crate::testutil::open_scene;

    #[test]
    fn open_room_expert_replays_to_success() {
        let env = Env::new(open_scene(), EnvConfig::default()).unwrap();
        let actions = expert_trajectory(&env).unwrap();
        assert_eq!(actions.last(), Some(&AgentAction::Found));
        let l = env.shortest_path_length().unwrap();
        assert!(actions.len() <= expert_budget(l));
        let mut env = env;
        for a in actions {
            env.step(a).unwrap();
        }
        assert!(env.state().outcome.unwrap().is_success());
    }
}
