use super::maps::MapFrame;
use crate::env::AgentAction;
use crate::geom::wrap_deg;
use crate::world::{Cell, Pose};

/// Heading tolerance before moving, degrees.
pub const HEADING_TOLERANCE: f64 = 15.0;
/// How many cells ahead along the path the controller aims.
pub const LOOKAHEAD: usize = 3;

/// Signed angle from the heading to world point `(x, y)`, degrees in
/// `(-180, 180]`, left positive.
pub fn relative_bearing(pose: &Pose, x: f64, y: f64) -> f64 {
    let b = (y - pose.position.y).atan2(x - pose.position.x).to_degrees();
    let d = wrap_deg(b - pose.yaw);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Turn toward `(x, y)`, or `None` once facing it.
pub fn face(pose: &Pose, x: f64, y: f64) -> Option<AgentAction> {
    let d = relative_bearing(pose, x, y);
    if d.abs() <= HEADING_TOLERANCE {
        None
    } else if d > 0.0 {
        Some(AgentAction::RotateLeft)
    } else {
        Some(AgentAction::RotateRight)
    }
}

/// Next action to follow `path` (which starts at the agent's cell).
pub fn path_to_action(path: &[Cell], pose: &Pose, frame: &MapFrame) -> AgentAction {
    let Some(&last) = path.last() else { return AgentAction::MoveForward };
    let target = path.get(LOOKAHEAD).copied().unwrap_or(last);
    let (x, y) = frame.center(target);
    face(pose, x, y).unwrap_or(AgentAction::MoveForward)
}
