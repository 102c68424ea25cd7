use serde::{Deserialize, Serialize};

/// Translation of one MoveForward, meters.
pub const MOVE_STEP: f64 = 0.25;
/// Yaw change of one rotation, degrees.
pub const TURN_STEP: f64 = 30.0;
/// Pitch change of one look action, degrees.
pub const LOOK_STEP: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentAction {
    MoveForward,
    RotateLeft,
    RotateRight,
    LookUp,
    LookDown,
    Found,
}

impl AgentAction {
    pub const ALL: [AgentAction; 6] = [
        AgentAction::MoveForward,
        AgentAction::RotateLeft,
        AgentAction::RotateRight,
        AgentAction::LookUp,
        AgentAction::LookDown,
        AgentAction::Found,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentAction::MoveForward => "move_forward",
            AgentAction::RotateLeft => "rotate_left",
            AgentAction::RotateRight => "rotate_right",
            AgentAction::LookUp => "look_up",
            AgentAction::LookDown => "look_down",
            AgentAction::Found => "found",
        }
    }
}
