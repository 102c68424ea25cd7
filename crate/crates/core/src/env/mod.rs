//! The embodied environment: actions, rendering, episode loop and logs.

mod action;
mod episode;
mod log;
mod render;

pub use action::{AgentAction, LOOK_STEP, MOVE_STEP, TURN_STEP};
pub use episode::{
    check_success, compute_reward, episode_audio, target_bank_seed, try_move, Env, EnvConfig, EpisodeState,
    FailReason, Observation, Outcome, RewardConfig, StepResult, MAX_STEPS, SUCCESS_DISTANCE,
};
pub use log::{read_log, replay, write_log, LogHeader, TrajectoryRecord, LOG_SCHEMA_VERSION};
pub use render::{render_views, Camera, Views, DEFAULT_RESOLUTION, FOV_DEG, MAX_DEPTH, MAX_RESOLUTION};
