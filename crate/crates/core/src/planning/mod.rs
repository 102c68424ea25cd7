//! Agent-side mapping, path planning and policies.

mod astar;
mod controller;
mod frontier;
mod maps;
mod policy;

pub use astar::{astar, astar_inflated, astar_with_cost, blocked_mask, cost_meters, substitute_goal, GOAL_SEARCH_RADIUS, INFLATION};
pub use controller::{face, path_to_action, relative_bearing, HEADING_TOLERANCE, LOOKAHEAD};
pub use frontier::{frontiers, is_frontier};
pub use maps::{
    fuse, mask_anchor, project_local_maps, LocalMaps, MapFrame, OccupancyMap, SemanticGoalMap, CLEAR_VOTES,
    OBSTACLE_MIN_HEIGHT,
};
pub use policy::{
    found_decision, found_for_goal, initial_goal, Agent, GreedyAudioAgent, ModularPolicy, OracleFlags, Phase,
    PlannerState, RandomAgent, ARRIVAL_RADIUS, CRUISE_PITCH, FOUND_DISTANCE, TOP_K,
};
