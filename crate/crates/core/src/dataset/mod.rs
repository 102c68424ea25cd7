//! The procedural dataset pipeline: rehearsal, generation, expert
//! demonstrations, splits and manifests.

mod build;
mod expert;
mod rehearse;

pub use build::{
    build_dataset, dataset_rooms, generate_episode, generate_episodes, proportional_splits, write_dataset, CrossScene,
    DatasetConfig, Episode, KeepStats, Manifest, ManifestEntry, Split, DEFAULT_DISTRACTORS, MANIFEST_FILE,
    MANIFEST_SCHEMA_VERSION, MIN_SPAWN_DISTANCE, FULL_SPLITS,
};
pub use expert::{expert_budget, expert_trajectory, target_in_view};
pub use rehearse::{rehearse, rehearse_trial, FallRecord, RehearsalReport, DROP_HEIGHT, VELOCITY_JITTER};
