//! Simulation, perception and planning for finding fallen objects by sound.

pub mod audio;
pub mod dataset;
pub mod env;
pub mod error;
pub mod eval;
pub mod geom;
pub mod perception;
pub mod physics;
pub mod planning;
pub mod rng;
pub mod world;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use geom::{Aabb, Vec3};
pub use audio::BinauralClip;
pub use dataset::{DatasetConfig, Manifest, ManifestEntry, Split};
pub use env::{AgentAction, Env, EnvConfig, Observation, Outcome, TrajectoryRecord};
pub use eval::{AgentSpec, BenchmarkConfig, BenchmarkReport, EpisodeResult};
pub use planning::{Agent, OracleFlags};
pub use world::{Cell, ObjectCategory, Pose, RoomType, SceneInstance};
