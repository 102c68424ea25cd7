use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout id {0} (expected 0..=3)")]
    InvalidLayout(u8),
    #[error("material {material} is not eligible for {surface}")]
    IneligibleMaterial { material: String, surface: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("non-finite physics state at step {step}")]
    NonFinite { step: usize },
    #[error("no path from {start:?} to {goal:?}")]
    NoPath { start: (usize, usize), goal: (usize, usize) },
    #[error("silent clip: no onset found")]
    SilentClip,
    #[error("interaural delay {0:.6} s is outside the physical range")]
    ItdOutOfRange(f64),
    #[error("empty exemplar library")]
    EmptyLibrary,
    #[error("empty result set")]
    EmptyResults,
    #[error("episode already finished")]
    EpisodeFinished,
    #[error("spawn pose is not in free space")]
    SpawnOccupied,
    #[error("no free spawn cell")]
    NoSpawn,
    #[error("target unreachable for the expert")]
    Unreachable,
    #[error("map frames differ")]
    FrameMismatch,
    #[error("schema version mismatch: expected {expected}, found {found}")]
    SchemaVersion { expected: u32, found: u32 },
    #[error("unsupported sample rate {0} (expected 44100)")]
    SampleRate(u32),
    #[error("insufficient kept episodes: {kept} of {wanted} (keep rate {keep_rate:.3})")]
    InsufficientEpisodes { kept: usize, wanted: usize, keep_rate: f64 },
    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("corrupt trajectory log: {0}")]
    CorruptLog(String),
    #[error(transparent)]
    Wav(#[from] hound::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
