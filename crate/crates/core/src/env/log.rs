//! Line-delimited JSON trajectory logs that replay bit-exactly.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::action::AgentAction;
use super::episode::{Env, EnvConfig, EpisodeState};
use crate::error::{Error, Result};
use crate::world::{Pose, SceneInstance};

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub action: AgentAction,
    /// Pose after the action.
    pub pose: Pose,
    pub reward: f64,
    pub collision: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema_version: u32,
    pub scene_id: String,
}

pub fn write_log(path: &Path, scene_id: &str, records: &[TrajectoryRecord]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    let header = LogHeader { schema_version: LOG_SCHEMA_VERSION, scene_id: scene_id.to_string() };
    writeln!(f, "{}", serde_json::to_string(&header)?)?;
    for r in records {
        writeln!(f, "{}", serde_json::to_string(r)?)?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_log(path: &Path) -> Result<(LogHeader, Vec<TrajectoryRecord>)> {
    let mut lines = BufReader::new(fs::File::open(path)?).lines();
    let first = lines.next().ok_or_else(|| Error::CorruptLog("empty log".into()))??;
    let header: LogHeader =
        serde_json::from_str(&first).map_err(|e| Error::CorruptLog(format!("header: {e}")))?;
    if header.schema_version != LOG_SCHEMA_VERSION {
        return Err(Error::SchemaVersion { expected: LOG_SCHEMA_VERSION, found: header.schema_version });
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: TrajectoryRecord =
            serde_json::from_str(&line).map_err(|e| Error::CorruptLog(format!("line {}: {e}", i + 2)))?;
        if r.step != records.len() + 1 {
            return Err(Error::CorruptLog(format!("line {}: step {} out of sequence", i + 2, r.step)));
        }
        records.push(r);
    }
    Ok((header, records))
}

/// Re-execute a log against its scene, checking every pose, reward and
/// collision flag for exact equality.
pub fn replay(scene: &SceneInstance, records: &[TrajectoryRecord], config: EnvConfig) -> Result<EpisodeState> {
    let mut env = Env::new(scene.clone(), config)?;
    for r in records {
        let out = env.step(r.action).map_err(|e| Error::CorruptLog(format!("step {}: {e}", r.step)))?;
        let got = env.trajectory().last().expect("step appends a record");
        if got != r {
            return Err(Error::CorruptLog(format!("step {} diverges: logged {:?}, replayed {:?}", r.step, r, got)));
        }
        if out.done && r.step != records.len() {
            return Err(Error::CorruptLog(format!("episode ended at step {} before the log", r.step)));
        }
    }
    Ok(env.state().clone())
}
