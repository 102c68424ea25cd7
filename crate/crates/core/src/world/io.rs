//! Scene files: pretty JSON with a schema version, validated on load.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::scene::{SceneInstance, SCENE_SCHEMA_VERSION};
use crate::error::{Error, Result};

pub fn save_scene(scene: &SceneInstance, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(scene)?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn load_scene(path: &Path) -> Result<SceneInstance> {
    let text = fs::read_to_string(path)?;
    parse_scene(&text, path)
}

/// Parse scene text; `path` is only used in error messages.
pub fn parse_scene(text: &str, path: &Path) -> Result<SceneInstance> {
    #[derive(Deserialize)]
    struct Header {
        schema_version: u32,
    }
    let parse_err = |e: serde_json::Error| Error::Parse { path: path.to_path_buf(), msg: e.to_string() };
    let header: Header = serde_json::from_str(text).map_err(parse_err)?;
    if header.schema_version != SCENE_SCHEMA_VERSION {
        return Err(Error::SchemaVersion { expected: SCENE_SCHEMA_VERSION, found: header.schema_version });
    }
    let scene: SceneInstance = serde_json::from_str(text).map_err(parse_err)?;
    scene.validate()?;
    Ok(scene)
}
