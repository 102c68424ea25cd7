//! Settings shared by every subcommand: a JSON file supplies defaults and
//! command-line flags override them.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use fallen_core::dataset::Split;
use fallen_core::eval::AgentSpec;
use fallen_core::planning::OracleFlags;

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Dataset directory or manifest.json path.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_parser = ["train", "val", "test"])]
    pub split: Option<String>,
    /// modular, modular+gt_seg..., random or greedy-audio.
    #[arg(long)]
    pub agent: Option<String>,
    /// Oracle swap for the modular agent; repeatable.
    #[arg(long, value_parser = ["seg", "object", "location"])]
    #[serde(default)]
    pub oracle: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Number of episodes to generate or evaluate.
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Square render size in pixels.
    #[arg(long)]
    pub resolution: Option<usize>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Settings> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set on `self` win over `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            manifest: self.manifest.or(base.manifest),
            split: self.split.or(base.split),
            agent: self.agent.or(base.agent),
            oracle: if self.oracle.is_empty() { base.oracle } else { self.oracle },
            seed: self.seed.or(base.seed),
            out_dir: self.out_dir.or(base.out_dir),
            episodes: self.episodes.or(base.episodes),
            resolution: self.resolution.or(base.resolution),
        }
    }

    pub fn manifest(&self) -> Result<&Path> {
        self.manifest.as_deref().context("--manifest is required")
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out_dir.as_deref().context("--out-dir is required")
    }

    pub fn split(&self) -> Result<Option<Split>> {
        self.split
            .as_deref()
            .map(|s| Split::from_name(s).with_context(|| format!("unknown split {s:?}")))
            .transpose()
    }

    /// The agent with any `--oracle` flags folded in.
    pub fn agent(&self) -> Result<AgentSpec> {
        let spec: AgentSpec = self.agent.as_deref().unwrap_or("modular").parse()?;
        if self.oracle.is_empty() {
            return Ok(spec);
        }
        let AgentSpec::Modular(mut flags) = spec else {
            bail!("--oracle applies only to the modular agent");
        };
        for o in &self.oracle {
            set_oracle(&mut flags, o)?;
        }
        Ok(AgentSpec::Modular(flags))
    }
}

fn set_oracle(flags: &mut OracleFlags, name: &str) -> Result<()> {
    match name {
        "seg" => flags.gt_seg = true,
        "object" => flags.gt_object = true,
        "location" => flags.gt_location = true,
        _ => bail!("unknown oracle {name:?}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Settings = serde_json::from_str(r#"{"agent": "modular", "seed": 3, "episodes": 5, "oracle": ["seg"]}"#).unwrap();
        let cli = Settings { seed: Some(9), ..Settings::default() };
        let s = cli.over(file);
        assert_eq!((s.seed, s.episodes), (Some(9), Some(5)));
        assert_eq!(s.agent().unwrap().to_string(), "modular+gt_seg");
    }

    #[test]
    fn oracle_needs_modular() {
        let s = Settings { agent: Some("random".into()), oracle: vec!["seg".into()], ..Settings::default() };
        assert!(s.agent().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"agnet": "random"}"#).is_err());
    }
}
