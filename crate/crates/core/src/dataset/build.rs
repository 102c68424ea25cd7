//! Generation phase and whole-dataset assembly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expert::{expert_budget, expert_trajectory};
use super::rehearse::{rehearse_trial, FallRecord};
use crate::audio::{write_wav, BinauralClip};
use crate::env::{episode_audio, write_log, AgentAction, Env, EnvConfig, TrajectoryRecord, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::rng;
use crate::world::{
    distance_field, nearest_free_cell, place_distractors, save_scene, standard_variants, static_occupancy,
    ObjectCategory, Pose, RoomType, RoomVariant, SceneInstance, CELL_SIZE, SCENE_SCHEMA_VERSION,
};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
/// Closest the agent may spawn to the resting target, meters.
pub const MIN_SPAWN_DISTANCE: f64 = 1.5;
pub const DEFAULT_DISTRACTORS: usize = 3;
/// Full-scale split sizes; smaller datasets keep the proportions.
pub const FULL_SPLITS: (usize, usize, usize) = (6000, 1000, 1000);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn from_name(s: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// Train in one room type, test in the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossScene {
    pub train: RoomType,
    pub test: RoomType,
}

impl CrossScene {
    pub const KITCHEN_TO_STUDY: CrossScene = CrossScene { train: RoomType::Kitchen, test: RoomType::Study };
    pub const STUDY_TO_KITCHEN: CrossScene = CrossScene { train: RoomType::Study, test: RoomType::Kitchen };

    /// Room type an episode of `split` is drawn from; validation follows
    /// training.
    pub fn room_type(&self, split: Split) -> RoomType {
        match split {
            Split::Test => self.test,
            _ => self.train,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n_instances: usize,
    /// Train, validation and test sizes; must sum to `n_instances`.
    pub splits: (usize, usize, usize),
    /// Seed of the standard room variants.
    pub room_seed: u64,
    /// Restrict to these variant ids; empty means all 64.
    pub rooms: Vec<String>,
    pub cross_scene: Option<CrossScene>,
    pub distractors: usize,
    /// Image size the expert demonstrations are checked at.
    pub resolution: usize,
    /// Generation attempts allowed per episode before giving up.
    pub retry_budget: usize,
    pub master_seed: u64,
}

/// Full-scale proportions scaled to `n`.
pub fn proportional_splits(n: usize) -> (usize, usize, usize) {
    let (a, b, c) = FULL_SPLITS;
    let total = (a + b + c) as f64;
    let train = (n as f64 * a as f64 / total).round() as usize;
    let val = (n as f64 * b as f64 / total).round() as usize;
    (train, val, n - train - val)
}

impl DatasetConfig {
    pub fn desk(n_instances: usize, master_seed: u64) -> DatasetConfig {
        DatasetConfig {
            n_instances,
            splits: proportional_splits(n_instances),
            room_seed: master_seed,
            rooms: Vec::new(),
            cross_scene: None,
            distractors: DEFAULT_DISTRACTORS,
            resolution: DEFAULT_RESOLUTION,
            retry_budget: 60,
            master_seed,
        }
    }

    pub fn with_cross_scene(mut self, cross: CrossScene) -> DatasetConfig {
        self.cross_scene = Some(cross);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = self.splits;
        if self.n_instances == 0 || a + b + c != self.n_instances {
            return Err(Error::InvalidArgument(format!(
                "splits {a}+{b}+{c} must sum to n_instances {} > 0",
                self.n_instances
            )));
        }
        if self.retry_budget == 0 {
            return Err(Error::InvalidArgument("retry_budget must be positive".into()));
        }
        EnvConfig::with_resolution(self.resolution).validate()
    }

    fn split_of(&self, i: usize) -> Split {
        let (a, b, _) = self.splits;
        if i < a {
            Split::Train
        } else if i < a + b {
            Split::Val
        } else {
            Split::Test
        }
    }
}

/// One generated benchmark episode, held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub id: String,
    pub scene: SceneInstance,
    pub audio: BinauralClip,
    pub expert: Vec<AgentAction>,
    /// Expert replay through the environment.
    pub expert_log: Vec<TrajectoryRecord>,
    pub split: Split,
    /// Geodesic distance from spawn to target, meters.
    pub shortest_path: f64,
}

/// Spawn the agent, place distractors, render the sound and solve the
/// episode. `id` names the scene.
pub fn generate_episode(
    record: &FallRecord,
    variant: &RoomVariant,
    id: &str,
    seed: u64,
    distractors: usize,
    resolution: usize,
) -> Result<Episode> {
    let occ = static_occupancy(variant, CELL_SIZE);
    let rest = record.rest_pose.position;
    let goal = nearest_free_cell(&occ, rest.x, rest.y).ok_or(Error::Unreachable)?;
    let field = distance_field(&occ, &[goal]);
    // keep a cell of clearance from obstacles so the agent is not wedged
    let roomy = occ.inflated(1);
    let spawns: Vec<(f64, f64)> = (0..occ.ny)
        .flat_map(|y| (0..occ.nx).map(move |x| (x, y)))
        .filter(|&c| !roomy.get(c) && field[occ.idx(c)].is_some())
        .map(|c| occ.cell_center(c))
        .filter(|&(x, y)| (x - rest.x).hypot(y - rest.y) >= MIN_SPAWN_DISTANCE)
        .collect();
    let mut r = rng::stream(seed, "spawn", 0);
    let &(sx, sy) = spawns.choose(&mut r).ok_or(Error::NoSpawn)?;
    let spawn = Pose::new(Vec3::new(sx, sy, 0.0), r.gen_range(0.0..360.0), 0.0);
    let zone = variant
        .fall_zones
        .get(record.zone_id)
        .ok_or_else(|| Error::Invariant(format!("zone {} missing", record.zone_id)))?;
    let placed = place_distractors(variant, zone, &record.object, &record.rest_pose, distractors, rng::derive(seed, "distractors", 0));
    let scene = SceneInstance {
        schema_version: SCENE_SCHEMA_VERSION,
        id: id.to_string(),
        room: variant.clone(),
        zone_id: record.zone_id,
        target: record.object.clone(),
        fall_init: record.init.clone(),
        rest_pose: record.rest_pose.clone(),
        impacts: record.impacts.clone(),
        distractors: placed.items,
        agent_spawn: spawn,
        seed,
    };
    scene.validate()?;
    let rendered = episode_audio(&scene);
    if rendered.silent {
        return Err(Error::SilentClip);
    }
    let mut env = Env::new(scene.clone(), EnvConfig::with_resolution(resolution))?;
    let shortest_path = env.shortest_path_length().ok_or(Error::Unreachable)?;
    let expert = expert_trajectory(&env)?;
    if expert.len() > expert_budget(shortest_path) {
        return Err(Error::Invariant(format!("expert uses {} actions for l = {shortest_path:.2}", expert.len())));
    }
    for &a in &expert {
        env.step(a)?;
    }
    if !env.state().outcome.is_some_and(|o| o.is_success()) {
        return Err(Error::Invariant(format!("expert replay failed: {:?}", env.state().outcome)));
    }
    Ok(Episode {
        id: id.to_string(),
        scene,
        audio: rendered.clip,
        expert,
        expert_log: env.trajectory().to_vec(),
        split: Split::Train,
        shortest_path,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub split: Split,
    /// Paths relative to the dataset root.
    pub scene: PathBuf,
    pub audio: PathBuf,
    pub trajectory: PathBuf,
    pub category: ObjectCategory,
    pub room_id: String,
    pub room_type: RoomType,
    pub impacts: usize,
    pub shortest_path: f64,
    pub expert_actions: usize,
}

/// Generation bookkeeping surfaced because failed drops are common.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KeepStats {
    pub attempts: usize,
    pub kept: usize,
    /// Rehearsal rejections by reason plus generation failures.
    pub rejected: BTreeMap<String, usize>,
}

impl KeepStats {
    pub fn keep_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.kept as f64 / self.attempts as f64
        }
    }

    fn merge(&mut self, other: &KeepStats) {
        self.attempts += other.attempts;
        self.kept += other.kept;
        for (k, v) in &other.rejected {
            *self.rejected.entry(k.clone()).or_default() += v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub config: DatasetConfig,
    pub stats: KeepStats,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn save(&self, root: &Path) -> Result<()> {
        fs::create_dir_all(root)?;
        fs::write(root.join(MANIFEST_FILE), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Read `manifest.json` from a dataset root or a direct file path.
    pub fn load(path: &Path) -> Result<Manifest> {
        let file = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
        let text = fs::read_to_string(&file)?;
        let m: Manifest =
            serde_json::from_str(&text).map_err(|e| Error::Parse { path: file.clone(), msg: e.to_string() })?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { expected: MANIFEST_SCHEMA_VERSION, found: m.schema_version });
        }
        Ok(m)
    }
}

/// Resolve the variant list of a config.
pub fn dataset_rooms(cfg: &DatasetConfig) -> Result<Vec<RoomVariant>> {
    let all = standard_variants(cfg.room_seed)?;
    if cfg.rooms.is_empty() {
        return Ok(all);
    }
    let picked: Vec<RoomVariant> = all.into_iter().filter(|r| cfg.rooms.contains(&r.id)).collect();
    if picked.len() != cfg.rooms.len() {
        return Err(Error::InvalidArgument("unknown room id in dataset config".into()));
    }
    Ok(picked)
}

fn generate_slot(
    cfg: &DatasetConfig,
    i: usize,
    pool: &[&RoomVariant],
    category: ObjectCategory,
) -> (std::result::Result<Episode, Error>, KeepStats) {
    let mut stats = KeepStats::default();
    let id = format!("ep{i:05}");
    let base = rng::derive(cfg.master_seed, "episode", i as u64);
    let mut last_err = Error::InsufficientEpisodes { kept: 0, wanted: 1, keep_rate: 0.0 };
    for attempt in 0..cfg.retry_budget {
        stats.attempts += 1;
        // stay in one room for a while, then move on
        let room = pool[(i + attempt / 10) % pool.len()];
        let seed = rng::derive(base, "attempt", attempt as u64);
        let record = match rehearse_trial(room, Some(category), seed, 0) {
            Ok(r) => r,
            Err(why) => {
                *stats.rejected.entry(why.name().to_string()).or_default() += 1;
                continue;
            }
        };
        match generate_episode(&record, room, &id, seed, cfg.distractors, cfg.resolution) {
            Ok(mut ep) => {
                ep.split = cfg.split_of(i);
                stats.kept += 1;
                return (Ok(ep), stats);
            }
            Err(e) => {
                let key = match &e {
                    Error::NoSpawn => "no_spawn",
                    Error::Unreachable => "unreachable",
                    Error::SilentClip => "silent",
                    _ => "generation_failed",
                };
                *stats.rejected.entry(key.to_string()).or_default() += 1;
                last_err = e;
            }
        }
    }
    log::warn!("episode {id}: no success after {} attempts: {last_err}", cfg.retry_budget);
    (Err(last_err), stats)
}

/// Generate every episode in memory. Episodes are independent and run in
/// parallel; the result does not depend on scheduling.
pub fn generate_episodes(cfg: &DatasetConfig) -> Result<(Vec<Episode>, KeepStats)> {
    cfg.validate()?;
    let rooms = dataset_rooms(cfg)?;
    let pool_for = |split: Split| -> Vec<&RoomVariant> {
        match cfg.cross_scene {
            Some(x) => rooms.iter().filter(|r| r.room_type == x.room_type(split)).collect(),
            None => rooms.iter().collect(),
        }
    };
    let pools: BTreeMap<Split, Vec<&RoomVariant>> = Split::ALL.into_iter().map(|s| (s, pool_for(s))).collect();
    if pools.values().any(|p| p.is_empty()) {
        return Err(Error::InvalidArgument("a split has no rooms to draw from".into()));
    }
    let mut categories = ObjectCategory::ALL.to_vec();
    categories.shuffle(&mut rng::stream(cfg.master_seed, "categories", 0));
    let results: Vec<(std::result::Result<Episode, Error>, KeepStats)> = (0..cfg.n_instances)
        .into_par_iter()
        .map(|i| generate_slot(cfg, i, &pools[&cfg.split_of(i)], categories[i % categories.len()]))
        .collect();
    let mut stats = KeepStats::default();
    let mut episodes = Vec::with_capacity(cfg.n_instances);
    for (ep, s) in results {
        stats.merge(&s);
        if let Ok(ep) = ep {
            episodes.push(ep);
        }
    }
    if episodes.len() < cfg.n_instances {
        return Err(Error::InsufficientEpisodes {
            kept: episodes.len(),
            wanted: cfg.n_instances,
            keep_rate: stats.keep_rate(),
        });
    }
    Ok((episodes, stats))
}

/// Write scenes, audio, expert logs and the manifest under `root`.
pub fn write_dataset(root: &Path, cfg: &DatasetConfig, episodes: &[Episode], stats: KeepStats) -> Result<Manifest> {
    let mut entries = Vec::with_capacity(episodes.len());
    for ep in episodes {
        let scene = PathBuf::from("scenes").join(format!("{}.scene", ep.id));
        let audio = PathBuf::from("audio").join(format!("{}.wav", ep.id));
        let trajectory = PathBuf::from("trajectories").join(format!("{}.log", ep.id));
        save_scene(&ep.scene, &root.join(&scene))?;
        write_wav(&ep.audio, &root.join(&audio))?;
        write_log(&root.join(&trajectory), &ep.id, &ep.expert_log)?;
        entries.push(ManifestEntry {
            id: ep.id.clone(),
            split: ep.split,
            scene,
            audio,
            trajectory,
            category: ep.scene.target.category,
            room_id: ep.scene.room.id.clone(),
            room_type: ep.scene.room.room_type,
            impacts: ep.scene.impacts.len(),
            shortest_path: ep.shortest_path,
            expert_actions: ep.expert.len(),
        });
    }
    let manifest = Manifest { schema_version: MANIFEST_SCHEMA_VERSION, config: cfg.clone(), stats, entries };
    manifest.save(root)?;
    Ok(manifest)
}

/// Generate and write a whole dataset.
pub fn build_dataset(cfg: &DatasetConfig, root: &Path) -> Result<Manifest> {
    let (episodes, stats) = generate_episodes(cfg)?;
    write_dataset(root, cfg, &episodes, stats)
}
