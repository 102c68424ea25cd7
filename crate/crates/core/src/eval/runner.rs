//! Benchmark runs over a generated dataset and the oracle ablation table.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{sna, spl, success_rate, EpisodeResult};
use crate::audio::read_wav;
use crate::dataset::{Manifest, ManifestEntry, Split};
use crate::env::{Env, EnvConfig, Outcome, TrajectoryRecord, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::perception::{ExemplarLibrary, EXEMPLARS_PER_CATEGORY};
use crate::planning::{initial_goal, Agent, GreedyAudioAgent, ModularPolicy, OracleFlags, RandomAgent};
use crate::rng;
use crate::world::load_scene;

/// Seed of the sound exemplar library used by benchmark agents.
pub const LIBRARY_SEED: u64 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentSpec {
    Modular(OracleFlags),
    Random,
    GreedyAudio,
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Modular(flags) if *flags == OracleFlags::NONE => write!(f, "modular"),
            AgentSpec::Modular(flags) => write!(f, "modular+{}", flags.label()),
            AgentSpec::Random => write!(f, "random"),
            AgentSpec::GreedyAudio => write!(f, "greedy-audio"),
        }
    }
}

impl FromStr for AgentSpec {
    type Err = Error;

    /// `modular`, `random`, `greedy-audio`, or `modular+gt_seg+...`.
    fn from_str(s: &str) -> Result<AgentSpec> {
        match s {
            "random" => return Ok(AgentSpec::Random),
            "greedy-audio" => return Ok(AgentSpec::GreedyAudio),
            _ => {}
        }
        let mut parts = s.split('+');
        if parts.next() != Some("modular") {
            return Err(Error::InvalidArgument(format!("unknown agent {s:?}")));
        }
        let mut flags = OracleFlags::NONE;
        for p in parts {
            match p {
                "gt_seg" | "seg" => flags.gt_seg = true,
                "gt_object" | "object" => flags.gt_object = true,
                "gt_location" | "location" => flags.gt_location = true,
                _ => return Err(Error::InvalidArgument(format!("unknown oracle {p:?}"))),
            }
        }
        Ok(AgentSpec::Modular(flags))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub agent: AgentSpec,
    pub split: Option<Split>,
    /// Use only the first `n` matching episodes.
    pub episodes: Option<usize>,
    pub seed: u64,
    pub resolution: usize,
}

impl BenchmarkConfig {
    pub fn new(agent: AgentSpec) -> BenchmarkConfig {
        BenchmarkConfig { agent, split: None, episodes: None, seed: 0, resolution: DEFAULT_RESOLUTION }
    }
}

/// One episode's result with the grouping keys used in breakdowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRun {
    pub result: EpisodeResult,
    pub category: String,
    pub room_id: String,
    pub collisions: usize,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub n: usize,
    pub success_rate: f64,
    pub spl: f64,
    pub sna: f64,
}

impl Breakdown {
    pub fn of(results: &[EpisodeResult]) -> Result<Breakdown> {
        Ok(Breakdown { n: results.len(), success_rate: success_rate(results)?, spl: spl(results)?, sna: sna(results)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub agent: String,
    pub split: Option<Split>,
    pub overall: Breakdown,
    pub per_category: BTreeMap<String, Breakdown>,
    pub per_room: BTreeMap<String, Breakdown>,
    /// Hash of the config and every episode result.
    pub fingerprint: String,
}

impl BenchmarkReport {
    pub fn success_rate(&self) -> f64 {
        self.overall.success_rate
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Run one episode from the dataset with the given agent.
pub fn run_episode(
    root: &Path,
    entry: &ManifestEntry,
    index: usize,
    cfg: &BenchmarkConfig,
    library: &ExemplarLibrary,
) -> Result<EpisodeRun> {
    let scene = load_scene(&root.join(&entry.scene))?;
    let audio = read_wav(&root.join(&entry.audio))?;
    let (mut env, mut obs) = Env::reset_with_audio(scene.clone(), EnvConfig::with_resolution(cfg.resolution), audio)?;
    let mut agent: Box<dyn Agent> = match cfg.agent {
        AgentSpec::Modular(flags) => Box::new(ModularPolicy::new(&scene, &obs, library, flags)),
        AgentSpec::Random => Box::new(RandomAgent::new(rng::derive(cfg.seed, "random", index as u64))),
        AgentSpec::GreedyAudio => Box::new(GreedyAudioAgent::new(&initial_goal(&scene, &obs, library, OracleFlags::NONE))),
    };
    while !env.state().done {
        let action = agent.act(&obs);
        obs = env.step(action)?.observation;
    }
    let st = env.state();
    let result = EpisodeResult {
        id: entry.id.clone(),
        success: st.outcome.is_some_and(Outcome::is_success),
        shortest_path: entry.shortest_path,
        path_traveled: st.path_traveled,
        expert_actions: entry.expert_actions,
        actions: st.step_index,
        fail_reason: match st.outcome {
            Some(Outcome::Fail(r)) => Some(r),
            _ => None,
        },
    };
    Ok(EpisodeRun {
        result,
        category: entry.category.name().to_string(),
        room_id: entry.room_id.clone(),
        collisions: st.collisions,
        trajectory: env.trajectory().to_vec(),
    })
}

fn group(runs: &[EpisodeRun], key: impl Fn(&EpisodeRun) -> &str) -> Result<BTreeMap<String, Breakdown>> {
    let mut groups: BTreeMap<String, Vec<EpisodeResult>> = BTreeMap::new();
    for r in runs {
        groups.entry(key(r).to_string()).or_default().push(r.result.clone());
    }
    groups.into_iter().map(|(k, v)| Ok((k, Breakdown::of(&v)?))).collect()
}

/// Episodes of a manifest selected by a config.
pub fn select<'a>(manifest: &'a Manifest, cfg: &BenchmarkConfig) -> Vec<&'a ManifestEntry> {
    let it = manifest.entries.iter().filter(|e| cfg.split.is_none_or(|s| e.split == s));
    match cfg.episodes {
        Some(n) => it.take(n).collect(),
        None => it.collect(),
    }
}

/// Run every selected episode (in parallel) and aggregate.
pub fn run_benchmark(
    manifest: &Manifest,
    root: &Path,
    cfg: &BenchmarkConfig,
    library: &ExemplarLibrary,
) -> Result<(BenchmarkReport, Vec<EpisodeRun>)> {
    let entries = select(manifest, cfg);
    for e in &entries {
        for p in [&e.scene, &e.audio] {
            if !root.join(p).is_file() {
                return Err(Error::InvalidArgument(format!("missing dataset file {}", root.join(p).display())));
            }
        }
    }
    let runs: Vec<EpisodeRun> = entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| run_episode(root, e, i, cfg, library))
        .collect::<Result<_>>()?;
    let results: Vec<EpisodeResult> = runs.iter().map(|r| r.result.clone()).collect();
    let overall = Breakdown::of(&results)?;
    let mut text = serde_json::to_string(cfg)?;
    text.push_str(&serde_json::to_string(&results)?);
    let report = BenchmarkReport {
        agent: cfg.agent.to_string(),
        split: cfg.split,
        overall,
        per_category: group(&runs, |r| &r.category)?,
        per_room: group(&runs, |r| &r.room_id)?,
        fingerprint: format!("{:016x}", fnv1a(text.as_bytes())),
    };
    Ok((report, runs))
}

/// The exemplar library benchmark agents classify against.
pub fn benchmark_library() -> ExemplarLibrary {
    ExemplarLibrary::build(EXEMPLARS_PER_CATEGORY, LIBRARY_SEED)
}

/// Oracle rows in the order of the diagnostic table.
pub const ABLATION_ROWS: [OracleFlags; 5] = [
    OracleFlags::NONE,
    OracleFlags { gt_seg: true, gt_object: false, gt_location: false },
    OracleFlags { gt_seg: false, gt_object: true, gt_location: false },
    OracleFlags { gt_seg: true, gt_object: true, gt_location: false },
    OracleFlags::ALL,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub rows: Vec<BenchmarkReport>,
}

impl AblationTable {
    /// Success rates never drop along the oracle chain.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].success_rate() <= w[1].success_rate())
    }
}

impl fmt::Display for AblationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<44} {:>8} {:>8} {:>8}", "Method", "SR", "SPL", "SNA")?;
        for r in &self.rows {
            writeln!(f, "{:<44} {:>8.3} {:>8.3} {:>8.3}", r.agent, r.overall.success_rate, r.overall.spl, r.overall.sna)?;
        }
        Ok(())
    }
}

/// The modular agent under each oracle row; `base` supplies split,
/// episode count, seed and resolution.
pub fn ablation_suite(
    manifest: &Manifest,
    root: &Path,
    base: &BenchmarkConfig,
    library: &ExemplarLibrary,
) -> Result<AblationTable> {
    let rows = ABLATION_ROWS
        .iter()
        .map(|&flags| {
            let cfg = BenchmarkConfig { agent: AgentSpec::Modular(flags), ..base.clone() };
            run_benchmark(manifest, root, &cfg, library).map(|(r, _)| r)
        })
        .collect::<Result<_>>()?;
    Ok(AblationTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agent_spec_round_trips() {
        for s in ["modular", "random", "greedy-audio", "modular+gt_seg", "modular+gt_seg+gt_object+gt_location"] {
            assert_eq!(s.parse::<AgentSpec>().unwrap().to_string(), s);
        }
        assert!("modular+gt_foo".parse::<AgentSpec>().is_err());
        assert!("planner".parse::<AgentSpec>().is_err());
    }

    #[test]
    fn ablation_rows_are_ordered() {
        let labels: Vec<String> = ABLATION_ROWS.iter().map(|f| f.label()).collect();
        assert_eq!(labels, ["none", "gt_seg", "gt_object", "gt_seg+gt_object", "gt_seg+gt_object+gt_location"]);
    }
}
