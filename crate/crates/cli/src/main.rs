mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use fallen_core::audio::{read_wav, render_with, room_acoustics, write_wav, RenderOptions};
use fallen_core::dataset::{build_dataset, CrossScene, DatasetConfig, Manifest};
use fallen_core::env::{episode_audio, read_log, Env, EnvConfig};
use fallen_core::eval::{ablation_suite, benchmark_library, run_benchmark, run_episode, visualize_trajectory, AgentSpec, BenchmarkConfig};
use fallen_core::geom::Vec3;
use fallen_core::perception::goal_position;
use fallen_core::physics::ImpactEvent;
use fallen_core::planning::{initial_goal, OracleFlags};
use fallen_core::world::{load_scene, size_scale_for, standard_variants, Material, ObjectCategory, ObjectSpec, Pose, RoomType};

use config::Settings;

#[derive(Debug, Parser)]
#[command(name = "fallen", version, about = "Find fallen objects by sound: datasets, agents and benchmarks")]
struct Cli {
    /// JSON file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cross {
    KitchenToStudy,
    StudyToKitchen,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dataset into --out-dir.
    Generate {
        #[command(flatten)]
        settings: Settings,
        /// Train on one room type and test on the other.
        #[arg(long, value_enum)]
        cross_scene: Option<Cross>,
    },
    /// Evaluate one agent over a dataset.
    Run {
        #[command(flatten)]
        settings: Settings,
    },
    /// Run the modular agent under every oracle combination.
    Ablate {
        #[command(flatten)]
        settings: Settings,
    },
    /// Draw a top-down picture of one episode.
    Viz {
        #[command(flatten)]
        settings: Settings,
        #[arg(long)]
        episode: String,
        /// Draw the dataset's expert trajectory instead of running an agent.
        #[arg(long)]
        expert: bool,
        /// Pixels per map cell.
        #[arg(long, default_value_t = 4)]
        scale: usize,
    },
    /// Render one fall sound to a WAV file.
    SynthAudio {
        #[command(flatten)]
        settings: Settings,
        /// Render this scene's fall as heard from its spawn pose.
        #[arg(long, conflicts_with_all = ["object", "surface", "speed", "distance", "azimuth", "room"])]
        scene: Option<PathBuf>,
        #[arg(long, default_value = "cup")]
        object: String,
        #[arg(long, default_value = "wood_hard")]
        surface: String,
        /// Impact speed, m/s.
        #[arg(long, default_value_t = 3.0)]
        speed: f64,
        /// Horizontal distance from the listener, m.
        #[arg(long, default_value_t = 2.0)]
        distance: f64,
        /// Degrees, counter-clockwise from straight ahead.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        azimuth: f64,
        #[arg(long, value_parser = ["kitchen", "study"], default_value = "kitchen")]
        room: String,
        /// Output file; defaults to impact.wav in --out-dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn settings(cli_file: Option<&Path>, flags: Settings) -> Result<Settings> {
    Ok(match cli_file {
        Some(p) => flags.over(Settings::load(p)?),
        None => flags,
    })
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}

fn bench_config(s: &Settings, agent: AgentSpec) -> Result<BenchmarkConfig> {
    let mut cfg = BenchmarkConfig::new(agent);
    cfg.split = s.split()?;
    cfg.episodes = s.episodes;
    cfg.seed = s.seed.unwrap_or(cfg.seed);
    cfg.resolution = s.resolution.unwrap_or(cfg.resolution);
    Ok(cfg)
}

fn load_manifest(path: &Path) -> Result<Manifest> {
    Manifest::load(path).with_context(|| format!("loading manifest {}", path.display()))
}

/// Directory holding the manifest, for either form of `--manifest`.
fn dataset_root(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.to_path_buf()
    } else {
        path.parent().map(Path::to_path_buf).unwrap_or_default()
    }
}

fn generate(s: &Settings, cross: Option<Cross>) -> Result<()> {
    let out = s.out_dir()?;
    let mut cfg = DatasetConfig::desk(s.episodes.unwrap_or(200), s.seed.unwrap_or(0));
    if let Some(r) = s.resolution {
        cfg.resolution = r;
    }
    if let Some(c) = cross {
        cfg = cfg.with_cross_scene(match c {
            Cross::KitchenToStudy => CrossScene::KITCHEN_TO_STUDY,
            Cross::StudyToKitchen => CrossScene::STUDY_TO_KITCHEN,
        });
    }
    let m = build_dataset(&cfg, out)?;
    println!(
        "wrote {} episodes to {} (keep rate {:.3} over {} rehearsals)",
        m.entries.len(),
        out.display(),
        m.stats.keep_rate(),
        m.stats.attempts
    );
    Ok(())
}

fn run(s: &Settings) -> Result<()> {
    let path = s.manifest()?;
    let manifest = load_manifest(path)?;
    let cfg = bench_config(s, s.agent()?)?;
    let (report, runs) = run_benchmark(&manifest, &dataset_root(path), &cfg, &benchmark_library())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!(
        "{:<44} {:>6} {:>8} {:>8} {:>8}\n{:<44} {:>6} {:>8.3} {:>8.3} {:>8.3}",
        "agent", "n", "SR", "SPL", "SNA", report.agent, report.overall.n, report.overall.success_rate, report.overall.spl,
        report.overall.sna
    );
    if let Some(dir) = &s.out_dir {
        write_json(dir, "report.json", &report)?;
        let p = write_json(dir, "episodes.json", &runs)?;
        info!("per-episode results in {}", p.display());
    }
    Ok(())
}

fn ablate(s: &Settings) -> Result<()> {
    let path = s.manifest()?;
    let manifest = load_manifest(path)?;
    let cfg = bench_config(s, AgentSpec::Modular(OracleFlags::NONE))?;
    let table = ablation_suite(&manifest, &dataset_root(path), &cfg, &benchmark_library())?;
    print!("{table}");
    println!("monotone: {}", table.is_monotone());
    if let Some(dir) = &s.out_dir {
        write_json(dir, "ablation.json", &table)?;
    }
    Ok(())
}

fn viz(s: &Settings, id: &str, expert: bool, scale: usize) -> Result<()> {
    let path = s.manifest()?;
    let root = dataset_root(path);
    let manifest = load_manifest(path)?;
    let (index, entry) =
        manifest.entries.iter().enumerate().find(|(_, e)| e.id == id).with_context(|| format!("no episode {id:?}"))?;
    let scene = load_scene(&root.join(&entry.scene))?;
    let (records, goal, success) = if expert {
        let (_, records) = read_log(&root.join(&entry.trajectory))?;
        (records, None, true)
    } else {
        let agent = s.agent()?;
        let cfg = bench_config(s, agent)?;
        let library = benchmark_library();
        let run = run_episode(&root, entry, index, &cfg, &library)?;
        let goal = match agent {
            AgentSpec::Modular(flags) => {
                let audio = read_wav(&root.join(&entry.audio))?;
                let (_, obs) = Env::reset_with_audio(scene.clone(), EnvConfig::with_resolution(cfg.resolution), audio)?;
                Some(initial_goal(&scene, &obs, &library, flags).position)
            }
            _ => None,
        };
        (run.trajectory, goal, run.result.success)
    };
    let img = visualize_trajectory(&scene, &records, goal, success, scale)?;
    let out = s.out_dir()?.join(format!("{id}.ppm"));
    img.write_ppm(&out)?;
    println!("{} ({}x{}, {})", out.display(), img.width, img.height, if success { "success" } else { "fail" });
    Ok(())
}

struct Impact<'a> {
    object: &'a str,
    surface: &'a str,
    speed: f64,
    distance: f64,
    azimuth: f64,
    room: &'a str,
}

fn synth_audio(s: &Settings, scene: Option<&Path>, imp: Impact<'_>, out: Option<PathBuf>) -> Result<()> {
    let out = match out {
        Some(p) => p,
        None => s.out_dir()?.join("impact.wav"),
    };
    let rendered = if let Some(p) = scene {
        episode_audio(&load_scene(p)?)
    } else {
        let category = ObjectCategory::from_name(imp.object).with_context(|| format!("unknown object {:?}", imp.object))?;
        let surface = Material::from_name(imp.surface).with_context(|| format!("unknown material {:?}", imp.surface))?;
        if !(imp.speed > 0.0 && imp.distance > 0.0) {
            bail!("--speed and --distance must be positive");
        }
        let room_type = if imp.room == "kitchen" { RoomType::Kitchen } else { RoomType::Study };
        let seed = s.seed.unwrap_or(0);
        let room = standard_variants(seed)?
            .into_iter()
            .find(|r| r.room_type == room_type)
            .context("no room of that type")?;
        let spec = ObjectSpec::from_category(category);
        let listener = Pose::new(Vec3::new(room.dims.x / 2.0, room.dims.y / 2.0, 0.0), 0.0, 0.0);
        let (x, y) = goal_position(&listener, imp.azimuth, imp.distance);
        let event = ImpactEvent {
            time: 0.05,
            position: Vec3::new(x, y, spec.extent.z),
            normal_speed: imp.speed,
            surface_material: surface,
            object_material: spec.material,
            object_mass: spec.mass,
            surface_mass: None,
        };
        info!("source at ({x:.2}, {y:.2})");
        let bank = fallen_core::audio::mode_bank(spec.material, size_scale_for(spec.extent), seed);
        render_with(&[event], &bank, &room_acoustics(&room), &listener, RenderOptions::default())
    };
    write_wav(&rendered.clip, &out)?;
    println!("{} ({:.3} s)", out.display(), rendered.clip.duration());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Generate { settings: f, cross_scene } => generate(&settings(file, f)?, cross_scene),
        Command::Run { settings: f } => run(&settings(file, f)?),
        Command::Ablate { settings: f } => ablate(&settings(file, f)?),
        Command::Viz { settings: f, episode, expert, scale } => viz(&settings(file, f)?, &episode, expert, scale),
        Command::SynthAudio { settings: f, scene, object, surface, speed, distance, azimuth, room, out } => synth_audio(
            &settings(file, f)?,
            scene.as_deref(),
            Impact { object: &object, surface: &surface, speed, distance, azimuth, room: &room },
            out,
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
