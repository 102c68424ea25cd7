//! Metrics, benchmark runs, oracle ablations and trajectory pictures.

mod metrics;
mod runner;
mod viz;

pub use metrics::{sna, spl, success_rate, EpisodeResult};
pub use runner::{
    ablation_suite, benchmark_library, run_benchmark, run_episode, select, AblationTable, AgentSpec, BenchmarkConfig,
    BenchmarkReport, Breakdown, EpisodeRun, ABLATION_ROWS, LIBRARY_SEED,
};
pub use viz::{polyline, visualize_trajectory, Image, PixelMap, Rgb, FREE, GOAL, OCCUPIED, PATH_FAIL, PATH_SUCCESS, SPAWN, TARGET};
