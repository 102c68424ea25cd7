//! Success rate, SPL and SNA over episode results.

use serde::{Deserialize, Serialize};

use crate::env::FailReason;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub id: String,
    pub success: bool,
    /// Shortest (geodesic) length, meters.
    pub shortest_path: f64,
    /// Length actually walked, meters.
    pub path_traveled: f64,
    pub expert_actions: usize,
    pub actions: usize,
    pub fail_reason: Option<FailReason>,
}

impl EpisodeResult {
    fn s(&self) -> f64 {
        if self.success {
            1.0
        } else {
            0.0
        }
    }
}

fn mean(results: &[EpisodeResult], f: impl Fn(&EpisodeResult) -> f64) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    Ok(results.iter().map(f).sum::<f64>() / results.len() as f64)
}

pub fn success_rate(results: &[EpisodeResult]) -> Result<f64> {
    mean(results, EpisodeResult::s)
}

/// Success weighted by `l / max(p, l)`.
pub fn spl(results: &[EpisodeResult]) -> Result<f64> {
    if let Some(r) = results.iter().find(|r| !(r.shortest_path > 0.0)) {
        return Err(Error::InvalidArgument(format!("episode {} has shortest path {}", r.id, r.shortest_path)));
    }
    mean(results, |r| r.s() * r.shortest_path / r.path_traveled.max(r.shortest_path))
}

/// Success weighted by `n* / max(n, n*)`.
pub fn sna(results: &[EpisodeResult]) -> Result<f64> {
    if let Some(r) = results.iter().find(|r| r.expert_actions == 0) {
        return Err(Error::InvalidArgument(format!("episode {} has no expert actions", r.id)));
    }
    mean(results, |r| {
        let (n, e) = (r.actions as f64, r.expert_actions as f64);
        r.s() * e / n.max(e)
    })
}
