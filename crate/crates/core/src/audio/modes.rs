use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::world::Material;

pub const MIN_FREQ: f64 = 60.0;
pub const MAX_FREQ: f64 = 16_000.0;
pub const MAX_MODES: usize = 32;
/// Per-object frequency jitter, as a fraction.
pub const FREQ_JITTER: f64 = 0.03;
const BASE_BANK_SEED: u64 = 0x6d6f_6461_6c5f_6261;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub freq: f64,
    pub tau: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeBank {
    pub modes: Vec<Mode>,
    pub material: Material,
    pub size_scale: f64,
}

impl ModeBank {
    /// A one-mode bank, mainly for testing the synthesizer.
    pub fn single(freq: f64, tau: f64, gain: f64) -> ModeBank {
        ModeBank {
            modes: vec![Mode { freq, tau, gain }],
            material: Material::Metal,
            size_scale: 1.0,
        }
    }

    pub fn max_tau(&self) -> f64 {
        self.modes.iter().map(|m| m.tau).fold(0.0, f64::max)
    }
}

/// Modal bank for an object of `material` and `size_scale`.
///
/// The material fixes the base modes (log-uniform frequencies and decays
/// within the band of the shipped table, higher modes decaying faster).
/// `seed` jitters each frequency by up to ±3% so instances differ.
/// Frequencies scale as `1 / size_scale` and are clamped to 60–16000 Hz.
pub fn mode_bank(material: Material, size_scale: f64, seed: u64) -> ModeBank {
    assert!(size_scale > 0.0, "size_scale must be positive");
    let band = material.props().band;
    let n = band.n_modes.clamp(1, MAX_MODES);
    let mut base = rng::stream(BASE_BANK_SEED, "mode-bank", material.index() as u64);
    let mut jitter = rng::stream(seed, "mode-jitter", material.index() as u64);
    let (lf0, lf1) = (band.f_lo.ln(), band.f_hi.ln());
    let (lt0, lt1) = (band.tau_lo.ln(), band.tau_hi.ln());
    let mut modes: Vec<Mode> = (0..n)
        .map(|_| {
            let u: f64 = base.gen();
            let freq = (lf0 + u * (lf1 - lf0)).exp();
            // decay shortens with frequency, with some spread
            let v = ((1.0 - u) * 0.7 + base.gen::<f64>() * 0.3).clamp(0.0, 1.0);
            let tau = (lt0 + v * (lt1 - lt0)).exp();
            let gain = base.gen_range(0.2..1.0);
            let j = 1.0 + jitter.gen_range(-FREQ_JITTER..=FREQ_JITTER);
            Mode {
                freq: (freq * j / size_scale).clamp(MIN_FREQ, MAX_FREQ),
                tau,
                gain,
            }
        })
        .collect();
    let norm = modes.iter().map(|m| m.gain * m.gain).sum::<f64>().sqrt();
    for m in &mut modes {
        m.gain /= norm;
    }
    ModeBank { modes, material, size_scale }
}
