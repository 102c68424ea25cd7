use serde::{Deserialize, Serialize};

use super::acoustics::{room_acoustics, RoomAcoustics};
use super::modes::ModeBank;
use super::reverb::schroeder;
use super::spatial::{add_delayed, ear_center, spatialize_into, SPEED_OF_SOUND};
use super::synth::synthesize_impact;
use super::SAMPLE_RATE;
use crate::physics::ImpactEvent;
use crate::world::{Pose, RoomVariant};

pub const MIN_DURATION: f64 = 0.5;
pub const MAX_DURATION: f64 = 4.0;
/// Trailing samples quieter than this (−60 dBFS) are trimmed.
pub const TRIM_LEVEL: f64 = 1e-3;

/// Stereo audio at 44.1 kHz with samples in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinauralClip {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub sample_rate: u32,
}

impl BinauralClip {
    pub fn silent(seconds: f64) -> BinauralClip {
        let n = (seconds * SAMPLE_RATE as f64).round() as usize;
        BinauralClip { left: vec![0.0; n], right: vec![0.0; n], sample_rate: SAMPLE_RATE }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.left.iter().chain(&self.right).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mono(&self) -> Vec<f64> {
        self.left.iter().zip(&self.right).map(|(l, r)| 0.5 * (l + r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Add the room reverberation; off gives the dry direct path only.
    pub reverb: bool,
    /// Trim, pad and normalize into a valid clip.
    pub finalize: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { reverb: true, finalize: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedAudio {
    pub clip: BinauralClip,
    /// No impacts: the clip is silence.
    pub silent: bool,
    /// Factor applied by peak normalization (1.0 when none was needed).
    pub scale: f64,
}

/// Wet share of an impact heard from `r` meters.
pub fn wet_mix(r: f64) -> f64 {
    (0.25 * r).clamp(0.05, 0.8)
}

/// Render the fall event's impacts as heard by a listener in `room`.
pub fn render_episode_audio(
    impacts: &[ImpactEvent],
    bank: &ModeBank,
    room: &RoomVariant,
    listener: &Pose,
) -> RenderedAudio {
    render_with(impacts, bank, &room_acoustics(room), listener, RenderOptions::default())
}

/// Render with explicit acoustics and options.
pub fn render_with(
    impacts: &[ImpactEvent],
    bank: &ModeBank,
    acoustics: &RoomAcoustics,
    listener: &Pose,
    opts: RenderOptions,
) -> RenderedAudio {
    if impacts.is_empty() {
        return RenderedAudio { clip: BinauralClip::silent(MIN_DURATION), silent: true, scale: 1.0 };
    }
    let sr = SAMPLE_RATE;
    let fs = sr as f64;
    let ear = ear_center(listener);
    let sources: Vec<(f64, Vec<f64>, &ImpactEvent)> = impacts
        .iter()
        .map(|ev| ((ev.position - ear).norm(), synthesize_impact(bank, ev, sr), ev))
        .collect();
    // room for the longest tail plus reverb decay, capped near the clip limit
    let end = sources
        .iter()
        .map(|(r, y, ev)| ev.time + r / SPEED_OF_SOUND + y.len() as f64 / fs)
        .fold(0.0, f64::max);
    let tail = if opts.reverb { acoustics.rt60 } else { 0.0 };
    let n = (((end + tail).min(MAX_DURATION) + 0.01) * fs).ceil() as usize;
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    let mut wet_in = vec![0.0; n];
    for (r, mono, ev) in &sources {
        let mix = if opts.reverb { wet_mix(*r) } else { 0.0 };
        spatialize_into(
            &mut left,
            &mut right,
            mono,
            ev.position,
            listener,
            acoustics.direct_gain_ref * (1.0 - mix),
            sr,
            ev.time,
        );
        if opts.reverb {
            let at = (ev.time + r / SPEED_OF_SOUND) * fs;
            add_delayed(&mut wet_in, mono, at, acoustics.direct_gain_ref * mix);
        }
    }
    if opts.reverb {
        let wl = schroeder(&wet_in, acoustics.rt60, sr, 0);
        let wr = schroeder(&wet_in, acoustics.rt60, sr, 1);
        for (o, w) in left.iter_mut().zip(&wl) {
            *o += w;
        }
        for (o, w) in right.iter_mut().zip(&wr) {
            *o += w;
        }
    }
    let mut clip = BinauralClip { left, right, sample_rate: sr };
    if !opts.finalize {
        return RenderedAudio { clip, silent: false, scale: 1.0 };
    }
    let peak = clip.peak();
    let scale = if peak > 1.0 { 1.0 / peak } else { 1.0 };
    if scale != 1.0 {
        for v in clip.left.iter_mut().chain(clip.right.iter_mut()) {
            *v *= scale;
        }
    }
    let last = clip
        .left
        .iter()
        .zip(&clip.right)
        .rposition(|(l, r)| l.abs().max(r.abs()) >= TRIM_LEVEL)
        .map_or(0, |i| i + 1);
    let min_n = (MIN_DURATION * fs).round() as usize;
    let max_n = (MAX_DURATION * fs).round() as usize;
    let len = last.clamp(min_n, max_n);
    clip.left.resize(len, 0.0);
    clip.right.resize(len, 0.0);
    RenderedAudio { clip, silent: false, scale }
}
