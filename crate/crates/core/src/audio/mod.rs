//! Binaural impact audio: modal synthesis, spatialization and reverb.

mod acoustics;
mod modes;
mod render;
pub mod reverb;
mod spatial;
mod synth;
mod wav;

pub use acoustics::{room_acoustics, sabine_rt60, RoomAcoustics, DIRECT_GAIN_REF, RT60_MAX, RT60_MIN};
pub use modes::{mode_bank, Mode, ModeBank, FREQ_JITTER, MAX_FREQ, MAX_MODES, MIN_FREQ};
pub use render::{
    render_episode_audio, render_with, wet_mix, BinauralClip, RenderOptions, RenderedAudio, MAX_DURATION,
    MIN_DURATION,
};
pub use spatial::{
    add_delayed, azimuth, distance_gain, ear_center, ild_db, lateral_angle, max_itd, spatialize, spatialize_into,
    woodworth_itd, HEAD_RADIUS, SPEED_OF_SOUND,
};
pub use synth::{excitation, synthesize_impact, synthesize_modes, tail_len, C0};
pub use wav::{read_wav, write_wav};

pub const SAMPLE_RATE: u32 = 44_100;

use crate::world::ObjectSpec;

/// Mode bank of a concrete object; `seed` selects the instance jitter.
pub fn object_bank(object: &ObjectSpec, seed: u64) -> ModeBank {
    mode_bank(object.material, object.size_scale(), seed)
}
