use std::f64::consts::{FRAC_PI_2, PI};

use crate::geom::Vec3;
use crate::world::{Pose, EYE_HEIGHT};

pub const HEAD_RADIUS: f64 = 0.0875;
pub const SPEED_OF_SOUND: f64 = 343.0;
pub const MIN_DISTANCE: f64 = 0.2;
pub const MAX_ILD_DB: f64 = 6.0;
/// Half-width of the windowed-sinc fractional delay kernel.
const SINC_HALF: i64 = 16;

/// Ear position of a listener standing at `pose`.
pub fn ear_center(pose: &Pose) -> Vec3 {
    Vec3::new(pose.position.x, pose.position.y, EYE_HEIGHT)
}

/// Azimuth of `source` relative to the listener's heading, radians,
/// counter-clockwise positive (left), in `(-π, π]`.
pub fn azimuth(source: Vec3, listener: &Pose) -> f64 {
    let c = ear_center(listener);
    let world = (source.y - c.y).atan2(source.x - c.x);
    let rel = world - listener.yaw.to_radians();
    let mut a = rel.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Fold a rear azimuth onto the front hemisphere (same lateral angle).
pub fn lateral_angle(theta: f64) -> f64 {
    if theta > FRAC_PI_2 {
        PI - theta
    } else if theta < -FRAC_PI_2 {
        -PI - theta
    } else {
        theta
    }
}

/// Woodworth ITD in seconds; positive when the right ear hears later,
/// i.e. for sources on the left.
pub fn woodworth_itd(theta: f64) -> f64 {
    let l = lateral_angle(theta);
    HEAD_RADIUS / SPEED_OF_SOUND * (l + l.sin())
}

/// Largest physically possible ITD magnitude.
pub fn max_itd() -> f64 {
    woodworth_itd(FRAC_PI_2)
}

/// Broadband level drop at the far ear, dB.
pub fn ild_db(theta: f64) -> f64 {
    (MAX_ILD_DB * theta.sin().abs()).min(MAX_ILD_DB)
}

pub fn distance_gain(direct_gain_ref: f64, r: f64) -> f64 {
    direct_gain_ref / r.max(MIN_DISTANCE)
}

fn blackman(x: f64) -> f64 {
    // x in [-1, 1]
    let a = PI * (x + 1.0);
    0.42 - 0.5 * a.cos() + 0.08 * (2.0 * a).cos()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Add `gain · signal` delayed by `delay` samples (fractional) into `out`,
/// starting at sample `offset`. Samples past the end of `out` are dropped.
pub fn add_delayed(out: &mut [f64], signal: &[f64], offset: f64, gain: f64) {
    let whole = offset.floor();
    let frac = offset - whole;
    let base = whole as i64;
    if frac < 1e-9 {
        for (i, &s) in signal.iter().enumerate() {
            let j = base + i as i64;
            if j >= 0 && (j as usize) < out.len() {
                out[j as usize] += gain * s;
            }
        }
        return;
    }
    // y[n] = Σ_k x[k] h(n - k - offset); kernel taps at n - k ∈ whole + [-H+1, H]
    let taps: Vec<(i64, f64)> = (-SINC_HALF + 1..=SINC_HALF)
        .map(|m| {
            let x = m as f64 - frac;
            (m, gain * sinc(x) * blackman(x / (SINC_HALF as f64 + 1.0)))
        })
        .collect();
    for (i, &s) in signal.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let n0 = base + i as i64;
        for &(m, h) in &taps {
            let j = n0 + m;
            if j >= 0 && (j as usize) < out.len() {
                out[j as usize] += s * h;
            }
        }
    }
}

/// Direct-path stereo rendering of a mono source.
///
/// Both ears get the propagation delay `r / c` and the `1/r` gain; the far
/// ear is further delayed by the Woodworth ITD and attenuated by the ILD.
/// Returns `(left, right)` of equal length.
pub fn spatialize(
    mono: &[f64],
    source: Vec3,
    listener: &Pose,
    direct_gain_ref: f64,
    sr: u32,
) -> (Vec<f64>, Vec<f64>) {
    let r = (source - ear_center(listener)).norm();
    let len = mono.len()
        + ((r / SPEED_OF_SOUND + max_itd()) * sr as f64).ceil() as usize
        + SINC_HALF as usize
        + 2;
    let mut left = vec![0.0; len];
    let mut right = vec![0.0; len];
    spatialize_into(&mut left, &mut right, mono, source, listener, direct_gain_ref, sr, 0.0);
    (left, right)
}

/// Like [`spatialize`], but accumulates into existing buffers with the
/// source starting `start` seconds into them.
#[allow(clippy::too_many_arguments)]
pub fn spatialize_into(
    left: &mut [f64],
    right: &mut [f64],
    mono: &[f64],
    source: Vec3,
    listener: &Pose,
    gain_ref: f64,
    sr: u32,
    start: f64,
) {
    let r = (source - ear_center(listener)).norm();
    let theta = azimuth(source, listener);
    let itd = woodworth_itd(theta);
    let fs = sr as f64;
    let base = (start + r / SPEED_OF_SOUND) * fs;
    let g = distance_gain(gain_ref, r);
    let far = g * 10f64.powf(-ild_db(theta) / 20.0);
    let (dl, dr, gl, gr) = if itd >= 0.0 {
        (base, base + itd * fs, g, far)
    } else {
        (base - itd * fs, base, far, g)
    };
    add_delayed(left, mono, dl, gl);
    add_delayed(right, mono, dr, gr);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::SAMPLE_RATE;

    fn listener() -> Pose {
        Pose::new(Vec3::new(0.0, 0.0, 0.0), 0.0, 0.0)
    }

    fn at(theta_deg: f64, r: f64) -> Vec3 {
        let t = theta_deg.to_radians();
        Vec3::new(r * t.cos(), r * t.sin(), EYE_HEIGHT)
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    fn noise(n: usize) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn woodworth_at_ninety_degrees() {
        let itd = woodworth_itd(FRAC_PI_2);
        assert!((itd * 1e3 - 0.6559).abs() < 1e-4);
        assert_eq!(woodworth_itd(0.0), 0.0);
    }

    #[test]
    fn frontal_source_is_symmetric() {
        let x = noise(4410);
        let (l, r) = spatialize(&x, at(0.0, 2.0), &listener(), 1.0, SAMPLE_RATE);
        assert_eq!(l, r);
    }

    #[test]
    fn inverse_distance_law() {
        // compare over equal-length windows holding the whole signal
        let bank = crate::audio::mode_bank(crate::world::Material::Ceramic, 1.0, 0);
        let x = crate::audio::synthesize_modes(&bank, 1.0, SAMPLE_RATE);
        let window = |v: Vec<f64>| -> Vec<f64> { v.into_iter().chain(std::iter::repeat(0.0)).take(x.len() + 2000).collect() };
        let (l1, _) = spatialize(&x, at(0.0, 1.0), &listener(), 1.0, SAMPLE_RATE);
        let (l2, _) = spatialize(&x, at(0.0, 2.0), &listener(), 1.0, SAMPLE_RATE);
        assert!((rms(&window(l1)) / rms(&window(l2)) - 2.0).abs() < 0.02);
    }

    #[test]
    fn azimuth_convention() {
        let p = listener();
        assert!((azimuth(Vec3::new(0.0, 1.0, 1.2), &p) - FRAC_PI_2).abs() < 1e-12);
        assert!((azimuth(Vec3::new(0.0, -1.0, 1.2), &p) + FRAC_PI_2).abs() < 1e-12);
        let q = Pose::new(Vec3::ZERO, 90.0, 0.0);
        assert!(azimuth(Vec3::new(1.0, 1.0, 1.2), &q) < 0.0);
    }

    #[test]
    fn fractional_delay_of_impulse_peaks_between_samples() {
        let mut out = vec![0.0; 64];
        add_delayed(&mut out, &[1.0], 20.5, 1.0);
        assert!((out[20] - out[21]).abs() < 1e-12);
        assert!(out[20] > 0.6);
    }
}
