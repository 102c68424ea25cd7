use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::{max_itd, woodworth_itd, BinauralClip};
use crate::error::{Error, Result};

/// Analysis window after the onset, seconds. Ends before the earliest
/// reverberant echo (29.7 ms) so only the direct path is correlated.
pub const ITD_WINDOW: f64 = 0.025;
/// Onset threshold relative to the clip peak (−60 dB).
pub const ONSET_LEVEL: f64 = 1e-3;
/// Largest lag considered, seconds.
pub const MAX_LAG: f64 = 0.8e-3;
const PRE_ROLL: f64 = 0.002;
const TAPER: f64 = 0.005;

/// First sample where either channel reaches −60 dB of the clip peak.
pub fn onset(clip: &BinauralClip) -> Option<usize> {
    let peak = clip.peak();
    if peak <= 0.0 {
        return None;
    }
    let th = peak * ONSET_LEVEL;
    clip.left.iter().zip(&clip.right).position(|(l, r)| l.abs().max(r.abs()) >= th)
}

/// GCC-PHAT cross-correlation of `b` against `a`; index `k` holds lag `k`
/// for `k < n/2` and `k - n` above. A peak at positive lag means `b` lags.
pub fn gcc_phat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = (a.len().max(b.len()) * 2).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let load = |x: &[f64]| {
        let mut v: Vec<Complex<f64>> = x.iter().map(|&s| Complex::new(s, 0.0)).collect();
        v.resize(n, Complex::new(0.0, 0.0));
        v
    };
    let mut fa = load(a);
    let mut fb = load(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut cross: Vec<Complex<f64>> = fb.iter().zip(&fa).map(|(y, x)| y * x.conj()).collect();
    let top = cross.iter().map(|c| c.norm()).fold(0.0, f64::max);
    // small regularizer keeps empty bins from contributing phase noise
    let eps = top * 1e-6;
    for c in &mut cross {
        *c /= c.norm() + eps;
    }
    inv.process(&mut cross);
    cross.iter().map(|c| c.re / n as f64).collect()
}

/// Interaural time difference in seconds, positive when the right channel
/// lags. Uses GCC-PHAT over the first 25 ms after onset with parabolic
/// peak interpolation, clamped to ±0.8 ms.
pub fn estimate_itd(clip: &BinauralClip) -> Result<f64> {
    let fs = clip.sample_rate as f64;
    let on = onset(clip).ok_or(Error::SilentClip)?;
    let start = on.saturating_sub((PRE_ROLL * fs) as usize);
    let end = (on + (ITD_WINDOW * fs) as usize).min(clip.len());
    let (l, r) = (taper(&clip.left[start..end]), taper(&clip.right[start..end]));
    let cc = gcc_phat(&l, &r);
    let n = cc.len() as i64;
    let max_lag = (MAX_LAG * fs).ceil() as i64;
    let at = |lag: i64| cc[lag.rem_euclid(n) as usize];
    let best = (-max_lag..=max_lag).max_by(|&a, &b| at(a).total_cmp(&at(b))).unwrap();
    let (y0, y1, y2) = (at(best - 1), at(best), at(best + 1));
    let denom = y0 - 2.0 * y1 + y2;
    let frac = if denom.abs() > 1e-15 { (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    Ok(((best as f64 + frac) / fs).clamp(-MAX_LAG, MAX_LAG))
}

/// Half-Hann fade over the last 5 ms; a hard cut would correlate at lag 0.
fn taper(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = (TAPER * 44_100.0) as usize;
    let m = m.min(n / 2).max(1);
    x.iter()
        .enumerate()
        .map(|(i, v)| {
            let k = n - i;
            if k <= m {
                v * 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / m as f64).cos())
            } else {
                *v
            }
        })
        .collect()
}

/// Azimuth in degrees (left positive) whose Woodworth ITD equals `itd`,
/// by bisection to 0.01°. Sources are assumed to be in front.
pub fn bearing_from_itd(itd: f64) -> Result<f64> {
    let limit = max_itd();
    // allow rounding in quoted delays, e.g. 0.6559 ms for 90°
    if !itd.is_finite() || itd.abs() > limit * (1.0 + 1e-3) {
        return Err(Error::ItdOutOfRange(itd));
    }
    let target = itd.clamp(-limit, limit);
    let (mut lo, mut hi) = (-90.0f64, 90.0f64);
    while hi - lo > 0.005 {
        let mid = 0.5 * (lo + hi);
        if woodworth_itd(mid.to_radians()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::{mode_bank, spatialize, synthesize_modes, SAMPLE_RATE};
    use crate::geom::Vec3;
    use crate::world::{Material, Pose, EYE_HEIGHT};

    fn impact() -> Vec<f64> {
        synthesize_modes(&mode_bank(Material::WoodHard, 1.0, 0), 0.5, SAMPLE_RATE)
    }

    fn clip(l: Vec<f64>, r: Vec<f64>) -> BinauralClip {
        BinauralClip { left: l, right: r, sample_rate: SAMPLE_RATE }
    }

    #[test]
    fn identical_channels_give_zero() {
        let x = impact();
        assert!(estimate_itd(&clip(x.clone(), x)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constructed_delay() {
        let x = impact();
        let mut r = vec![0.0; 20];
        r.extend_from_slice(&x[..x.len() - 20]);
        let itd = estimate_itd(&clip(x, r)).unwrap();
        assert!((itd - 20.0 / 44100.0).abs() < 0.1 / 44100.0, "{itd}");
    }

    #[test]
    fn synthesized_sixty_degrees() {
        let x = impact();
        let t = 60f64.to_radians();
        let src = Vec3::new(2.0 * t.cos(), 2.0 * t.sin(), EYE_HEIGHT);
        let (l, r) = spatialize(&x, src, &Pose::new(Vec3::ZERO, 0.0, 0.0), 1.0, SAMPLE_RATE);
        let itd = estimate_itd(&clip(l, r)).unwrap();
        assert!((itd - woodworth_itd(t)).abs() * 44100.0 <= 1.0);
    }

    #[test]
    fn silent_clip_errors() {
        assert!(matches!(estimate_itd(&BinauralClip::silent(0.5)), Err(Error::SilentClip)));
    }

    #[test]
    fn bearing_inversion() {
        assert!(bearing_from_itd(0.0).unwrap().abs() < 0.01);
        assert!((bearing_from_itd(0.6559e-3).unwrap() - 90.0).abs() < 0.1);
        assert!((bearing_from_itd(-woodworth_itd(0.5)).unwrap() + 0.5f64.to_degrees()).abs() < 0.01);
        assert!(matches!(bearing_from_itd(1e-3), Err(Error::ItdOutOfRange(_))));
    }
}
