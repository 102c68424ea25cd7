//! Schroeder reverberator: four parallel feedback combs into two series
//! allpasses.

pub const COMB_DELAYS_MS: [f64; 4] = [29.7, 37.1, 41.1, 43.7];
pub const ALLPASS_DELAYS_MS: [f64; 2] = [5.0, 1.7];
pub const ALLPASS_GAIN: f64 = 0.7;
/// Extra comb delay on the right channel so the ears decorrelate.
pub const STEREO_SPREAD: usize = 23;
const OUTPUT_SCALE: f64 = 0.25;

fn samples(ms: f64, sr: u32) -> usize {
    (ms * 1e-3 * sr as f64).round() as usize
}

/// Feedback gain giving a 60 dB decay after `rt60` seconds for a loop of
/// `delay` samples.
pub fn comb_gain(delay: usize, rt60: f64, sr: u32) -> f64 {
    10f64.powf(-3.0 * delay as f64 / (rt60 * sr as f64))
}

/// Reverberate `input`; the output has the same length. `channel` 0 is
/// left, 1 is right.
pub fn schroeder(input: &[f64], rt60: f64, sr: u32, channel: usize) -> Vec<f64> {
    let n = input.len();
    let mut sum = vec![0.0; n];
    for ms in COMB_DELAYS_MS {
        let d = samples(ms, sr) + channel * STEREO_SPREAD;
        let g = comb_gain(d, rt60, sr);
        // y[i] = x[i - d] + g·y[i - d]
        let mut y = vec![0.0; n];
        for i in d..n {
            y[i] = input[i - d] + g * y[i - d];
        }
        for (s, v) in sum.iter_mut().zip(&y) {
            *s += v;
        }
    }
    let mut x = sum;
    for ms in ALLPASS_DELAYS_MS {
        let d = samples(ms, sr);
        let g = ALLPASS_GAIN;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let xd = if i >= d { x[i - d] } else { 0.0 };
            let yd = if i >= d { y[i - d] } else { 0.0 };
            y[i] = -g * x[i] + xd + g * yd;
        }
        x = y;
    }
    for v in &mut x {
        *v *= OUTPUT_SCALE;
    }
    x
}

/// RT60 of an impulse response by Schroeder backward integration, from a
/// line fit to the −5 to −25 dB part of the decay curve.
pub fn measure_rt60(ir: &[f64], sr: u32) -> Option<f64> {
    let mut edc = vec![0.0; ir.len()];
    let mut acc = 0.0;
    for i in (0..ir.len()).rev() {
        acc += ir[i] * ir[i];
        edc[i] = acc;
    }
    if acc <= 0.0 {
        return None;
    }
    let db: Vec<f64> = edc.iter().map(|&e| 10.0 * (e / acc).max(1e-30).log10()).collect();
    let (mut sx, mut sy, mut sxx, mut sxy, mut k) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &d) in db.iter().enumerate() {
        if (-25.0..=-5.0).contains(&d) {
            let t = i as f64 / sr as f64;
            sx += t;
            sy += d;
            sxx += t * t;
            sxy += t * d;
            k += 1.0;
        }
    }
    if k < 2.0 {
        return None;
    }
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    (slope < 0.0).then(|| -60.0 / slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::SAMPLE_RATE;

    #[test]
    fn measured_rt60_tracks_target() {
        for rt in [0.2, 0.5, 1.0, 1.5] {
            let mut x = vec![0.0; (rt * 2.0 * SAMPLE_RATE as f64) as usize + 4410];
            x[0] = 1.0;
            let ir = schroeder(&x, rt, SAMPLE_RATE, 0);
            let m = measure_rt60(&ir, SAMPLE_RATE).unwrap();
            assert!((m / rt - 1.0).abs() <= 0.15, "target {rt} measured {m}");
        }
    }

    #[test]
    fn channels_differ() {
        let mut x = vec![0.0; 8000];
        x[0] = 1.0;
        assert_ne!(schroeder(&x, 0.5, SAMPLE_RATE, 0), schroeder(&x, 0.5, SAMPLE_RATE, 1));
    }
}
