use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub const N_MELS: usize = 64;
pub const MEL_FMIN: f64 = 60.0;
pub const MEL_FMAX: f64 = 16_000.0;
pub const FLOOR_DB: f64 = -80.0;
pub const WINDOW_S: f64 = 0.025;
pub const HOP_S: f64 = 0.010;
const N_FFT: usize = 2048;

/// Log-mel frames, each `N_MELS` values in dB (≥ −80).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub frames: Vec<[f64; N_MELS]>,
    pub sample_rate: u32,
}

impl Spectrogram {
    /// Average of the frames within 40 dB of the loudest frame.
    pub fn active_mean(&self) -> [f64; N_MELS] {
        let mut out = [FLOOR_DB; N_MELS];
        let energy: Vec<f64> = self.frames.iter().map(|f| f.iter().cloned().fold(FLOOR_DB, f64::max)).collect();
        let top = energy.iter().cloned().fold(FLOOR_DB, f64::max);
        if top <= FLOOR_DB {
            return out;
        }
        let mut n = 0.0;
        let mut acc = [0.0; N_MELS];
        for (f, &e) in self.frames.iter().zip(&energy) {
            if e >= top - 40.0 {
                for (a, v) in acc.iter_mut().zip(f) {
                    *a += v;
                }
                n += 1.0;
            }
        }
        for (o, a) in out.iter_mut().zip(acc) {
            *o = a / n;
        }
        out
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters over FFT bins, peak weight 1.
pub struct MelFilterbank {
    /// Per band: first bin and weights.
    bands: Vec<(usize, Vec<f64>)>,
    centers: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(sr: u32, n_fft: usize) -> MelFilterbank {
        let (m0, m1) = (hz_to_mel(MEL_FMIN), hz_to_mel(MEL_FMAX));
        let pts: Vec<f64> = (0..N_MELS + 2)
            .map(|i| mel_to_hz(m0 + (m1 - m0) * i as f64 / (N_MELS + 1) as f64))
            .collect();
        let bin_hz = sr as f64 / n_fft as f64;
        let bands = (0..N_MELS)
            .map(|b| {
                let (lo, c, hi) = (pts[b], pts[b + 1], pts[b + 2]);
                let first = (lo / bin_hz).ceil() as usize;
                let last = ((hi / bin_hz).floor() as usize).min(n_fft / 2);
                let w = (first..=last)
                    .map(|k| {
                        let f = k as f64 * bin_hz;
                        if f <= c {
                            (f - lo) / (c - lo)
                        } else {
                            (hi - f) / (hi - c)
                        }
                        .max(0.0)
                    })
                    .collect();
                (first, w)
            })
            .collect();
        MelFilterbank { bands, centers: pts[1..=N_MELS].to_vec() }
    }

    pub fn center_hz(&self, band: usize) -> f64 {
        self.centers[band]
    }

    fn apply(&self, mag: &[f64], out: &mut [f64; N_MELS]) {
        for (o, (first, w)) in out.iter_mut().zip(&self.bands) {
            *o = w.iter().zip(&mag[*first..]).map(|(a, b)| a * b).sum();
        }
    }
}

/// Reusable STFT and filterbank state for one sample rate.
pub struct MelAnalyzer {
    sr: u32,
    win: Vec<f64>,
    hop: usize,
    fft: Arc<dyn Fft<f64>>,
    bank: MelFilterbank,
    norm: f64,
}

impl MelAnalyzer {
    pub fn new(sr: u32) -> MelAnalyzer {
        let wl = (WINDOW_S * sr as f64).round() as usize;
        let win: Vec<f64> = (0..wl)
            .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / wl as f64).cos())
            .collect();
        let norm = 2.0 / win.iter().sum::<f64>();
        MelAnalyzer {
            sr,
            hop: (HOP_S * sr as f64).round() as usize,
            fft: FftPlanner::new().plan_fft_forward(N_FFT),
            bank: MelFilterbank::new(sr, N_FFT),
            win,
            norm,
        }
    }

    pub fn window_len(&self) -> usize {
        self.win.len()
    }

    pub fn hop_len(&self) -> usize {
        self.hop
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.bank
    }

    /// Magnitudes are scaled so a full-scale sinusoid peaks near 0 dB.
    pub fn log_mel(&self, x: &[f64]) -> Spectrogram {
        let wl = self.win.len();
        let n_frames = if x.len() >= wl { (x.len() - wl) / self.hop + 1 } else { 0 };
        let mut frames = Vec::with_capacity(n_frames);
        let mut buf = vec![Complex::new(0.0, 0.0); N_FFT];
        let mut mag = vec![0.0; N_FFT / 2 + 1];
        for f in 0..n_frames {
            let seg = &x[f * self.hop..f * self.hop + wl];
            for (i, b) in buf.iter_mut().enumerate() {
                *b = Complex::new(if i < wl { seg[i] * self.win[i] } else { 0.0 }, 0.0);
            }
            self.fft.process(&mut buf);
            for (m, b) in mag.iter_mut().zip(&buf) {
                *m = b.norm() * self.norm;
            }
            let mut out = [0.0; N_MELS];
            self.bank.apply(&mag, &mut out);
            for v in &mut out {
                *v = if *v > 0.0 { (20.0 * v.log10()).max(FLOOR_DB) } else { FLOOR_DB };
            }
            frames.push(out);
        }
        Spectrogram { frames, sample_rate: self.sr }
    }
}

/// Log-mel spectrogram of a mono signal.
pub fn log_mel(x: &[f64], sr: u32) -> Spectrogram {
    MelAnalyzer::new(sr).log_mel(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::SAMPLE_RATE;

    fn tone(f: f64, a: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a * (2.0 * std::f64::consts::PI * f * i as f64 / 44100.0).sin()).collect()
    }

    #[test]
    fn frame_count_and_silence() {
        let s = log_mel(&vec![0.0; 44100], SAMPLE_RATE);
        let a = MelAnalyzer::new(SAMPLE_RATE);
        assert_eq!(s.frames.len(), (44100 - a.window_len()) / a.hop_len() + 1);
        assert!(s.frames.iter().flatten().all(|&v| v == FLOOR_DB));
    }

    #[test]
    fn tone_excites_one_band() {
        let s = log_mel(&tone(1000.0, 0.5, 8820), SAMPLE_RATE);
        let f = s.frames[5];
        let k = (0..N_MELS).max_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap();
        let bank = MelFilterbank::new(SAMPLE_RATE, 2048);
        // the winning band is the one centered nearest 1 kHz
        let nearest = (0..N_MELS)
            .min_by(|&a, &b| (bank.center_hz(a) - 1000.0).abs().total_cmp(&(bank.center_hz(b) - 1000.0).abs()))
            .unwrap();
        assert_eq!(k, nearest);
        assert!(f[k] - f[k - 1] > 10.0 && f[k] - f[k + 1] > 10.0, "{:?}", &f[k - 1..=k + 1]);
    }

    #[test]
    fn doubling_amplitude_adds_six_db() {
        let a = log_mel(&tone(700.0, 0.1, 8820), SAMPLE_RATE);
        let b = log_mel(&tone(700.0, 0.2, 8820), SAMPLE_RATE);
        for (fa, fb) in a.frames.iter().zip(&b.frames) {
            for (x, y) in fa.iter().zip(fb) {
                if *x > FLOOR_DB + 7.0 {
                    assert!((y - x - 6.0206).abs() < 1e-3);
                }
            }
        }
    }
}
