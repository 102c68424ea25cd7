use std::path::Path;

use super::{BinauralClip, SAMPLE_RATE};
use crate::error::{Error, Result};

const FULL_SCALE: f64 = 32767.0;

/// Write a 16-bit PCM stereo WAV file.
pub fn write_wav(clip: &BinauralClip, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let spec = hound::WavSpec {
        channels: 2,
        sample_rate: clip.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec)?;
    let q = |x: f64| (x.clamp(-1.0, 1.0) * FULL_SCALE).round() as i16;
    for (l, r) in clip.left.iter().zip(&clip.right) {
        w.write_sample(q(*l))?;
        w.write_sample(q(*r))?;
    }
    w.finalize()?;
    Ok(())
}

/// Read a 16-bit stereo 44.1 kHz WAV file.
pub fn read_wav(path: &Path) -> Result<BinauralClip> {
    let mut r = hound::WavReader::open(path)?;
    let spec = r.spec();
    if spec.sample_rate != SAMPLE_RATE {
        return Err(Error::SampleRate(spec.sample_rate));
    }
    if spec.channels != 2 || spec.bits_per_sample != 16 {
        return Err(Error::InvalidArgument(format!(
            "expected 16-bit stereo, got {} channels at {} bits",
            spec.channels, spec.bits_per_sample
        )));
    }
    let data: Vec<i16> = r.samples::<i16>().collect::<std::result::Result<_, _>>()?;
    let left = data.iter().step_by(2).map(|&s| s as f64 / FULL_SCALE).collect();
    let right = data.iter().skip(1).step_by(2).map(|&s| s as f64 / FULL_SCALE).collect();
    Ok(BinauralClip { left, right, sample_rate: spec.sample_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clip(n: usize) -> BinauralClip {
        BinauralClip {
            left: (0..n).map(|i| (i as f64 * 0.01).sin() * 0.9).collect(),
            right: (0..n).map(|i| (i as f64 * 0.013).cos() * 0.5).collect(),
            sample_rate: SAMPLE_RATE,
        }
    }

    #[test]
    fn round_trip_within_one_lsb() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.wav");
        let c = clip(22050);
        write_wav(&c, &p).unwrap();
        let d = read_wav(&p).unwrap();
        assert_eq!(d.left.len(), c.left.len());
        for (a, b) in c.left.iter().chain(&c.right).zip(d.left.iter().chain(&d.right)) {
            assert!((a - b).abs() <= 2f64.powi(-15));
        }
    }

    #[test]
    fn header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.wav");
        write_wav(&clip(44100), &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(&bytes[0..4], b"RIFF");
        assert_eq!(&bytes[8..12], b"WAVE");
        assert_eq!(u16::from_le_bytes([bytes[22], bytes[23]]), 2);
        assert_eq!(u32::from_le_bytes([bytes[24], bytes[25], bytes[26], bytes[27]]), 44100);
        let pos = bytes.windows(4).position(|w| w == b"data").unwrap();
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap());
        assert_eq!(size, 176_400);
    }

    #[test]
    fn rejects_other_rates() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.wav");
        let mut c = clip(100);
        c.sample_rate = 48000;
        write_wav(&c, &p).unwrap();
        assert!(matches!(read_wav(&p), Err(Error::SampleRate(48000))));
    }
}
