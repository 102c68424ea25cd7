//! Source distance from the direct-to-reverberant ratio.
//!
//! The direct sound is identical in both ears up to the interaural delay
//! and level difference, while the reverberant part differs between
//! channels. Cancelling the direct path leaves only reverberation. Its
//! energy is compared against a prediction made by running the first
//! 25 ms at the near ear, which is still free of reverberation, through the
//! room's reverberator. Over the following 29 ms the wet signal depends
//! only on that opening segment, so the ratio is an exact DRR reading that
//! does not depend on the object, the tail length or trimming. A
//! two-parameter fit maps it onto the renderer's distance law.

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::itd::{estimate_itd, onset};
use crate::audio::{
    add_delayed, object_bank, render_episode_audio, reverb, room_acoustics, wet_mix, BinauralClip, RoomAcoustics,
};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::physics::ImpactEvent;
use crate::rng;
use crate::world::{
    build_room_variant, static_occupancy, ObjectCategory, ObjectSpec, Pose, RoomType, CELL_SIZE, EYE_HEIGHT,
    SURFACE_PAIRS,
};

pub const CALIBRATION_SCHEMA_VERSION: u32 = 1;
pub const MIN_ESTIMATE: f64 = 0.3;
/// Reverberation-free opening at the near ear (shortest comb is 29.7 ms).
const DIRECT_WINDOW: f64 = 0.025;
/// Wet output at time t only depends on input before t minus this lead.
const REVERB_LEAD: f64 = 0.0295;
const PRE_ROLL: f64 = 0.002;
const DRR_RANGE: (f64, f64) = (-40.0, 60.0);

/// Fitted map `feature ≈ a + b · h(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceCalibration {
    pub schema_version: u32,
    pub a: f64,
    pub b: f64,
    pub n_samples: usize,
    pub seed: u64,
}

static CALIBRATION_JSON: &str = include_str!("../../data/distance_calibration.json");

/// The calibration shipped with the crate.
pub fn default_calibration() -> &'static DistanceCalibration {
    static CAL: OnceLock<DistanceCalibration> = OnceLock::new();
    CAL.get_or_init(|| {
        let c: DistanceCalibration = serde_json::from_str(CALIBRATION_JSON).expect("shipped calibration is valid");
        assert_eq!(c.schema_version, CALIBRATION_SCHEMA_VERSION);
        c
    })
}

/// Renderer distance law in dB: direct gain over wet gain at range `r`.
pub fn model_drr_db(r: f64) -> f64 {
    let m = wet_mix(r);
    20.0 * ((1.0 - m) / (m * r.max(0.2))).log10()
}

fn delayed(x: &[f64], lag: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    add_delayed(&mut out, x, lag, 1.0);
    out
}

/// Measured DRR in dB for a clip rendered with reverberation time `rt60`.
pub fn measure_drr(clip: &BinauralClip, rt60: f64) -> Result<f64> {
    let fs = clip.sample_rate as f64;
    let on = onset(clip).ok_or(Error::SilentClip)?;
    let itd = estimate_itd(clip)?;
    let (near, far, cn, cf) = if itd >= 0.0 {
        (&clip.left, &clip.right, 0, 1)
    } else {
        (&clip.right, &clip.left, 1, 0)
    };
    let start = on.saturating_sub((PRE_ROLL * fs) as usize);
    let direct_end = (on + (DIRECT_WINDOW * fs) as usize).min(clip.len());
    let end = (direct_end + (REVERB_LEAD * fs) as usize).min(clip.len());
    let (near, far) = (&near[start..end], &far[start..end]);
    let (n, nd) = (end - start, direct_end - start);

    // far ≈ g · near delayed by the ITD on the direct-only window
    let fit = |lag: f64| {
        let nd_lag = delayed(&near[..nd], lag, nd);
        let (mut fx, mut xx) = (0.0, 0.0);
        for i in 0..nd {
            fx += far[i] * nd_lag[i];
            xx += nd_lag[i] * nd_lag[i];
        }
        let g = if xx > 0.0 { fx / xx } else { 0.0 };
        let res: f64 = (0..nd).map(|i| (far[i] - g * nd_lag[i]).powi(2)).sum();
        (res, g)
    };
    let base = itd.abs() * fs;
    let (mut lag, mut best) = (base, fit(base));
    for k in -10..=10 {
        let l = base + k as f64 * 0.05;
        let f = fit(l);
        if f.0 < best.0 {
            (lag, best) = (l, f);
        }
    }
    let g = best.1;
    let residual = |n_sig: &[f64], f_sig: &[f64]| -> f64 {
        let d = delayed(n_sig, lag, n);
        f_sig.iter().zip(&d).map(|(f, x)| (f - g * x).powi(2)).sum()
    };
    let measured = residual(near, far);
    let opening = &near[..nd];
    let mut padded = opening.to_vec();
    padded.resize(n, 0.0);
    let pn = reverb::schroeder(&padded, rt60, clip.sample_rate, cn);
    let pf = reverb::schroeder(&padded, rt60, clip.sample_rate, cf);
    let predicted = residual(&pn, &pf);
    if predicted <= 0.0 {
        return Err(Error::SilentClip);
    }
    let drr = if measured > 0.0 { 10.0 * (predicted / measured).log10() } else { DRR_RANGE.1 };
    Ok(drr.clamp(DRR_RANGE.0, DRR_RANGE.1))
}

/// Distance feature: the measured DRR in dB.
pub fn distance_feature(clip: &BinauralClip, acoustics: &RoomAcoustics) -> Result<f64> {
    measure_drr(clip, acoustics.rt60)
}

/// Invert the model law for a feature value.
fn invert(cal: &DistanceCalibration, feature: f64) -> f64 {
    let target = (feature - cal.a) / cal.b;
    let (mut lo, mut hi) = (0.2f64, 100.0f64);
    if target >= model_drr_db(lo) {
        return lo;
    }
    if target <= model_drr_db(hi) {
        return hi;
    }
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if model_drr_db(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Distance in meters, clamped to `[0.3, max_range]`.
pub fn estimate_distance_with(
    clip: &BinauralClip,
    acoustics: &RoomAcoustics,
    cal: &DistanceCalibration,
    max_range: f64,
) -> Result<f64> {
    let f = distance_feature(clip, acoustics)?;
    Ok(invert(cal, f).clamp(MIN_ESTIMATE, max_range.max(MIN_ESTIMATE)))
}

/// Distance with the shipped calibration; capped at a generous room size.
pub fn estimate_distance(clip: &BinauralClip, acoustics: &RoomAcoustics) -> Result<f64> {
    estimate_distance_with(clip, acoustics, default_calibration(), 8.5)
}

/// One labelled calibration render.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSample {
    pub distance: f64,
    pub feature: f64,
    pub room_diagonal: f64,
    pub source: Vec3,
    pub listener: Pose,
    pub clip: BinauralClip,
    pub acoustics: RoomAcoustics,
}

/// Render `n` single impacts at random ranges in random standard rooms.
/// Sample `i` depends only on `(seed, i)`.
pub fn calibration_set(n: usize, seed: u64, offset: usize) -> Result<Vec<CalibrationSample>> {
    (offset..offset + n).map(|i| calibration_sample(seed, i as u64)).collect()
}

fn calibration_sample(seed: u64, i: u64) -> Result<CalibrationSample> {
    let mut r = rng::stream(seed, "distance-calibration", i);
    let rt = RoomType::ALL[r.gen_range(0..2)];
    let (wall, floor) = SURFACE_PAIRS[r.gen_range(0..SURFACE_PAIRS.len())];
    let room = build_room_variant(rt, r.gen_range(0..4), wall, floor, seed)?;
    let occ = static_occupancy(&room, CELL_SIZE);
    let free: Vec<_> = (0..occ.ny)
        .flat_map(|y| (0..occ.nx).map(move |x| (x, y)))
        .filter(|&c| !occ.get(c))
        .collect();
    let cat = ObjectCategory::ALL[r.gen_range(0..ObjectCategory::ALL.len())];
    let obj = ObjectSpec::sample(cat, &mut r);
    let bank = object_bank(&obj, r.gen());
    loop {
        let (lx, ly) = occ.cell_center(free[r.gen_range(0..free.len())]);
        let listener = Pose::new(Vec3::new(lx, ly, 0.0), r.gen_range(0..12) as f64 * 30.0, 0.0);
        let src = Vec3::new(
            r.gen_range(0.1..room.dims.x - 0.1),
            r.gen_range(0.1..room.dims.y - 0.1),
            r.gen_range(0.02..1.0),
        );
        let d = (src - Vec3::new(lx, ly, EYE_HEIGHT)).norm();
        if d < 0.5 {
            continue;
        }
        let ev = ImpactEvent {
            time: 0.05,
            position: src,
            normal_speed: r.gen_range(1.0..4.5),
            surface_material: floor,
            object_material: obj.material,
            object_mass: obj.mass,
            surface_mass: None,
        };
        let acoustics = room_acoustics(&room);
        let clip = render_episode_audio(&[ev], &bank, &room, &listener).clip;
        let feature = distance_feature(&clip, &acoustics)?;
        return Ok(CalibrationSample { distance: d, feature, room_diagonal: room.diagonal(), source: src, listener, clip, acoustics });
    }
}

/// Least-squares fit of `feature = a + b·h(r)`.
pub fn fit_calibration(samples: &[CalibrationSample], seed: u64) -> DistanceCalibration {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| model_drr_db(s.distance)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.feature).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    DistanceCalibration {
        schema_version: CALIBRATION_SCHEMA_VERSION,
        a: my - b * mx,
        b,
        n_samples: samples.len(),
        seed,
    }
}

/// Build the calibration from scratch: 500 renders at known ranges.
pub fn calibrate_distance(n: usize, seed: u64) -> Result<DistanceCalibration> {
    Ok(fit_calibration(&calibration_set(n, seed, 0)?, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_law_is_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let r = 0.2 + i as f64 * 0.1;
            let h = model_drr_db(r);
            assert!(h < prev);
            prev = h;
        }
    }

    #[test]
    fn inversion_round_trips() {
        let cal = DistanceCalibration { schema_version: 1, a: 3.0, b: 0.8, n_samples: 0, seed: 0 };
        for r in [0.5, 1.0, 2.5, 4.0, 7.0] {
            let f = cal.a + cal.b * model_drr_db(r);
            assert!((invert(&cal, f) - r).abs() < 1e-6);
        }
    }

    #[test]
    fn farther_source_reads_farther() {
        let room = build_room_variant(RoomType::Kitchen, 0, SURFACE_PAIRS[0].0, SURFACE_PAIRS[0].1, 1).unwrap();
        let acoustics = room_acoustics(&room);
        let obj = ObjectSpec::from_category(ObjectCategory::Cup);
        let bank = object_bank(&obj, 1);
        let listener = Pose::new(Vec3::new(room.dims.x / 2.0, 0.5, 0.0), 90.0, 0.0);
        let est = |d: f64| {
            let ev = ImpactEvent {
                time: 0.05,
                position: Vec3::new(room.dims.x / 2.0, 0.5 + d, EYE_HEIGHT),
                normal_speed: 2.0,
                surface_material: room.floor_material,
                object_material: obj.material,
                object_mass: obj.mass,
                surface_mass: None,
            };
            let clip = render_episode_audio(&[ev], &bank, &room, &listener).clip;
            estimate_distance_with(&clip, &acoustics, default_calibration(), room.diagonal()).unwrap()
        };
        let (near, far) = (est(1.0), est(4.0));
        assert!(far > near, "{near} {far}");
        assert!(far <= room.diagonal());
    }
}
