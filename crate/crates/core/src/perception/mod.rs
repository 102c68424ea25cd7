//! Audio and visual perception: mel features, binaural localization,
//! distance, exemplar-based sound classification and segmentation.

mod classify;
mod distance;
mod goal;
mod itd;
mod mel;
mod segment;

pub use classify::{
    classify_mono, classify_sound, exemplar_audio, signature, CategoryRanking, Exemplar, ExemplarLibrary,
    EXEMPLARS_PER_CATEGORY, REFERENCE_SPEED,
};
pub use distance::{
    calibrate_distance, calibration_set, default_calibration, distance_feature, estimate_distance,
    estimate_distance_with, fit_calibration, measure_drr, model_drr_db, CalibrationSample, DistanceCalibration,
    MIN_ESTIMATE,
};
pub use goal::{audio_goal, audio_goal_in_room, goal_position, GoalEstimate, DEFAULT_MAX_RANGE, EAR_DROP};
pub use itd::{bearing_from_itd, estimate_itd, gcc_phat, onset, ITD_WINDOW, MAX_LAG};
pub use mel::{log_mel, MelAnalyzer, MelFilterbank, Spectrogram, FLOOR_DB, N_MELS};
pub use segment::{segment, InstanceMask, SegNoiseModel};
