use serde::{Deserialize, Serialize};

use super::classify::{classify_sound, CategoryRanking, ExemplarLibrary};
use super::distance::{default_calibration, estimate_distance_with};
use super::itd::{bearing_from_itd, estimate_itd};
use crate::audio::{room_acoustics, BinauralClip, RoomAcoustics};
use crate::error::Result;
use crate::world::{ObjectCategory, Pose, RoomVariant};

/// Typical height of the ears above a fallen object, used to project the
/// slant range onto the floor.
pub const EAR_DROP: f64 = 0.7;
/// Range cap when the room size is unknown.
pub const DEFAULT_MAX_RANGE: f64 = 8.5;

/// Where and what the agent believes the fallen object is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalEstimate {
    /// World xy.
    pub position: (f64, f64),
    /// Degrees relative to the heading, left positive.
    pub bearing: f64,
    /// Horizontal distance in meters.
    pub distance: f64,
    pub category_ranking: CategoryRanking,
}

impl GoalEstimate {
    /// 0-based rank of `category`.
    pub fn rank_of(&self, category: ObjectCategory) -> Option<usize> {
        self.category_ranking.iter().position(|(c, _)| *c == category)
    }

    pub fn in_top(&self, category: ObjectCategory, k: usize) -> bool {
        self.rank_of(category).is_some_and(|r| r < k)
    }
}

/// World xy at `distance` along `bearing` (degrees, left positive) from
/// the agent's heading.
pub fn goal_position(pose: &Pose, bearing: f64, distance: f64) -> (f64, f64) {
    let a = (pose.yaw + bearing).to_radians();
    (pose.position.x + distance * a.cos(), pose.position.y + distance * a.sin())
}

fn horizontal(slant: f64) -> f64 {
    (slant * slant - EAR_DROP * EAR_DROP).max(0.09).sqrt()
}

fn audio_goal_capped(
    clip: &BinauralClip,
    pose: &Pose,
    acoustics: &RoomAcoustics,
    library: &ExemplarLibrary,
    max_range: f64,
) -> Result<GoalEstimate> {
    let bearing = bearing_from_itd(estimate_itd(clip)?)?;
    let distance = horizontal(estimate_distance_with(clip, acoustics, default_calibration(), max_range)?);
    let category_ranking = classify_sound(clip, library)?;
    Ok(GoalEstimate { position: goal_position(pose, bearing, distance), bearing, distance, category_ranking })
}

/// Goal from the first observation's audio.
pub fn audio_goal(
    clip: &BinauralClip,
    pose: &Pose,
    acoustics: &RoomAcoustics,
    library: &ExemplarLibrary,
) -> Result<GoalEstimate> {
    audio_goal_capped(clip, pose, acoustics, library, DEFAULT_MAX_RANGE)
}

/// Like [`audio_goal`] with the distance capped at the room diagonal.
pub fn audio_goal_in_room(
    clip: &BinauralClip,
    pose: &Pose,
    room: &RoomVariant,
    library: &ExemplarLibrary,
) -> Result<GoalEstimate> {
    audio_goal_capped(clip, pose, &room_acoustics(room), library, room.diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    #[test]
    fn straight_ahead() {
        let p = Pose::new(Vec3::ZERO, 0.0, 0.0);
        assert!(close(goal_position(&p, 0.0, 2.0), (2.0, 0.0)));
    }

    #[test]
    fn right_is_negative_y() {
        let p = Pose::new(Vec3::ZERO, 0.0, 0.0);
        assert!(close(goal_position(&p, -90.0, 1.0), (0.0, -1.0)));
        let q = Pose::new(Vec3::new(1.0, 1.0, 0.0), 90.0, 0.0);
        assert!(close(goal_position(&q, 90.0, 2.0), (-1.0, 1.0)));
    }

    #[test]
    fn horizontal_projection_is_floored() {
        assert!((horizontal(0.2) - 0.3).abs() < 1e-12);
        assert!((horizontal(2.5) - (2.5f64 * 2.5 - 0.49).sqrt()).abs() < 1e-12);
    }
}
