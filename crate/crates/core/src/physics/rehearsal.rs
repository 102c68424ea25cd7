use serde::{Deserialize, Serialize};

use super::DropOutcome;
use crate::geom::{Aabb, Vec3};
use crate::world::{static_occupancy, FallZone, ObjectSpec, RoomVariant, SceneGeometry, CELL_SIZE, EYE_HEIGHT, TARGET_INSTANCE};

/// Objects visible from at least this share of free cells are too easy.
pub const PLAIN_VIEW_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    OutOfZone,
    PlainView,
    NotSettled,
    /// The sampled start pose was inside furniture.
    BlockedStart,
}

impl RejectReason {
    pub const ALL: [RejectReason; 4] =
        [RejectReason::OutOfZone, RejectReason::PlainView, RejectReason::NotSettled, RejectReason::BlockedStart];

    pub fn name(self) -> &'static str {
        match self {
            RejectReason::OutOfZone => "out_of_zone",
            RejectReason::PlainView => "plain_view",
            RejectReason::NotSettled => "not_settled",
            RejectReason::BlockedStart => "blocked_start",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RehearsalVerdict {
    Keep { visibility: f64 },
    Reject(RejectReason),
}

impl RehearsalVerdict {
    pub fn is_keep(&self) -> bool {
        matches!(self, RehearsalVerdict::Keep { .. })
    }
}

/// Share of free static-grid cells from which an eye at 1.2 m has a clear
/// line of sight to the target's center or the middle of its top face.
pub fn visibility_fraction(room: &RoomVariant, target: Aabb) -> f64 {
    let occ = static_occupancy(room, CELL_SIZE);
    let geo = SceneGeometry::from_room(room).with_object(target, crate::world::ObjectCategory::Cup, TARGET_INSTANCE);
    let probes = [target.center, Vec3::new(target.center.x, target.center.y, target.top() - 1e-4)];
    let mut free = 0usize;
    let mut seen = 0usize;
    for iy in 0..occ.ny {
        for ix in 0..occ.nx {
            if occ.get((ix, iy)) {
                continue;
            }
            free += 1;
            let (x, y) = occ.cell_center((ix, iy));
            let eye = Vec3::new(x, y, EYE_HEIGHT);
            if probes.iter().any(|&p| geo.sees_instance(eye, p, TARGET_INSTANCE)) {
                seen += 1;
            }
        }
    }
    if free == 0 {
        0.0
    } else {
        seen as f64 / free as f64
    }
}

/// Keep a drop iff it settled inside its zone and is not in plain view.
pub fn rehearsal_filter(
    outcome: &DropOutcome,
    zone: &FallZone,
    room: &RoomVariant,
    object: &ObjectSpec,
) -> RehearsalVerdict {
    if !outcome.settled {
        return RehearsalVerdict::Reject(RejectReason::NotSettled);
    }
    let rest = outcome.rest_pose.position;
    if !zone.contains(rest) {
        return RehearsalVerdict::Reject(RejectReason::OutOfZone);
    }
    let visibility = visibility_fraction(room, Aabb::new(rest, object.extent));
    if visibility >= PLAIN_VIEW_FRACTION {
        return RehearsalVerdict::Reject(RejectReason::PlainView);
    }
    RehearsalVerdict::Keep { visibility }
}
