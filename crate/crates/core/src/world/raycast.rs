//! Ray queries against the box geometry of a scene.

use super::catalog::ObjectCategory;
use super::room::RoomVariant;
use super::scene::SceneInstance;
use crate::geom::{Aabb, Vec3};

/// Camera height above the floor.
pub const EYE_HEIGHT: f64 = 1.2;

/// Instance id of walls, floor and ceiling.
pub const STRUCTURE_INSTANCE: u32 = 0;
pub const TARGET_INSTANCE: u32 = 1;
/// Distractor `i` has instance `FIRST_DISTRACTOR_INSTANCE + i`.
pub const FIRST_DISTRACTOR_INSTANCE: u32 = 2;
/// Furnishing `i` has instance `FIRST_FURNITURE_INSTANCE + i`.
pub const FIRST_FURNITURE_INSTANCE: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    /// Category or furniture id; 0 for room structure.
    pub semantic: u16,
    pub instance: u32,
}

#[derive(Debug, Clone, Copy)]
struct Solid {
    lo: [f64; 3],
    hi: [f64; 3],
    semantic: u16,
    instance: u32,
}

/// Immutable collection of solid boxes inside a room shell.
#[derive(Debug, Clone)]
pub struct SceneGeometry {
    solids: Vec<Solid>,
    room_hi: [f64; 3],
}

impl SceneGeometry {
    /// Room shell and furniture only.
    pub fn from_room(room: &RoomVariant) -> SceneGeometry {
        let mut g = SceneGeometry {
            solids: Vec::new(),
            room_hi: [room.dims.x, room.dims.y, room.dims.z],
        };
        for (i, f) in room.furnishings.iter().enumerate() {
            for part in f.solid_parts() {
                g.push(part, f.label.semantic_id(), FIRST_FURNITURE_INSTANCE + i as u32);
            }
        }
        g
    }

    /// Room, target at its rest pose and all distractors.
    pub fn from_scene(scene: &SceneInstance) -> SceneGeometry {
        let mut g = SceneGeometry::from_room(&scene.room);
        g.push(scene.target_box(), scene.target.category.semantic_id(), TARGET_INSTANCE);
        for (i, d) in scene.distractors.iter().enumerate() {
            g.push(d.bbox(), d.spec.category.semantic_id(), FIRST_DISTRACTOR_INSTANCE + i as u32);
        }
        g
    }

    pub fn with_object(mut self, bbox: Aabb, category: ObjectCategory, instance: u32) -> SceneGeometry {
        self.push(bbox, category.semantic_id(), instance);
        self
    }

    fn push(&mut self, b: Aabb, semantic: u16, instance: u32) {
        let (lo, hi) = (b.min(), b.max());
        self.solids.push(Solid {
            lo: [lo.x, lo.y, lo.z],
            hi: [hi.x, hi.y, hi.z],
            semantic,
            instance,
        });
    }

    /// Nearest surface along `dir` (unit) from `origin`, which must lie in
    /// the room. Falls back to the room shell.
    pub fn first_hit(&self, origin: Vec3, dir: Vec3) -> Hit {
        let o = [origin.x, origin.y, origin.z];
        let inv = [1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z];
        let mut best = Hit {
            t: self.shell_exit(o, inv),
            semantic: 0,
            instance: STRUCTURE_INSTANCE,
        };
        for s in &self.solids {
            if let Some(t) = slab(o, inv, &s.lo, &s.hi, best.t) {
                if t < best.t {
                    best = Hit { t, semantic: s.semantic, instance: s.instance };
                }
            }
        }
        best
    }

    /// Whether the segment from `from` to a point on `instance` reaches it
    /// before anything else.
    pub fn sees_instance(&self, from: Vec3, to: Vec3, instance: u32) -> bool {
        let d = to - from;
        let len = d.norm();
        if len < 1e-9 {
            return true;
        }
        let dir = d * (1.0 / len);
        let h = self.first_hit(from, dir);
        h.instance == instance || h.t >= len - 1e-9
    }

    fn shell_exit(&self, o: [f64; 3], inv: [f64; 3]) -> f64 {
        let mut t = f64::INFINITY;
        for a in 0..3 {
            let bound = if inv[a] > 0.0 {
                (self.room_hi[a] - o[a]) * inv[a]
            } else if inv[a] < 0.0 {
                -o[a] * inv[a]
            } else {
                f64::INFINITY
            };
            t = t.min(bound);
        }
        t.max(0.0)
    }
}

#[inline]
fn slab(o: [f64; 3], inv: [f64; 3], lo: &[f64; 3], hi: &[f64; 3], t_max: f64) -> Option<f64> {
    let mut t0 = 0.0f64;
    let mut t1 = t_max;
    for a in 0..3 {
        let mut n = (lo[a] - o[a]) * inv[a];
        let mut f = (hi[a] - o[a]) * inv[a];
        if n.is_nan() || f.is_nan() {
            if o[a] < lo[a] || o[a] > hi[a] {
                return None;
            }
            continue;
        }
        if n > f {
            std::mem::swap(&mut n, &mut f);
        }
        t0 = t0.max(n);
        t1 = t1.min(f);
        if t0 > t1 {
            return None;
        }
    }
    Some(t0)
}
