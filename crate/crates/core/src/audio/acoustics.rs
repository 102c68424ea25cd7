use serde::{Deserialize, Serialize};

use crate::world::RoomVariant;

pub const SABINE_CONSTANT: f64 = 0.161;
/// Allowed reverberation times; the lower bound is exclusive in spirit,
/// so clamped rooms land just above it.
pub const RT60_MIN: f64 = 0.06;
pub const RT60_MAX: f64 = 3.0;
/// Direct-path gain at 1 m.
pub const DIRECT_GAIN_REF: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomAcoustics {
    pub rt60: f64,
    pub direct_gain_ref: f64,
    pub volume: f64,
    /// Σ S·α in sabins (m²).
    pub total_absorption: f64,
}

/// Unclamped Sabine reverberation time.
pub fn sabine_rt60(volume: f64, total_absorption: f64) -> f64 {
    SABINE_CONSTANT * volume / total_absorption
}

/// Sabine estimate over floor, ceiling and four walls. The ceiling uses the
/// wall material.
pub fn room_acoustics(room: &RoomVariant) -> RoomAcoustics {
    let d = room.dims;
    let floor = d.x * d.y;
    let walls = 2.0 * (d.x + d.y) * d.z;
    let a_wall = room.wall_material.absorption();
    let a_floor = room.floor_material.absorption();
    let total_absorption = floor * a_floor + floor * a_wall + walls * a_wall;
    let volume = room.volume();
    RoomAcoustics {
        rt60: sabine_rt60(volume, total_absorption).clamp(RT60_MIN, RT60_MAX),
        direct_gain_ref: DIRECT_GAIN_REF,
        volume,
        total_absorption,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::world::{Material, RoomType};

    fn room(w: f64, d: f64, h: f64, wall: Material, floor: Material) -> RoomVariant {
        RoomVariant {
            id: "a".into(),
            room_type: RoomType::Study,
            dims: Vec3::new(w, d, h),
            wall_material: wall,
            floor_material: floor,
            layout_id: 0,
            seed: 0,
            furnishings: vec![],
            fall_zones: vec![],
        }
    }

    #[test]
    fn sabine_hand_value() {
        assert!((sabine_rt60(100.0, 32.2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rt60_scales_with_size() {
        let a = room_acoustics(&room(3.0, 4.0, 2.7, Material::WoodHard, Material::Fabric));
        let b = room_acoustics(&room(6.0, 8.0, 5.4, Material::WoodHard, Material::Fabric));
        assert!((b.rt60 / a.rt60 - 2.0).abs() < 1e-9);
        assert!(a.rt60 > RT60_MIN && a.rt60 <= RT60_MAX);
    }

    #[test]
    fn clamps_at_lower_bound() {
        // fabric everywhere in a tiny room drives the estimate below range
        let r = room(0.5, 0.5, 0.5, Material::Fabric, Material::Fabric);
        assert_eq!(room_acoustics(&r).rt60, RT60_MIN);
    }
}
