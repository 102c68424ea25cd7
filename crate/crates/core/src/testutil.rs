//! Scene fixtures shared by unit tests.

use crate::geom::{Aabb, Vec3};
use crate::physics::{FallInit, ImpactEvent};
use crate::world::{
    FallZone, Furnishing, Material, ObjectCategory, ObjectSpec, Pose, RoomType, RoomVariant, SceneInstance, ZoneKind,
    SCENE_SCHEMA_VERSION,
};

/// Furnished-or-not rectangular room whose 20 zones tile the floor.
pub fn room_with(w: f64, d: f64, furnishings: Vec<Furnishing>) -> RoomVariant {
    let fall_zones = (0..20)
        .map(|i| {
            let (cx, cy) = (0.5 + (i % 5) as f64 * (w - 1.0) / 4.0, 0.5 + (i / 5) as f64 * (d - 1.0) / 3.0);
            FallZone {
                id: i,
                kind: ZoneKind::Floor,
                region: Aabb::new(Vec3::new(cx, cy, 0.3), Vec3::new(0.3, 0.3, 0.3)),
                support_height: 0.0,
                container: None,
            }
        })
        .collect();
    RoomVariant {
        id: "fixture".into(),
        room_type: RoomType::Study,
        dims: Vec3::new(w, d, 2.7),
        wall_material: Material::WoodHard,
        floor_material: Material::WoodMedium,
        layout_id: 0,
        seed: 0,
        furnishings,
        fall_zones,
    }
}

/// A single target resting at `(tx, ty)` on the floor, heard from `spawn`.
pub fn scene_with(room: RoomVariant, category: ObjectCategory, tx: f64, ty: f64, spawn: Pose) -> SceneInstance {
    let target = ObjectSpec::from_category(category);
    let rest = Pose::new(Vec3::new(tx, ty, target.extent.z), 0.0, 0.0);
    let zone_id = room.fall_zones.iter().position(|z| z.contains(rest.position)).unwrap_or(0);
    let mut room = room;
    // make sure the rest pose lies in its zone
    room.fall_zones[zone_id].region = Aabb::new(Vec3::new(tx, ty, 0.3), Vec3::new(0.3, 0.3, 0.3));
    let impact = ImpactEvent {
        time: 0.05,
        position: rest.position,
        normal_speed: 3.0,
        surface_material: room.floor_material,
        object_material: target.material,
        object_mass: target.mass,
        surface_mass: None,
    };
    SceneInstance {
        schema_version: SCENE_SCHEMA_VERSION,
        id: "fixture-scene".into(),
        room,
        zone_id,
        target,
        fall_init: FallInit::at_rest(Pose::new(Vec3::new(tx, ty, 1.0), 0.0, 0.0)),
        rest_pose: rest,
        impacts: vec![impact],
        distractors: vec![],
        agent_spawn: spawn,
        seed: 7,
    }
}

pub fn open_scene() -> SceneInstance {
    scene_with(
        room_with(6.0, 5.0, vec![]),
        ObjectCategory::Cup,
        4.5,
        2.5,
        Pose::new(Vec3::new(1.05, 2.55, 0.0), 0.0, 0.0),
    )
}
