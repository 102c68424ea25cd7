//! Static world model: materials, object catalog, rooms, scenes.

pub mod catalog;
pub mod geodesic;
pub mod io;
pub mod material;
pub mod occupancy;
pub mod raycast;
pub mod room;
pub mod scene;

pub use catalog::{object_table, size_scale_for, ObjectCategory, ObjectSpec};
pub use geodesic::{distance_field, nearest_free_cell, successors, GridCost, STEPS8};
pub use io::{load_scene, parse_scene, save_scene};
pub use material::{material_table, Material, ModeBand};
pub use occupancy::{static_occupancy, Cell, OccupancyGrid, AGENT_HEIGHT, CELL_SIZE};
pub use raycast::{
    Hit, SceneGeometry, EYE_HEIGHT, FIRST_DISTRACTOR_INSTANCE, FIRST_FURNITURE_INSTANCE, STRUCTURE_INSTANCE, TARGET_INSTANCE,
};
pub use room::{
    build_room_variant, standard_variants, FallZone, Furnishing, FurnitureKind, RoomType, RoomVariant,
    ZoneKind, SURFACE_PAIRS,
};
pub use scene::{
    place_distractors, Distractor, DistractorPlacement, Pose, SceneInstance, DISTRACTOR_CLEARANCE, PITCH_LIMIT,
    SCENE_SCHEMA_VERSION,
};
