//! Fixtures shared by the benchmarks and their sanity tests.

use rand::Rng;

use fallen_core::audio::{mode_bank, ModeBank};
use fallen_core::geom::Vec3;
use fallen_core::physics::ImpactEvent;
use fallen_core::planning::{MapFrame, OccupancyMap};
use fallen_core::rng;
use fallen_core::world::{size_scale_for, standard_variants, Cell, Material, ObjectCategory, ObjectSpec, Pose, RoomVariant};

/// The first standard kitchen.
pub fn room() -> RoomVariant {
    standard_variants(7).expect("standard rooms build").swap_remove(0)
}

/// Standing in the middle of `room`, looking down the x axis at cruise pitch.
pub fn pose(room: &RoomVariant) -> Pose {
    Pose::new(Vec3::new(room.dims.x / 2.0, room.dims.y / 2.0, 0.0), 0.0, -30.0)
}

/// A fully explored `n × n` map with about 4% random obstacles and free
/// corners at (1, 1) and (n - 2, n - 2). Denser maps stop being passable
/// once obstacles are inflated.
pub fn grid(n: usize, seed: u64) -> (OccupancyMap, Cell, Cell) {
    let frame = MapFrame { size: n, cell: 0.1, origin: (0.0, 0.0) };
    let mut m = OccupancyMap::new(frame);
    let mut r = rng::stream(seed, "bench-grid", 0);
    m.explored.iter_mut().for_each(|e| *e = true);
    let (s, g) = ((1, 1), (n - 2, n - 2));
    for c in frame.cells() {
        if c != s && c != g && r.gen_bool(0.04) {
            m.mark_occupied(c);
        }
    }
    (m, s, g)
}

/// A cup hitting a hard wooden floor 2 m ahead and 1 m left of `listener`.
pub fn impact(listener: &Pose) -> (ModeBank, ImpactEvent) {
    let spec = ObjectSpec::from_category(ObjectCategory::Cup);
    let p = listener.position;
    let ev = ImpactEvent {
        time: 0.05,
        position: Vec3::new(p.x + 2.0, p.y + 1.0, spec.extent.z),
        normal_speed: 3.0,
        surface_material: Material::WoodHard,
        object_material: spec.material,
        object_mass: spec.mass,
        surface_mass: None,
    };
    (mode_bank(spec.material, size_scale_for(spec.extent), 1), ev)
}
