//! Pinhole depth, semantic and instance rendering by ray casting.

use crate::geom::Vec3;
use crate::world::{Pose, SceneGeometry, EYE_HEIGHT, TARGET_INSTANCE};

pub const DEFAULT_RESOLUTION: usize = 128;
pub const MAX_RESOLUTION: usize = 300;
/// Horizontal and vertical field of view, degrees.
pub const FOV_DEG: f64 = 90.0;
/// Depth values are clamped to this range, meters.
pub const MAX_DEPTH: f64 = 10.0;

/// Square images in row-major order, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Views {
    pub size: usize,
    /// Distance along the optical axis, meters.
    pub depth: Vec<f64>,
    pub semantic: Vec<u16>,
    pub instance: Vec<u32>,
}

impl Views {
    pub fn pixel_count(&self, instance: u32) -> usize {
        self.instance.iter().filter(|&&i| i == instance).count()
    }

    pub fn target_visible(&self) -> bool {
        self.instance.contains(&TARGET_INSTANCE)
    }
}

/// Camera frame for a pose: eye point, forward, right and up axes.
#[derive(Debug, Clone, Copy)]
pub struct Camera {
    pub eye: Vec3,
    pub forward: Vec3,
    pub right: Vec3,
    pub up: Vec3,
    /// tan of half the field of view.
    pub half: f64,
    pub size: usize,
}

impl Camera {
    pub fn new(pose: &Pose, size: usize) -> Camera {
        let (yaw, pitch) = (pose.yaw.to_radians(), pose.pitch.to_radians());
        let h = Vec3::new(yaw.cos(), yaw.sin(), 0.0);
        let z = Vec3::new(0.0, 0.0, 1.0);
        Camera {
            eye: Vec3::new(pose.position.x, pose.position.y, EYE_HEIGHT),
            forward: h * pitch.cos() + z * pitch.sin(),
            right: Vec3::new(yaw.sin(), -yaw.cos(), 0.0),
            up: h * (-pitch.sin()) + z * pitch.cos(),
            half: (FOV_DEG.to_radians() / 2.0).tan(),
            size,
        }
    }

    /// Ray through the center of pixel `(row, col)` with unit forward
    /// component, so hit parameters are optical-axis depths.
    pub fn ray(&self, row: usize, col: usize) -> Vec3 {
        let n = self.size as f64;
        let u = (2.0 * (col as f64 + 0.5) / n - 1.0) * self.half;
        let v = (1.0 - 2.0 * (row as f64 + 0.5) / n) * self.half;
        self.forward + self.right * u + self.up * v
    }

    /// World point seen at `(row, col)` with the given depth.
    pub fn unproject(&self, row: usize, col: usize, depth: f64) -> Vec3 {
        self.eye + self.ray(row, col) * depth
    }

    /// Continuous pixel coordinates `(row, col)` of a world point in front
    /// of the camera, or `None` behind it.
    pub fn project(&self, p: Vec3) -> Option<(f64, f64)> {
        let d = p - self.eye;
        let z = d.dot(self.forward);
        if z <= 1e-9 {
            return None;
        }
        let n = self.size as f64;
        let u = d.dot(self.right) / (z * self.half);
        let v = d.dot(self.up) / (z * self.half);
        Some(((1.0 - v) * n / 2.0, (u + 1.0) * n / 2.0))
    }
}

pub fn render_views(geometry: &SceneGeometry, pose: &Pose, size: usize) -> Views {
    let cam = Camera::new(pose, size);
    let n = size * size;
    let mut v = Views { size, depth: Vec::with_capacity(n), semantic: Vec::with_capacity(n), instance: Vec::with_capacity(n) };
    for row in 0..size {
        for col in 0..size {
            let h = geometry.first_hit(cam.eye, cam.ray(row, col));
            v.depth.push(h.t.clamp(1e-6, MAX_DEPTH));
            v.semantic.push(h.semantic);
            v.instance.push(h.instance);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Aabb;
    use crate::world::{
        Furnishing, FurnitureKind, Material, ObjectCategory, RoomType, RoomVariant, FIRST_FURNITURE_INSTANCE,
    };

    fn room(furnishings: Vec<Furnishing>) -> RoomVariant {
        RoomVariant {
            id: "r".into(),
            room_type: RoomType::Study,
            dims: Vec3::new(6.0, 4.0, 2.7),
            wall_material: Material::WoodHard,
            floor_material: Material::WoodHard,
            layout_id: 0,
            seed: 0,
            furnishings,
            fall_zones: vec![],
        }
    }

    #[test]
    fn wall_ahead_has_planar_depth() {
        let g = SceneGeometry::from_room(&room(vec![]));
        let v = render_views(&g, &Pose::new(Vec3::new(3.0, 2.0, 0.0), 0.0, 0.0), 33);
        // every pixel on the facing wall reads 3 m along the axis
        assert!((v.depth[16 * 33 + 16] - 3.0).abs() < 1e-12);
        assert!((v.depth[16 * 33 + 5] - 3.0).abs() < 1e-12);
        assert!(v.semantic.iter().all(|&s| s == 0));
    }

    #[test]
    fn project_inverts_unproject() {
        let cam = Camera::new(&Pose::new(Vec3::new(1.0, 1.0, 0.0), 135.0, -30.0), 64);
        let p = cam.unproject(10, 50, 2.5);
        let (r, c) = cam.project(p).unwrap();
        assert!((r - 10.5).abs() < 1e-9 && (c - 50.5).abs() < 1e-9);
    }

    #[test]
    fn left_of_image_is_left_of_agent() {
        let cam = Camera::new(&Pose::new(Vec3::ZERO, 90.0, 0.0), 10);
        // facing +y, so the left image edge points toward -x
        assert!(cam.ray(5, 0).x < 0.0);
        assert!(cam.ray(0, 5).z > 0.0);
    }

    #[test]
    fn occluded_target_then_visible() {
        let sofa = Furnishing::new(FurnitureKind::Sofa, Aabb::new(Vec3::new(3.0, 2.0, 0.4), Vec3::new(0.4, 1.0, 0.4)));
        let g = SceneGeometry::from_room(&room(vec![sofa])).with_object(
            Aabb::new(Vec3::new(3.6, 2.0, 0.05), Vec3::new(0.05, 0.05, 0.05)),
            ObjectCategory::Pen,
            TARGET_INSTANCE,
        );
        let behind = render_views(&g, &Pose::new(Vec3::new(1.0, 2.0, 0.0), 0.0, -30.0), 64);
        assert_eq!(behind.pixel_count(TARGET_INSTANCE), 0);
        assert!(behind.pixel_count(FIRST_FURNITURE_INSTANCE) > 0);
        let around = render_views(&g, &Pose::new(Vec3::new(5.0, 2.0, 0.0), 180.0, -30.0), 64);
        assert!(around.pixel_count(TARGET_INSTANCE) > 0);
        // brute force: the target pixel rays really hit the target box first
        let cam = Camera::new(&Pose::new(Vec3::new(5.0, 2.0, 0.0), 180.0, -30.0), 64);
        let target = Aabb::new(Vec3::new(3.6, 2.0, 0.05), Vec3::new(0.05, 0.05, 0.05));
        for (i, &inst) in around.instance.iter().enumerate() {
            if inst == TARGET_INSTANCE {
                let p = cam.unproject(i / 64, i % 64, around.depth[i]);
                assert!(target.inflate(1e-9).contains(p));
            }
        }
    }

    #[test]
    fn semantic_ids_are_valid() {
        let sofa = Furnishing::new(FurnitureKind::Sofa, Aabb::new(Vec3::new(3.0, 2.0, 0.4), Vec3::new(0.4, 1.0, 0.4)));
        let g = SceneGeometry::from_room(&room(vec![sofa]));
        let v = render_views(&g, &Pose::new(Vec3::new(1.0, 1.0, 0.0), 20.0, 0.0), 32);
        assert!(v
            .semantic
            .iter()
            .all(|&s| s == 0 || ObjectCategory::from_semantic_id(s).is_some() || FurnitureKind::from_semantic_id(s).is_some()));
    }
}
