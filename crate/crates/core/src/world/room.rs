//! Room variants: dimensions, surface materials, furniture layouts and the
//! 20 fall zones per variant.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::material::Material;
use super::occupancy::{static_occupancy, OccupancyGrid};
use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};
use crate::rng;

pub const ROOM_HEIGHT: f64 = 2.7;
pub const ZONES_PER_ROOM: usize = 20;
pub const LAYOUTS_PER_ROOM_TYPE: u8 = 4;
/// Container wall and bottom thickness.
pub const CONTAINER_WALL: f64 = 0.01;
/// Furnishings may interpenetrate by at most this much.
pub const OVERLAP_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoomType {
    Kitchen,
    Study,
}

impl RoomType {
    pub const ALL: [RoomType; 2] = [RoomType::Kitchen, RoomType::Study];

    pub fn name(self) -> &'static str {
        match self {
            RoomType::Kitchen => "kitchen",
            RoomType::Study => "study",
        }
    }

    /// Side-length range in meters.
    fn side_range(self) -> (f64, f64) {
        match self {
            RoomType::Kitchen => (4.0, 6.0),
            RoomType::Study => (3.0, 5.0),
        }
    }
}

impl fmt::Display for RoomType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kinds of furniture. Each has a fixed size, material and reserved
/// semantic id (101 and up).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FurnitureKind {
    Counter,
    Stove,
    Fridge,
    Cabinet,
    Table,
    Chair,
    Pan,
    Basket,
    Desk,
    Bookshelf,
    Sofa,
    CoffeeTable,
    Armchair,
    Trunk,
    StorageBox,
    WasteBasket,
}

impl FurnitureKind {
    pub const ALL: [FurnitureKind; 16] = [
        FurnitureKind::Counter,
        FurnitureKind::Stove,
        FurnitureKind::Fridge,
        FurnitureKind::Cabinet,
        FurnitureKind::Table,
        FurnitureKind::Chair,
        FurnitureKind::Pan,
        FurnitureKind::Basket,
        FurnitureKind::Desk,
        FurnitureKind::Bookshelf,
        FurnitureKind::Sofa,
        FurnitureKind::CoffeeTable,
        FurnitureKind::Armchair,
        FurnitureKind::Trunk,
        FurnitureKind::StorageBox,
        FurnitureKind::WasteBasket,
    ];

    pub const FIRST_SEMANTIC_ID: u16 = 101;

    pub fn semantic_id(self) -> u16 {
        Self::FIRST_SEMANTIC_ID + Self::ALL.iter().position(|&k| k == self).unwrap() as u16
    }

    pub fn from_semantic_id(id: u16) -> Option<FurnitureKind> {
        id.checked_sub(Self::FIRST_SEMANTIC_ID)
            .and_then(|i| Self::ALL.get(i as usize).copied())
    }

    /// Half-extents with x along the wall it backs onto.
    fn half_extent(self) -> Vec3 {
        let (x, y, z) = match self {
            FurnitureKind::Counter => (0.8, 0.3, 0.45),
            FurnitureKind::Stove => (0.3, 0.3, 0.45),
            FurnitureKind::Fridge => (0.35, 0.35, 0.9),
            FurnitureKind::Cabinet => (0.3, 0.25, 0.5),
            FurnitureKind::Table => (0.6, 0.4, 0.375),
            FurnitureKind::Chair => (0.22, 0.22, 0.225),
            FurnitureKind::Pan => (0.15, 0.15, 0.04),
            FurnitureKind::Basket => (0.2, 0.15, 0.125),
            FurnitureKind::Desk => (0.7, 0.35, 0.375),
            FurnitureKind::Bookshelf => (0.45, 0.175, 0.9),
            FurnitureKind::Sofa => (0.9, 0.45, 0.4),
            FurnitureKind::CoffeeTable => (0.5, 0.3, 0.225),
            FurnitureKind::Armchair => (0.45, 0.45, 0.4),
            FurnitureKind::Trunk => (0.4, 0.25, 0.25),
            FurnitureKind::StorageBox => (0.22, 0.18, 0.15),
            FurnitureKind::WasteBasket => (0.15, 0.15, 0.175),
        };
        Vec3::new(x, y, z)
    }

    pub fn material(self) -> Material {
        match self {
            FurnitureKind::Counter => Material::Stone,
            FurnitureKind::Stove | FurnitureKind::Fridge | FurnitureKind::Pan => Material::Metal,
            FurnitureKind::Cabinet | FurnitureKind::Table | FurnitureKind::Chair => {
                Material::WoodMedium
            }
            FurnitureKind::Basket => Material::WoodSoft,
            FurnitureKind::Desk | FurnitureKind::Bookshelf | FurnitureKind::CoffeeTable => {
                Material::WoodHard
            }
            FurnitureKind::Sofa | FurnitureKind::Armchair => Material::Fabric,
            FurnitureKind::Trunk => Material::Leather,
            FurnitureKind::StorageBox => Material::Cardboard,
            FurnitureKind::WasteBasket => Material::PlasticHard,
        }
    }

    pub fn is_surface(self) -> bool {
        !matches!(
            self,
            FurnitureKind::Fridge
                | FurnitureKind::Bookshelf
                | FurnitureKind::Pan
                | FurnitureKind::Basket
                | FurnitureKind::StorageBox
                | FurnitureKind::WasteBasket
        )
    }

    pub fn is_container(self) -> bool {
        matches!(
            self,
            FurnitureKind::Pan
                | FurnitureKind::Basket
                | FurnitureKind::StorageBox
                | FurnitureKind::WasteBasket
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            FurnitureKind::Counter => "counter",
            FurnitureKind::Stove => "stove",
            FurnitureKind::Fridge => "fridge",
            FurnitureKind::Cabinet => "cabinet",
            FurnitureKind::Table => "table",
            FurnitureKind::Chair => "chair",
            FurnitureKind::Pan => "pan",
            FurnitureKind::Basket => "basket",
            FurnitureKind::Desk => "desk",
            FurnitureKind::Bookshelf => "bookshelf",
            FurnitureKind::Sofa => "sofa",
            FurnitureKind::CoffeeTable => "coffee_table",
            FurnitureKind::Armchair => "armchair",
            FurnitureKind::Trunk => "trunk",
            FurnitureKind::StorageBox => "storage_box",
            FurnitureKind::WasteBasket => "waste_basket",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Furnishing {
    pub label: FurnitureKind,
    #[serde(rename = "box")]
    pub bbox: Aabb,
    pub is_surface: bool,
    pub is_container: bool,
    pub material: Material,
}

impl Furnishing {
    pub fn new(label: FurnitureKind, bbox: Aabb) -> Furnishing {
        Furnishing {
            label,
            bbox,
            is_surface: label.is_surface(),
            is_container: label.is_container(),
            material: label.material(),
        }
    }

    /// Solid boxes making up this piece: the whole box, or for an open
    /// container its bottom and four walls.
    pub fn solid_parts(&self) -> Vec<Aabb> {
        if !self.is_container {
            return vec![self.bbox];
        }
        let lo = self.bbox.min();
        let hi = self.bbox.max();
        let t = CONTAINER_WALL;
        vec![
            Aabb::from_min_max(lo, Vec3::new(hi.x, hi.y, lo.z + t)),
            Aabb::from_min_max(lo, Vec3::new(lo.x + t, hi.y, hi.z)),
            Aabb::from_min_max(Vec3::new(hi.x - t, lo.y, lo.z), hi),
            Aabb::from_min_max(lo, Vec3::new(hi.x, lo.y + t, hi.z)),
            Aabb::from_min_max(Vec3::new(lo.x, hi.y - t, lo.z), hi),
        ]
    }

    /// Interior of a container above its bottom.
    pub fn interior(&self) -> Aabb {
        let lo = self.bbox.min();
        let hi = self.bbox.max();
        let t = CONTAINER_WALL;
        Aabb::from_min_max(
            Vec3::new(lo.x + t, lo.y + t, lo.z + t),
            Vec3::new(hi.x - t, hi.y - t, hi.z),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    Floor,
    Surface,
    Container,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FallZone {
    pub id: usize,
    pub kind: ZoneKind,
    pub region: Aabb,
    pub support_height: f64,
    /// Index into the room's furnishings for surface and container zones.
    pub container: Option<usize>,
}

impl FallZone {
    /// Whether an object resting with its center at `p` counts as inside.
    pub fn contains(&self, p: Vec3) -> bool {
        self.region.contains(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomVariant {
    pub id: String,
    pub room_type: RoomType,
    /// Width (x), depth (y), height (z) in meters.
    pub dims: Vec3,
    pub wall_material: Material,
    pub floor_material: Material,
    pub layout_id: u8,
    pub seed: u64,
    pub furnishings: Vec<Furnishing>,
    pub fall_zones: Vec<FallZone>,
}

impl RoomVariant {
    pub fn bounds(&self) -> Aabb {
        Aabb::from_min_max(Vec3::ZERO, self.dims)
    }

    pub fn diagonal(&self) -> f64 {
        (self.dims.x.powi(2) + self.dims.y.powi(2)).sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.dims.x * self.dims.y * self.dims.z
    }

    /// All solid boxes (containers expanded into walls).
    pub fn solids(&self) -> Vec<(usize, Aabb)> {
        self.furnishings
            .iter()
            .enumerate()
            .flat_map(|(i, f)| f.solid_parts().into_iter().map(move |b| (i, b)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        if !(d.x > 0.0 && d.y > 0.0 && d.z > 0.0) {
            return Err(Error::Invariant(format!("room dims {d:?} must be positive")));
        }
        if self.layout_id >= LAYOUTS_PER_ROOM_TYPE {
            return Err(Error::InvalidLayout(self.layout_id));
        }
        if self.fall_zones.len() != ZONES_PER_ROOM {
            return Err(Error::Invariant(format!(
                "room {} has {} fall zones",
                self.id,
                self.fall_zones.len()
            )));
        }
        let bounds = self.bounds().inflate(1e-9);
        for f in &self.furnishings {
            let h = f.bbox.half;
            if !(h.x > 0.0 && h.y > 0.0 && h.z > 0.0) {
                return Err(Error::Invariant(format!("{} has non-positive size", f.label.name())));
            }
            if !bounds.contains(f.bbox.min()) || !bounds.contains(f.bbox.max()) {
                return Err(Error::Invariant(format!("{} outside room", f.label.name())));
            }
        }
        for (i, a) in self.furnishings.iter().enumerate() {
            for b in &self.furnishings[i + 1..] {
                if a.bbox.overlaps(&b.bbox, OVERLAP_TOLERANCE) {
                    return Err(Error::Invariant(format!(
                        "{} overlaps {}",
                        a.label.name(),
                        b.label.name()
                    )));
                }
            }
        }
        for (i, z) in self.fall_zones.iter().enumerate() {
            if z.id != i {
                return Err(Error::Invariant(format!("zone {i} has id {}", z.id)));
            }
            if !bounds.contains(z.region.min()) || !bounds.contains(z.region.max()) {
                return Err(Error::Invariant(format!("zone {i} outside room")));
            }
            if z.support_height < 0.0 {
                return Err(Error::Invariant(format!("zone {i} has negative support")));
            }
            if let Some(c) = z.container {
                if c >= self.furnishings.len() {
                    return Err(Error::Invariant(format!("zone {i} references missing furnishing")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Placement {
    Wall,
    Free,
    OnTop(usize),
}

fn template(room_type: RoomType, layout: u8) -> Vec<(FurnitureKind, Placement)> {
    use FurnitureKind::*;
    use Placement::*;
    match (room_type, layout) {
        (RoomType::Kitchen, 0) => vec![
            (Counter, Wall),
            (Stove, Wall),
            (Pan, OnTop(1)),
            (Cabinet, Wall),
            (Table, Free),
            (Chair, Free),
            (Basket, Free),
        ],
        (RoomType::Kitchen, 1) => vec![
            (Counter, Wall),
            (Counter, Wall),
            (Fridge, Wall),
            (Stove, Wall),
            (Pan, OnTop(3)),
            (Table, Free),
            (Basket, Free),
        ],
        (RoomType::Kitchen, 2) => vec![
            (Counter, Wall),
            (Pan, OnTop(0)),
            (Fridge, Wall),
            (Cabinet, Wall),
            (Table, Free),
            (Chair, Free),
            (Basket, Free),
        ],
        (RoomType::Kitchen, _) => vec![
            (Stove, Wall),
            (Pan, OnTop(0)),
            (Counter, Wall),
            (Cabinet, Wall),
            (Fridge, Wall),
            (Table, Free),
            (Basket, Free),
        ],
        (RoomType::Study, 0) => vec![
            (Desk, Wall),
            (Bookshelf, Wall),
            (Sofa, Free),
            (CoffeeTable, Free),
            (StorageBox, Free),
            (WasteBasket, Free),
        ],
        (RoomType::Study, 1) => vec![
            (Desk, Wall),
            (Bookshelf, Wall),
            (Armchair, Free),
            (Trunk, Wall),
            (WasteBasket, Free),
            (StorageBox, Free),
        ],
        (RoomType::Study, 2) => vec![
            (Sofa, Wall),
            (CoffeeTable, Free),
            (Bookshelf, Wall),
            (Desk, Wall),
            (WasteBasket, Free),
        ],
        (RoomType::Study, _) => vec![
            (Desk, Wall),
            (Armchair, Free),
            (Trunk, Wall),
            (Bookshelf, Wall),
            (StorageBox, Free),
            (CoffeeTable, Free),
        ],
    }
}

/// Clearance between xy footprints, negative when they overlap.
fn xy_gap(a: &Aabb, b: &Aabb) -> f64 {
    let dx = (a.center.x - b.center.x).abs() - (a.half.x + b.half.x);
    let dy = (a.center.y - b.center.y).abs() - (a.half.y + b.half.y);
    if dx > 0.0 && dy > 0.0 {
        (dx * dx + dy * dy).sqrt()
    } else {
        dx.max(dy)
    }
}

/// Free-standing pieces keep this much aisle space around them.
const AISLE: f64 = 0.65;
const WALL_PIECE_GAP: f64 = 0.05;

fn try_place(
    kind: FurnitureKind,
    placement: Placement,
    dims: Vec3,
    placed: &[Furnishing],
    rng: &mut ChaCha8Rng,
) -> Option<Aabb> {
    let h = kind.half_extent();
    for _ in 0..200 {
        let bbox = match placement {
            Placement::Wall => {
                let wall = rng.gen_range(0..4u8);
                // walls 0/1 run along x (y = 0 / y = D), walls 2/3 along y
                let (hx, hy) = if wall < 2 { (h.x, h.y) } else { (h.y, h.x) };
                let along_len = if wall < 2 { dims.x } else { dims.y };
                let half_along = if wall < 2 { hx } else { hy };
                if along_len < 2.0 * half_along + 0.2 {
                    continue;
                }
                let a = rng.gen_range(half_along + 0.1..along_len - half_along - 0.1);
                let c = match wall {
                    0 => Vec3::new(a, hy, h.z),
                    1 => Vec3::new(a, dims.y - hy, h.z),
                    2 => Vec3::new(hx, a, h.z),
                    _ => Vec3::new(dims.x - hx, a, h.z),
                };
                Aabb::new(c, Vec3::new(hx, hy, h.z))
            }
            Placement::Free => {
                let rot = rng.gen_bool(0.5);
                let (hx, hy) = if rot { (h.y, h.x) } else { (h.x, h.y) };
                let mx = AISLE + hx;
                let my = AISLE + hy;
                if dims.x < 2.0 * mx || dims.y < 2.0 * my {
                    continue;
                }
                let c = Vec3::new(
                    rng.gen_range(mx..=dims.x - mx),
                    rng.gen_range(my..=dims.y - my),
                    h.z,
                );
                Aabb::new(c, Vec3::new(hx, hy, h.z))
            }
            Placement::OnTop(parent) => {
                let p = placed.get(parent)?.bbox;
                let sx = (p.half.x - h.x).max(0.0);
                let sy = (p.half.y - h.y).max(0.0);
                let c = Vec3::new(
                    p.center.x + rng.gen_range(-sx..=sx),
                    p.center.y + rng.gen_range(-sy..=sy),
                    p.top() + h.z,
                );
                return Some(Aabb::new(c, h));
            }
        };
        let ok = placed.iter().all(|f| {
            let gap = xy_gap(&bbox, &f.bbox);
            let need = match placement {
                Placement::Free => AISLE,
                _ => WALL_PIECE_GAP,
            };
            // a wall piece next to a free piece still needs the aisle
            let need = if matches!(placement, Placement::Wall)
                && !touches_wall(&f.bbox, dims)
            {
                AISLE
            } else {
                need
            };
            gap >= need
        });
        if ok {
            return Some(bbox);
        }
    }
    None
}

fn touches_wall(b: &Aabb, dims: Vec3) -> bool {
    let lo = b.min();
    let hi = b.max();
    lo.x <= 1e-9 || lo.y <= 1e-9 || hi.x >= dims.x - 1e-9 || hi.y >= dims.y - 1e-9
}

fn place_layout(room_type: RoomType, layout: u8, dims: Vec3, rng: &mut ChaCha8Rng) -> Vec<Furnishing> {
    let mut placed: Vec<Furnishing> = Vec::new();
    // template indices shift when a piece is skipped
    let mut index_map: Vec<Option<usize>> = Vec::new();
    for (kind, placement) in template(room_type, layout) {
        let placement = match placement {
            Placement::OnTop(i) => match index_map[i] {
                Some(j) => Placement::OnTop(j),
                None => {
                    index_map.push(None);
                    continue;
                }
            },
            p => p,
        };
        match try_place(kind, placement, dims, &placed, rng) {
            Some(b) => {
                index_map.push(Some(placed.len()));
                placed.push(Furnishing::new(kind, b));
            }
            None => index_map.push(None),
        }
    }
    placed
}

fn sample_dims(room_type: RoomType, layout: u8, seed: u64) -> Vec3 {
    let mut r = rng::stream(seed, "room-dims", room_type as u64 * 16 + layout as u64);
    let (lo, hi) = room_type.side_range();
    // quantize to the 0.1 m grid so cell boundaries line up with walls
    let q = |v: f64| (v * 10.0).round() / 10.0;
    Vec3::new(q(r.gen_range(lo..=hi)), q(r.gen_range(lo..=hi)), ROOM_HEIGHT)
}

fn make_zones(
    dims: Vec3,
    furnishings: &[Furnishing],
    occ: &OccupancyGrid,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<FallZone>> {
    let mut zones = Vec::new();
    for (i, f) in furnishings.iter().enumerate() {
        if f.is_container {
            let inner = f.interior();
            let support = inner.min().z;
            zones.push((
                ZoneKind::Container,
                Aabb::from_min_max(inner.min(), Vec3::new(inner.max().x, inner.max().y, support + 0.6)),
                support,
                Some(i),
            ));
        }
    }
    let mut surfaces = Vec::new();
    for (i, f) in furnishings.iter().enumerate() {
        if !f.is_surface {
            continue;
        }
        // skip tops occupied by a container sitting on them
        let top = f.bbox.top();
        let b = f.bbox;
        let long_x = b.half.x >= b.half.y;
        let parts: Vec<Aabb> = if b.half.x.max(b.half.y) > 0.45 {
            let (lo, hi) = (b.min(), b.max());
            if long_x {
                vec![
                    Aabb::from_min_max(Vec3::new(lo.x, lo.y, top), Vec3::new(b.center.x, hi.y, top)),
                    Aabb::from_min_max(Vec3::new(b.center.x, lo.y, top), Vec3::new(hi.x, hi.y, top)),
                ]
            } else {
                vec![
                    Aabb::from_min_max(Vec3::new(lo.x, lo.y, top), Vec3::new(hi.x, b.center.y, top)),
                    Aabb::from_min_max(Vec3::new(lo.x, b.center.y, top), Vec3::new(hi.x, hi.y, top)),
                ]
            }
        } else {
            vec![Aabb::from_min_max(
                Vec3::new(b.min().x, b.min().y, top),
                Vec3::new(b.max().x, b.max().y, top),
            )]
        };
        for p in parts {
            let blocked = furnishings.iter().any(|o| {
                o.bbox.min().z >= top - 1e-6 && xy_gap(&o.bbox, &p) < 0.0
            });
            if blocked {
                continue;
            }
            let m = 0.03;
            let region = Aabb::from_min_max(
                Vec3::new(p.min().x + m, p.min().y + m, top),
                Vec3::new(p.max().x - m, p.max().y - m, (top + 0.6).min(dims.z)),
            );
            surfaces.push((ZoneKind::Surface, region, top, Some(i)));
        }
    }
    // shuffle-free deterministic subsample of surfaces
    while surfaces.len() > 8 {
        let k = rng.gen_range(0..surfaces.len());
        surfaces.remove(k);
    }
    zones.extend(surfaces);

    let inflated = occ.inflated(1);
    let need_floor = ZONES_PER_ROOM.saturating_sub(zones.len());
    let mut floors: Vec<Aabb> = Vec::new();
    let half = 0.3;
    let margin = 0.2 + half;
    let mut attempts = 0;
    while floors.len() < need_floor {
        attempts += 1;
        if attempts > 20_000 {
            return None;
        }
        let allow_overlap = attempts > 4000;
        let cx = rng.gen_range(margin..=dims.x - margin);
        let cy = rng.gen_range(margin..=dims.y - margin);
        let region = Aabb::from_min_max(
            Vec3::new(cx - half, cy - half, 0.0),
            Vec3::new(cx + half, cy + half, 0.6),
        );
        if furnishings.iter().any(|f| xy_gap(&f.bbox, &region) < 0.05) {
            continue;
        }
        // the zone center must be free and reachable in the static grid
        if inflated.is_occupied_world(cx, cy) {
            continue;
        }
        if !allow_overlap && floors.iter().any(|o| xy_gap(o, &region) < 0.0) {
            continue;
        }
        floors.push(region);
    }
    zones.extend(floors.into_iter().map(|r| (ZoneKind::Floor, r, 0.0, None)));
    zones.truncate(ZONES_PER_ROOM);
    let zones = zones
        .into_iter()
        .enumerate()
        .map(|(id, (kind, region, support_height, container))| FallZone {
            id,
            kind,
            region,
            support_height,
            container,
        })
        .collect();
    Some(zones)
}

/// Build one room variant. Dimensions and furniture depend only on
/// `(room_type, layout_id, seed)`; materials change acoustics and bounces.
pub fn build_room_variant(
    room_type: RoomType,
    layout_id: u8,
    wall_material: Material,
    floor_material: Material,
    seed: u64,
) -> Result<RoomVariant> {
    if layout_id >= LAYOUTS_PER_ROOM_TYPE {
        return Err(Error::InvalidLayout(layout_id));
    }
    if !wall_material.is_wall_eligible() {
        return Err(Error::IneligibleMaterial {
            material: wall_material.name().into(),
            surface: "wall",
        });
    }
    if !floor_material.is_floor_eligible() {
        return Err(Error::IneligibleMaterial {
            material: floor_material.name().into(),
            surface: "floor",
        });
    }
    let dims = sample_dims(room_type, layout_id, seed);
    let base = room_type as u64 * 16 + layout_id as u64;
    let mut chosen = None;
    for attempt in 0..64u64 {
        let mut r = rng::stream(seed, "room-layout", base * 1000 + attempt);
        let furnishings = place_layout(room_type, layout_id, dims, &mut r);
        let mut probe = RoomVariant {
            id: String::new(),
            room_type,
            dims,
            wall_material,
            floor_material,
            layout_id,
            seed,
            furnishings,
            fall_zones: Vec::new(),
        };
        let occ = static_occupancy(&probe, super::occupancy::CELL_SIZE);
        if !occ.free_space_connected() {
            continue;
        }
        let mut zr = rng::stream(seed, "room-zones", base * 1000 + attempt);
        let Some(zones) = make_zones(dims, &probe.furnishings, &occ, &mut zr) else {
            continue;
        };
        probe.fall_zones = zones;
        chosen = Some(probe);
        break;
    }
    let mut room = chosen.ok_or_else(|| {
        Error::Invariant(format!("no connected layout for {room_type} layout {layout_id}"))
    })?;
    room.id = format!(
        "{}-l{}-{}-{}-{:016x}",
        room_type.name(),
        layout_id,
        wall_material.name(),
        floor_material.name(),
        seed
    );
    room.validate()?;
    Ok(room)
}

/// The eight wall/floor material pairings used for every base room.
pub const SURFACE_PAIRS: [(Material, Material); 8] = [
    (Material::WoodHard, Material::Ceramic),
    (Material::WoodSoft, Material::WoodMedium),
    (Material::PlasticHard, Material::Stone),
    (Material::Stone, Material::Fabric),
    (Material::WoodMedium, Material::WoodHard),
    (Material::PlasticHard, Material::Ceramic),
    (Material::WoodSoft, Material::Fabric),
    (Material::Stone, Material::WoodSoft),
];

/// All 64 variants: 2 room types x 4 layouts x 8 surface pairs.
pub fn standard_variants(seed: u64) -> Result<Vec<RoomVariant>> {
    let mut out = Vec::with_capacity(64);
    for rt in RoomType::ALL {
        for layout in 0..LAYOUTS_PER_ROOM_TYPE {
            for (wall, floor) in SURFACE_PAIRS {
                out.push(build_room_variant(rt, layout, wall, floor, seed)?);
            }
        }
    }
    Ok(out)
}
