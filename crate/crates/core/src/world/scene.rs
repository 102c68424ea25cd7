//! Poses, scene instances and distractor placement.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::catalog::{ObjectCategory, ObjectSpec};
use super::occupancy::{static_occupancy, CELL_SIZE};
use super::room::{FallZone, RoomVariant};
use crate::error::{Error, Result};
use crate::geom::{wrap_deg, Aabb, Vec3};
use crate::physics::{FallInit, ImpactEvent};
use crate::rng;

pub const SCENE_SCHEMA_VERSION: u32 = 1;
pub const PITCH_LIMIT: f64 = 60.0;
/// Distractors keep at least this horizontal gap from the target footprint.
pub const DISTRACTOR_CLEARANCE: f64 = 0.1;
/// Allowed ratio between distractor and target largest extent.
pub const DISTRACTOR_SIZE_RATIO: (f64, f64) = (0.5, 2.0);

/// Position in meters; yaw in degrees counter-clockwise from +x in
/// `[0, 360)`; pitch in degrees, positive up, within ±60.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub yaw: f64,
    pub pitch: f64,
}

impl Pose {
    pub fn new(position: Vec3, yaw: f64, pitch: f64) -> Pose {
        Pose {
            position,
            yaw: wrap_deg(yaw),
            pitch: pitch.clamp(-PITCH_LIMIT, PITCH_LIMIT),
        }
    }

    /// Unit heading in the horizontal plane.
    pub fn heading(&self) -> (f64, f64) {
        let r = self.yaw.to_radians();
        (r.cos(), r.sin())
    }
}

/// A placed object that is not the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distractor {
    pub spec: ObjectSpec,
    pub pose: Pose,
}

impl Distractor {
    pub fn bbox(&self) -> Aabb {
        Aabb::new(self.pose.position, self.spec.extent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistractorPlacement {
    pub items: Vec<Distractor>,
    /// Set when fewer than the requested count fit into the zone.
    pub shortfall: bool,
}

/// One complete fall-event scene: the room, the dropped target with its
/// recorded start and end, and where the agent starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneInstance {
    pub schema_version: u32,
    pub id: String,
    pub room: RoomVariant,
    pub zone_id: usize,
    pub target: ObjectSpec,
    pub fall_init: FallInit,
    pub rest_pose: Pose,
    pub impacts: Vec<ImpactEvent>,
    pub distractors: Vec<Distractor>,
    pub agent_spawn: Pose,
    pub seed: u64,
}

impl SceneInstance {
    pub fn zone(&self) -> Option<&FallZone> {
        self.room.fall_zones.get(self.zone_id)
    }

    pub fn target_box(&self) -> Aabb {
        Aabb::new(self.rest_pose.position, self.target.extent)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCENE_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                expected: SCENE_SCHEMA_VERSION,
                found: self.schema_version,
            });
        }
        self.room.validate()?;
        self.target.validate()?;
        let zone = self
            .zone()
            .ok_or_else(|| Error::Invariant(format!("zone {} does not exist", self.zone_id)))?;
        if !zone.contains(self.rest_pose.position) {
            return Err(Error::Invariant(format!(
                "rest pose {:?} outside zone {}",
                self.rest_pose.position, self.zone_id
            )));
        }
        for p in [&self.rest_pose, &self.agent_spawn, &self.fall_init.pose] {
            check_pose(&self.room, p)?;
        }
        let occ = static_occupancy(&self.room, CELL_SIZE);
        let s = self.agent_spawn.position;
        if occ.is_occupied_world(s.x, s.y) {
            return Err(Error::SpawnOccupied);
        }
        if self.impacts.windows(2).any(|w| w[0].time > w[1].time) {
            return Err(Error::Invariant("impacts not time-ordered".into()));
        }
        let target = self.target_box();
        for (i, d) in self.distractors.iter().enumerate() {
            d.spec.validate()?;
            let b = d.bbox();
            if b.overlaps(&target, 0.0) {
                return Err(Error::Invariant(format!("distractor {i} overlaps the target")));
            }
            if self.distractors[..i].iter().any(|o| o.bbox().overlaps(&b, 0.0)) {
                return Err(Error::Invariant(format!("distractor {i} overlaps another")));
            }
            if self.room.solids().iter().any(|(_, s)| s.overlaps(&b, 1e-6)) {
                return Err(Error::Invariant(format!("distractor {i} intersects furniture")));
            }
        }
        Ok(())
    }
}

fn check_pose(room: &RoomVariant, p: &Pose) -> Result<()> {
    if !p.position.is_finite() || !room.bounds().inflate(1e-9).contains(p.position) {
        return Err(Error::Invariant(format!("pose {:?} outside room", p.position)));
    }
    if !(0.0..360.0).contains(&p.yaw) || p.pitch.abs() > PITCH_LIMIT {
        return Err(Error::Invariant(format!("pose angles yaw={} pitch={} out of range", p.yaw, p.pitch)));
    }
    Ok(())
}

fn xy_gap(a: &Aabb, b: &Aabb) -> f64 {
    let d = a.center - b.center;
    let gx = d.x.abs() - a.half.x - b.half.x;
    let gy = d.y.abs() - a.half.y - b.half.y;
    gx.max(gy)
}

/// Scatter up to `count` similar-sized objects in `zone` around the target.
///
/// Distractors never share the target's category, stay inside the zone,
/// rest on its support, avoid furniture, each other and a 0.1 m band around
/// the target. Fewer than `count` may come back, with `shortfall` set.
pub fn place_distractors(
    room: &RoomVariant,
    zone: &FallZone,
    target: &ObjectSpec,
    rest_pose: &Pose,
    count: usize,
    seed: u64,
) -> DistractorPlacement {
    let mut items = Vec::with_capacity(count);
    if count == 0 {
        return DistractorPlacement { items, shortfall: false };
    }
    let mut r = rng::stream(seed, "distractors", zone.id as u64);
    let t_ext = target.max_extent();
    let (lo_ratio, hi_ratio) = DISTRACTOR_SIZE_RATIO;
    let pool: Vec<ObjectCategory> = ObjectCategory::ALL
        .into_iter()
        .filter(|&c| c != target.category)
        .filter(|c| {
            let ratio = c.extent().max_component() / t_ext;
            (lo_ratio..=hi_ratio).contains(&ratio)
        })
        .collect();
    let target_box = Aabb::new(rest_pose.position, target.extent);
    let solids = room.solids();
    let region = zone.region;
    let (rlo, rhi) = (region.min(), region.max());
    let mut attempts = 0;
    while items.len() < count && attempts < 200 * count && !pool.is_empty() {
        attempts += 1;
        let cat = *pool.choose(&mut r).expect("pool non-empty");
        let spec = ObjectSpec::sample(cat, &mut r);
        let e = spec.extent;
        if rhi.x - rlo.x < 2.0 * e.x || rhi.y - rlo.y < 2.0 * e.y {
            continue;
        }
        let x = r.gen_range(rlo.x + e.x..=rhi.x - e.x);
        let y = r.gen_range(rlo.y + e.y..=rhi.y - e.y);
        let pos = Vec3::new(x, y, zone.support_height + e.z);
        let bbox = Aabb::new(pos, e);
        if xy_gap(&bbox, &target_box) < DISTRACTOR_CLEARANCE {
            continue;
        }
        if items.iter().any(|d: &Distractor| xy_gap(&d.bbox(), &bbox) < 0.01) {
            continue;
        }
        if solids.iter().any(|(_, s)| s.overlaps(&bbox, 1e-6)) {
            continue;
        }
        if !room.bounds().contains(bbox.min()) || !room.bounds().contains(bbox.max()) {
            continue;
        }
        let yaw = r.gen_range(0..12) as f64 * 30.0;
        items.push(Distractor { spec, pose: Pose::new(pos, yaw, 0.0) });
    }
    let shortfall = items.len() < count;
    if shortfall {
        log::warn!("zone {} fits only {} of {} distractors", zone.id, items.len(), count);
    }
    DistractorPlacement { items, shortfall }
}
