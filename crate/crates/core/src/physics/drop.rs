use serde::{Deserialize, Serialize};

use super::ImpactEvent;
use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};
use crate::world::{Material, ObjectSpec, Pose, RoomVariant};

pub const GRAVITY: f64 = 9.81;
/// A bounce whose apex would stay below this height ends vertical motion.
pub const SETTLE_APEX: f64 = 0.005;
/// Contacts slower than this along the normal are absorbed silently.
pub const EMIT_THRESHOLD: f64 = 0.05;
const REST_SPEED: f64 = 0.01;
const TOI_RESOLUTION: f64 = 1e-6;
const TRAJECTORY_EVERY: usize = 10;

/// Start of a fall event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FallInit {
    pub pose: Pose,
    pub velocity: Vec3,
    /// Recorded for completeness; the point-mass model ignores spin.
    pub angular_velocity: Vec3,
}

impl FallInit {
    pub fn at_rest(pose: Pose) -> FallInit {
        FallInit { pose, velocity: Vec3::ZERO, angular_velocity: Vec3::ZERO }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropParams {
    pub dt: f64,
    pub max_t: f64,
}

impl Default for DropParams {
    fn default() -> Self {
        Self { dt: 1e-3, max_t: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropOutcome {
    pub impacts: Vec<ImpactEvent>,
    pub rest_pose: Pose,
    /// Positions sampled every 10 steps.
    pub trajectory: Vec<Vec3>,
    pub settled: bool,
    /// Simulated time until settling (or `max_t`).
    pub duration: f64,
}

#[derive(Clone, Copy)]
enum Surface {
    Floor,
    Wall,
    Solid(usize),
}

struct Collider {
    /// Solid box grown by the object's half-size.
    grown: Aabb,
    material: Material,
}

struct World<'a> {
    room: &'a RoomVariant,
    colliders: Vec<Collider>,
    /// Lowest and highest admissible center coordinates (walls, floor).
    lo: Vec3,
    hi: Vec3,
}

impl<'a> World<'a> {
    fn new(room: &'a RoomVariant, obj: &ObjectSpec) -> Self {
        let r = obj.extent.x.max(obj.extent.y);
        let grow = Vec3::new(r, r, obj.extent.z);
        let colliders = room
            .furnishings
            .iter()
            .flat_map(|f| {
                f.solid_parts().into_iter().map(move |b| Collider {
                    grown: Aabb::new(b.center, b.half + grow),
                    material: f.material,
                })
            })
            .collect();
        World {
            room,
            colliders,
            lo: Vec3::new(r, r, obj.extent.z),
            hi: Vec3::new(room.dims.x - r, room.dims.y - r, f64::INFINITY),
        }
    }

    fn penetrates(&self, p: Vec3) -> Option<Surface> {
        if p.z < self.lo.z {
            return Some(Surface::Floor);
        }
        if p.x < self.lo.x || p.y < self.lo.y || p.x > self.hi.x || p.y > self.hi.y {
            return Some(Surface::Wall);
        }
        self.colliders
            .iter()
            .position(|c| strictly_inside(&c.grown, p))
            .map(Surface::Solid)
    }

    fn material(&self, s: Surface) -> Material {
        match s {
            Surface::Floor => self.room.floor_material,
            Surface::Wall => self.room.wall_material,
            Surface::Solid(i) => self.colliders[i].material,
        }
    }

    /// Outward unit normal of the face crossed going from `outside` to `inside`.
    fn normal(&self, s: Surface, outside: Vec3, inside: Vec3) -> Vec3 {
        match s {
            Surface::Floor => Vec3::new(0.0, 0.0, 1.0),
            Surface::Wall => {
                if inside.x < self.lo.x {
                    Vec3::new(1.0, 0.0, 0.0)
                } else if inside.x > self.hi.x {
                    Vec3::new(-1.0, 0.0, 0.0)
                } else if inside.y < self.lo.y {
                    Vec3::new(0.0, 1.0, 0.0)
                } else {
                    Vec3::new(0.0, -1.0, 0.0)
                }
            }
            Surface::Solid(i) => {
                let b = &self.colliders[i].grown;
                let (lo, hi) = (b.min(), b.max());
                // the axis on which the outside point was outside the slab
                let mut best = (f64::NEG_INFINITY, Vec3::new(0.0, 0.0, 1.0));
                for (o, l, h, n) in [
                    (outside.x, lo.x, hi.x, Vec3::new(1.0, 0.0, 0.0)),
                    (outside.y, lo.y, hi.y, Vec3::new(0.0, 1.0, 0.0)),
                    (outside.z, lo.z, hi.z, Vec3::new(0.0, 0.0, 1.0)),
                ] {
                    let below = l - o;
                    let above = o - h;
                    if below > best.0 {
                        best = (below, -n);
                    }
                    if above > best.0 {
                        best = (above, n);
                    }
                }
                best.1
            }
        }
    }

    /// Whether a resting object at `p` is still held by `s`.
    fn supports(&self, s: Surface, p: Vec3) -> bool {
        match s {
            Surface::Floor => true,
            Surface::Wall => false,
            Surface::Solid(i) => {
                let b = &self.colliders[i].grown;
                b.contains_xy(p.x, p.y) && (p.z - b.top()).abs() < 1e-6
            }
        }
    }
}

fn strictly_inside(b: &Aabb, p: Vec3) -> bool {
    const EPS: f64 = 1e-9;
    let lo = b.min();
    let hi = b.max();
    p.x > lo.x + EPS
        && p.x < hi.x - EPS
        && p.y > lo.y + EPS
        && p.y < hi.y - EPS
        && p.z > lo.z + EPS
        && p.z < hi.z - EPS
}

fn ballistic(p: Vec3, v: Vec3, t: f64) -> (Vec3, Vec3) {
    let g = Vec3::new(0.0, 0.0, -GRAVITY);
    (p + v * t + g * (0.5 * t * t), v + g * t)
}

/// Drop an object and follow it until it settles or `max_t` passes.
///
/// The object is a point mass whose contact shape is its box footprint:
/// half-height vertically, largest horizontal half-extent sideways.
/// Flight is integrated exactly under constant gravity; contacts are located
/// by bisection to 1 µs inside the crossing step.
pub fn simulate_drop(
    room: &RoomVariant,
    object: &ObjectSpec,
    init: &FallInit,
    params: DropParams,
) -> Result<DropOutcome> {
    if !(params.dt > 0.0 && params.dt <= 5e-3) {
        return Err(Error::InvalidArgument(format!("dt {} outside (0, 5 ms]", params.dt)));
    }
    let world = World::new(room, object);
    let mut p = init.pose.position;
    let mut v = init.velocity;
    if !p.is_finite() || !v.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    if world.penetrates(p).is_some() {
        return Err(Error::InvalidArgument("drop starts inside geometry".into()));
    }
    let mut impacts = Vec::new();
    let mut trajectory = vec![p];
    // resting contact: vertical motion over, sliding on this surface
    let mut resting: Option<Surface> = None;
    let floor_rest = (p.z - world.lo.z).abs() < 1e-9;
    let solid_rest = world
        .colliders
        .iter()
        .position(|c| c.grown.contains_xy(p.x, p.y) && (p.z - c.grown.top()).abs() < 1e-9);
    if v.norm() == 0.0 && (floor_rest || solid_rest.is_some()) {
        return Ok(DropOutcome {
            impacts,
            rest_pose: init.pose.clone(),
            trajectory,
            settled: true,
            duration: 0.0,
        });
    }
    let e_obj = object.restitution;
    let tangential_keep = (1.0 - object.friction * 0.5).clamp(0.0, 1.0);
    let slide_decel = object.friction.max(0.05) * GRAVITY;
    let mut t = 0.0;
    let mut step = 0usize;
    let mut settled = false;
    while t < params.max_t {
        step += 1;
        let dt = params.dt.min(params.max_t - t);
        if let Some(surface) = resting {
            let speed = (v.x * v.x + v.y * v.y).sqrt();
            if speed < REST_SPEED {
                settled = true;
                break;
            }
            let dv = (slide_decel * dt).min(speed);
            let dir = Vec3::new(v.x / speed, v.y / speed, 0.0);
            let next_v = v - dir * dv;
            let next_p = p + (v + next_v) * (0.5 * dt);
            match world.penetrates(next_p) {
                Some(hit) => {
                    let n = world.normal(hit, p, next_p);
                    let vn = next_v.dot(n);
                    if vn < 0.0 {
                        let e = (e_obj * world.material(hit).restitution()).sqrt();
                        if -vn >= EMIT_THRESHOLD {
                            impacts.push(impact(&world, hit, t + dt, p, -vn, object));
                        }
                        v = (next_v - n * vn) * tangential_keep - n * (e * vn);
                        v.z = 0.0;
                    } else {
                        v = next_v;
                    }
                }
                None => {
                    p = next_p;
                    v = next_v;
                    if !world.supports(surface, p) {
                        resting = None;
                    }
                }
            }
            t += dt;
        } else {
            let mut remaining = dt;
            let mut elapsed = 0.0;
            let mut guard = 0;
            while remaining > 0.0 {
                guard += 1;
                if guard > 64 {
                    // pinned in a corner: stop vertical motion here
                    v = Vec3::ZERO;
                    break;
                }
                let (np, nv) = ballistic(p, v, remaining);
                let Some(first) = world.penetrates(np) else {
                    p = np;
                    v = nv;
                    break;
                };
                // bisection for the first time the path penetrates anything
                let (mut lo, mut hi) = (0.0, remaining);
                while hi - lo > TOI_RESOLUTION {
                    let mid = 0.5 * (lo + hi);
                    if world.penetrates(ballistic(p, v, mid).0).is_some() {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let hit = world.penetrates(ballistic(p, v, hi).0).unwrap_or(first);
                let (cp, cv) = ballistic(p, v, lo);
                let inside = ballistic(p, v, hi).0;
                let n = world.normal(hit, cp, inside);
                let vn = cv.dot(n);
                p = cp;
                remaining -= lo;
                elapsed += lo;
                if vn >= 0.0 {
                    // grazing: nudge forward
                    v = cv;
                    remaining = remaining.max(TOI_RESOLUTION);
                    p = p + n * 1e-9;
                    continue;
                }
                let e = (e_obj * world.material(hit).restitution()).sqrt();
                let speed = -vn;
                if speed >= EMIT_THRESHOLD {
                    impacts.push(impact(&world, hit, t + elapsed, p, speed, object));
                }
                let tangential = (cv - n * vn) * tangential_keep;
                let rebound = e * speed;
                v = tangential + n * rebound;
                if n.z > 0.5 && rebound * rebound / (2.0 * GRAVITY) < SETTLE_APEX {
                    v.z = 0.0;
                    resting = Some(hit);
                    // snap onto the supporting face
                    p.z = match hit {
                        Surface::Solid(i) => world.colliders[i].grown.top(),
                        _ => world.lo.z,
                    };
                    remaining = 0.0;
                }
            }
            t += dt;
        }
        if !p.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite { step });
        }
        if p.z < world.lo.z - 1e-6 {
            return Err(Error::Invariant(format!("object escaped through the floor at step {step}")));
        }
        if step.is_multiple_of(TRAJECTORY_EVERY) {
            trajectory.push(p);
        }
    }
    if trajectory.last() != Some(&p) {
        trajectory.push(p);
    }
    let rest_pose = Pose { position: p, yaw: init.pose.yaw, pitch: 0.0 };
    Ok(DropOutcome { impacts, rest_pose, trajectory, settled, duration: t })
}

fn impact(world: &World, s: Surface, t: f64, p: Vec3, speed: f64, obj: &ObjectSpec) -> ImpactEvent {
    ImpactEvent {
        time: t,
        position: p,
        normal_speed: speed,
        surface_material: world.material(s),
        object_material: obj.material,
        object_mass: obj.mass,
        surface_mass: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{ObjectCategory, RoomType};
    use rand::{Rng, SeedableRng};

    fn empty_room() -> RoomVariant {
        RoomVariant {
            id: "empty".into(),
            room_type: RoomType::Study,
            dims: Vec3::new(4.0, 4.0, 2.7),
            wall_material: Material::WoodHard,
            floor_material: Material::WoodHard,
            layout_id: 0,
            seed: 0,
            furnishings: vec![],
            fall_zones: vec![],
        }
    }

    /// An object whose combined restitution against the wood floor is `e`.
    fn ball(e: f64) -> ObjectSpec {
        let mut o = ObjectSpec::from_category(ObjectCategory::GolfBall);
        o.restitution = e * e / Material::WoodHard.restitution();
        o
    }

    fn drop_from(o: &ObjectSpec, h: f64) -> DropOutcome {
        let init = FallInit::at_rest(Pose::new(Vec3::new(2.0, 2.0, o.extent.z + h), 0.0, 0.0));
        simulate_drop(&empty_room(), o, &init, DropParams::default()).unwrap()
    }

    #[test]
    fn inelastic_drop_matches_ballistic_oracle() {
        let out = drop_from(&ball(0.0), 1.0);
        assert_eq!(out.impacts.len(), 1);
        let v = (2.0 * GRAVITY * 1.0f64).sqrt();
        let t = (2.0 * 1.0 / GRAVITY).sqrt();
        assert!((out.impacts[0].normal_speed - 4.429).abs() / 4.429 < 0.01);
        assert!((out.impacts[0].normal_speed - v).abs() / v < 1e-4);
        assert!((out.impacts[0].time - t).abs() / t < 1e-4);
        assert!(out.settled);
    }

    #[test]
    fn resting_object_stays_put() {
        let o = ball(0.5);
        let init = FallInit::at_rest(Pose::new(Vec3::new(1.0, 1.0, o.extent.z), 90.0, 0.0));
        let out = simulate_drop(&empty_room(), &o, &init, DropParams::default()).unwrap();
        assert!(out.impacts.is_empty());
        assert!(out.settled);
        assert_eq!(out.rest_pose, init.pose);
    }

    #[test]
    fn bounce_series_is_geometric() {
        let out = drop_from(&ball(0.5), 1.0);
        let v1 = out.impacts[0].normal_speed;
        let v2 = out.impacts[1].normal_speed;
        assert!((v2 - 2.215).abs() / 2.215 < 0.01);
        assert!((v2 / v1 - 0.5).abs() < 1e-3);
        // rebound apex from the flight time between the first two impacts
        let dt = out.impacts[1].time - out.impacts[0].time;
        let apex = GRAVITY * dt * dt / 8.0;
        assert!((apex - 0.25).abs() / 0.25 < 0.01);
        let rest_z = out.rest_pose.position.z;
        assert!((rest_z - ball(0.5).extent.z).abs() < 1e-9);
    }

    #[test]
    fn floor_impacts_decrease_and_time_is_bounded() {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let e = r.gen_range(0.05..0.9);
            let h = r.gen_range(0.3..1.5);
            let out = drop_from(&ball(e), h);
            for w in out.impacts.windows(2) {
                assert!(w[1].normal_speed < w[0].normal_speed);
            }
            let t0 = out.impacts[0].time;
            let bound = t0 * (1.0 + e) / (1.0 - e);
            assert!(out.duration <= bound + 0.01, "e={e} h={h}");
            if bound < 4.9 {
                assert!(out.settled, "e={e} h={h}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let o = ball(0.6);
        let init = FallInit {
            pose: Pose::new(Vec3::new(1.0, 1.5, 1.0), 0.0, 0.0),
            velocity: Vec3::new(0.7, -0.2, 0.0),
            angular_velocity: Vec3::ZERO,
        };
        let a = simulate_drop(&empty_room(), &o, &init, DropParams::default()).unwrap();
        let b = simulate_drop(&empty_room(), &o, &init, DropParams::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn rejects_bad_dt() {
        let o = ball(0.5);
        let init = FallInit::at_rest(Pose::new(Vec3::new(1.0, 1.0, 1.0), 0.0, 0.0));
        let p = DropParams { dt: 0.01, max_t: 5.0 };
        assert!(simulate_drop(&empty_room(), &o, &init, p).is_err());
    }

    #[test]
    fn lands_on_table_top() {
        use crate::world::{Furnishing, FurnitureKind};
        let mut room = empty_room();
        let table = Aabb::new(Vec3::new(2.0, 2.0, 0.375), Vec3::new(0.5, 0.4, 0.375));
        room.furnishings.push(Furnishing::new(FurnitureKind::Table, table));
        let o = ball(0.3);
        let init = FallInit::at_rest(Pose::new(Vec3::new(2.0, 2.0, 1.5), 0.0, 0.0));
        let out = simulate_drop(&room, &o, &init, DropParams::default()).unwrap();
        assert!(out.settled);
        assert!((out.rest_pose.position.z - (0.75 + o.extent.z)).abs() < 1e-9);
        assert_eq!(out.impacts[0].surface_material, FurnitureKind::Table.material());
    }
}
