//! Fall simulation for the dropped target and the rehearsal filter.

mod drop;
mod rehearsal;

pub use drop::{simulate_drop, DropOutcome, DropParams, FallInit, EMIT_THRESHOLD, GRAVITY, SETTLE_APEX};
pub use rehearsal::{rehearsal_filter, visibility_fraction, RejectReason, RehearsalVerdict, PLAIN_VIEW_FRACTION};

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;
use crate::world::Material;

/// One collision between the falling object and the static world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactEvent {
    pub time: f64,
    pub position: Vec3,
    /// Relative speed along the contact normal, m/s.
    pub normal_speed: f64,
    pub surface_material: Material,
    pub object_material: Material,
    pub object_mass: f64,
    /// `None` for immovable surfaces (floor, walls, furniture).
    pub surface_mass: Option<f64>,
}

impl ImpactEvent {
    pub fn reduced_mass(&self) -> f64 {
        match self.surface_mass {
            Some(m) => self.object_mass * m / (self.object_mass + m),
            None => self.object_mass,
        }
    }
}
