//! The 30 droppable object categories and per-instance object specs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::material::Material;
use crate::error::{Error, Result};
use crate::geom::Vec3;

pub const OBJECT_SCHEMA_VERSION: u32 = 1;

macro_rules! categories {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum ObjectCategory { $($variant),* }

        impl ObjectCategory {
            pub const ALL: [ObjectCategory; 30] = [$(ObjectCategory::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(ObjectCategory::$variant => $name),* }
            }
        }
    };
}

categories! {
    Candle => "candle",
    Calculator => "calculator",
    FlashlightBattery => "flashlight_battery",
    Fork => "fork",
    Bookend => "bookend",
    Spoon => "spoon",
    Toothbrush => "toothbrush",
    KitchenUtensil => "kitchen_utensil",
    Cup => "cup",
    Coaster => "coaster",
    Vase => "vase",
    Key => "key",
    BottleCork => "bottle_cork",
    Toy => "toy",
    Bowl => "bowl",
    SodaCan => "soda_can",
    ClothesBrush => "clothes_brush",
    Ipod => "ipod",
    Box => "box",
    PepperMill => "pepper_mill",
    Bottle => "bottle",
    Toaster => "toaster",
    Wineglass => "wineglass",
    Jug => "jug",
    Watch => "watch",
    Knife => "knife",
    Pen => "pen",
    Headphone => "headphone",
    GolfBall => "golf_ball",
    ShirtButton => "shirt_button",
}

impl ObjectCategory {
    /// Semantic id used in rendered label images; 0 is background.
    pub fn semantic_id(self) -> u16 {
        self.index() as u16 + 1
    }

    pub fn index(self) -> usize {
        ObjectCategory::ALL.iter().position(|&c| c == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<ObjectCategory> {
        ObjectCategory::ALL.get(i).copied()
    }

    pub fn from_semantic_id(id: u16) -> Option<ObjectCategory> {
        if id == 0 {
            return None;
        }
        Self::from_index(id as usize - 1)
    }

    pub fn from_name(name: &str) -> Option<ObjectCategory> {
        ObjectCategory::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn entry(self) -> &'static CatalogEntry {
        &object_table().objects[&self]
    }

    pub fn default_material(self) -> Material {
        self.entry().materials[0]
    }

    /// Bounding half-extents in meters.
    pub fn extent(self) -> Vec3 {
        let e = self.entry().half_extent;
        Vec3::new(e[0], e[1], e[2])
    }

    /// Unitless size used to scale modal frequencies; 1.0 for a 5 cm
    /// largest half-extent.
    pub fn size_scale(self) -> f64 {
        size_scale_for(self.extent())
    }
}

pub fn size_scale_for(extent: Vec3) -> f64 {
    (extent.max_component() / 0.05).powf(0.75)
}

impl fmt::Display for ObjectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// Plausible materials; the first is the default.
    pub materials: Vec<Material>,
    pub half_extent: [f64; 3],
    pub mass: f64,
    pub friction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectTable {
    pub schema_version: u32,
    #[serde(default)]
    pub note: String,
    pub objects: BTreeMap<ObjectCategory, CatalogEntry>,
}

static OBJECT_JSON: &str = include_str!("../../data/objects.json");

pub fn object_table() -> &'static ObjectTable {
    static TABLE: OnceLock<ObjectTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let t: ObjectTable =
            serde_json::from_str(OBJECT_JSON).expect("shipped objects.json is valid");
        assert_eq!(t.schema_version, OBJECT_SCHEMA_VERSION);
        assert_eq!(t.objects.len(), ObjectCategory::ALL.len());
        t
    })
}

/// One concrete droppable object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub category: ObjectCategory,
    pub material: Material,
    pub mass: f64,
    pub restitution: f64,
    pub friction: f64,
    /// Half-extents in meters.
    pub extent: Vec3,
}

impl ObjectSpec {
    /// The catalog default instance of a category.
    pub fn from_category(category: ObjectCategory) -> ObjectSpec {
        let e = category.entry();
        let material = e.materials[0];
        ObjectSpec {
            category,
            material,
            mass: e.mass,
            restitution: material.restitution(),
            friction: e.friction,
            extent: category.extent(),
        }
    }

    /// A randomized instance: material drawn from the category's list,
    /// mass and friction jittered by up to 20%.
    pub fn sample<R: Rng>(category: ObjectCategory, rng: &mut R) -> ObjectSpec {
        let e = category.entry();
        let material = e.materials[rng.gen_range(0..e.materials.len())];
        ObjectSpec {
            category,
            material,
            mass: e.mass * rng.gen_range(0.8..1.2),
            restitution: material.restitution(),
            friction: e.friction * rng.gen_range(0.8..1.2),
            extent: category.extent(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::Invariant(format!("object mass {} must be > 0", self.mass)));
        }
        if !(0.0..=1.0).contains(&self.restitution) {
            return Err(Error::Invariant(format!(
                "restitution {} outside [0,1]",
                self.restitution
            )));
        }
        if !(self.friction >= 0.0) {
            return Err(Error::Invariant(format!("friction {} must be >= 0", self.friction)));
        }
        if !(self.extent.x > 0.0 && self.extent.y > 0.0 && self.extent.z > 0.0) {
            return Err(Error::Invariant("object extent must be positive".into()));
        }
        Ok(())
    }

    /// Largest half-extent.
    pub fn max_extent(&self) -> f64 {
        self.extent.max_component()
    }

    pub fn size_scale(&self) -> f64 {
        size_scale_for(self.extent)
    }
}
