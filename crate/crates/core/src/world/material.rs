//! Audio/physical materials and the shipped material data table.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub const MATERIAL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    PlasticHard,
    PlasticSoftFoam,
    Glass,
    Metal,
    Ceramic,
    Stone,
    Cardboard,
    WoodSoft,
    WoodHard,
    WoodMedium,
    Fabric,
    Leather,
    Paper,
    Rubber,
}

impl Material {
    pub const ALL: [Material; 14] = [
        Material::PlasticHard,
        Material::PlasticSoftFoam,
        Material::Glass,
        Material::Metal,
        Material::Ceramic,
        Material::Stone,
        Material::Cardboard,
        Material::WoodSoft,
        Material::WoodHard,
        Material::WoodMedium,
        Material::Fabric,
        Material::Leather,
        Material::Paper,
        Material::Rubber,
    ];

    /// Materials a room floor may use.
    pub const FLOOR_ELIGIBLE: [Material; 6] = [
        Material::WoodSoft,
        Material::WoodHard,
        Material::WoodMedium,
        Material::Stone,
        Material::Ceramic,
        Material::Fabric,
    ];

    /// Materials a room wall may use.
    pub const WALL_ELIGIBLE: [Material; 5] = [
        Material::WoodSoft,
        Material::WoodHard,
        Material::WoodMedium,
        Material::PlasticHard,
        Material::Stone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Material::PlasticHard => "plastic_hard",
            Material::PlasticSoftFoam => "plastic_soft_foam",
            Material::Glass => "glass",
            Material::Metal => "metal",
            Material::Ceramic => "ceramic",
            Material::Stone => "stone",
            Material::Cardboard => "cardboard",
            Material::WoodSoft => "wood_soft",
            Material::WoodHard => "wood_hard",
            Material::WoodMedium => "wood_medium",
            Material::Fabric => "fabric",
            Material::Leather => "leather",
            Material::Paper => "paper",
            Material::Rubber => "rubber",
        }
    }

    pub fn from_name(name: &str) -> Option<Material> {
        Material::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn index(self) -> usize {
        Material::ALL.iter().position(|&m| m == self).unwrap()
    }

    pub fn props(self) -> &'static MaterialProps {
        &material_table().materials[&self]
    }

    pub fn absorption(self) -> f64 {
        self.props().absorption
    }

    pub fn density_hint(self) -> f64 {
        self.props().density
    }

    pub fn restitution(self) -> f64 {
        self.props().restitution
    }

    /// Excitation multiplier when this material is the struck surface.
    pub fn hardness(self) -> f64 {
        if self.props().soft {
            0.3
        } else {
            1.0
        }
    }

    pub fn is_floor_eligible(self) -> bool {
        Material::FLOOR_ELIGIBLE.contains(&self)
    }

    pub fn is_wall_eligible(self) -> bool {
        Material::WALL_ELIGIBLE.contains(&self)
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Modal band for a material: mode frequencies and decay times are drawn
/// inside these ranges before size scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBand {
    pub f_lo: f64,
    pub f_hi: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub n_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialProps {
    pub absorption: f64,
    pub density: f64,
    pub restitution: f64,
    pub soft: bool,
    pub band: ModeBand,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaterialTable {
    pub schema_version: u32,
    #[serde(default)]
    pub note: String,
    pub materials: BTreeMap<Material, MaterialProps>,
}

static MATERIAL_JSON: &str = include_str!("../../data/materials.json");

/// The shipped material table, parsed once.
pub fn material_table() -> &'static MaterialTable {
    static TABLE: OnceLock<MaterialTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let t: MaterialTable =
            serde_json::from_str(MATERIAL_JSON).expect("shipped materials.json is valid");
        assert_eq!(t.schema_version, MATERIAL_SCHEMA_VERSION);
        assert_eq!(t.materials.len(), Material::ALL.len());
        t
    })
}
