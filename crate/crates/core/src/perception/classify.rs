use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mel::{MelAnalyzer, FLOOR_DB, N_MELS};
use crate::audio::{object_bank, read_wav, synthesize_impact, write_wav, BinauralClip, SAMPLE_RATE};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::physics::ImpactEvent;
use crate::rng;
use crate::world::{Material, ObjectCategory, ObjectSpec};

/// Exemplars per category.
pub const EXEMPLARS_PER_CATEGORY: usize = 5;
/// Impact speed of exemplar renders, m/s.
pub const REFERENCE_SPEED: f64 = 2.0;
pub const LIBRARY_SCHEMA_VERSION: u32 = 1;

pub type CategoryRanking = Vec<(ObjectCategory, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Exemplar {
    pub category: ObjectCategory,
    pub seed: u64,
    pub feature: [f64; N_MELS],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarLibrary {
    pub exemplars: Vec<Exemplar>,
}

#[derive(Serialize, Deserialize)]
struct LibraryIndex {
    schema_version: u32,
    entries: Vec<IndexEntry>,
}

#[derive(Serialize, Deserialize)]
struct IndexEntry {
    category: ObjectCategory,
    seed: u64,
    file: String,
}

/// Level-normalized spectral signature: the mean log-mel of the active
/// frames of the peak-normalized mono mix, shifted so the floor is zero.
pub fn signature(mono: &[f64], mel: &MelAnalyzer) -> [f64; N_MELS] {
    let peak = mono.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return [0.0; N_MELS];
    }
    let x: Vec<f64> = mono.iter().map(|v| v / peak).collect();
    let mut f = mel.log_mel(&x).active_mean();
    for v in &mut f {
        *v -= FLOOR_DB;
    }
    f
}

fn cosine(a: &[f64; N_MELS], b: &[f64; N_MELS]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Dry mono render of one exemplar object at the reference speed.
pub fn exemplar_audio(object: &ObjectSpec, seed: u64) -> Vec<f64> {
    let ev = ImpactEvent {
        time: 0.0,
        position: Vec3::ZERO,
        normal_speed: REFERENCE_SPEED,
        surface_material: Material::WoodHard,
        object_material: object.material,
        object_mass: object.mass,
        surface_mass: None,
    };
    synthesize_impact(&object_bank(object, seed), &ev, SAMPLE_RATE)
}

fn exemplar_object(category: ObjectCategory, seed: u64, k: usize) -> (ObjectSpec, u64) {
    let s = rng::derive(seed, "exemplar", (category.index() * 1000 + k) as u64);
    let mut r = rng::stream(s, "exemplar-object", 0);
    (ObjectSpec::sample(category, &mut r), s)
}

impl ExemplarLibrary {
    /// `k` renders per category, each a freshly sampled object instance.
    pub fn build(k: usize, seed: u64) -> ExemplarLibrary {
        let mel = MelAnalyzer::new(SAMPLE_RATE);
        let mut exemplars = Vec::with_capacity(k * ObjectCategory::ALL.len());
        for c in ObjectCategory::ALL {
            for i in 0..k {
                let (obj, s) = exemplar_object(c, seed, i);
                exemplars.push(Exemplar { category: c, seed: s, feature: signature(&exemplar_audio(&obj, s), &mel) });
            }
        }
        ExemplarLibrary { exemplars }
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    /// Write each exemplar as a WAV file plus an `index.json`.
    pub fn save(&self, dir: &Path, seed: u64) -> Result<()> {
        fs::create_dir_all(dir)?;
        let per_cat = self.exemplars.iter().filter(|e| e.category == self.exemplars[0].category).count();
        let mut entries = Vec::new();
        for c in ObjectCategory::ALL {
            for i in 0..per_cat {
                let (obj, s) = exemplar_object(c, seed, i);
                let mono = exemplar_audio(&obj, s);
                let peak = mono.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
                let x: Vec<f64> = mono.iter().map(|v| v / peak * 0.9).collect();
                let file = format!("{}_{}.wav", c.name(), i);
                write_wav(&BinauralClip { left: x.clone(), right: x, sample_rate: SAMPLE_RATE }, &dir.join(&file))?;
                entries.push(IndexEntry { category: c, seed: s, file });
            }
        }
        let index = LibraryIndex { schema_version: LIBRARY_SCHEMA_VERSION, entries };
        fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<ExemplarLibrary> {
        let path = dir.join("index.json");
        let text = fs::read_to_string(&path)?;
        let index: LibraryIndex =
            serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.clone(), msg: e.to_string() })?;
        if index.schema_version != LIBRARY_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { expected: LIBRARY_SCHEMA_VERSION, found: index.schema_version });
        }
        let mel = MelAnalyzer::new(SAMPLE_RATE);
        let exemplars = index
            .entries
            .into_iter()
            .map(|e| {
                let clip = read_wav(&dir.join(&e.file))?;
                Ok(Exemplar { category: e.category, seed: e.seed, feature: signature(&clip.mono(), &mel) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExemplarLibrary { exemplars })
    }
}

/// Rank all 30 categories by their best exemplar match to a mono signal.
/// Ties keep category order.
pub fn classify_mono(mono: &[f64], library: &ExemplarLibrary, mel: &MelAnalyzer) -> Result<CategoryRanking> {
    if library.is_empty() {
        return Err(Error::EmptyLibrary);
    }
    let q = signature(mono, mel);
    let mut scores = [f64::NEG_INFINITY; 30];
    for e in &library.exemplars {
        let s = cosine(&q, &e.feature);
        let slot = &mut scores[e.category.index()];
        *slot = slot.max(s);
    }
    let mut ranking: CategoryRanking = ObjectCategory::ALL
        .into_iter()
        .map(|c| (c, if scores[c.index()].is_finite() { scores[c.index()] } else { 0.0 }))
        .collect();
    ranking.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranking)
}

pub fn classify_sound(clip: &BinauralClip, library: &ExemplarLibrary) -> Result<CategoryRanking> {
    classify_mono(&clip.mono(), library, &MelAnalyzer::new(clip.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lib() -> ExemplarLibrary {
        ExemplarLibrary::build(2, 3)
    }

    #[test]
    fn self_match_ranks_first() {
        let lib = lib();
        let mel = MelAnalyzer::new(SAMPLE_RATE);
        let (obj, s) = exemplar_object(ObjectCategory::Vase, 3, 1);
        let ranking = classify_mono(&exemplar_audio(&obj, s), &lib, &mel).unwrap();
        assert_eq!(ranking[0].0, ObjectCategory::Vase);
        assert!((ranking[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(ranking.len(), 30);
        assert!(ranking.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn silence_gives_uniform_category_order() {
        let r = classify_sound(&BinauralClip::silent(0.5), &lib()).unwrap();
        assert!(r.iter().all(|(_, s)| *s == 0.0));
        assert_eq!(r.iter().map(|(c, _)| *c).collect::<Vec<_>>(), ObjectCategory::ALL.to_vec());
    }

    #[test]
    fn scale_invariant() {
        let lib = lib();
        let mel = MelAnalyzer::new(SAMPLE_RATE);
        let (obj, s) = exemplar_object(ObjectCategory::Cup, 77, 0);
        let x = exemplar_audio(&obj, s);
        let y: Vec<f64> = x.iter().map(|v| v * 0.25).collect();
        assert_eq!(classify_mono(&x, &lib, &mel).unwrap(), classify_mono(&y, &lib, &mel).unwrap());
    }

    #[test]
    fn empty_library_errors() {
        let e = classify_sound(&BinauralClip::silent(0.5), &ExemplarLibrary { exemplars: vec![] });
        assert!(matches!(e, Err(Error::EmptyLibrary)));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let lib = ExemplarLibrary::build(1, 5);
        lib.save(dir.path(), 5).unwrap();
        let back = ExemplarLibrary::load(dir.path()).unwrap();
        assert_eq!(back.exemplars.len(), 30);
        for (a, b) in lib.exemplars.iter().zip(&back.exemplars) {
            assert_eq!(a.category, b.category);
            assert!(cosine(&a.feature, &b.feature) > 0.99);
        }
    }
}
