use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::world::ObjectCategory;

const N: usize = 30;

/// Emulated segmentation errors: whole instances vanish or take another
/// category's label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegNoiseModel {
    pub drop_prob: f64,
    /// Row `i` gives the label distribution for true category index `i`.
    pub confusion: Vec<Vec<f64>>,
    pub seed: u64,
}

impl SegNoiseModel {
    /// Drop 10%; keep the label 90% of the time, otherwise swap to a
    /// category sharing the default material (or keep it if none does).
    pub fn default_with_seed(seed: u64) -> SegNoiseModel {
        let mut confusion = vec![vec![0.0; N]; N];
        for c in ObjectCategory::ALL {
            let peers: Vec<ObjectCategory> = ObjectCategory::ALL
                .into_iter()
                .filter(|&o| o != c && o.default_material() == c.default_material())
                .collect();
            let row = &mut confusion[c.index()];
            if peers.is_empty() {
                row[c.index()] = 1.0;
            } else {
                row[c.index()] = 0.9;
                for p in &peers {
                    row[p.index()] = 0.1 / peers.len() as f64;
                }
            }
        }
        SegNoiseModel { drop_prob: 0.1, confusion, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.drop_prob) || self.confusion.len() != N {
            return Err(Error::InvalidArgument("bad segmentation noise model".into()));
        }
        for row in &self.confusion {
            let s: f64 = row.iter().sum();
            if row.len() != N || (s - 1.0).abs() > 1e-9 || row.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidArgument("confusion rows must be stochastic".into()));
            }
        }
        Ok(())
    }

    /// The label an instance receives, or `None` if it is dropped.
    /// Depends only on `(seed, instance, true category)`.
    pub fn perturb(&self, instance: u32, category: ObjectCategory) -> Option<ObjectCategory> {
        let mut r = rng::stream(self.seed, "segment", instance as u64);
        if r.gen::<f64>() < self.drop_prob {
            return None;
        }
        let u: f64 = r.gen();
        let row = &self.confusion[category.index()];
        let mut acc = 0.0;
        for (j, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return ObjectCategory::from_index(j);
            }
        }
        Some(category)
    }
}

/// One segmented object instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMask {
    pub category: ObjectCategory,
    pub instance: u32,
    /// Row-major pixel indices.
    pub pixels: Vec<usize>,
}

impl InstanceMask {
    /// Mean pixel position `(row, col)`.
    pub fn centroid(&self, width: usize) -> (f64, f64) {
        let n = self.pixels.len() as f64;
        let (mut r, mut c) = (0.0, 0.0);
        for &p in &self.pixels {
            r += (p / width) as f64;
            c += (p % width) as f64;
        }
        (r / n, c / n)
    }
}

/// Object masks from a semantic image and its instance image. Furniture and
/// background are not segmented. With `noise` set, each instance may be
/// dropped or relabeled.
pub fn segment(semantic: &[u16], instance: &[u32], noise: Option<&SegNoiseModel>) -> Vec<InstanceMask> {
    let mut masks: Vec<InstanceMask> = Vec::new();
    for (p, (&s, &i)) in semantic.iter().zip(instance).enumerate() {
        let Some(cat) = ObjectCategory::from_semantic_id(s) else {
            continue;
        };
        match masks.iter_mut().find(|m| m.instance == i) {
            Some(m) => m.pixels.push(p),
            None => masks.push(InstanceMask { category: cat, instance: i, pixels: vec![p] }),
        }
    }
    if let Some(model) = noise {
        masks = masks
            .into_iter()
            .filter_map(|mut m| {
                m.category = model.perturb(m.instance, m.category)?;
                Some(m)
            })
            .collect();
    }
    masks.sort_by_key(|m| m.instance);
    masks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image() -> (Vec<u16>, Vec<u32>) {
        let cup = ObjectCategory::Cup.semantic_id();
        let key = ObjectCategory::Key.semantic_id();
        (vec![0, cup, cup, 105, key, 0], vec![0, 1, 1, 1004, 2, 0])
    }

    #[test]
    fn noise_free_masks_partition_object_pixels() {
        let (s, i) = image();
        let m = segment(&s, &i, None);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].pixels, vec![1, 2]);
        assert_eq!(m[0].category, ObjectCategory::Cup);
        assert_eq!(m[1].pixels, vec![4]);
    }

    #[test]
    fn drop_all() {
        let (s, i) = image();
        let mut n = SegNoiseModel::default_with_seed(1);
        n.drop_prob = 1.0;
        assert!(segment(&s, &i, Some(&n)).is_empty());
    }

    #[test]
    fn drop_rate_is_binomial() {
        let mut n = SegNoiseModel::default_with_seed(9);
        n.drop_prob = 0.2;
        let dropped = (0..1000).filter(|&k| n.perturb(k, ObjectCategory::Cup).is_none()).count();
        assert!((160..=240).contains(&dropped), "{dropped}");
    }

    #[test]
    fn default_model_is_valid_and_deterministic() {
        let n = SegNoiseModel::default_with_seed(4);
        n.validate().unwrap();
        let (s, i) = image();
        assert_eq!(segment(&s, &i, Some(&n)), segment(&s, &i, Some(&n)));
    }
}
