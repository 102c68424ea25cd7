//! Agent-built occupancy and semantic maps.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::env::{Camera, Views, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::perception::InstanceMask;
use crate::world::{Cell, ObjectCategory, Pose, AGENT_HEIGHT, CELL_SIZE};

/// Hits above this height count as obstacles, meters.
pub const OBSTACLE_MIN_HEIGHT: f64 = 0.1;
/// Floor observations needed to clear an occupied cell.
pub const CLEAR_VOTES: u8 = 5;
/// Horizontal direction bins used when carving free space.
const CARVE_BINS: usize = 2048;

/// Placement of a grid in the world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapFrame {
    pub size: usize,
    pub cell: f64,
    /// World xy of the lower-left corner of cell (0, 0).
    pub origin: (f64, f64),
}

impl MapFrame {
    /// Square frame covering a `w × d` room with one cell of margin.
    pub fn for_room(w: f64, d: f64) -> MapFrame {
        let n = (w.max(d) / CELL_SIZE - 1e-9).ceil() as usize + 2;
        MapFrame { size: n, cell: CELL_SIZE, origin: (-CELL_SIZE, -CELL_SIZE) }
    }

    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn idx(&self, c: Cell) -> usize {
        c.1 * self.size + c.0
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<Cell> {
        let ix = ((x - self.origin.0) / self.cell).floor();
        let iy = ((y - self.origin.1) / self.cell).floor();
        let n = self.size as f64;
        (ix >= 0.0 && iy >= 0.0 && ix < n && iy < n).then_some((ix as usize, iy as usize))
    }

    pub fn center(&self, c: Cell) -> (f64, f64) {
        (self.origin.0 + (c.0 as f64 + 0.5) * self.cell, self.origin.1 + (c.1 as f64 + 0.5) * self.cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        let n = self.size;
        (0..n).flat_map(move |y| (0..n).map(move |x| (x, y)))
    }
}

/// Occupied and explored channels. Occupied implies explored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyMap {
    pub frame: MapFrame,
    pub occupied: Vec<bool>,
    pub explored: Vec<bool>,
    floor_votes: Vec<u8>,
}

impl OccupancyMap {
    pub fn new(frame: MapFrame) -> OccupancyMap {
        let n = frame.len();
        OccupancyMap { frame, occupied: vec![false; n], explored: vec![false; n], floor_votes: vec![0; n] }
    }

    pub fn is_occupied(&self, c: Cell) -> bool {
        self.occupied[self.frame.idx(c)]
    }

    pub fn is_explored(&self, c: Cell) -> bool {
        self.explored[self.frame.idx(c)]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        let i = self.frame.idx(c);
        self.explored[i] && !self.occupied[i]
    }

    pub fn explored_count(&self) -> usize {
        self.explored.iter().filter(|&&e| e).count()
    }

    /// Force a cell occupied, e.g. after bumping into it.
    pub fn mark_occupied(&mut self, c: Cell) {
        let i = self.frame.idx(c);
        self.occupied[i] = true;
        self.explored[i] = true;
        self.floor_votes[i] = 0;
    }
}

/// Candidate target cells with the category seen there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticGoalMap {
    pub frame: MapFrame,
    pub candidates: Vec<Option<ObjectCategory>>,
}

impl SemanticGoalMap {
    pub fn new(frame: MapFrame) -> SemanticGoalMap {
        SemanticGoalMap { frame, candidates: vec![None; frame.len()] }
    }

    pub fn get(&self, c: Cell) -> Option<ObjectCategory> {
        self.candidates[self.frame.idx(c)]
    }

    pub fn marked(&self) -> impl Iterator<Item = (Cell, ObjectCategory)> + '_ {
        self.frame.cells().filter_map(|c| self.get(c).map(|k| (c, k)))
    }

    pub fn clear(&mut self, c: Cell) {
        let i = self.frame.idx(c);
        self.candidates[i] = None;
    }
}

/// What one frame says about the world, in the global frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LocalMaps {
    pub frame: Option<MapFrame>,
    pub occupied: Vec<Cell>,
    /// Cells whose floor was seen directly.
    pub floor: Vec<Cell>,
    /// Cells crossed by a ray on its way to a hit.
    pub traversed: Vec<Cell>,
    pub semantic: Vec<(Cell, ObjectCategory)>,
}

/// Representative pixel of a mask: the member nearest its centroid.
pub fn mask_anchor(mask: &InstanceMask, size: usize) -> usize {
    let (r, c) = mask.centroid(size);
    *mask
        .pixels
        .iter()
        .min_by(|&&a, &&b| {
            let da = ((a / size) as f64 - r).powi(2) + ((a % size) as f64 - c).powi(2);
            let db = ((b / size) as f64 - r).powi(2) + ((b % size) as f64 - c).powi(2);
            da.total_cmp(&db)
        })
        .expect("masks are non-empty")
}

fn dedup(v: &mut Vec<Cell>) {
    v.sort_unstable();
    v.dedup();
}

/// Back-project a depth image and its object masks into map cells.
pub fn project_local_maps(views: &Views, masks: &[InstanceMask], pose: &Pose, frame: MapFrame) -> LocalMaps {
    let cam = Camera::new(pose, views.size);
    let n = views.size;
    let mut out = LocalMaps { frame: Some(frame), ..LocalMaps::default() };
    let eye = (cam.eye.x, cam.eye.y);
    // rays sharing a horizontal direction carve nested prefixes of one
    // line, so only the farthest-reaching ray per direction bin is walked
    let mut reach: Vec<Option<(f64, f64, f64, Option<Cell>)>> = vec![None; CARVE_BINS];
    for row in 0..n {
        for col in 0..n {
            let d = views.depth[row * n + col];
            let p = cam.unproject(row, col, d);
            let hit = if d < MAX_DEPTH - 1e-9 { frame.cell_of(p.x, p.y) } else { None };
            let (dx, dy) = (p.x - eye.0, p.y - eye.1);
            let len = dx.hypot(dy);
            let bin = ((dy.atan2(dx) + PI) / TAU * CARVE_BINS as f64) as usize % CARVE_BINS;
            if reach[bin].is_none_or(|(l, ..)| len > l) {
                reach[bin] = Some((len, dx, dy, hit));
            }
            let Some(hit) = hit else { continue };
            if p.z < OBSTACLE_MIN_HEIGHT {
                out.floor.push(hit);
            } else if p.z < AGENT_HEIGHT {
                out.occupied.push(hit);
            } else {
                out.traversed.push(hit);
            }
        }
    }
    let step = frame.cell * 0.5;
    for &(len, dx, dy, hit) in reach.iter().flatten() {
        let k = (len / step).floor() as usize;
        for i in 0..k {
            let t = i as f64 * step / len;
            match frame.cell_of(eye.0 + dx * t, eye.1 + dy * t) {
                Some(c) if Some(c) != hit => out.traversed.push(c),
                Some(_) => {}
                None => break,
            }
        }
    }
    for m in masks {
        let a = mask_anchor(m, n);
        let p = cam.unproject(a / n, a % n, views.depth[a]);
        if let Some(c) = frame.cell_of(p.x, p.y) {
            out.semantic.push((c, m.category));
        }
    }
    dedup(&mut out.occupied);
    dedup(&mut out.floor);
    dedup(&mut out.traversed);
    out
}

/// Merge one frame into the global maps. Explored bits and occupancy only
/// grow, except that an occupied cell is cleared after `CLEAR_VOTES` direct
/// floor sightings.
pub fn fuse(occ: &mut OccupancyMap, sem: &mut SemanticGoalMap, local: &LocalMaps) -> Result<()> {
    if let Some(f) = local.frame {
        if f != occ.frame || f != sem.frame {
            return Err(Error::FrameMismatch);
        }
    } else if occ.frame != sem.frame {
        return Err(Error::FrameMismatch);
    }
    let fr = occ.frame;
    for &c in &local.traversed {
        occ.explored[fr.idx(c)] = true;
    }
    for &c in &local.occupied {
        let i = fr.idx(c);
        occ.explored[i] = true;
        occ.occupied[i] = true;
        occ.floor_votes[i] = 0;
    }
    for &c in &local.floor {
        let i = fr.idx(c);
        occ.explored[i] = true;
        if occ.occupied[i] && !local.occupied.contains(&c) {
            occ.floor_votes[i] = occ.floor_votes[i].saturating_add(1);
            if occ.floor_votes[i] >= CLEAR_VOTES {
                occ.occupied[i] = false;
                occ.floor_votes[i] = 0;
            }
        }
    }
    for &(c, k) in &local.semantic {
        let i = fr.idx(c);
        sem.candidates[i] = Some(k);
        occ.explored[i] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::render_views;
    use crate::geom::{Aabb, Vec3};
    use crate::perception::segment;
    use crate::testutil::room_with;
    use crate::world::{SceneGeometry, TARGET_INSTANCE};

    fn frame() -> MapFrame {
        MapFrame::for_room(6.0, 5.0)
    }

    #[test]
    fn wall_line_at_two_meters() {
        let g = SceneGeometry::from_room(&room_with(6.0, 5.0, vec![]));
        let pose = Pose::new(Vec3::new(4.0, 2.5, 0.0), 0.0, 0.0);
        let v = render_views(&g, &pose, 64);
        let local = project_local_maps(&v, &[], &pose, frame());
        let f = frame();
        assert!(!local.occupied.is_empty());
        for &c in &local.occupied {
            let (x, _) = f.center(c);
            assert!((x - 6.0).abs() <= 0.1 + 1e-9, "occupied cell at x = {x}");
        }
        // cells between the agent and the wall were seen free
        let mut occ = OccupancyMap::new(f);
        let mut sem = SemanticGoalMap::new(f);
        fuse(&mut occ, &mut sem, &local).unwrap();
        assert!(occ.is_free(f.cell_of(5.5, 2.5).unwrap()));
        assert!(!occ.is_explored(f.cell_of(1.0, 2.5).unwrap()));
    }

    #[test]
    fn far_depth_gives_free_wedge() {
        let views = Views { size: 8, depth: vec![MAX_DEPTH; 64], semantic: vec![0; 64], instance: vec![0; 64] };
        let pose = Pose::new(Vec3::new(3.0, 2.5, 0.0), 90.0, 0.0);
        let local = project_local_maps(&views, &[], &pose, frame());
        assert!(local.occupied.is_empty());
        assert!(!local.traversed.is_empty());
        assert!(local.traversed.iter().all(|&c| frame().center(c).1 > 2.4));
    }

    #[test]
    fn mask_center_lands_on_target_cell() {
        let tgt = Aabb::new(Vec3::new(4.5, 2.5, 0.05), Vec3::new(0.05, 0.05, 0.05));
        let g = SceneGeometry::from_room(&room_with(6.0, 5.0, vec![])).with_object(tgt, ObjectCategory::Cup, TARGET_INSTANCE);
        let pose = Pose::new(Vec3::new(3.0, 2.5, 0.0), 0.0, -30.0);
        let v = render_views(&g, &pose, 128);
        let masks = segment(&v.semantic, &v.instance, None);
        assert_eq!(masks.len(), 1);
        let local = project_local_maps(&v, &masks, &pose, frame());
        assert_eq!(local.semantic.len(), 1);
        let (c, k) = local.semantic[0];
        assert_eq!(k, ObjectCategory::Cup);
        let (x, y) = frame().center(c);
        assert!((x - 4.5).abs() <= 0.1 && (y - 2.5).abs() <= 0.1, "{x} {y}");
    }

    #[test]
    fn fuse_identity_idempotence_and_mismatch() {
        let g = SceneGeometry::from_room(&room_with(6.0, 5.0, vec![]));
        let pose = Pose::new(Vec3::new(2.0, 2.0, 0.0), 45.0, -30.0);
        let local = project_local_maps(&render_views(&g, &pose, 32), &[], &pose, frame());
        let mut occ = OccupancyMap::new(frame());
        let mut sem = SemanticGoalMap::new(frame());
        fuse(&mut occ, &mut sem, &local).unwrap();
        let snapshot = (occ.clone(), sem.clone());
        fuse(&mut occ, &mut sem, &LocalMaps::default()).unwrap();
        assert_eq!((occ.clone(), sem.clone()), snapshot);
        let mut twice = (occ.clone(), sem.clone());
        fuse(&mut twice.0, &mut twice.1, &local).unwrap();
        assert_eq!(twice.0.occupied, occ.occupied);
        assert_eq!(twice.0.explored, occ.explored);
        let other = LocalMaps { frame: Some(MapFrame::for_room(3.0, 3.0)), ..LocalMaps::default() };
        assert!(matches!(fuse(&mut occ, &mut sem, &other), Err(Error::FrameMismatch)));
    }

    #[test]
    fn occupied_cleared_by_floor_votes() {
        let f = frame();
        let mut occ = OccupancyMap::new(f);
        let mut sem = SemanticGoalMap::new(f);
        occ.mark_occupied((5, 5));
        let local = LocalMaps { frame: Some(f), floor: vec![(5, 5)], ..LocalMaps::default() };
        for k in 1..=CLEAR_VOTES {
            fuse(&mut occ, &mut sem, &local).unwrap();
            assert_eq!(occ.is_occupied((5, 5)), k < CLEAR_VOTES);
        }
        assert!(occ.is_explored((5, 5)));
    }
}
