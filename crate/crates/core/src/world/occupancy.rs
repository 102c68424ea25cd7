//! Ground-truth 2-D occupancy of a room on a regular grid.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::room::RoomVariant;
use crate::geom::Aabb;

/// Default grid cell size in meters.
pub const CELL_SIZE: f64 = 0.1;
/// Anything below this height blocks the agent.
pub const AGENT_HEIGHT: f64 = 1.8;

pub type Cell = (usize, usize);

/// Boolean grid indexed `(ix, iy)`, x-major in storage (`iy * nx + ix`).
/// Cell `(0, 0)` has its lower-left corner at world `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(nx: usize, ny: usize, cell: f64) -> Self {
        Self { cell, nx, ny, occupied: vec![false; nx * ny] }
    }

    pub fn idx(&self, c: Cell) -> usize {
        c.1 * self.nx + c.0
    }

    pub fn in_bounds(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.nx && (iy as usize) < self.ny
    }

    pub fn get(&self, c: Cell) -> bool {
        self.occupied[self.idx(c)]
    }

    pub fn set(&mut self, c: Cell, v: bool) {
        let i = self.idx(c);
        self.occupied[i] = v;
    }

    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<Cell> {
        let ix = (x / self.cell).floor() as i64;
        let iy = (y / self.cell).floor() as i64;
        self.in_bounds(ix, iy).then_some((ix as usize, iy as usize))
    }

    pub fn cell_center(&self, c: Cell) -> (f64, f64) {
        ((c.0 as f64 + 0.5) * self.cell, (c.1 as f64 + 0.5) * self.cell)
    }

    /// Out-of-grid positions count as occupied.
    pub fn is_occupied_world(&self, x: f64, y: f64) -> bool {
        self.world_to_cell(x, y).is_none_or(|c| self.get(c))
    }

    /// Free and not within one cell of an occupied cell.
    pub fn is_traversable(&self, c: Cell) -> bool {
        !self.inflated(1).get(c)
    }

    pub fn is_traversable_world(&self, x: f64, y: f64) -> bool {
        self.world_to_cell(x, y).is_some_and(|c| self.is_traversable(c))
    }

    pub fn count_occupied(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Occupied cells grown by `r` cells in the 8-neighborhood sense.
    pub fn inflated(&self, r: usize) -> OccupancyGrid {
        let mut out = self.clone();
        let r = r as i64;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if !self.get((ix, iy)) {
                    continue;
                }
                for dy in -r..=r {
                    for dx in -r..=r {
                        let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                        if self.in_bounds(x, y) {
                            out.set((x as usize, y as usize), true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn neighbors8(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        const D: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
        D.iter().filter_map(move |&(dx, dy)| {
            let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
            self.in_bounds(x, y).then_some((x as usize, y as usize))
        })
    }

    /// Cells reachable from `start` through cells where `passable` holds.
    pub fn flood(&self, start: Cell, passable: impl Fn(Cell) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.nx * self.ny];
        if !passable(start) {
            return seen;
        }
        let mut q = VecDeque::from([start]);
        seen[self.idx(start)] = true;
        while let Some(c) = q.pop_front() {
            for n in self.neighbors8(c) {
                let i = self.idx(n);
                if !seen[i] && passable(n) {
                    seen[i] = true;
                    q.push_back(n);
                }
            }
        }
        seen
    }

    /// Whether all traversable cells form one 8-connected component.
    pub fn free_space_connected(&self) -> bool {
        let inf = self.inflated(1);
        let cells: Vec<Cell> = (0..self.ny)
            .flat_map(|y| (0..self.nx).map(move |x| (x, y)))
            .filter(|&c| !inf.get(c))
            .collect();
        let Some(&start) = cells.first() else {
            return false;
        };
        let seen = self.flood(start, |c| !inf.get(c));
        cells.iter().all(|&c| seen[self.idx(c)])
    }
}

fn overlaps_open(lo0: f64, hi0: f64, lo1: f64, hi1: f64) -> bool {
    const EPS: f64 = 1e-9;
    lo0 < hi1 - EPS && hi0 > lo1 + EPS
}

/// Rasterize a room: a cell is occupied iff a furnishing box intersects its
/// column below agent height, or it lies on the wall ring at the border.
pub fn static_occupancy(room: &RoomVariant, cell: f64) -> OccupancyGrid {
    assert!(cell > 0.0, "cell size must be positive");
    let nx = (room.dims.x / cell - 1e-9).ceil().max(1.0) as usize;
    let ny = (room.dims.y / cell - 1e-9).ceil().max(1.0) as usize;
    let mut g = OccupancyGrid::new(nx, ny, cell);
    for ix in 0..nx {
        g.set((ix, 0), true);
        g.set((ix, ny - 1), true);
    }
    for iy in 0..ny {
        g.set((0, iy), true);
        g.set((nx - 1, iy), true);
    }
    for f in &room.furnishings {
        rasterize_box(&mut g, &f.bbox);
    }
    g
}

pub fn rasterize_box(g: &mut OccupancyGrid, b: &Aabb) {
    let lo = b.min();
    let hi = b.max();
    if !overlaps_open(lo.z, hi.z, 0.0, AGENT_HEIGHT) {
        return;
    }
    let c = g.cell;
    let ix0 = ((lo.x / c).floor().max(0.0)) as usize;
    let iy0 = ((lo.y / c).floor().max(0.0)) as usize;
    let ix1 = ((hi.x / c).ceil() as usize).min(g.nx);
    let iy1 = ((hi.y / c).ceil() as usize).min(g.ny);
    for iy in iy0..iy1 {
        for ix in ix0..ix1 {
            let (x0, y0) = (ix as f64 * c, iy as f64 * c);
            if overlaps_open(lo.x, hi.x, x0, x0 + c) && overlaps_open(lo.y, hi.y, y0, y0 + c) {
                g.set((ix, iy), true);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::world::material::Material;
    use crate::world::room::{Furnishing, FurnitureKind, RoomType};

    fn empty_room(w: f64, d: f64) -> RoomVariant {
        RoomVariant {
            id: "empty".into(),
            room_type: RoomType::Study,
            dims: Vec3::new(w, d, 2.7),
            wall_material: Material::WoodHard,
            floor_material: Material::WoodHard,
            layout_id: 0,
            seed: 0,
            furnishings: vec![],
            fall_zones: vec![],
        }
    }

    #[test]
    fn empty_room_has_only_wall_border() {
        let g = static_occupancy(&empty_room(4.0, 4.0), 0.1);
        assert_eq!((g.nx, g.ny), (40, 40));
        assert_eq!(g.count_occupied(), 4 * 40 - 4);
        assert!(!g.get((1, 1)));
        assert!(g.get((0, 17)) && g.get((39, 17)));
    }

    #[test]
    fn centered_unit_box_is_ten_by_ten() {
        let mut r = empty_room(4.0, 4.0);
        r.furnishings.push(Furnishing::new(
            FurnitureKind::Cabinet,
            Aabb::new(Vec3::new(2.0, 2.0, 0.5), Vec3::new(0.5, 0.5, 0.5)),
        ));
        let g = static_occupancy(&r, 0.1);
        // independent oracle: a cell is inside iff its center is inside the box
        let mut n = 0;
        for iy in 1..39 {
            for ix in 1..39 {
                let (cx, cy) = g.cell_center((ix, iy));
                let inside = (1.5..2.5).contains(&cx) && (1.5..2.5).contains(&cy);
                assert_eq!(g.get((ix, iy)), inside, "cell {ix},{iy}");
                n += inside as usize;
            }
        }
        assert_eq!(n, 100);
    }

    #[test]
    fn tall_boxes_above_agent_are_ignored() {
        let mut r = empty_room(3.0, 3.0);
        r.furnishings.push(Furnishing::new(
            FurnitureKind::Cabinet,
            Aabb::new(Vec3::new(1.5, 1.5, 2.2), Vec3::new(0.3, 0.3, 0.3)),
        ));
        assert_eq!(static_occupancy(&r, 0.1).count_occupied(), 4 * 30 - 4);
    }

    #[test]
    fn grid_area_matches_room() {
        let g = static_occupancy(&empty_room(4.3, 3.05), 0.1);
        assert_eq!((g.nx, g.ny), (43, 31));
        let area = g.nx as f64 * g.ny as f64 * 0.01;
        assert!((area - 4.3 * 3.05).abs() <= 0.1 * 4.3 + 0.1 * 3.05 + 0.01);
    }
}
