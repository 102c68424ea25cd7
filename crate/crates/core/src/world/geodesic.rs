//! Exact shortest-path costs on 8-connected grids.
//!
//! A path with `p` straight and `q` diagonal steps costs `p + q·√2` cells.
//! Costs are kept as the integer pair and compared exactly, so equal-length
//! paths found by different searches compare equal.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::occupancy::{Cell, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GridCost {
    pub straight: u32,
    pub diagonal: u32,
}

impl GridCost {
    pub const ZERO: GridCost = GridCost { straight: 0, diagonal: 0 };

    pub fn new(straight: u32, diagonal: u32) -> GridCost {
        GridCost { straight, diagonal }
    }

    /// Length in cells.
    pub fn cells(self) -> f64 {
        self.straight as f64 + self.diagonal as f64 * std::f64::consts::SQRT_2
    }

    pub fn step(self, diagonal: bool) -> GridCost {
        if diagonal {
            GridCost::new(self.straight, self.diagonal + 1)
        } else {
            GridCost::new(self.straight + 1, self.diagonal)
        }
    }
}

impl std::ops::Add for GridCost {
    type Output = GridCost;
    fn add(self, o: GridCost) -> GridCost {
        GridCost::new(self.straight + o.straight, self.diagonal + o.diagonal)
    }
}

/// Sign of `a + b·√2` for integers.
fn sign_sqrt2(a: i64, b: i64) -> Ordering {
    match (a.cmp(&0), b.cmp(&0)) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        // opposite signs: compare a² with 2b²
        (Ordering::Greater, Ordering::Less) => (a * a).cmp(&(2 * b * b)),
        (Ordering::Less, Ordering::Greater) => (2 * b * b).cmp(&(a * a)),
    }
}

impl Ord for GridCost {
    fn cmp(&self, o: &GridCost) -> Ordering {
        sign_sqrt2(
            self.straight as i64 - o.straight as i64,
            self.diagonal as i64 - o.diagonal as i64,
        )
        // equal values imply equal pairs since √2 is irrational
    }
}

impl PartialOrd for GridCost {
    fn partial_cmp(&self, o: &GridCost) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub const STEPS8: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// 8-connected successors of `c` under `free`. Diagonal steps need both
/// adjacent orthogonal cells free, so paths never cut corners.
pub fn successors(
    grid: &OccupancyGrid,
    c: Cell,
    free: &impl Fn(Cell) -> bool,
) -> impl Iterator<Item = (Cell, bool)> {
    let (nx, ny) = (grid.nx as i64, grid.ny as i64);
    let mut out = [None; 8];
    for (k, &(dx, dy)) in STEPS8.iter().enumerate() {
        let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
        if x < 0 || y < 0 || x >= nx || y >= ny {
            continue;
        }
        let n = (x as usize, y as usize);
        if !free(n) {
            continue;
        }
        let diag = dx != 0 && dy != 0;
        if diag && !(free((x as usize, c.1)) && free((c.0, y as usize))) {
            continue;
        }
        out[k] = Some((n, diag));
    }
    out.into_iter().flatten()
}

/// Multi-source Dijkstra over free cells; `None` where unreachable.
pub fn distance_field(grid: &OccupancyGrid, sources: &[Cell]) -> Vec<Option<GridCost>> {
    let free = |c: Cell| !grid.get(c);
    let mut dist: Vec<Option<GridCost>> = vec![None; grid.nx * grid.ny];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if free(s) {
            dist[grid.idx(s)] = Some(GridCost::ZERO);
            heap.push(std::cmp::Reverse((GridCost::ZERO, s)));
        }
    }
    while let Some(std::cmp::Reverse((d, c))) = heap.pop() {
        if dist[grid.idx(c)].is_some_and(|best| best < d) {
            continue;
        }
        for (n, diag) in successors(grid, c, &free) {
            let nd = d.step(diag);
            let slot = &mut dist[grid.idx(n)];
            if slot.is_none_or(|old| nd < old) {
                *slot = Some(nd);
                heap.push(std::cmp::Reverse((nd, n)));
            }
        }
    }
    dist
}

/// Free cell whose center is nearest to world `(x, y)`; ties go to the
/// lowest index.
pub fn nearest_free_cell(grid: &OccupancyGrid, x: f64, y: f64) -> Option<Cell> {
    let mut best: Option<(f64, Cell)> = None;
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if grid.get((ix, iy)) {
                continue;
            }
            let (cx, cy) = grid.cell_center((ix, iy));
            let d = (cx - x).powi(2) + (cy - y).powi(2);
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, (ix, iy)));
            }
        }
    }
    best.map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_ordering() {
        assert!(GridCost::new(3, 0) > GridCost::new(0, 2)); // 3 > 2.83
        assert!(GridCost::new(2, 0) < GridCost::new(0, 2));
        assert!(GridCost::new(7, 0) < GridCost::new(0, 5)); // 7 < 7.07
        assert_eq!(GridCost::new(1, 1).cmp(&GridCost::new(1, 1)), Ordering::Equal);
    }

    proptest! {
        #[test]
        fn ordering_agrees_with_floats(a in 0u32..500, b in 0u32..500, c in 0u32..500, d in 0u32..500) {
            let (x, y) = (GridCost::new(a, b), GridCost::new(c, d));
            if (x.cells() - y.cells()).abs() > 1e-9 {
                prop_assert_eq!(x.cmp(&y), x.cells().partial_cmp(&y.cells()).unwrap());
            }
        }
    }

    #[test]
    fn open_grid_distances() {
        let g = OccupancyGrid::new(10, 10, 0.1);
        let d = distance_field(&g, &[(0, 0)]);
        assert_eq!(d[g.idx((0, 9))], Some(GridCost::new(9, 0)));
        assert_eq!(d[g.idx((9, 9))], Some(GridCost::new(0, 9)));
        assert_eq!(d[g.idx((9, 3))], Some(GridCost::new(6, 3)));
    }

    #[test]
    fn no_corner_cutting() {
        let mut g = OccupancyGrid::new(3, 3, 0.1);
        g.set((1, 0), true);
        let d = distance_field(&g, &[(0, 0)]);
        assert_eq!(d[g.idx((1, 1))], Some(GridCost::new(2, 0)));
    }

    #[test]
    fn enclosed_is_unreachable() {
        let mut g = OccupancyGrid::new(5, 5, 0.1);
        for (x, y) in [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (1, 3), (2, 3), (3, 3)] {
            g.set((x, y), true);
        }
        let d = distance_field(&g, &[(0, 0)]);
        assert_eq!(d[g.idx((2, 2))], None);
        assert_eq!(nearest_free_cell(&g, 0.25, 0.25), Some((2, 2)));
    }
}
