//! A* over the agent's occupancy map with exact path costs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::maps::OccupancyMap;
use crate::error::{Error, Result};
use crate::world::{Cell, GridCost, STEPS8};

/// Goal substitution radius, cells (2 m).
pub const GOAL_SEARCH_RADIUS: i64 = 20;
/// Step weights in half-cells: explored 2, unexplored 3 (×1.5).
const KNOWN_WEIGHT: u32 = 2;
const UNKNOWN_WEIGHT: u32 = 3;

/// Obstacle growth used by [`astar`], cells.
pub const INFLATION: usize = 1;

/// Occupied cells grown by [`INFLATION`]; these are never entered.
pub fn blocked_mask(occ: &OccupancyMap) -> Vec<bool> {
    blocked_mask_by(occ, INFLATION)
}

fn blocked_mask_by(occ: &OccupancyMap, r: usize) -> Vec<bool> {
    let f = occ.frame;
    let r = r as i64;
    let n = f.size as i64;
    let mut out = vec![false; f.len()];
    for c in f.cells() {
        if !occ.is_occupied(c) {
            continue;
        }
        for dy in -r..=r {
            for dx in -r..=r {
                let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
                if x >= 0 && y >= 0 && x < n && y < n {
                    out[f.idx((x as usize, y as usize))] = true;
                }
            }
        }
    }
    out
}

/// Cost of entering `c` in half-cell units, straight or diagonal.
fn step_cost(occ: &OccupancyMap, c: Cell, diagonal: bool) -> GridCost {
    let w = if occ.is_explored(c) { KNOWN_WEIGHT } else { UNKNOWN_WEIGHT };
    if diagonal {
        GridCost::new(0, w)
    } else {
        GridCost::new(w, 0)
    }
}

/// Octile distance, scaled like explored steps; admissible and consistent.
fn heuristic(a: Cell, b: Cell) -> GridCost {
    let dx = a.0.abs_diff(b.0) as u32;
    let dy = a.1.abs_diff(b.1) as u32;
    let (lo, hi) = (dx.min(dy), dx.max(dy));
    GridCost::new(KNOWN_WEIGHT * (hi - lo), KNOWN_WEIGHT * lo)
}

/// Path length in meters of a cost returned by [`astar_with_cost`].
pub fn cost_meters(cost: GridCost, cell: f64) -> f64 {
    cost.cells() / KNOWN_WEIGHT as f64 * cell
}

/// The goal itself when enterable, else the nearest enterable explored
/// cell within 2 m, else the goal if it is merely unexplored.
pub fn substitute_goal(occ: &OccupancyMap, blocked: &[bool], goal: Cell) -> Option<Cell> {
    let f = occ.frame;
    if !blocked[f.idx(goal)] && occ.is_explored(goal) {
        return Some(goal);
    }
    let n = f.size as i64;
    let mut best: Option<(i64, Cell)> = None;
    for dy in -GOAL_SEARCH_RADIUS..=GOAL_SEARCH_RADIUS {
        for dx in -GOAL_SEARCH_RADIUS..=GOAL_SEARCH_RADIUS {
            let d2 = dx * dx + dy * dy;
            if d2 > GOAL_SEARCH_RADIUS * GOAL_SEARCH_RADIUS {
                continue;
            }
            let (x, y) = (goal.0 as i64 + dx, goal.1 as i64 + dy);
            if x < 0 || y < 0 || x >= n || y >= n {
                continue;
            }
            let c = (x as usize, y as usize);
            if occ.is_free(c) && !blocked[f.idx(c)] && best.is_none_or(|(b, bc)| (d2, c) < (b, bc)) {
                best = Some((d2, c));
            }
        }
    }
    match best {
        Some((_, c)) => Some(c),
        None if !blocked[f.idx(goal)] => Some(goal),
        None => None,
    }
}

/// Shortest 8-connected path from `start` to `goal` (after substitution),
/// inclusive of both ends, with its cost in half-cell units.
pub fn astar_with_cost(occ: &OccupancyMap, start: Cell, goal: Cell) -> Result<(Vec<Cell>, GridCost)> {
    astar_inflated(occ, start, goal, INFLATION)
}

/// [`astar_with_cost`] with a chosen obstacle growth; 0 lets the agent
/// squeeze past obstacles when the inflated map has no way out.
pub fn astar_inflated(occ: &OccupancyMap, start: Cell, goal: Cell, inflation: usize) -> Result<(Vec<Cell>, GridCost)> {
    let f = occ.frame;
    let blocked = blocked_mask_by(occ, inflation);
    let no_path = || Error::NoPath { start, goal };
    let goal = substitute_goal(occ, &blocked, goal).ok_or_else(no_path)?;
    // the agent's own cell is always usable, even next to a wall
    let passable = |c: Cell| c == start || !blocked[f.idx(c)];
    let mut g: Vec<Option<GridCost>> = vec![None; f.len()];
    let mut parent: Vec<usize> = vec![usize::MAX; f.len()];
    let mut heap = BinaryHeap::new();
    g[f.idx(start)] = Some(GridCost::ZERO);
    heap.push(Reverse((heuristic(start, goal), GridCost::ZERO, start)));
    let n = f.size as i64;
    while let Some(Reverse((_, gc, c))) = heap.pop() {
        if g[f.idx(c)].is_some_and(|best| best < gc) {
            continue;
        }
        if c == goal {
            let mut path = vec![c];
            let mut i = f.idx(c);
            while parent[i] != usize::MAX {
                i = parent[i];
                path.push((i % f.size, i / f.size));
            }
            path.reverse();
            return Ok((path, gc));
        }
        for &(dx, dy) in &STEPS8 {
            let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
            if x < 0 || y < 0 || x >= n || y >= n {
                continue;
            }
            let nb = (x as usize, y as usize);
            let diag = dx != 0 && dy != 0;
            if !passable(nb) || (diag && !(passable((nb.0, c.1)) && passable((c.0, nb.1)))) {
                continue;
            }
            let ng = gc + step_cost(occ, nb, diag);
            let slot = &mut g[f.idx(nb)];
            if slot.is_none_or(|old| ng < old) {
                *slot = Some(ng);
                parent[f.idx(nb)] = f.idx(c);
                heap.push(Reverse((ng + heuristic(nb, goal), ng, nb)));
            }
        }
    }
    Err(no_path())
}

pub fn astar(occ: &OccupancyMap, start: Cell, goal: Cell) -> Result<Vec<Cell>> {
    astar_with_cost(occ, start, goal).map(|(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::maps::MapFrame;
    use rand::Rng;

    fn explored(n: usize) -> OccupancyMap {
        let mut m = OccupancyMap::new(MapFrame { size: n, cell: 0.1, origin: (0.0, 0.0) });
        m.explored.iter_mut().for_each(|e| *e = true);
        m
    }

    #[test]
    fn straight_line() {
        let m = explored(10);
        let p = astar(&m, (0, 0), (0, 9)).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(astar_with_cost(&m, (0, 0), (0, 9)).unwrap().1, GridCost::new(18, 0));
    }

    #[test]
    fn enclosed_goal_fails() {
        let mut m = explored(30);
        for c in m.frame.cells() {
            let (dx, dy) = (c.0 as i64 - 15, c.1 as i64 - 15);
            if dx.abs().max(dy.abs()) == 3 {
                m.mark_occupied(c);
            }
        }
        // the goal itself stays free, so no substitute is taken
        assert!(matches!(astar(&m, (0, 0), (15, 15)), Err(Error::NoPath { .. })));
    }

    #[test]
    fn unexplored_costs_more() {
        let mut m = explored(10);
        for y in 0..10 {
            let i = m.frame.idx((5, y));
            m.explored[i] = false;
        }
        let (_, c) = astar_with_cost(&m, (0, 0), (9, 0)).unwrap();
        assert_eq!(c, GridCost::new(19, 0));
    }

    /// Independent Dijkstra on the inflated grid.
    fn oracle(m: &OccupancyMap, s: Cell, t: Cell) -> Option<GridCost> {
        let f = m.frame;
        let blocked = blocked_mask(m);
        let ok = |c: Cell| c == s || !blocked[f.idx(c)];
        let mut dist = vec![None::<GridCost>; f.len()];
        let mut done = vec![false; f.len()];
        dist[f.idx(s)] = Some(GridCost::ZERO);
        loop {
            let mut u = None;
            for c in f.cells() {
                let i = f.idx(c);
                if let (false, Some(d)) = (done[i], dist[i]) {
                    if u.is_none_or(|(bd, _)| d < bd) {
                        u = Some((d, c));
                    }
                }
            }
            let (d, c) = u?;
            if c == t {
                return Some(d);
            }
            done[f.idx(c)] = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
                    if x < 0 || y < 0 || x >= f.size as i64 || y >= f.size as i64 {
                        continue;
                    }
                    let nb = (x as usize, y as usize);
                    let diag = dx != 0 && dy != 0;
                    if !ok(nb) || (diag && (!ok((nb.0, c.1)) || !ok((c.0, nb.1)))) {
                        continue;
                    }
                    let w = if m.is_explored(nb) { 2 } else { 3 };
                    let nd = if diag { d + GridCost::new(0, w) } else { d + GridCost::new(w, 0) };
                    let i = f.idx(nb);
                    if dist[i].is_none_or(|o| nd < o) {
                        dist[i] = Some(nd);
                    }
                }
            }
        }
    }

    #[test]
    fn matches_dijkstra_on_random_grids() {
        let mut r = crate::rng::stream(11, "astar", 0);
        let mut reachable = 0;
        for _ in 0..100 {
            let mut m = explored(50);
            for i in 0..m.frame.len() {
                if r.gen_bool(0.08) {
                    let c = (i % 50, i / 50);
                    m.mark_occupied(c);
                }
                m.explored[i] = m.occupied[i] || r.gen_bool(0.8);
            }
            let blocked = blocked_mask(&m);
            let pick = |r: &mut rand_chacha::ChaCha8Rng| loop {
                let c = (r.gen_range(0..50), r.gen_range(0..50));
                if !blocked[m.frame.idx(c)] && m.is_explored(c) {
                    return c;
                }
            };
            let (s, t) = (pick(&mut r), pick(&mut r));
            let got = astar_with_cost(&m, s, t).ok().map(|(_, c)| c);
            assert_eq!(got, oracle(&m, s, t));
            reachable += got.is_some() as usize;
        }
        assert!(reachable > 50);
    }
}
