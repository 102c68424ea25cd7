use super::maps::OccupancyMap;
use crate::world::Cell;

/// Explored-free cell with an unexplored 4-neighbor.
pub fn is_frontier(occ: &OccupancyMap, c: Cell) -> bool {
    if !occ.is_free(c) {
        return false;
    }
    let n = occ.frame.size as i64;
    [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| {
        let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
        x >= 0 && y >= 0 && x < n && y < n && !occ.is_explored((x as usize, y as usize))
    })
}

/// Frontier cells grouped into 8-connected clusters, largest first; equal
/// sizes are ordered by distance from `from` (cells), then by first cell.
pub fn frontiers(occ: &OccupancyMap, from: Cell) -> Vec<Vec<Cell>> {
    let f = occ.frame;
    let is_f: Vec<bool> = f.cells().map(|c| is_frontier(occ, c)).collect();
    let mut seen = vec![false; f.len()];
    let mut clusters = Vec::new();
    for start in f.cells() {
        if !is_f[f.idx(start)] || seen[f.idx(start)] {
            continue;
        }
        let mut cluster = vec![start];
        seen[f.idx(start)] = true;
        let mut k = 0;
        while k < cluster.len() {
            let c = cluster[k];
            k += 1;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (x, y) = (c.0 as i64 + dx, c.1 as i64 + dy);
                    if x < 0 || y < 0 || x >= f.size as i64 || y >= f.size as i64 {
                        continue;
                    }
                    let n = (x as usize, y as usize);
                    let i = f.idx(n);
                    if is_f[i] && !seen[i] {
                        seen[i] = true;
                        cluster.push(n);
                    }
                }
            }
        }
        cluster.sort_unstable();
        clusters.push(cluster);
    }
    let dist = |cl: &Vec<Cell>| {
        cl.iter()
            .map(|c| ((c.0 as f64 - from.0 as f64).powi(2) + (c.1 as f64 - from.1 as f64).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    clusters.sort_by(|a, b| b.len().cmp(&a.len()).then(dist(a).total_cmp(&dist(b))).then(a[0].cmp(&b[0])));
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::maps::MapFrame;

    fn map(n: usize) -> OccupancyMap {
        OccupancyMap::new(MapFrame { size: n, cell: 0.1, origin: (0.0, 0.0) })
    }

    #[test]
    fn fully_explored_has_none() {
        let mut m = map(10);
        m.explored.iter_mut().for_each(|e| *e = true);
        assert!(frontiers(&m, (0, 0)).is_empty());
    }

    #[test]
    fn half_explored_gives_one_line() {
        let mut m = map(10);
        for c in m.frame.cells() {
            if c.0 < 5 {
                let i = m.frame.idx(c);
                m.explored[i] = true;
            }
        }
        let f = frontiers(&m, (0, 0));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0], (0..10).map(|y| (4, y)).collect::<Vec<_>>());
    }

    #[test]
    fn matches_definition_scan() {
        let mut r = crate::rng::stream(5, "frontier", 0);
        use rand::Rng;
        for _ in 0..20 {
            let mut m = map(30);
            for i in 0..m.frame.len() {
                m.explored[i] = r.gen_bool(0.6);
                m.occupied[i] = m.explored[i] && r.gen_bool(0.2);
            }
            let mut got: Vec<Cell> = frontiers(&m, (0, 0)).concat();
            got.sort_unstable();
            let want: Vec<Cell> = m.frame.cells().filter(|&c| is_frontier(&m, c)).collect::<Vec<_>>();
            let mut want = want;
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }
}
