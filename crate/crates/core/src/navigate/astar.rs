use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use super::{NavConfig, PlannedPath};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::world::{CellPos, GridGeometry, Occupancy, OccupancyGrid};

/// Cost multiplier for entering a cell within the robot radius of an
/// occupied cell.
pub const INFLATION_PENALTY: f64 = 5.0;

/// Peak extra cost factor of the clearance band, reached at the robot radius.
pub const CLEARANCE_WEIGHT: f64 = 1.0;

/// Goals outside known-free space snap to a known-free cell this close.
pub const SNAP_RADIUS_M: f64 = 1.0;

const NEIGHBORS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Known-free traversability plus per-cell cost factors derived from the
/// distance to the nearest known obstacle.
#[derive(Debug, Clone)]
pub struct CostMap<'a> {
    grid: &'a OccupancyGrid,
    factor: Vec<f32>,
    inflation_m: f64,
}

impl<'a> CostMap<'a> {
    /// Cells within `robot_radius_m` of an occupied cell are inflated;
    /// beyond that the cost factor decays quadratically to 1 at
    /// `clearance_m`.
    pub fn new(grid: &'a OccupancyGrid, robot_radius_m: f64, clearance_m: f64) -> Self {
        let geom = grid.geometry();
        let res = geom.resolution;
        let outer = clearance_m.max(robot_radius_m);
        let mut dist = vec![f32::INFINITY; geom.len()];
        if outer > 0.0 {
            let reach = (outer / res).ceil() as i64;
            let is_occ = |c: i64, r: i64| {
                geom.contains_signed(c, r) && grid.get(CellPos::new(c as usize, r as usize)) == Occupancy::Occupied
            };
            for (i, &cell) in grid.cells().iter().enumerate() {
                if cell != Occupancy::Occupied {
                    continue;
                }
                let p = geom.pos_of(i);
                let (c0, r0) = (p.col as i64, p.row as i64);
                // cells surrounded by obstacles are never nearest to free space
                if is_occ(c0 + 1, r0) && is_occ(c0 - 1, r0) && is_occ(c0, r0 + 1) && is_occ(c0, r0 - 1) {
                    continue;
                }
                for dr in -reach..=reach {
                    for dc in -reach..=reach {
                        let (c, r) = (c0 + dc, r0 + dr);
                        if !geom.contains_signed(c, r) {
                            continue;
                        }
                        let d = ((dc * dc + dr * dr) as f64).sqrt() * res;
                        let k = geom.index(CellPos::new(c as usize, r as usize));
                        if (d as f32) < dist[k] {
                            dist[k] = d as f32;
                        }
                    }
                }
            }
        }
        let band = outer - robot_radius_m;
        let factor = dist
            .iter()
            .map(|&d| {
                let d = d as f64;
                if d <= robot_radius_m + 1e-9 {
                    INFLATION_PENALTY as f32
                } else if d < outer && band > 0.0 {
                    let t = (outer - d) / band;
                    (1.0 + CLEARANCE_WEIGHT * t * t) as f32
                } else {
                    1.0
                }
            })
            .collect();
        Self {
            grid,
            factor,
            inflation_m: robot_radius_m,
        }
    }

    pub fn from_config(grid: &'a OccupancyGrid, cfg: &NavConfig) -> Self {
        Self::new(grid, cfg.robot_radius_m, cfg.clearance_m)
    }

    pub fn robot_radius_m(&self) -> f64 {
        self.inflation_m
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.grid.geometry()
    }

    pub fn passable(&self, pos: CellPos) -> bool {
        self.grid.is_known_free(pos)
    }

    pub fn is_inflated(&self, pos: CellPos) -> bool {
        self.cost_factor(pos) >= INFLATION_PENALTY
    }

    pub fn cost_factor(&self, pos: CellPos) -> f64 {
        self.factor[self.geometry().index(pos)] as f64
    }

    /// Passable 8-neighbors with their geometric step length. Diagonal
    /// moves need both orthogonal side cells passable.
    fn successors(&self, pos: CellPos, out: &mut Vec<(CellPos, f64)>) {
        out.clear();
        let g = self.geometry();
        let ok = |c: i64, r: i64| g.contains_signed(c, r) && self.passable(CellPos::new(c as usize, r as usize));
        let (c0, r0) = (pos.col as i64, pos.row as i64);
        for (dc, dr) in NEIGHBORS {
            let (c, r) = (c0 + dc, r0 + dr);
            if !ok(c, r) {
                continue;
            }
            let step = if dc != 0 && dr != 0 {
                if !ok(c0 + dc, r0) || !ok(c0, r0 + dr) {
                    continue;
                }
                SQRT_2
            } else {
                1.0
            };
            out.push((CellPos::new(c as usize, r as usize), step * g.resolution));
        }
    }

    fn step_cost(&self, to: CellPos, length: f64) -> f64 {
        length * self.cost_factor(to)
    }

    /// Target cell for `to`: its own cell when known-free, else the nearest
    /// known-free cell within [`SNAP_RADIUS_M`] (lowest index on ties).
    pub fn snap_goal(&self, to: Point) -> Option<CellPos> {
        let g = self.geometry();
        if let Some(c) = g.cell_of(to).filter(|&c| self.passable(c)) {
            return Some(c);
        }
        let mut best: Option<(f64, CellPos)> = None;
        for c in g.cells_in_disk(to, SNAP_RADIUS_M) {
            if !self.passable(c) {
                continue;
            }
            let d = g.cell_center(c).distance(to);
            if best.is_none_or(|(bd, bc)| d < bd || (d == bd && g.index(c) < g.index(bc))) {
                best = Some((d, c));
            }
        }
        best.map(|(_, c)| c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    key: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on key, then index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn octile(a: CellPos, b: CellPos, res: f64) -> f64 {
    let dx = a.col.abs_diff(b.col) as f64;
    let dy = a.row.abs_diff(b.row) as f64;
    (dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy)) * res
}

fn unreachable(from: Point, to: Point) -> Error {
    Error::Unreachable {
        from_x: from.x,
        from_y: from.y,
        to_x: to.x,
        to_y: to.y,
    }
}

/// A* over known-free cells with 8-connectivity and an octile heuristic.
/// Steps cost their length times the entered cell's cost factor; the
/// reported length is geometric.
pub fn plan_on(map: &CostMap<'_>, from: Point, to: Point) -> Result<PlannedPath> {
    let g = map.geometry();
    let start = g
        .cell_of(from)
        .filter(|&c| map.passable(c))
        .ok_or_else(|| unreachable(from, to))?;
    let goal = map.snap_goal(to).ok_or_else(|| unreachable(from, to))?;
    let goal_point = if g.cell_of(to) == Some(goal) {
        to
    } else {
        g.cell_center(goal)
    };
    if start == goal {
        let mut waypoints = vec![from];
        if goal_point != from {
            waypoints.push(goal_point);
        }
        return Ok(PlannedPath::new(waypoints));
    }

    let n = g.len();
    let mut cost = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let si = g.index(start);
    let gi = g.index(goal);
    cost[si] = 0.0;
    heap.push(Entry {
        key: octile(start, goal, g.resolution),
        index: si,
    });
    let mut succ = Vec::with_capacity(8);
    while let Some(Entry { index, .. }) = heap.pop() {
        if closed[index] {
            continue;
        }
        closed[index] = true;
        if index == gi {
            break;
        }
        let pos = g.pos_of(index);
        map.successors(pos, &mut succ);
        for &(next, length) in &succ {
            let ni = g.index(next);
            if closed[ni] {
                continue;
            }
            let c = cost[index] + map.step_cost(next, length);
            if c < cost[ni] {
                cost[ni] = c;
                parent[ni] = index;
                heap.push(Entry {
                    key: c + octile(next, goal, g.resolution),
                    index: ni,
                });
            }
        }
    }
    if !closed[gi] {
        return Err(unreachable(from, to));
    }

    let mut cells = Vec::new();
    let mut i = parent[gi];
    while i != si {
        cells.push(g.cell_center(g.pos_of(i)));
        i = parent[i];
    }
    cells.reverse();
    let mut waypoints = Vec::with_capacity(cells.len() + 2);
    waypoints.push(from);
    waypoints.extend(cells);
    waypoints.push(goal_point);
    Ok(PlannedPath::new(waypoints))
}

/// Cost-optimal paths from one source to every reachable cell, as found by
/// [`plan_on`], with their geometric lengths.
#[derive(Debug, Clone)]
pub struct DistanceField {
    length: Vec<f64>,
    geometry: GridGeometry,
}

impl DistanceField {
    pub fn from_source(map: &CostMap<'_>, from: Point) -> Self {
        let g = *map.geometry();
        let n = g.len();
        let mut length = vec![f64::INFINITY; n];
        let Some(start) = g.cell_of(from).filter(|&c| map.passable(c)) else {
            return Self { length, geometry: g };
        };
        let mut cost = vec![f64::INFINITY; n];
        let mut closed = vec![false; n];
        let mut heap = BinaryHeap::new();
        let si = g.index(start);
        cost[si] = 0.0;
        length[si] = 0.0;
        heap.push(Entry { key: 0.0, index: si });
        let mut succ = Vec::with_capacity(8);
        while let Some(Entry { index, .. }) = heap.pop() {
            if closed[index] {
                continue;
            }
            closed[index] = true;
            map.successors(g.pos_of(index), &mut succ);
            for &(next, step) in &succ {
                let ni = g.index(next);
                if closed[ni] {
                    continue;
                }
                let c = cost[index] + map.step_cost(next, step);
                if c < cost[ni] {
                    cost[ni] = c;
                    length[ni] = length[index] + step;
                    heap.push(Entry { key: c, index: ni });
                }
            }
        }
        Self { length, geometry: g }
    }

    /// Approximate path length to `pos` (cell-center to cell-center), or
    /// `None` when unreachable.
    pub fn length_to(&self, pos: CellPos) -> Option<f64> {
        let l = self.length[self.geometry.index(pos)];
        l.is_finite().then_some(l)
    }
}
