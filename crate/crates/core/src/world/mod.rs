//! Ground-truth environment, robot pose, simulated range sensor and the
//! incrementally built occupancy grid.
//!
//! Mapping is ideal: the simulator supplies the exact pose and every cell a
//! beam reaches takes its ground-truth value.

mod io;
mod raycast;

pub use io::{
    bundled_map, load_ground_truth, parse_ground_truth, write_pgm, PGM_FREE, PGM_OCCUPIED, PGM_PATH, PGM_UNKNOWN,
};
pub use raycast::{line_of_sight, sense, traverse};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

/// Integer cell coordinates; row 0 is the southmost row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellPos {
    pub col: usize,
    pub row: usize,
}

impl CellPos {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Shape and placement of a cell grid in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub cols: usize,
    pub rows: usize,
    /// Meters per cell.
    pub resolution: f64,
    pub origin: Point,
}

impl GridGeometry {
    pub fn width_m(&self) -> f64 {
        self.cols as f64 * self.resolution
    }

    pub fn height_m(&self) -> f64 {
        self.rows as f64 * self.resolution
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, pos: CellPos) -> usize {
        pos.row * self.cols + pos.col
    }

    #[inline]
    pub fn pos_of(&self, index: usize) -> CellPos {
        CellPos::new(index % self.cols, index / self.cols)
    }

    #[inline]
    pub fn contains_signed(&self, col: i64, row: i64) -> bool {
        col >= 0 && row >= 0 && (col as usize) < self.cols && (row as usize) < self.rows
    }

    /// Cell containing a world point, if inside the grid.
    pub fn cell_of(&self, p: Point) -> Option<CellPos> {
        let c = ((p.x - self.origin.x) / self.resolution).floor();
        let r = ((p.y - self.origin.y) / self.resolution).floor();
        if c < 0.0 || r < 0.0 {
            return None;
        }
        let (c, r) = (c as usize, r as usize);
        (c < self.cols && r < self.rows).then_some(CellPos::new(c, r))
    }

    pub fn cell_center(&self, pos: CellPos) -> Point {
        Point::new(
            self.origin.x + (pos.col as f64 + 0.5) * self.resolution,
            self.origin.y + (pos.row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn cell_rect(&self, pos: CellPos) -> Rect {
        let x = self.origin.x + pos.col as f64 * self.resolution;
        let y = self.origin.y + pos.row as f64 * self.resolution;
        Rect::new(x, y, x + self.resolution, y + self.resolution)
    }

    /// In-bounds 8-connected neighbors.
    pub fn neighbors8(&self, pos: CellPos) -> impl Iterator<Item = CellPos> + '_ {
        const OFFSETS: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
        OFFSETS.iter().filter_map(move |&(dc, dr)| {
            let c = pos.col as i64 + dc;
            let r = pos.row as i64 + dr;
            self.contains_signed(c, r).then(|| CellPos::new(c as usize, r as usize))
        })
    }

    /// Cells whose centers lie within `radius` of `center`.
    pub fn cells_in_disk(&self, center: Point, radius: f64) -> impl Iterator<Item = CellPos> + '_ {
        let res = self.resolution;
        let c0 = (((center.x - radius - self.origin.x) / res).floor().max(0.0)) as usize;
        let r0 = (((center.y - radius - self.origin.y) / res).floor().max(0.0)) as usize;
        let c1 = (((center.x + radius - self.origin.x) / res).floor() as i64).clamp(-1, self.cols as i64 - 1);
        let r1 = (((center.y + radius - self.origin.y) / res).floor() as i64).clamp(-1, self.rows as i64 - 1);
        let r2 = radius * radius;
        (r0 as i64..=r1).flat_map(move |r| {
            (c0 as i64..=c1).filter_map(move |c| {
                let pos = CellPos::new(c as usize, r as usize);
                let q = self.cell_center(pos);
                let (dx, dy) = (q.x - center.x, q.y - center.y);
                (dx * dx + dy * dy <= r2).then_some(pos)
            })
        })
    }
}

/// The true environment: every cell is free or occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthMap {
    geometry: GridGeometry,
    occupied: Vec<bool>,
}

impl GroundTruthMap {
    /// Builds a map, rejecting it unless every border cell is occupied.
    pub fn new(geometry: GridGeometry, occupied: Vec<bool>) -> Result<Self> {
        assert_eq!(occupied.len(), geometry.len(), "cell count mismatch");
        let map = Self { geometry, occupied };
        if let Some(pos) = map.first_open_border_cell() {
            return Err(Error::OpenWorld {
                col: pos.col,
                row: pos.row,
            });
        }
        Ok(map)
    }

    fn first_open_border_cell(&self) -> Option<CellPos> {
        let g = &self.geometry;
        let bottom_top = (0..g.cols).flat_map(|c| [CellPos::new(c, 0), CellPos::new(c, g.rows - 1)]);
        let sides = (0..g.rows).flat_map(|r| [CellPos::new(0, r), CellPos::new(g.cols - 1, r)]);
        bottom_top.chain(sides).find(|&p| !self.is_occupied(p))
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn width_m(&self) -> f64 {
        self.geometry.width_m()
    }

    pub fn height_m(&self) -> f64 {
        self.geometry.height_m()
    }

    #[inline]
    pub fn is_occupied(&self, pos: CellPos) -> bool {
        self.occupied[self.geometry.index(pos)]
    }

    pub fn is_free_at(&self, p: Point) -> bool {
        self.geometry.cell_of(p).is_some_and(|c| !self.is_occupied(c))
    }

    pub fn free_cell_count(&self) -> usize {
        self.occupied.iter().filter(|o| !**o).count()
    }

    /// Free cells 4-connected to `start` (empty if `start` is not free).
    pub fn reachable_free_cells(&self, start: Point) -> Vec<CellPos> {
        let g = &self.geometry;
        let Some(s) = g.cell_of(start).filter(|&c| !self.is_occupied(c)) else {
            return Vec::new();
        };
        let mut seen = vec![false; g.len()];
        let mut stack = vec![s];
        seen[g.index(s)] = true;
        let mut out = Vec::new();
        while let Some(p) = stack.pop() {
            out.push(p);
            let candidates = [
                (p.col as i64 - 1, p.row as i64),
                (p.col as i64 + 1, p.row as i64),
                (p.col as i64, p.row as i64 - 1),
                (p.col as i64, p.row as i64 + 1),
            ];
            for (c, r) in candidates {
                if !g.contains_signed(c, r) {
                    continue;
                }
                let q = CellPos::new(c as usize, r as usize);
                let i = g.index(q);
                if !seen[i] && !self.occupied[i] {
                    seen[i] = true;
                    stack.push(q);
                }
            }
        }
        out
    }
}

/// Ternary cell state of the robot's map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Occupancy {
    Unknown,
    Free,
    Occupied,
}

/// The robot's map, built from sensing. Known cells never change.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    geometry: GridGeometry,
    cells: Vec<Occupancy>,
    known: usize,
    // (min_col, min_row, max_col, max_row) over known cells
    bounds: Option<(usize, usize, usize, usize)>,
}

impl OccupancyGrid {
    pub fn unknown(geometry: GridGeometry) -> Self {
        Self {
            geometry,
            cells: vec![Occupancy::Unknown; geometry.len()],
            known: 0,
            bounds: None,
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution
    }

    #[inline]
    pub fn get(&self, pos: CellPos) -> Occupancy {
        self.cells[self.geometry.index(pos)]
    }

    pub fn get_at(&self, p: Point) -> Option<Occupancy> {
        self.geometry.cell_of(p).map(|c| self.get(c))
    }

    pub fn cells(&self) -> &[Occupancy] {
        &self.cells
    }

    /// Records a sensed value for an unknown cell. Returns false (and leaves
    /// the cell untouched) when the cell was already known.
    pub fn mark(&mut self, pos: CellPos, value: Occupancy) -> bool {
        debug_assert!(value != Occupancy::Unknown);
        let i = self.geometry.index(pos);
        if self.cells[i] != Occupancy::Unknown {
            return false;
        }
        self.cells[i] = value;
        self.known += 1;
        self.bounds = Some(match self.bounds {
            None => (pos.col, pos.row, pos.col, pos.row),
            Some((c0, r0, c1, r1)) => (c0.min(pos.col), r0.min(pos.row), c1.max(pos.col), r1.max(pos.row)),
        });
        true
    }

    pub fn known_count(&self) -> usize {
        self.known
    }

    pub fn known_area_m2(&self) -> f64 {
        self.known as f64 * self.geometry.resolution * self.geometry.resolution
    }

    #[inline]
    pub fn is_known_free(&self, pos: CellPos) -> bool {
        self.get(pos) == Occupancy::Free
    }

    pub fn is_known_free_at(&self, p: Point) -> bool {
        self.get_at(p) == Some(Occupancy::Free)
    }

    /// A frontier cell is a known-free cell with at least one unknown
    /// 8-neighbor.
    pub fn is_frontier_cell(&self, pos: CellPos) -> bool {
        self.is_known_free(pos) && self.geometry.neighbors8(pos).any(|n| self.get(n) == Occupancy::Unknown)
    }

    /// Minimal axis-aligned rectangle covering every known cell.
    pub fn map_aabb(&self) -> Result<Rect> {
        let (c0, r0, c1, r1) = self.bounds.ok_or(Error::EmptyMap)?;
        let lo = self.geometry.cell_rect(CellPos::new(c0, r0));
        let hi = self.geometry.cell_rect(CellPos::new(c1, r1));
        Ok(Rect::new(lo.x_min, lo.y_min, hi.x_max, hi.y_max))
    }
}

/// Robot pose and odometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub p_bot: Point,
    /// Radians in (-pi, pi].
    pub heading: f64,
    pub p_ini: Point,
    pub distance_traveled: f64,
}

impl RobotState {
    pub fn at(p: Point) -> Self {
        Self {
            p_bot: p,
            heading: 0.0,
            p_ini: p,
            distance_traveled: 0.0,
        }
    }
}

/// Planar range sensor with a full 360 degree field of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub range_m: f64,
    pub beam_count: usize,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            range_m: 10.0,
            beam_count: 360,
        }
    }
}

impl SensorModel {
    /// Diameter of the sensor footprint.
    pub fn d_lid(&self) -> f64 {
        2.0 * self.range_m
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range_m > 0.0) {
            return Err(Error::config("range_m", "must be > 0"));
        }
        if self.beam_count < 8 {
            return Err(Error::config("beam_count", "must be >= 8"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(cols: usize, rows: usize) -> GridGeometry {
        GridGeometry {
            cols,
            rows,
            resolution: 1.0,
            origin: Point::default(),
        }
    }

    #[test]
    fn aabb_single_cell() {
        let mut g = OccupancyGrid::unknown(geom(20, 20));
        g.mark(CellPos::new(5, 5), Occupancy::Free);
        assert_eq!(g.map_aabb().unwrap(), Rect::new(5.0, 5.0, 6.0, 6.0));
    }

    #[test]
    fn aabb_corners() {
        let mut g = OccupancyGrid::unknown(GridGeometry {
            resolution: 0.5,
            ..geom(40, 40)
        });
        g.mark(CellPos::new(0, 0), Occupancy::Free);
        g.mark(CellPos::new(20, 8), Occupancy::Occupied);
        // direct enumeration: cells (0,0) and (20,8) span [0, 10.5] x [0, 4.5]
        let r = g.map_aabb().unwrap();
        assert_eq!(r, Rect::new(0.0, 0.0, 10.5, 4.5));
        assert_eq!(r.width(), 10.0 + 0.5);
        assert_eq!(r.height(), 4.0 + 0.5);
    }

    #[test]
    fn aabb_empty_errors() {
        let g = OccupancyGrid::unknown(geom(4, 4));
        assert!(matches!(g.map_aabb(), Err(Error::EmptyMap)));
    }

    #[test]
    fn mark_is_write_once() {
        let mut g = OccupancyGrid::unknown(geom(4, 4));
        assert!(g.mark(CellPos::new(1, 1), Occupancy::Free));
        assert!(!g.mark(CellPos::new(1, 1), Occupancy::Occupied));
        assert_eq!(g.get(CellPos::new(1, 1)), Occupancy::Free);
        assert_eq!(g.known_count(), 1);
    }

    #[test]
    fn frontier_predicate() {
        let mut g = OccupancyGrid::unknown(geom(3, 3));
        g.mark(CellPos::new(1, 1), Occupancy::Free);
        assert!(g.is_frontier_cell(CellPos::new(1, 1)));
        for r in 0..3 {
            for c in 0..3 {
                g.mark(CellPos::new(c, r), Occupancy::Free);
            }
        }
        assert!(!g.is_frontier_cell(CellPos::new(1, 1)));
    }

    #[test]
    fn disk_cells() {
        let g = geom(10, 10);
        let n = g.cells_in_disk(Point::new(5.0, 5.0), 1.0).count();
        // centers at (4.5|5.5, 4.5|5.5) only
        assert_eq!(n, 4);
        // membership is by cell center: (0.5, 0.5) is 0.566 away here
        assert_eq!(g.cells_in_disk(Point::new(0.1, 0.1), 0.5).count(), 0);
        let cells: Vec<_> = g.cells_in_disk(Point::new(0.4, 0.4), 0.5).collect();
        assert_eq!(cells, vec![CellPos::new(0, 0)]);
    }
}
