//! Even division of the map bounding box into subregions and selection of
//! the subregions worth exploring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::FrontierSet;
use crate::geometry::{Point, Rect};
use crate::world::{Occupancy, OccupancyGrid, RobotState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub n_sr: usize,
    pub tau_unknown: f64,
    pub samples_per_axis: usize,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            n_sr: 25,
            tau_unknown: 0.8,
            samples_per_axis: 5,
        }
    }
}

impl RegionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sr == 0 {
            return Err(Error::config("n_sr", "must be >= 1"));
        }
        if !(self.tau_unknown > 0.0 && self.tau_unknown < 1.0) {
            return Err(Error::config("tau_unknown", "must lie in (0, 1)"));
        }
        if self.samples_per_axis < 2 {
            return Err(Error::config("samples_per_axis", "must be >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subregion {
    pub col: usize,
    pub row: usize,
    pub bounds: Rect,
    pub center: Point,
}

impl Subregion {
    /// True when the two subregions share an edge of the division.
    pub fn is_grid_adjacent(&self, other: &Subregion) -> bool {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row) == 1
    }
}

/// `n_l x n_h` tiling of a bounding box, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Division {
    pub n_l: usize,
    pub n_h: usize,
    pub aabb: Rect,
    pub subregions: Vec<Subregion>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Division {
    pub fn l_box(&self) -> f64 {
        self.aabb.width()
    }

    pub fn h_box(&self) -> f64 {
        self.aabb.height()
    }

    pub fn id_of(&self, col: usize, row: usize) -> usize {
        row * self.n_l + col
    }

    /// Subregion id containing `p`. Bounds are half-open `[min, max)`,
    /// except the last column and row, which are closed.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let col = slot(&self.xs, p.x)?;
        let row = slot(&self.ys, p.y)?;
        Some(self.id_of(col, row))
    }
}

fn slot(edges: &[f64], v: f64) -> Option<usize> {
    let n = edges.len() - 1;
    if v < edges[0] || v > edges[n] {
        return None;
    }
    Some((edges.partition_point(|&e| e <= v) - 1).min(n - 1))
}

fn edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    let mut e: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    e.push(hi);
    e
}

/// Starts from a 3x3 grid and adds columns (rows) while a subregion is
/// wider (taller) than twice `d_lid`.
pub fn divide(aabb: Rect, d_lid: f64) -> Division {
    let limit = 2.0 * d_lid;
    let mut n_l = 3;
    while aabb.width() / n_l as f64 > limit {
        n_l += 1;
    }
    let mut n_h = 3;
    while aabb.height() / n_h as f64 > limit {
        n_h += 1;
    }
    let xs = edges(aabb.x_min, aabb.x_max, n_l);
    let ys = edges(aabb.y_min, aabb.y_max, n_h);
    let mut subregions = Vec::with_capacity(n_l * n_h);
    for row in 0..n_h {
        for col in 0..n_l {
            let bounds = Rect::new(xs[col], ys[row], xs[col + 1], ys[row + 1]);
            subregions.push(Subregion {
                col,
                row,
                bounds,
                center: bounds.center(),
            });
        }
    }
    Division {
        n_l,
        n_h,
        aabb,
        subregions,
        xs,
        ys,
    }
}

/// Samples a cell-center-aligned `s x s` lattice inside the subregion and
/// reports whether the unknown fraction exceeds `tau_unknown`.
pub fn is_unknown(sr: &Subregion, grid: &OccupancyGrid, samples_per_axis: usize, tau_unknown: f64) -> bool {
    let s = samples_per_axis;
    let dx = sr.bounds.width() / s as f64;
    let dy = sr.bounds.height() / s as f64;
    let mut unknown = 0usize;
    for j in 0..s {
        for i in 0..s {
            let p = Point::new(
                sr.bounds.x_min + (i as f64 + 0.5) * dx,
                sr.bounds.y_min + (j as f64 + 0.5) * dy,
            );
            if grid.get_at(p).unwrap_or(Occupancy::Unknown) == Occupancy::Unknown {
                unknown += 1;
            }
        }
    }
    unknown as f64 / (s * s) as f64 > tau_unknown
}

/// Worth-exploring subregions; `regions[0]` holds the robot.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedRegions {
    pub regions: Vec<Subregion>,
    /// Ids into the division, parallel to `regions`.
    pub ids: Vec<usize>,
    pub cap: usize,
}

impl SelectedRegions {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn centers(&self) -> Vec<Point> {
        self.regions.iter().map(|r| r.center).collect()
    }
}

/// The robot's subregion first, then every subregion holding a frontier
/// point or mostly unknown, in row-major order, capped at `n_sr` in total.
///
/// Panics if the robot lies outside the division.
pub fn select(
    division: &Division,
    fp: &FrontierSet,
    grid: &OccupancyGrid,
    state: &RobotState,
    cfg: &RegionConfig,
) -> SelectedRegions {
    let sr0 = division
        .locate(state.p_bot)
        .expect("robot must lie inside the mapped bounding box");
    let mut has_frontier = vec![false; division.subregions.len()];
    for p in fp.positions() {
        if let Some(id) = division.locate(p) {
            has_frontier[id] = true;
        }
    }
    let mut ids = vec![sr0];
    for (id, sr) in division.subregions.iter().enumerate() {
        if ids.len() >= cfg.n_sr {
            break;
        }
        if id == sr0 {
            continue;
        }
        if has_frontier[id] || is_unknown(sr, grid, cfg.samples_per_axis, cfg.tau_unknown) {
            ids.push(id);
        }
    }
    SelectedRegions {
        regions: ids.iter().map(|&i| division.subregions[i]).collect(),
        ids,
        cap: cfg.n_sr,
    }
}
