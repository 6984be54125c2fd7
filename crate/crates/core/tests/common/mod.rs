#![allow(dead_code)]

use tdle::world::{parse_ground_truth, CellPos, GridGeometry, GroundTruthMap, Occupancy, OccupancyGrid};
use tdle::{Point, Rect};

/// Closed rectangular world. Cells whose centers fall inside one of
/// `walls` (world coordinates) are walls.
pub fn world(width_m: f64, height_m: f64, res: f64, walls: &[Rect]) -> GroundTruthMap {
    parse_ground_truth(&world_text(width_m, height_m, res, walls)).expect("test world is well formed")
}

/// Map-file text of [`world`].
pub fn world_text(width_m: f64, height_m: f64, res: f64, walls: &[Rect]) -> String {
    let cols = (width_m / res).round() as usize;
    let rows = (height_m / res).round() as usize;
    let mut text = format!("width_m {width_m}\nheight_m {height_m}\nresolution {res}\n");
    for r in (0..rows).rev() {
        for c in 0..cols {
            let center = Point::new((c as f64 + 0.5) * res, (r as f64 + 0.5) * res);
            let border = r == 0 || c == 0 || r == rows - 1 || c == cols - 1;
            let wall = walls.iter().any(|w| w.contains(center));
            text.push(if border || wall { '#' } else { '.' });
        }
        text.push('\n');
    }
    text
}

pub fn geometry(cols: usize, rows: usize, res: f64) -> GridGeometry {
    GridGeometry {
        cols,
        rows,
        resolution: res,
        origin: Point::new(0.0, 0.0),
    }
}

/// Grid with the given world rectangle set to `value`; everything else
/// stays unknown.
pub fn fill(grid: &mut OccupancyGrid, rect: Rect, value: Occupancy) {
    let g = *grid.geometry();
    for r in 0..g.rows {
        for c in 0..g.cols {
            let pos = CellPos::new(c, r);
            if rect.contains(g.cell_center(pos)) && grid.get(pos) == Occupancy::Unknown {
                grid.mark(pos, value);
            }
        }
    }
}

/// Fully known copy of a ground truth map.
pub fn known(gt: &GroundTruthMap) -> OccupancyGrid {
    let g = *gt.geometry();
    let mut grid = OccupancyGrid::unknown(g);
    for r in 0..g.rows {
        for c in 0..g.cols {
            let pos = CellPos::new(c, r);
            let v = if gt.is_occupied(pos) {
                Occupancy::Occupied
            } else {
                Occupancy::Free
            };
            grid.mark(pos, v);
        }
    }
    grid
}

/// Every cell satisfying the frontier predicate, by full scan.
pub fn frontier_cells(grid: &OccupancyGrid) -> Vec<CellPos> {
    let g = *grid.geometry();
    let mut out = Vec::new();
    for r in 0..g.rows {
        for c in 0..g.cols {
            let pos = CellPos::new(c, r);
            if grid.get(pos) == Occupancy::Free && g.neighbors8(pos).any(|n| grid.get(n) == Occupancy::Unknown) {
                out.push(pos);
            }
        }
    }
    out
}

pub fn bundled(name: &str) -> GroundTruthMap {
    parse_ground_truth(tdle::world::bundled_map(name).expect("bundled map")).expect("bundled map parses")
}
