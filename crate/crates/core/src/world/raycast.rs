use std::f64::consts::PI;

use super::{CellPos, GridGeometry, GroundTruthMap, Occupancy, OccupancyGrid, RobotState, SensorModel};
use crate::geometry::Point;

const CORNER_EPS: f64 = 1e-12;

/// Supercover traversal of the segment `a`-`b`: visits, in order, every
/// cell the segment touches, starting with the cell of `a`. When the
/// segment passes exactly through a cell corner both side cells are
/// visited before the diagonal one. `visit` returns false to stop early.
/// Traversal also stops on leaving the grid.
pub fn traverse(geom: &GridGeometry, a: Point, b: Point, mut visit: impl FnMut(CellPos) -> bool) {
    let res = geom.resolution;
    let ax = (a.x - geom.origin.x) / res;
    let ay = (a.y - geom.origin.y) / res;
    let bx = (b.x - geom.origin.x) / res;
    let by = (b.y - geom.origin.y) / res;

    let mut cx = ax.floor() as i64;
    let mut cy = ay.floor() as i64;
    let ex = bx.floor() as i64;
    let ey = by.floor() as i64;
    let dx = bx - ax;
    let dy = by - ay;
    let step_x: i64 = if ex > cx {
        1
    } else if ex < cx {
        -1
    } else {
        0
    };
    let step_y: i64 = if ey > cy {
        1
    } else if ey < cy {
        -1
    } else {
        0
    };
    let t_delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let mut t_max_x = match step_x {
        1 => (cx as f64 + 1.0 - ax) / dx,
        -1 => (ax - cx as f64) / -dx,
        _ => f64::INFINITY,
    };
    let mut t_max_y = match step_y {
        1 => (cy as f64 + 1.0 - ay) / dy,
        -1 => (ay - cy as f64) / -dy,
        _ => f64::INFINITY,
    };

    let mut emit =
        |c: i64, r: i64| -> bool { geom.contains_signed(c, r) && visit(CellPos::new(c as usize, r as usize)) };

    if !emit(cx, cy) {
        return;
    }
    while cx != ex || cy != ey {
        let x_done = cx == ex;
        let y_done = cy == ey;
        if !x_done && !y_done && (t_max_x - t_max_y).abs() < CORNER_EPS {
            if !emit(cx + step_x, cy) || !emit(cx, cy + step_y) {
                return;
            }
            cx += step_x;
            cy += step_y;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
        } else if y_done || (!x_done && t_max_x < t_max_y) {
            cx += step_x;
            t_max_x += t_delta_x;
        } else {
            cy += step_y;
            t_max_y += t_delta_y;
        }
        if !emit(cx, cy) {
            return;
        }
    }
}

/// True when no occupied cell lies on the supercover of `a`-`b`.
/// Unknown cells do not block.
pub fn line_of_sight(grid: &OccupancyGrid, a: Point, b: Point) -> bool {
    let mut clear = true;
    traverse(grid.geometry(), a, b, |c| {
        if grid.get(c) == Occupancy::Occupied {
            clear = false;
        }
        clear
    });
    clear
}

/// Casts the sensor from the robot pose and copies ground truth into the
/// grid along every ray, up to and including the first occupied cell.
///
/// Each of the `beam_count` beams covers an angular slice of `2π / N` and
/// is traced with enough sub-rays that neighboring rays are at most one
/// cell apart at full range, so an unobstructed disk is fully observed.
pub fn sense(gt: &GroundTruthMap, state: &RobotState, sensor: &SensorModel, grid: &mut OccupancyGrid) {
    let geom = *gt.geometry();
    let slice = 2.0 * PI / sensor.beam_count as f64;
    let sub = ((sensor.range_m * slice / geom.resolution).ceil() as usize).max(1);
    let total = sensor.beam_count * sub;
    let origin = state.p_bot;
    for k in 0..total {
        let angle = 2.0 * PI * (k as f64 + 0.5) / total as f64;
        let end = Point::new(
            origin.x + sensor.range_m * angle.cos(),
            origin.y + sensor.range_m * angle.sin(),
        );
        traverse(&geom, origin, end, |c| {
            if gt.is_occupied(c) {
                grid.mark(c, Occupancy::Occupied);
                false
            } else {
                grid.mark(c, Occupancy::Free);
                true
            }
        });
    }
}
