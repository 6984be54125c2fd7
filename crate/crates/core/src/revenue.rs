//! Frontier indicators and revenue-based target selection inside the
//! current subregion.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::{FrontierPoint, FrontierSet};
use crate::geometry::{wrap_angle, Point};
use crate::regions::Subregion;
use crate::world::{line_of_sight, OccupancyGrid, RobotState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicators {
    /// Negated distance to the adjoining edge; zero on the edge.
    pub g_com: f64,
    pub g_inf: usize,
    pub c_mot: f64,
    pub alpha_ori: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevenueWeights {
    pub lambda_c: f64,
    pub lambda_i: f64,
    pub lambda_m: f64,
}

impl Default for RevenueWeights {
    fn default() -> Self {
        Self {
            lambda_c: 1.0,
            lambda_i: 1.0,
            lambda_m: 0.5,
        }
    }
}

impl RevenueWeights {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("lambda_c", self.lambda_c),
            ("lambda_i", self.lambda_i),
            ("lambda_m", self.lambda_m),
        ] {
            if !(v >= 0.0) {
                return Err(Error::config(key, "must be >= 0"));
            }
        }
        if self.lambda_c + self.lambda_i + self.lambda_m <= 0.0 {
            return Err(Error::config("lambda_c", "at least one revenue weight must be > 0"));
        }
        Ok(())
    }
}

/// Edge of `current` the robot should approach before moving on.
///
/// The shared segment when `next` is grid-adjacent, otherwise the edge of
/// `current` nearest `next`'s center, or nearest `p_ini` after the last
/// subregion. Ties go to the earlier edge in bottom, right, top, left order.
pub fn adjoining_edge(current: &Subregion, next: Option<&Subregion>, p_ini: Point) -> (Point, Point) {
    let edges = current.bounds.edges();
    let target = match next {
        Some(n) if current.is_grid_adjacent(n) => {
            let idx = if n.row < current.row {
                0
            } else if n.col > current.col {
                1
            } else if n.row > current.row {
                2
            } else {
                3
            };
            return edges[idx];
        }
        Some(n) => n.center,
        None => p_ini,
    };
    let mut best = edges[0];
    let mut best_d = target.distance_to_segment(best.0, best.1);
    for &e in &edges[1..] {
        let d = target.distance_to_segment(e.0, e.1);
        if d < best_d {
            best = e;
            best_d = d;
        }
    }
    best
}

pub fn global_compatibility(p: &FrontierPoint, current: &Subregion, next: Option<&Subregion>, p_ini: Point) -> f64 {
    let (a, b) = adjoining_edge(current, next, p_ini);
    -p.position.distance_to_segment(a, b)
}

/// Number of other frontier points within `range_m` with a line of sight
/// to `p`. Only occupied cells block.
pub fn information_gain(p: &FrontierPoint, fp: &FrontierSet, grid: &OccupancyGrid, range_m: f64) -> usize {
    fp.points
        .iter()
        .filter(|q| q.id != p.id)
        .filter(|q| q.position.distance(p.position) <= range_m)
        .filter(|q| line_of_sight(grid, p.position, q.position))
        .count()
}

pub fn motion_consistency(alpha_ori: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&alpha_ori) {
        return Err(Error::Domain(alpha_ori));
    }
    Ok((2.0 * (alpha_ori / FRAC_PI_2 - 1.0)).exp())
}

/// Absolute angle in `[0, pi]` between the heading and the bearing to `target`.
pub fn alpha_ori(state: &RobotState, target: Point) -> f64 {
    if target == state.p_bot {
        return 0.0;
    }
    wrap_angle(state.p_bot.bearing_to(target) - state.heading).abs()
}

/// Population z-scores. Zero variance, including a single element, maps
/// every value to zero.
pub fn z_normalize(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if !(std > 0.0) || !std.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / std).collect()
}

/// Everything needed to score the frontier points of one subregion.
#[derive(Debug, Clone, Copy)]
pub struct RevenueContext<'a> {
    pub grid: &'a OccupancyGrid,
    pub fp: &'a FrontierSet,
    pub state: &'a RobotState,
    pub current: &'a Subregion,
    pub next: Option<&'a Subregion>,
    pub range_m: f64,
}

pub fn indicators(p: &FrontierPoint, ctx: &RevenueContext<'_>) -> Indicators {
    let alpha = alpha_ori(ctx.state, p.position);
    Indicators {
        g_com: global_compatibility(p, ctx.current, ctx.next, ctx.state.p_ini),
        g_inf: information_gain(p, ctx.fp, ctx.grid, ctx.range_m),
        c_mot: motion_consistency(alpha).expect("alpha_ori lies in [0, pi]"),
        alpha_ori: alpha,
    }
}

/// Comprehensive revenue of each candidate over z-normalized columns.
pub fn revenues(candidates: &[(FrontierPoint, Indicators)], w: &RevenueWeights) -> Vec<f64> {
    let com = z_normalize(&candidates.iter().map(|c| c.1.g_com).collect::<Vec<_>>());
    let inf = z_normalize(&candidates.iter().map(|c| c.1.g_inf as f64).collect::<Vec<_>>());
    let mot = z_normalize(&candidates.iter().map(|c| c.1.c_mot).collect::<Vec<_>>());
    (0..candidates.len())
        .map(|k| w.lambda_c * com[k] + w.lambda_i * inf[k] - w.lambda_m * mot[k])
        .collect()
}

/// Candidate with the highest revenue; ties go to the one nearest `p_bot`,
/// then to the lowest id.
///
/// Panics on an empty candidate list.
pub fn select_target(candidates: &[(FrontierPoint, Indicators)], w: &RevenueWeights, p_bot: Point) -> FrontierPoint {
    assert!(!candidates.is_empty(), "select_target needs candidates");
    let r = revenues(candidates, w);
    let key = |k: usize| (r[k], candidates[k].0.position.distance(p_bot), candidates[k].0.id);
    let mut best = 0;
    for k in 1..candidates.len() {
        let (rk, dk, ik) = key(k);
        let (rb, db, ib) = key(best);
        if rk > rb || (rk == rb && (dk < db || (dk == db && ik < ib))) {
            best = k;
        }
    }
    candidates[best].0
}

/// CSV audit rows for one selection round.
pub fn indicator_rows(
    tick: u64,
    candidates: &[(FrontierPoint, Indicators)],
    w: &RevenueWeights,
    chosen: usize,
) -> Vec<String> {
    let r = revenues(candidates, w);
    candidates
        .iter()
        .zip(r)
        .map(|((p, ind), rev)| {
            format!(
                "{tick},{},{:.3},{:.3},{:.6},{},{:.6},{:.6},{:.6},{}",
                p.id,
                p.position.x,
                p.position.y,
                ind.g_com,
                ind.g_inf,
                ind.c_mot,
                ind.alpha_ori,
                rev,
                u8::from(p.id == chosen)
            )
        })
        .collect()
}

pub const INDICATOR_CSV_HEADER: &str = "tick,id,x,y,g_com,g_inf,c_mot,alpha_ori,revenue,selected";
