//! Comparison planners: nearest frontier by path length, and the first
//! point of a shortest open tour over all frontier points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::{FrontierPoint, FrontierSet};
use crate::navigate::{CostMap, DistanceField, NavConfig};
use crate::ordering::held_karp;
use crate::world::{OccupancyGrid, RobotState};

/// Largest frontier set ordered exactly; larger sets use a nearest-neighbor tour.
pub const TSP_EXACT_MAX: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlannerKind {
    #[serde(rename = "tdle")]
    Tdle,
    #[serde(rename = "greedy_frontier")]
    GreedyFrontier,
    #[serde(rename = "tsp_frontier")]
    TspFrontier,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::Tdle, PlannerKind::GreedyFrontier, PlannerKind::TspFrontier];

    /// Short tag used on the command line and in reports.
    pub fn tag(self) -> &'static str {
        match self {
            PlannerKind::Tdle => "tdle",
            PlannerKind::GreedyFrontier => "greedy",
            PlannerKind::TspFrontier => "tsp",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tdle" => Ok(PlannerKind::Tdle),
            "greedy" | "greedy_frontier" => Ok(PlannerKind::GreedyFrontier),
            "tsp" | "tsp_frontier" => Ok(PlannerKind::TspFrontier),
            other => Err(Error::config(
                "planner",
                format!("unknown planner `{other}` (valid: tdle, greedy, tsp)"),
            )),
        }
    }
}

/// Frontier point with the shortest path from the robot; ties go to the
/// lowest id.
pub fn greedy_select(
    fp: &FrontierSet,
    grid: &OccupancyGrid,
    state: &RobotState,
    nav: &NavConfig,
) -> Result<FrontierPoint> {
    let map = CostMap::from_config(grid, nav);
    let field = DistanceField::from_source(&map, state.p_bot);
    greedy_select_with(fp, &map, &field)
}

pub fn greedy_select_with(fp: &FrontierSet, map: &CostMap<'_>, field: &DistanceField) -> Result<FrontierPoint> {
    let mut best: Option<(f64, FrontierPoint)> = None;
    for p in &fp.points {
        let Some(len) = map.snap_goal(p.position).and_then(|c| field.length_to(c)) else {
            continue;
        };
        if best.is_none_or(|(bl, bp)| len < bl || (len == bl && p.id < bp.id)) {
            best = Some((len, *p));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::AllUnreachable)
}

/// Shortest open tour from `state.p_bot` through every frontier point with
/// Euclidean edges. Returns indices into `fp.points` and the tour length.
pub fn tsp_tour(fp: &FrontierSet, state: &RobotState) -> (Vec<usize>, f64) {
    let pts: Vec<_> = fp.positions().collect();
    let n = pts.len();
    let start = state.p_bot;
    if n <= TSP_EXACT_MAX {
        let (len, order) =
            held_karp::shortest_open_path(n, |i| start.distance(pts[i]), |i, j| pts[i].distance(pts[j]), |_| 0.0);
        return (order, len);
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut here = start;
    let mut len = 0.0;
    for _ in 0..n {
        let (k, d) = (0..n)
            .filter(|&k| !visited[k])
            .map(|k| (k, here.distance(pts[k])))
            .fold(
                (usize::MAX, f64::INFINITY),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );
        visited[k] = true;
        order.push(k);
        len += d;
        here = pts[k];
    }
    (order, len)
}

/// First point of [`tsp_tour`].
///
/// Panics on an empty frontier set.
pub fn tsp_select(fp: &FrontierSet, state: &RobotState) -> FrontierPoint {
    assert!(!fp.is_empty(), "tsp_select needs frontier points");
    let (order, _) = tsp_tour(fp, state);
    fp.points[order[0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn set(pts: &[(f64, f64)]) -> FrontierSet {
        FrontierSet {
            points: pts
                .iter()
                .enumerate()
                .map(|(id, &(x, y))| FrontierPoint {
                    id,
                    position: Point::new(x, y),
                })
                .collect(),
            capacity: 30,
        }
    }

    #[test]
    fn tags_round_trip() {
        for k in PlannerKind::ALL {
            assert_eq!(k.tag().parse::<PlannerKind>().unwrap(), k);
        }
        assert_eq!(
            "greedy_frontier".parse::<PlannerKind>().unwrap(),
            PlannerKind::GreedyFrontier
        );
        assert!("lkh".parse::<PlannerKind>().is_err());
    }

    #[test]
    fn collinear_tsp_starts_at_near_end() {
        let fp = set(&[(5.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let s = RobotState::at(Point::new(0.0, 0.0));
        assert_eq!(tsp_select(&fp, &s).id, 1);
        assert_eq!(tsp_tour(&fp, &s), (vec![1, 2, 0], 5.0));
    }

    #[test]
    fn large_sets_use_nearest_neighbor() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| ((19 - i) as f64, 0.0)).collect();
        let fp = set(&pts);
        let (order, len) = tsp_tour(&fp, &RobotState::at(Point::new(-1.0, 0.0)));
        assert_eq!(order[0], 19);
        assert_eq!(len, 20.0);
    }
}
