//! Path planning on the known grid, path following, and the execution
//! state machine that decides between exploring, escaping and returning.

mod astar;

pub use astar::{plan_on, CostMap, DistanceField, CLEARANCE_WEIGHT, INFLATION_PENALTY, SNAP_RADIUS_M};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::FrontierSet;
use crate::geometry::Point;
use crate::world::{OccupancyGrid, RobotState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavConfig {
    pub robot_radius_m: f64,
    /// Paths are discouraged, not forbidden, from passing closer than this
    /// to known obstacles.
    pub clearance_m: f64,
    pub speed_mps: f64,
    pub dt_s: f64,
    pub arrival_tol_m: f64,
    /// Ticks without `stall_progress_m` of progress that count as a stall.
    pub stall_ticks: u64,
    pub stall_progress_m: f64,
    pub tick_budget: u64,
}

impl Default for NavConfig {
    fn default() -> Self {
        Self {
            robot_radius_m: 0.2,
            clearance_m: 0.6,
            speed_mps: 0.5,
            dt_s: 0.1,
            arrival_tol_m: 0.3,
            stall_ticks: 50,
            stall_progress_m: 0.05,
            tick_budget: 30_000,
        }
    }
}

impl NavConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.robot_radius_m >= 0.0) {
            return Err(Error::config("robot_radius_m", "must be >= 0"));
        }
        if !(self.clearance_m >= self.robot_radius_m) {
            return Err(Error::config("clearance_m", "must be >= robot_radius_m"));
        }
        for (key, v) in [
            ("speed_mps", self.speed_mps),
            ("dt_s", self.dt_s),
            ("arrival_tol_m", self.arrival_tol_m),
            ("stall_progress_m", self.stall_progress_m),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, "must be > 0"));
            }
        }
        if self.stall_ticks == 0 {
            return Err(Error::config("stall_ticks", "must be >= 1"));
        }
        if self.tick_budget == 0 {
            return Err(Error::config("tick_budget", "must be >= 1"));
        }
        Ok(())
    }
}

/// Polyline from the robot position to the goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub waypoints: Vec<Point>,
    pub length: f64,
}

impl PlannedPath {
    pub fn new(waypoints: Vec<Point>) -> Self {
        let length = waypoints.windows(2).map(|w| w[0].distance(w[1])).sum();
        Self { waypoints, length }
    }

    pub fn goal(&self) -> Point {
        *self.waypoints.last().expect("paths have at least one waypoint")
    }
}

/// A* from `from` to `to` on the known grid with obstacles inflated by
/// the robot radius.
pub fn plan_path(grid: &OccupancyGrid, from: Point, to: Point, cfg: &NavConfig) -> Result<PlannedPath> {
    plan_on(&CostMap::from_config(grid, cfg), from, to)
}

/// A path plus the index of the next waypoint to reach.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCursor {
    pub path: PlannedPath,
    pub next: usize,
}

impl PathCursor {
    pub fn new(path: PlannedPath) -> Self {
        Self { path, next: 1 }
    }

    pub fn is_finished(&self) -> bool {
        self.next >= self.path.waypoints.len()
    }
}

/// Advances the robot `speed * dt` meters along the path, stopping at the
/// final waypoint. Heading follows the last segment moved along and the
/// odometer grows by the distance covered.
pub fn step(state: &RobotState, cursor: &mut PathCursor, speed: f64, dt: f64) -> RobotState {
    let mut out = *state;
    let mut budget = speed * dt;
    while budget > 0.0 && !cursor.is_finished() {
        let target = cursor.path.waypoints[cursor.next];
        let d = out.p_bot.distance(target);
        if d > 0.0 {
            out.heading = out.p_bot.bearing_to(target);
        }
        if d <= budget {
            out.p_bot = target;
            out.distance_traveled += d;
            budget -= d;
            cursor.next += 1;
        } else {
            let dir = (target - out.p_bot) * (1.0 / d);
            out.p_bot = out.p_bot + dir * budget;
            out.distance_traveled += budget;
            budget = 0.0;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exploring,
    Returning,
    Trapped,
    Done,
}

impl Mode {
    pub fn can_transition_to(self, next: Mode) -> bool {
        use Mode::*;
        matches!(
            (self, next),
            (Exploring, Exploring | Returning | Trapped)
                | (Trapped, Exploring | Trapped)
                | (Returning, Returning | Done)
                | (Done, Done)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecState {
    pub mode: Mode,
    pub stall_ticks: u64,
    /// Robot positions at successful replans, oldest first.
    pub waypoint_history: Vec<Point>,
    /// Goal imposed by the state machine (escape waypoint or `p_ini`).
    pub goal: Option<Point>,
}

impl Default for ExecState {
    fn default() -> Self {
        Self {
            mode: Mode::Exploring,
            stall_ticks: 0,
            waypoint_history: Vec::new(),
            goal: None,
        }
    }
}

/// Decides the next mode once the robot has stopped.
///
/// An empty frontier set sends the robot home, a stall while frontiers
/// remain sends it to the most recent waypoint it can still reach, and a
/// returning robot within `arrival_tol_m` of `p_ini` is done. Each call
/// makes at most one transition.
pub fn state_check(
    fp: &FrontierSet,
    exec: &ExecState,
    state: &RobotState,
    grid: &OccupancyGrid,
    cfg: &NavConfig,
) -> ExecState {
    let mut next = exec.clone();
    let stalled = exec.stall_ticks >= cfg.stall_ticks;
    let home = state.p_bot.distance(state.p_ini) <= cfg.arrival_tol_m;
    match exec.mode {
        Mode::Done => {}
        Mode::Returning => {
            if home {
                next.mode = Mode::Done;
                next.goal = None;
            }
        }
        Mode::Exploring | Mode::Trapped => {
            if fp.is_empty() && exec.mode == Mode::Exploring {
                next.mode = Mode::Returning;
                next.goal = Some(state.p_ini);
            } else if stalled {
                next.stall_ticks = 0;
                match escape_waypoint(&mut next.waypoint_history, state, grid, cfg) {
                    Some(w) => {
                        next.mode = Mode::Trapped;
                        next.goal = Some(w);
                    }
                    None => {
                        next.mode = Mode::Exploring;
                        next.goal = None;
                    }
                }
            } else {
                next.mode = Mode::Exploring;
                next.goal = None;
            }
        }
    }
    next
}

/// Pops history entries until one is reachable and farther than the arrival
/// tolerance from the robot.
fn escape_waypoint(
    history: &mut Vec<Point>,
    state: &RobotState,
    grid: &OccupancyGrid,
    cfg: &NavConfig,
) -> Option<Point> {
    let map = CostMap::from_config(grid, cfg);
    while let Some(w) = history.pop() {
        if w.distance(state.p_bot) > cfg.arrival_tol_m && plan_on(&map, state.p_bot, w).is_ok() {
            return Some(w);
        }
    }
    None
}
