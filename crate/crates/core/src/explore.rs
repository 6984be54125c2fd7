//! One simulated exploration run: sense, detect frontiers, choose a target
//! with the configured planner, drive there, and return home once no
//! frontier remains.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{greedy_select_with, tsp_select, PlannerKind};
use crate::bench::RunMetrics;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::frontier::{epsilon_filter, FrontierDetector, FrontierPoint, FrontierSet};
use crate::geometry::Point;
use crate::navigate::{plan_on, state_check, step, CostMap, DistanceField, ExecState, Mode, PathCursor};
use crate::ordering::{arrange, Route};
use crate::regions::{divide, select};
use crate::revenue::{indicator_rows, indicators, select_target, RevenueContext};
use crate::world::{
    bundled_map, load_ground_truth, parse_ground_truth, sense, GroundTruthMap, OccupancyGrid, RobotState,
};

/// Mixed into the run seed for the ordering random source so that it is
/// independent of the frontier detector's stream.
const ORDERING_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Loads `map` from disk, or a bundled map when `map` names one
/// (`museum`, `library`, optionally with a `.map` suffix) and no such file
/// exists.
pub fn resolve_map(map: &str) -> Result<GroundTruthMap> {
    let path = Path::new(map);
    if path.exists() {
        return load_ground_truth(path);
    }
    let bare = path.parent().is_none_or(|p| p.as_os_str().is_empty());
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    match bundled_map(stem) {
        Some(text) if bare && (map == stem || map == format!("{stem}.map")) => parse_ground_truth(text),
        _ => Err(Error::io(path, std::io::Error::from(std::io::ErrorKind::NotFound))),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    /// Robot position after every tick, starting at the initial position.
    pub trajectory: Vec<Point>,
    pub grid: OccupancyGrid,
    /// Indicator audit rows for the target selections of the run.
    pub indicator_rows: Vec<String>,
}

enum Plan {
    Target(FrontierPoint),
    /// No candidate could be chosen; the listed points are abandoned.
    Abandon(Vec<Point>),
}

/// Target-selection state that persists across planning cycles.
struct Selector<'a> {
    cfg: &'a ScenarioConfig,
    planner: PlannerKind,
    rng: ChaCha8Rng,
    prev_route: Option<Route>,
    latencies_ms: Vec<f64>,
    plan_invocations: usize,
    audit: Vec<String>,
}

struct Explorer<'a> {
    cfg: &'a ScenarioConfig,
    grid: OccupancyGrid,
    state: RobotState,
    exec: ExecState,
    detector: FrontierDetector,
    selector: Selector<'a>,
    cursor: Option<PathCursor>,
    target: Option<Point>,
    blacklist: Vec<Point>,
    tick: u64,
}

/// Runs one exploration to completion on `gt`.
pub fn run(gt: &GroundTruthMap, cfg: &ScenarioConfig, planner: PlannerKind, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let start = cfg.start();
    if !gt.is_free_at(start) {
        return Err(Error::BadStart(start.x, start.y));
    }
    let mut ex = Explorer {
        cfg,
        grid: OccupancyGrid::unknown(*gt.geometry()),
        state: RobotState::at(start),
        exec: ExecState::default(),
        detector: FrontierDetector::new(cfg.frontier.clone(), seed),
        selector: Selector {
            cfg,
            planner,
            rng: ChaCha8Rng::seed_from_u64(seed ^ ORDERING_STREAM),
            prev_route: None,
            latencies_ms: Vec::new(),
            plan_invocations: 0,
            audit: Vec::new(),
        },
        cursor: None,
        target: None,
        blacklist: Vec::new(),
        tick: 0,
    };
    sense(gt, &ex.state, &cfg.sensor, &mut ex.grid);

    let mut trajectory = vec![ex.state.p_bot];
    let mut sample_ticks = vec![0];
    let mut distance_m = vec![0.0];
    let mut area_m2 = vec![ex.grid.known_area_m2()];
    let mut anchor = ex.state.p_bot;

    while ex.exec.mode != Mode::Done {
        if ex.tick >= cfg.nav.tick_budget {
            return Err(Error::TickBudget {
                budget: cfg.nav.tick_budget,
            });
        }
        if ex.cursor.is_none() {
            ex.replan();
            if ex.exec.mode == Mode::Done {
                break;
            }
        }
        ex.tick += 1;
        if let Some(cursor) = ex.cursor.as_mut() {
            ex.state = step(&ex.state, cursor, cfg.nav.speed_mps, cfg.nav.dt_s);
            sense(gt, &ex.state, &cfg.sensor, &mut ex.grid);
        }
        trajectory.push(ex.state.p_bot);

        if ex.state.p_bot.distance(anchor) >= cfg.nav.stall_progress_m {
            anchor = ex.state.p_bot;
            ex.exec.stall_ticks = 0;
        } else {
            ex.exec.stall_ticks += 1;
        }
        ex.after_step();

        if ex.tick.is_multiple_of(cfg.record_every) {
            sample_ticks.push(ex.tick);
            distance_m.push(ex.state.distance_traveled);
            area_m2.push(ex.grid.known_area_m2());
        }
    }
    if sample_ticks.last() != Some(&ex.tick) {
        sample_ticks.push(ex.tick);
        distance_m.push(ex.state.distance_traveled);
        area_m2.push(ex.grid.known_area_m2());
    }

    let reachable = gt.reachable_free_cells(start);
    let known = reachable.iter().filter(|&&c| ex.grid.is_known_free(c)).count();
    let coverage = known as f64 / reachable.len().max(1) as f64;
    let final_area = *area_m2.last().expect("samples are non-empty");
    let final_distance = ex.state.distance_traveled;
    let metrics = RunMetrics {
        planner,
        seed,
        ticks: ex.tick,
        final_mode: ex.exec.mode,
        sample_ticks,
        explored_area_m2: area_m2,
        distance_m,
        exploration_rate: if final_distance > 0.0 {
            final_area / final_distance
        } else {
            0.0
        },
        coverage,
        final_position: ex.state.p_bot,
        return_error_m: ex.state.p_bot.distance(start),
        plan_invocations: ex.selector.plan_invocations,
        plan_latencies_ms: ex.selector.latencies_ms,
    };
    Ok(RunOutput {
        metrics,
        trajectory,
        grid: ex.grid,
        indicator_rows: ex.selector.audit,
    })
}

impl Selector<'_> {
    fn choose(
        &mut self,
        fp: &FrontierSet,
        map: &CostMap<'_>,
        grid: &OccupancyGrid,
        state: &RobotState,
        tick: u64,
    ) -> Plan {
        self.plan_invocations += 1;
        match self.planner {
            PlannerKind::GreedyFrontier => {
                let field = DistanceField::from_source(map, state.p_bot);
                match greedy_select_with(fp, map, &field) {
                    Ok(p) => Plan::Target(p),
                    Err(_) => Plan::Abandon(fp.positions().collect()),
                }
            }
            PlannerKind::TspFrontier => {
                let t0 = Instant::now();
                let p = tsp_select(fp, state);
                self.latencies_ms.push(t0.elapsed().as_secs_f64() * 1e3);
                Plan::Target(p)
            }
            PlannerKind::Tdle => Plan::Target(self.choose_tdle(fp, grid, state, tick)),
        }
    }

    /// Orders the subregions, then scores the frontier points of the first
    /// subregion along the route that holds any.
    fn choose_tdle(&mut self, fp: &FrontierSet, grid: &OccupancyGrid, state: &RobotState, tick: u64) -> FrontierPoint {
        let t0 = Instant::now();
        let aabb = grid.map_aabb().expect("the robot's surroundings are known");
        let division = divide(aabb, self.cfg.sensor.d_lid());
        let sel = select(&division, fp, grid, state, &self.cfg.regions);
        let route = arrange(
            &sel,
            self.prev_route.as_ref(),
            state.p_ini,
            &self.cfg.asa,
            &mut self.rng,
        );
        self.latencies_ms.push(t0.elapsed().as_secs_f64() * 1e3);

        let mut by_region: BTreeMap<usize, Vec<FrontierPoint>> = BTreeMap::new();
        for p in &fp.points {
            if let Some(id) = division.locate(p.position) {
                by_region.entry(id).or_default().push(*p);
            }
        }
        let slot = route.region_ids.iter().position(|id| by_region.contains_key(id));
        let (current_id, next_id, candidates) = match slot {
            Some(k) => {
                let id = route.region_ids[k];
                (
                    id,
                    route.region_ids.get(k + 1).copied(),
                    by_region.remove(&id).unwrap_or_default(),
                )
            }
            // frontier points outside every selected subregion
            None => (route.region_ids[0], route.region_ids.get(1).copied(), fp.points.clone()),
        };
        self.prev_route = Some(route);

        let current = division.subregions[current_id];
        let next = next_id.map(|id| division.subregions[id]);
        let ctx = RevenueContext {
            grid,
            fp,
            state,
            current: &current,
            next: next.as_ref(),
            range_m: self.cfg.sensor.range_m,
        };
        let scored: Vec<_> = candidates.iter().map(|p| (*p, indicators(p, &ctx))).collect();
        let chosen = select_target(&scored, &self.cfg.revenue, state.p_bot);
        self.audit
            .extend(indicator_rows(tick, &scored, &self.cfg.revenue, chosen.id));
        chosen
    }
}

impl Explorer<'_> {
    fn set_mode(&mut self, next: ExecState) {
        debug_assert!(
            self.exec.mode.can_transition_to(next.mode),
            "illegal transition {:?} -> {:?}",
            self.exec.mode,
            next.mode
        );
        self.exec = next;
    }

    fn check(&mut self, fp: &FrontierSet) {
        let next = state_check(fp, &self.exec, &self.state, &self.grid, &self.cfg.nav);
        self.set_mode(next);
    }

    fn detect(&mut self) -> FrontierSet {
        let mut fp = FrontierSet::default();
        for _ in 0..self.cfg.empty_confirm_calls {
            fp = self.detector.detect(&self.grid, &self.state);
            let r = self.cfg.blacklist_radius_m;
            fp.points
                .retain(|p| self.blacklist.iter().all(|b| b.distance(p.position) > r));
            if !fp.is_empty() {
                break;
            }
        }
        fp
    }

    fn replan(&mut self) {
        self.target = None;
        match self.exec.mode {
            Mode::Done => {}
            Mode::Returning | Mode::Trapped => {
                let goal = self.exec.goal.unwrap_or(self.state.p_ini);
                let map = CostMap::from_config(&self.grid, &self.cfg.nav);
                match plan_on(&map, self.state.p_bot, goal) {
                    Ok(path) => self.cursor = Some(PathCursor::new(path)),
                    Err(_) if self.exec.mode == Mode::Trapped => {
                        // escape target vanished; resume exploring
                        self.exec.stall_ticks = 0;
                        self.check(&FrontierSet::default());
                    }
                    // p_ini was reached through known-free cells, so this only
                    // happens if the robot left known space; stalling ends the run
                    Err(_) => {}
                }
            }
            Mode::Exploring => self.replan_exploring(),
        }
    }

    fn replan_exploring(&mut self) {
        let mut fp = self.detect();
        let map = CostMap::from_config(&self.grid, &self.cfg.nav);
        while !fp.is_empty() {
            match self.selector.choose(&fp, &map, &self.grid, &self.state, self.tick) {
                Plan::Target(t) => match plan_on(&map, self.state.p_bot, t.position) {
                    Ok(path) => {
                        self.exec.waypoint_history.push(self.state.p_bot);
                        self.target = Some(t.position);
                        self.cursor = Some(PathCursor::new(path));
                        return;
                    }
                    Err(_) => {
                        self.blacklist.push(t.position);
                        fp.points.retain(|p| p.id != t.id);
                    }
                },
                Plan::Abandon(points) => {
                    self.blacklist.extend(points);
                    fp.points.clear();
                }
            }
        }
        self.check(&fp);
        if self.exec.mode == Mode::Returning {
            self.check(&fp);
            if self.exec.mode != Mode::Done {
                self.replan();
            }
        }
    }

    fn target_still_open(&self, target: Point) -> bool {
        let f = &self.cfg.frontier;
        epsilon_filter(target, &self.grid, f.epsilon_m, f.min_unknown_cells)
    }

    fn after_step(&mut self) {
        let tol = self.cfg.nav.arrival_tol_m;
        let arrived = self
            .cursor
            .as_ref()
            .is_some_and(|c| c.is_finished() || self.state.p_bot.distance(c.path.goal()) <= tol);
        match self.exec.mode {
            Mode::Exploring => {
                if let Some(target) = self.target {
                    if arrived {
                        if self.target_still_open(target) {
                            // visiting did not resolve it; do not pick it again
                            self.blacklist.push(target);
                        }
                        self.cursor = None;
                    } else if !self.target_still_open(target) {
                        self.cursor = None;
                    }
                }
            }
            Mode::Returning | Mode::Trapped => {
                if arrived {
                    self.cursor = None;
                    let fp = FrontierSet::default();
                    self.check(&fp);
                }
            }
            Mode::Done => {}
        }
        if self.exec.stall_ticks >= self.cfg.nav.stall_ticks && self.exec.mode != Mode::Done {
            let fp = if self.exec.mode == Mode::Exploring {
                self.detect()
            } else {
                FrontierSet::default()
            };
            self.cursor = None;
            self.check(&fp);
        }
    }
}
