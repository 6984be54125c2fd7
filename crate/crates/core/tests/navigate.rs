mod common;

use std::f64::consts::SQRT_2;

use common::{known, world};
use proptest::prelude::*;
use tdle::explore::run;
use tdle::frontier::{FrontierPoint, FrontierSet};
use tdle::navigate::{plan_path, state_check, step, ExecState, Mode, NavConfig, PathCursor, PlannedPath};
use tdle::world::{line_of_sight, Occupancy, RobotState};
use tdle::{Error, PlannerKind, Point, Rect, ScenarioConfig};

fn some_frontier() -> FrontierSet {
    FrontierSet {
        points: vec![FrontierPoint {
            id: 0,
            position: Point::new(8.0, 8.0),
        }],
        capacity: 30,
    }
}

#[test]
fn same_start_and_goal_is_a_single_waypoint() {
    let grid = known(&world(10.0, 10.0, 0.1, &[]));
    let p = Point::new(4.05, 4.05);
    let path = plan_path(&grid, p, p, &NavConfig::default()).unwrap();
    assert_eq!(path.waypoints, vec![p]);
    assert_eq!(path.length, 0.0);
}

#[test]
fn diagonal_across_an_empty_room() {
    let grid = known(&world(10.0, 10.0, 0.1, &[]));
    let path = plan_path(&grid, Point::new(1.0, 1.0), Point::new(9.0, 9.0), &NavConfig::default()).unwrap();
    let expected = 8.0 * SQRT_2;
    assert!(
        (path.length - expected).abs() <= 0.1 * SQRT_2,
        "length {} vs {expected}",
        path.length
    );
}

#[test]
fn sealed_goal_is_unreachable() {
    let gt = world(
        10.0,
        10.0,
        0.1,
        &[
            Rect::new(6.0, 6.0, 9.0, 6.3),
            Rect::new(6.0, 8.7, 9.0, 9.0),
            Rect::new(6.0, 6.0, 6.3, 9.0),
            Rect::new(8.7, 6.0, 9.0, 9.0),
        ],
    );
    let grid = known(&gt);
    let err = plan_path(&grid, Point::new(1.0, 1.0), Point::new(7.5, 7.5), &NavConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Unreachable { .. }), "{err}");
}

#[test]
fn goal_in_unknown_space_snaps_to_known_free() {
    let gt = world(10.0, 10.0, 0.1, &[]);
    let mut grid = known(&gt);
    let g = *grid.geometry();
    // forget a 1 m square around (5, 5)
    let mut fresh = tdle::world::OccupancyGrid::unknown(g);
    for (i, &v) in grid.cells().iter().enumerate() {
        let c = g.pos_of(i);
        if !Rect::new(4.5, 4.5, 5.5, 5.5).contains(g.cell_center(c)) {
            fresh.mark(c, v);
        }
    }
    grid = fresh;
    let path = plan_path(&grid, Point::new(1.0, 1.0), Point::new(5.0, 4.6), &NavConfig::default()).unwrap();
    let goal = path.goal();
    assert_eq!(grid.get_at(goal), Some(Occupancy::Free));
    assert!(goal.distance(Point::new(5.0, 4.6)) <= 1.0);
}

#[test]
fn l_shaped_path_is_driven_along_its_segments() {
    let path = PlannedPath::new(vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(3.0, 4.0)]);
    let mut cursor = PathCursor::new(path);
    let mut s = RobotState::at(Point::new(0.0, 0.0));
    while !cursor.is_finished() {
        s = step(&s, &mut cursor, 0.7, 0.3);
    }
    assert_eq!(s.p_bot, Point::new(3.0, 4.0));
    assert!((s.distance_traveled - 7.0).abs() < 1e-12);
}

#[test]
fn large_step_clamps_at_goal() {
    let mut cursor = PathCursor::new(PlannedPath::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]));
    let s = step(&RobotState::at(Point::new(0.0, 0.0)), &mut cursor, 1.0, 10.0);
    assert_eq!(s.p_bot, Point::new(1.0, 0.0));
    assert_eq!(s.distance_traveled, 1.0);
}

#[test]
fn empty_frontier_sends_robot_home_then_done() {
    let grid = known(&world(10.0, 10.0, 0.1, &[]));
    let cfg = NavConfig::default();
    let mut state = RobotState::at(Point::new(2.0, 2.0));
    state.p_bot = Point::new(7.0, 7.0);
    let exec = state_check(&FrontierSet::default(), &ExecState::default(), &state, &grid, &cfg);
    assert_eq!(exec.mode, Mode::Returning);
    assert_eq!(exec.goal, Some(state.p_ini));
    // still away from home
    assert_eq!(
        state_check(&FrontierSet::default(), &exec, &state, &grid, &cfg).mode,
        Mode::Returning
    );
    state.p_bot = Point::new(2.1, 2.1);
    let done = state_check(&FrontierSet::default(), &exec, &state, &grid, &cfg);
    assert_eq!(done.mode, Mode::Done);
}

#[test]
fn at_home_with_no_frontier_finishes_in_two_checks() {
    let grid = known(&world(10.0, 10.0, 0.1, &[]));
    let cfg = NavConfig::default();
    let state = RobotState::at(Point::new(2.0, 2.0));
    let a = state_check(&FrontierSet::default(), &ExecState::default(), &state, &grid, &cfg);
    let b = state_check(&FrontierSet::default(), &a, &state, &grid, &cfg);
    assert_eq!((a.mode, b.mode), (Mode::Returning, Mode::Done));
}

#[test]
fn stall_falls_back_to_latest_reachable_waypoint() {
    let gt = world(10.0, 10.0, 0.1, &[Rect::new(6.0, 0.0, 6.3, 10.0)]);
    let grid = known(&gt);
    let cfg = NavConfig::default();
    let state = RobotState::at(Point::new(3.0, 3.0));
    let exec = ExecState {
        stall_ticks: cfg.stall_ticks,
        // newest last; the newest is behind the wall, the one before is too close
        waypoint_history: vec![
            Point::new(1.0, 8.0),
            Point::new(2.0, 5.0),
            Point::new(3.1, 3.0),
            Point::new(8.0, 8.0),
        ],
        ..ExecState::default()
    };
    let next = state_check(&some_frontier(), &exec, &state, &grid, &cfg);
    assert_eq!(next.mode, Mode::Trapped);
    assert_eq!(next.goal, Some(Point::new(2.0, 5.0)));
    assert_eq!(next.waypoint_history, vec![Point::new(1.0, 8.0)]);
    assert_eq!(next.stall_ticks, 0);
}

#[test]
fn stall_without_history_keeps_exploring() {
    let grid = known(&world(10.0, 10.0, 0.1, &[]));
    let cfg = NavConfig::default();
    let exec = ExecState {
        stall_ticks: cfg.stall_ticks + 5,
        ..ExecState::default()
    };
    let next = state_check(
        &some_frontier(),
        &exec,
        &RobotState::at(Point::new(3.0, 3.0)),
        &grid,
        &cfg,
    );
    assert_eq!(next.mode, Mode::Exploring);
    assert_eq!(next.goal, None);
}

#[test]
fn small_world_run_terminates_home() {
    let gt = world(
        12.0,
        8.0,
        0.1,
        &[Rect::new(5.0, 0.0, 5.3, 5.0), Rect::new(8.0, 3.0, 8.3, 8.0)],
    );
    let cfg = ScenarioConfig::default();
    for planner in PlannerKind::ALL {
        for seed in 1..=3 {
            let out = run(&gt, &cfg, planner, seed).unwrap();
            let m = &out.metrics;
            assert_eq!(m.final_mode, Mode::Done, "{planner} seed {seed}");
            assert!(m.ticks < cfg.nav.tick_budget);
            assert!(m.return_error_m <= cfg.nav.arrival_tol_m + 1e-9);
            // chords never exceed the distance driven along the path
            let chords: f64 = out.trajectory.windows(2).map(|w| w[0].distance(w[1])).sum();
            assert!(chords <= m.final_distance() * (1.0 + 1e-9));
            assert!(out
                .trajectory
                .windows(2)
                .all(|w| w[0].distance(w[1]) <= cfg.nav.speed_mps * cfg.nav.dt_s + 1e-9));
        }
    }
}

fn arb_walls() -> impl Strategy<Value = Vec<Rect>> {
    prop::collection::vec((1.0..13.0f64, 1.0..8.0f64, 0.2..3.0f64, 0.2..3.0f64), 0..6).prop_map(|v| {
        v.into_iter()
            .map(|(x, y, w, h)| Rect::new(x, y, x + w, y + h))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn planned_paths_stay_in_known_free_space(
        walls in arb_walls(),
        from in (0.2..14.8f64, 0.2..9.8f64),
        to in (0.2..14.8f64, 0.2..9.8f64),
    ) {
        let gt = world(15.0, 10.0, 0.1, &walls);
        let grid = known(&gt);
        let (from, to) = (Point::new(from.0, from.1), Point::new(to.0, to.1));
        prop_assume!(grid.get_at(from) == Some(Occupancy::Free) && grid.get_at(to) == Some(Occupancy::Free));
        let Ok(path) = plan_path(&grid, from, to, &NavConfig::default()) else {
            return Ok(());
        };
        let g = *grid.geometry();
        prop_assert_eq!(path.waypoints[0], from);
        prop_assert_eq!(path.goal(), to);
        let cells: Vec<_> = path.waypoints.iter().map(|&p| g.cell_of(p).unwrap()).collect();
        for c in &cells {
            prop_assert_eq!(grid.get(*c), Occupancy::Free);
        }
        for w in cells.windows(2) {
            prop_assert!(w[0].col.abs_diff(w[1].col) <= 1 && w[0].row.abs_diff(w[1].row) <= 1);
        }
        for w in path.waypoints.windows(2) {
            prop_assert!(line_of_sight(&grid, w[0], w[1]), "segment {:?} crosses an obstacle", w);
        }
        let sum: f64 = path.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum();
        prop_assert!((sum - path.length).abs() <= 1e-9 * sum.max(1.0));
    }

    #[test]
    fn odometer_matches_distance_moved(
        pts in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 2..8),
        speed in 0.1..2.0f64,
        dt in 0.01..1.0f64,
    ) {
        let path = PlannedPath::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect());
        let total = path.length;
        let mut cursor = PathCursor::new(path);
        let mut s = RobotState::at(Point::new(pts[0].0, pts[0].1));
        let mut moved = 0.0;
        let mut guard = 0;
        while !cursor.is_finished() {
            let next = step(&s, &mut cursor, speed, dt);
            let inc = next.distance_traveled - s.distance_traveled;
            prop_assert!(inc <= speed * dt * (1.0 + 1e-12));
            prop_assert!(inc + 1e-12 >= next.p_bot.distance(s.p_bot));
            moved += inc;
            s = next;
            guard += 1;
            prop_assert!(guard < 1_000_000);
        }
        prop_assert!((s.distance_traveled - moved).abs() <= 1e-9 * moved.max(1.0));
        prop_assert!((s.distance_traveled - total).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn state_check_only_makes_legal_moves(
        calls in prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>()), 1..20),
    ) {
        let grid = known(&world(10.0, 10.0, 0.1, &[]));
        let cfg = NavConfig::default();
        let mut exec = ExecState {
            waypoint_history: vec![Point::new(5.0, 5.0), Point::new(7.0, 2.0)],
            ..ExecState::default()
        };
        for (empty, stalled, at_home) in calls {
            let fp = if empty { FrontierSet::default() } else { some_frontier() };
            let mut state = RobotState::at(Point::new(2.0, 2.0));
            if !at_home {
                state.p_bot = Point::new(8.0, 8.0);
            }
            exec.stall_ticks = if stalled { cfg.stall_ticks } else { 0 };
            let next = state_check(&fp, &exec, &state, &grid, &cfg);
            prop_assert!(exec.mode.can_transition_to(next.mode), "{:?} -> {:?}", exec.mode, next.mode);
            exec = next;
        }
    }
}
