mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{fill, geometry};
use proptest::prelude::*;
use tdle::frontier::{FrontierPoint, FrontierSet};
use tdle::regions::Subregion;
use tdle::revenue::{
    indicators, information_gain, motion_consistency, revenues, select_target, z_normalize, Indicators, RevenueContext,
    RevenueWeights,
};
use tdle::world::{line_of_sight, Occupancy, OccupancyGrid, RobotState};
use tdle::{Point, Rect};

/// 10 m square with the given walls; everything else known free.
fn grid_with(walls: &[Rect]) -> OccupancyGrid {
    let mut g = OccupancyGrid::unknown(geometry(100, 100, 0.1));
    for &w in walls {
        fill(&mut g, w, Occupancy::Occupied);
    }
    fill(&mut g, Rect::new(0.0, 0.0, 10.0, 10.0), Occupancy::Free);
    g
}

fn free_grid() -> OccupancyGrid {
    grid_with(&[])
}

fn fset(pts: &[(f64, f64)]) -> FrontierSet {
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

fn region(col: usize, row: usize) -> Subregion {
    let bounds = Rect::new(
        col as f64 * 5.0,
        row as f64 * 5.0,
        (col + 1) as f64 * 5.0,
        (row + 1) as f64 * 5.0,
    );
    Subregion {
        col,
        row,
        bounds,
        center: bounds.center(),
    }
}

#[test]
fn lone_point_sees_nothing() {
    let fp = fset(&[(5.05, 5.05)]);
    assert_eq!(information_gain(&fp.points[0], &fp, &free_grid(), 10.0), 0);
}

#[test]
fn three_points_on_a_line_see_each_other() {
    let fp = fset(&[(2.05, 5.05), (4.05, 5.05), (6.05, 5.05)]);
    let g = free_grid();
    for p in &fp.points {
        assert_eq!(information_gain(p, &fp, &g, 10.0), 2);
    }
    // the far pair drops out when the range shrinks
    assert_eq!(information_gain(&fp.points[0], &fp, &g, 3.0), 1);
    assert_eq!(information_gain(&fp.points[1], &fp, &g, 3.0), 2);
}

#[test]
fn wall_hides_the_other_side() {
    let g = grid_with(&[Rect::new(5.0, 0.0, 5.2, 10.0)]);
    let fp = fset(&[(3.05, 5.05), (7.05, 5.05)]);
    assert_eq!(information_gain(&fp.points[0], &fp, &g, 10.0), 0);
    assert_eq!(information_gain(&fp.points[1], &fp, &g, 10.0), 0);
}

#[test]
fn unknown_cells_do_not_block_sight() {
    let mut g = OccupancyGrid::unknown(geometry(100, 100, 0.1));
    fill(&mut g, Rect::new(0.0, 0.0, 5.0, 10.0), Occupancy::Free);
    fill(&mut g, Rect::new(5.2, 0.0, 10.0, 10.0), Occupancy::Free);
    let fp = fset(&[(3.05, 5.05), (7.05, 5.05)]);
    assert_eq!(information_gain(&fp.points[0], &fp, &g, 10.0), 1);
}

#[test]
fn motion_consistency_landmarks() {
    assert!((motion_consistency(0.0).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
    assert!((motion_consistency(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);
    assert!((motion_consistency(PI).unwrap() - 2.0f64.exp()).abs() < 1e-12);
    assert!(motion_consistency(-0.01).is_err());
    assert!(motion_consistency(PI + 0.01).is_err());
    assert!(motion_consistency(f64::NAN).is_err());
}

#[test]
fn two_values_normalize_to_unit_spread() {
    assert_eq!(z_normalize(&[0.0, 10.0]), vec![-1.0, 1.0]);
    assert_eq!(z_normalize(&[3.0, 3.0, 3.0]), vec![0.0; 3]);
}

/// z-score with an explicit two-pass population formula.
fn z(values: &[f64], k: usize) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        0.0
    } else {
        (values[k] - mean) / sd
    }
}

fn oracle_pick(cands: &[(FrontierPoint, Indicators)], w: &RevenueWeights) -> usize {
    let com: Vec<f64> = cands.iter().map(|c| c.1.g_com).collect();
    let inf: Vec<f64> = cands.iter().map(|c| c.1.g_inf as f64).collect();
    let mot: Vec<f64> = cands.iter().map(|c| c.1.c_mot).collect();
    let score = |k: usize| w.lambda_c * z(&com, k) + w.lambda_i * z(&inf, k) - w.lambda_m * z(&mot, k);
    (0..cands.len())
        .max_by(|&a, &b| score(a).partial_cmp(&score(b)).unwrap().then(b.cmp(&a)))
        .unwrap()
}

#[test]
fn four_candidates_match_brute_force() {
    // robot in the lower-left 5 m cell heading east, next region to the east
    let g = free_grid();
    let fp = fset(&[(4.5, 2.5), (1.0, 4.5), (2.5, 0.5), (0.5, 0.5), (8.0, 8.0), (4.5, 3.5)]);
    let state = RobotState {
        heading: 0.0,
        ..RobotState::at(Point::new(2.5, 2.5))
    };
    let current = region(0, 0);
    let next = region(1, 0);
    let ctx = RevenueContext {
        grid: &g,
        fp: &fp,
        state: &state,
        current: &current,
        next: Some(&next),
        range_m: 10.0,
    };
    let cands: Vec<_> = fp.points[..4].iter().map(|p| (*p, indicators(p, &ctx))).collect();
    // the adjoining edge is x = 5
    assert!((cands[0].1.g_com - -0.5).abs() < 1e-12);
    assert!((cands[3].1.g_com - -4.5).abs() < 1e-12);
    for w in [
        RevenueWeights::default(),
        RevenueWeights {
            lambda_c: 0.0,
            lambda_i: 1.0,
            lambda_m: 0.0,
        },
        RevenueWeights {
            lambda_c: 0.0,
            lambda_i: 0.0,
            lambda_m: 1.0,
        },
        RevenueWeights {
            lambda_c: 3.0,
            lambda_i: 0.1,
            lambda_m: 0.2,
        },
    ] {
        let got = select_target(&cands, &w, state.p_bot);
        assert_eq!(got.id, cands[oracle_pick(&cands, &w)].0.id, "weights {w:?}");
    }
}

#[test]
fn distant_points_leave_indicators_unchanged() {
    let g = free_grid();
    let near = fset(&[(1.0, 1.0), (2.0, 3.0), (4.0, 1.5)]);
    let mut far = near.clone();
    far.points.push(FrontierPoint {
        id: 3,
        position: Point::new(9.5, 9.5),
    });
    let state = RobotState::at(Point::new(2.5, 2.5));
    let current = region(0, 0);
    let ctx = |fp| RevenueContext {
        grid: &g,
        fp,
        state: &state,
        current: &current,
        next: None,
        range_m: 5.0,
    };
    for p in &near.points {
        assert_eq!(indicators(p, &ctx(&near)), indicators(p, &ctx(&far)));
    }
}

fn arb_candidates() -> impl Strategy<Value = Vec<(FrontierPoint, Indicators)>> {
    prop::collection::vec((-10.0..0.0f64, 0usize..12, 0.0..PI), 2..10).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(id, (g_com, g_inf, alpha))| {
                (
                    FrontierPoint {
                        id,
                        position: Point::new(id as f64, 0.0),
                    },
                    Indicators {
                        g_com,
                        g_inf,
                        c_mot: motion_consistency(alpha).unwrap(),
                        alpha_ori: alpha,
                    },
                )
            })
            .collect()
    })
}

fn arb_weights() -> impl Strategy<Value = RevenueWeights> {
    (0.0..5.0f64, 0.0..5.0f64, 0.0..5.0f64).prop_map(|(lambda_c, lambda_i, lambda_m)| RevenueWeights {
        lambda_c,
        lambda_i,
        lambda_m,
    })
}

proptest! {
    #[test]
    fn motion_consistency_is_increasing(a in 0.0..PI, b in 0.0..PI) {
        prop_assume!(a < b);
        prop_assert!(motion_consistency(a).unwrap() < motion_consistency(b).unwrap());
    }

    #[test]
    fn selection_matches_oracle(c in arb_candidates(), w in arb_weights()) {
        let picked = select_target(&c, &w, Point::new(-1.0, 0.0));
        let r = revenues(&c, &w);
        let best = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((r[picked.id] - best).abs() <= 1e-9);
        let o = oracle_pick(&c, &w);
        let com: Vec<f64> = c.iter().map(|x| x.1.g_com).collect();
        prop_assert!((r[o] - best).abs() <= 1e-9, "oracle pick {} not optimal ({:?})", o, com);
    }

    #[test]
    fn weight_scaling_keeps_the_choice(c in arb_candidates(), w in arb_weights(), k in 0.01..100.0f64) {
        let scaled = RevenueWeights { lambda_c: w.lambda_c * k, lambda_i: w.lambda_i * k, lambda_m: w.lambda_m * k };
        let p = Point::new(-1.0, 0.0);
        let r = revenues(&c, &w);
        let rs = revenues(&c, &scaled);
        for (a, b) in r.iter().zip(&rs) {
            prop_assert!((a * k - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        let (a, b) = (select_target(&c, &w, p), select_target(&c, &scaled, p));
        prop_assert!((r[a.id] - r[b.id]).abs() <= 1e-9 * r[a.id].abs().max(1.0));
    }

    #[test]
    fn affine_indicator_shift_keeps_revenues(c in arb_candidates(), w in arb_weights(), shift in -50.0..50.0f64, scale in 0.1..10.0f64) {
        let moved: Vec<_> = c
            .iter()
            .map(|(p, i)| (*p, Indicators { g_com: i.g_com * scale + shift, ..*i }))
            .collect();
        for (a, b) in revenues(&c, &w).iter().zip(revenues(&moved, &w)) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn z_scores_have_zero_mean_unit_spread(v in prop::collection::vec(-100.0..100.0f64, 2..30)) {
        let zs = z_normalize(&v);
        let n = zs.len() as f64;
        let mean = zs.iter().sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-9);
        let var = zs.iter().map(|x| x * x).sum::<f64>() / n;
        prop_assert!((var - 1.0).abs() < 1e-9 || zs.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn line_of_sight_is_symmetric(
        walls in prop::collection::vec((0.0..9.0f64, 0.0..9.0f64, 0.1..1.0f64, 0.1..1.0f64), 0..6),
        a in (0.0..10.0f64, 0.0..10.0f64),
        b in (0.0..10.0f64, 0.0..10.0f64),
    ) {
        let walls: Vec<Rect> = walls.into_iter().map(|(x, y, w, h)| Rect::new(x, y, x + w, y + h)).collect();
        let g = grid_with(&walls);
        let (a, b) = (Point::new(a.0, a.1), Point::new(b.0, b.1));
        prop_assert_eq!(line_of_sight(&g, a, b), line_of_sight(&g, b, a));
    }
}
