//! Numerical spot checks runnable from a release binary.

use std::f64::consts::{FRAC_PI_2, PI};

use tdle::ordering::{dtw_distance, held_karp_order, route_score, AsaConfig, Route};
use tdle::regions::{SelectedRegions, Subregion};
use tdle::revenue::{motion_consistency, z_normalize};
use tdle::{Point, Rect};

fn naive_dtw(a: &[Point], b: &[Point], i: usize, j: usize) -> f64 {
    let d = a[i].distance(b[j]);
    match (i, j) {
        (0, 0) => d,
        (0, _) => d + naive_dtw(a, b, 0, j - 1),
        (_, 0) => d + naive_dtw(a, b, i - 1, 0),
        _ => {
            d + naive_dtw(a, b, i - 1, j - 1)
                .min(naive_dtw(a, b, i, j - 1))
                .min(naive_dtw(a, b, i - 1, j))
        }
    }
}

/// Small deterministic generator so the checks need no extra dependency.
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn point(&mut self) -> Point {
        Point::new(10.0 * self.next_f64(), 10.0 * self.next_f64())
    }
}

fn regions(centers: &[Point]) -> SelectedRegions {
    SelectedRegions {
        regions: centers
            .iter()
            .enumerate()
            .map(|(i, &c)| Subregion {
                col: i,
                row: 0,
                bounds: Rect::new(c.x - 0.5, c.y - 0.5, c.x + 0.5, c.y + 0.5),
                center: c,
            })
            .collect(),
        ids: (0..centers.len()).collect(),
        cap: 25,
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn check_dtw_identity() -> (bool, String) {
    let a = [Point::new(0.0, 0.0), Point::new(1.0, 2.0), Point::new(4.0, 1.0)];
    let d = dtw_distance(&a, &a).unwrap_or(f64::NAN);
    (d == 0.0, format!("dtw(a, a) = {d}"))
}

fn check_dtw_oracle() -> (bool, String) {
    let mut rng = Lcg(7);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = 1 + k % 6;
        let m = 1 + (k / 6) % 6;
        let a: Vec<Point> = (0..n).map(|_| rng.point()).collect();
        let b: Vec<Point> = (0..m).map(|_| rng.point()).collect();
        let fast = dtw_distance(&a, &b).unwrap_or(f64::NAN);
        let slow = naive_dtw(&a, &b, n - 1, m - 1);
        worst = worst.max((fast - slow).abs() / slow.max(1.0));
    }
    (worst <= 1e-9, format!("200 pairs, worst relative error {worst:.1e}"))
}

fn check_held_karp() -> (bool, String) {
    let mut rng = Lcg(11);
    let cfg = AsaConfig {
        lambda_s: 0.0,
        ..AsaConfig::default()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let centers: Vec<Point> = (0..6).map(|_| rng.point()).collect();
        let p_ini = rng.point();
        let sr = regions(&centers);
        let Ok(hk) = held_karp_order(&sr, p_ini, cfg.lambda_d, cfg.lambda_l) else {
            return (false, "held_karp_order failed".into());
        };
        let hk_score = route_score(&hk, None, p_ini, &cfg).total;
        let best = permutations(&[1, 2, 3, 4, 5])
            .into_iter()
            .map(|rest| {
                let points = std::iter::once(0).chain(rest).map(|i| centers[i]).collect();
                let r = Route {
                    points,
                    region_ids: Vec::new(),
                };
                route_score(&r, None, p_ini, &cfg).total
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((best - hk_score).abs());
    }
    (
        worst <= 1e-9,
        format!("20 instances of 6 regions, worst gap {worst:.1e}"),
    )
}

fn check_c_mot() -> (bool, String) {
    let mid = motion_consistency(FRAC_PI_2).unwrap_or(f64::NAN);
    let lo = motion_consistency(0.0).unwrap_or(f64::NAN);
    let hi = motion_consistency(PI).unwrap_or(f64::NAN);
    let ok = mid == 1.0 && (lo - (-2.0f64).exp()).abs() <= 1e-12 && (hi - 2.0f64.exp()).abs() <= 1e-12;
    (
        ok,
        format!("c_mot(pi/2) = {mid:?}, c_mot(0) = {lo:.5}, c_mot(pi) = {hi:.5}"),
    )
}

fn check_z_scores() -> (bool, String) {
    let flat = z_normalize(&[5.0, 5.0, 5.0]);
    let z = z_normalize(&[3.0, -1.0, 8.5, 2.25, 0.0]);
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let std = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let ok = flat.iter().all(|&v| v == 0.0) && mean.abs() < 1e-12 && (std - 1.0).abs() < 1e-12;
    (ok, format!("mean {mean:.1e}, std {std:.12}, zero-variance -> {flat:?}"))
}

type Check = fn() -> (bool, String);

/// Prints one line per check; true when all pass.
pub fn run() -> bool {
    let checks: [(&str, Check); 5] = [
        ("dtw identical sequences", check_dtw_identity),
        ("dtw vs naive recursion", check_dtw_oracle),
        ("held-karp vs enumeration", check_held_karp),
        ("motion consistency spot values", check_c_mot),
        ("z-score invariants", check_z_scores),
    ];
    let mut all = true;
    for (name, check) in checks {
        let (ok, detail) = check();
        all &= ok;
        println!("{:<4} {name:<32} {detail}", if ok { "PASS" } else { "FAIL" });
    }
    all
}
