//! Global visiting order of the selected subregions.
//!
//! Routes are scored by
//! `total = λs·sim - λd·|r_last - p_ini| - λl·Σ|r_j - r_{j-1}|`, where `sim`
//! is the negated DTW distance to the route committed in the previous
//! planning cycle (zero when there is none). [`arrange`] maximizes the score
//! with adaptive simulated annealing; [`held_karp_order`] is the exact
//! optimum for `λs = 0`.

mod dtw;
pub mod held_karp;

pub use dtw::dtw_distance;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::regions::SelectedRegions;

/// Largest region count accepted by [`held_karp_order`].
pub const HELD_KARP_MAX_REGIONS: usize = 15;

/// Ordered subregion centers, starting at the robot's subregion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub points: Vec<Point>,
    pub region_ids: Vec<usize>,
}

impl Route {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn from_order(sr: &SelectedRegions, order: &[usize]) -> Self {
        Self {
            points: order.iter().map(|&i| sr.regions[i].center).collect(),
            region_ids: order.iter().map(|&i| sr.ids[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsaConfig {
    pub t0: f64,
    pub t_stop: f64,
    pub n_ite: usize,
    /// Cooling rate before the first adaptive update.
    pub eta0: f64,
    pub mu: f64,
    pub lambda_s: f64,
    pub lambda_d: f64,
    pub lambda_l: f64,
}

impl Default for AsaConfig {
    fn default() -> Self {
        Self {
            t0: 100.0,
            t_stop: 0.01,
            n_ite: 2000,
            eta0: 0.97,
            mu: 0.01,
            lambda_s: 0.2,
            lambda_d: 0.5,
            lambda_l: 1.0,
        }
    }
}

impl AsaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_stop > 0.0 && self.t0 > self.t_stop) {
            return Err(Error::config("t0", "need t0 > t_stop > 0"));
        }
        if self.n_ite == 0 {
            return Err(Error::config("n_ite", "must be >= 1"));
        }
        if !(self.eta0 > 0.0 && self.eta0 < 1.0) {
            return Err(Error::config("eta0", "must lie in (0, 1)"));
        }
        if !(self.mu > 0.0) {
            return Err(Error::config("mu", "must be > 0"));
        }
        for (key, v) in [
            ("lambda_s", self.lambda_s),
            ("lambda_d", self.lambda_d),
            ("lambda_l", self.lambda_l),
        ] {
            if !(v >= 0.0) {
                return Err(Error::config(key, "must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteScore {
    pub similarity_term: f64,
    pub end_distance_term: f64,
    pub length_term: f64,
    pub total: f64,
}

pub fn route_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

pub fn route_score(route: &Route, prev: Option<&Route>, p_ini: Point, cfg: &AsaConfig) -> RouteScore {
    let length_term = route_length(&route.points);
    let end_distance_term = route.points.last().map_or(0.0, |p| p.distance(p_ini));
    let similarity_term = match prev {
        Some(prev) if !prev.is_empty() && !route.is_empty() => {
            -dtw_distance(&route.points, &prev.points).expect("non-empty routes")
        }
        _ => 0.0,
    };
    RouteScore {
        similarity_term,
        end_distance_term,
        length_term,
        total: cfg.lambda_s * similarity_term - cfg.lambda_d * end_distance_term - cfg.lambda_l * length_term,
    }
}

/// Bookkeeping from one annealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrangeTrace {
    pub route: Route,
    pub best_score: f64,
    pub iterations: usize,
    /// Best score after each iteration.
    pub best_history: Vec<f64>,
    pub final_temperature: f64,
}

pub fn arrange(sr: &SelectedRegions, prev: Option<&Route>, p_ini: Point, cfg: &AsaConfig, rng: &mut impl Rng) -> Route {
    arrange_traced(sr, prev, p_ini, cfg, rng, false).route
}

/// Adaptive simulated annealing over visiting orders that keep the robot's
/// subregion first.
///
/// Each iteration swaps two non-initial entries of the accepted route.
/// Improvements are always accepted, worse moves with probability
/// `exp(ΔC / T)`. After every iteration the cooling rate becomes
/// `η = exp(μ (n_i / n_ite - 1))` and `T ← η T`. The loop runs while
/// `T > t_stop` and at most `n_ite` times. The best route seen is returned.
pub fn arrange_traced(
    sr: &SelectedRegions,
    prev: Option<&Route>,
    p_ini: Point,
    cfg: &AsaConfig,
    rng: &mut impl Rng,
    record_history: bool,
) -> ArrangeTrace {
    assert!(!sr.is_empty(), "arrange needs at least one region");
    let n = sr.len();
    let scorer = Scorer::new(sr, prev, p_ini, cfg);
    let mut scratch = Vec::new();

    if n <= 2 {
        let order: Vec<usize> = (0..n).collect();
        let best_score = scorer.score(&order, &mut scratch);
        return ArrangeTrace {
            route: Route::from_order(sr, &order),
            best_score,
            iterations: 0,
            best_history: Vec::new(),
            final_temperature: cfg.t0,
        };
    }

    let mut current: Vec<usize> = (0..n).collect();
    current[1..].shuffle(rng);
    let mut current_score = scorer.score(&current, &mut scratch);
    let mut best = current.clone();
    let mut best_score = current_score;
    let mut best_history = Vec::new();

    let mut temperature = cfg.t0;
    let mut _eta = cfg.eta0;
    let mut iterations = 0;
    let mut candidate = current.clone();
    while temperature > cfg.t_stop && iterations < cfg.n_ite {
        let n_i = iterations + 1;
        let i = rng.gen_range(1..n);
        let mut j = rng.gen_range(1..n - 1);
        if j >= i {
            j += 1;
        }
        candidate.copy_from_slice(&current);
        candidate.swap(i, j);
        let score = scorer.score(&candidate, &mut scratch);
        let delta = score - current_score;
        if delta >= 0.0 || rng.gen::<f64>() < (delta / temperature).exp() {
            std::mem::swap(&mut current, &mut candidate);
            current_score = score;
            if current_score > best_score {
                best_score = current_score;
                best.copy_from_slice(&current);
            }
        }
        if record_history {
            best_history.push(best_score);
        }
        _eta = (cfg.mu * (n_i as f64 / cfg.n_ite as f64 - 1.0)).exp();
        temperature *= _eta;
        iterations = n_i;
    }

    ArrangeTrace {
        route: Route::from_order(sr, &best),
        best_score,
        iterations,
        best_history,
        final_temperature: temperature,
    }
}

/// Route scoring over precomputed pairwise distances.
struct Scorer {
    n: usize,
    between: Vec<f64>,
    to_prev: Vec<f64>,
    prev_len: usize,
    to_ini: Vec<f64>,
    cfg: AsaConfig,
}

impl Scorer {
    fn new(sr: &SelectedRegions, prev: Option<&Route>, p_ini: Point, cfg: &AsaConfig) -> Self {
        let centers = sr.centers();
        let n = centers.len();
        let between = (0..n * n).map(|k| centers[k / n].distance(centers[k % n])).collect();
        let prev_points: &[Point] = prev.map_or(&[], |r| &r.points);
        let m = prev_points.len();
        let to_prev = (0..n * m)
            .map(|k| centers[k / m].distance(prev_points[k % m]))
            .collect();
        Self {
            n,
            between,
            to_prev,
            prev_len: m,
            to_ini: centers.iter().map(|c| c.distance(p_ini)).collect(),
            cfg: cfg.clone(),
        }
    }

    fn score(&self, order: &[usize], scratch: &mut Vec<f64>) -> f64 {
        let n = self.n;
        let length: f64 = order.windows(2).map(|w| self.between[w[0] * n + w[1]]).sum();
        let end = self.to_ini[order[n - 1]];
        let similarity = if self.prev_len > 0 && self.cfg.lambda_s != 0.0 {
            let m = self.prev_len;
            -dtw::dtw_with(n, m, |i, j| self.to_prev[order[i] * m + j], scratch)
        } else {
            0.0
        };
        self.cfg.lambda_s * similarity - self.cfg.lambda_d * end - self.cfg.lambda_l * length
    }
}

/// Exact maximizer of the route score with `λs = 0`, keeping the robot's
/// subregion first.
pub fn held_karp_order(sr: &SelectedRegions, p_ini: Point, lambda_d: f64, lambda_l: f64) -> Result<Route> {
    let n = sr.len();
    if n > HELD_KARP_MAX_REGIONS {
        return Err(Error::TooManyRegions {
            got: n,
            max: HELD_KARP_MAX_REGIONS,
        });
    }
    assert!(n >= 1, "held_karp_order needs at least one region");
    let c = sr.centers();
    let (_, rest) = held_karp::shortest_open_path(
        n - 1,
        |i| lambda_l * c[0].distance(c[i + 1]),
        |i, j| lambda_l * c[i + 1].distance(c[j + 1]),
        |i| lambda_d * c[i + 1].distance(p_ini),
    );
    let order: Vec<usize> = std::iter::once(0).chain(rest.into_iter().map(|i| i + 1)).collect();
    Ok(Route::from_order(sr, &order))
}
