//! RRT-based frontier detection.
//!
//! A global tree persists across calls and is capped at `n_nd` nodes, where
//! the cap grows linearly with the known area. A local tree rooted at the
//! robot is rebuilt on every call. Both sample uniformly inside the current
//! map bounding box. When an extension crosses from free into unknown space
//! the last free cell becomes a raw candidate; candidates are then filtered
//! by the count of unknown cells around them and thinned by distance.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::world::{traverse, CellPos, Occupancy, OccupancyGrid, RobotState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierConfig {
    pub n_nd_min: usize,
    pub n_nd_per_m2: f64,
    pub n_nd_max: usize,
    pub rrt_step_m: f64,
    pub epsilon_m: f64,
    pub min_unknown_cells: usize,
    pub dedup_radius_m: f64,
    pub n_fp: usize,
    /// Node cap of the per-call local tree.
    pub local_nodes: usize,
    /// Samples drawn for the global tree on each call.
    pub global_samples: usize,
    /// Samples drawn for the local tree on each call.
    pub local_samples: usize,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        Self {
            n_nd_min: 500,
            n_nd_per_m2: 4.0,
            n_nd_max: 20_000,
            rrt_step_m: 1.0,
            epsilon_m: 0.5,
            min_unknown_cells: 10,
            dedup_radius_m: 1.0,
            n_fp: 30,
            local_nodes: 100,
            global_samples: 600,
            local_samples: 300,
        }
    }
}

impl FrontierConfig {
    /// Global tree cap for a given explored area.
    pub fn node_cap(&self, known_area_m2: f64) -> usize {
        let scaled = (self.n_nd_per_m2 * known_area_m2).round().max(0.0) as usize;
        scaled.clamp(self.n_nd_min, self.n_nd_max.max(self.n_nd_min))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rrt_step_m", self.rrt_step_m),
            ("epsilon_m", self.epsilon_m),
            ("dedup_radius_m", self.dedup_radius_m),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(Error::config(key, "must be > 0"));
            }
        }
        if self.n_nd_per_m2 < 0.0 {
            return Err(Error::config("n_nd_per_m2", "must be >= 0"));
        }
        if self.n_nd_min == 0 || self.n_nd_max < self.n_nd_min {
            return Err(Error::config("n_nd_max", "need 0 < n_nd_min <= n_nd_max"));
        }
        if self.n_fp == 0 {
            return Err(Error::config("n_fp", "must be >= 1"));
        }
        if self.local_nodes == 0 {
            return Err(Error::config("local_nodes", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub id: usize,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontierSet {
    pub points: Vec<FrontierPoint>,
    pub capacity: usize,
}

impl FrontierSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().map(|p| p.position)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeNode {
    pub position: Point,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RrtTree {
    nodes: Vec<TreeNode>,
    cap: usize,
    sampling_rect: Rect,
}

enum Extension {
    Added,
    Saturated,
    Frontier(Point),
    Blocked,
}

impl RrtTree {
    fn new(root: Point, cap: usize, sampling_rect: Rect) -> Self {
        Self {
            nodes: vec![TreeNode {
                position: root,
                parent: None,
            }],
            cap,
            sampling_rect,
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn sampling_rect(&self) -> Rect {
        self.sampling_rect
    }

    fn nearest(&self, p: Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let dx = n.position.x - p.x;
            let dy = n.position.y - p.y;
            let d = dx * dx + dy * dy;
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Steers from the nearest node toward `sample` by at most `step`.
    fn extend(&mut self, grid: &OccupancyGrid, sample: Point, step: f64) -> Extension {
        let near = self.nearest(sample);
        let from = self.nodes[near].position;
        let d = from.distance(sample);
        let to = if d <= step {
            sample
        } else {
            from + (sample - from) * (step / d)
        };

        let geom = grid.geometry();
        let mut prev: Option<CellPos> = None;
        let mut outcome = None;
        traverse(geom, from, to, |c| match grid.get(c) {
            Occupancy::Free => {
                prev = Some(c);
                true
            }
            Occupancy::Unknown => {
                outcome = Some(match prev {
                    Some(p) => Extension::Frontier(geom.cell_center(p)),
                    None => Extension::Blocked,
                });
                false
            }
            Occupancy::Occupied => {
                outcome = Some(Extension::Blocked);
                false
            }
        });
        match outcome {
            Some(o) => o,
            None if prev.is_none() => Extension::Blocked,
            None if self.nodes.len() >= self.cap => Extension::Saturated,
            None => {
                self.nodes.push(TreeNode {
                    position: to,
                    parent: Some(near),
                });
                Extension::Added
            }
        }
    }
}

/// True iff at least `min_unknown` unknown cells have centers within
/// `epsilon` of `candidate`.
pub fn epsilon_filter(candidate: Point, grid: &OccupancyGrid, epsilon: f64, min_unknown: usize) -> bool {
    let unknown = grid
        .geometry()
        .cells_in_disk(candidate, epsilon)
        .filter(|&c| grid.get(c) == Occupancy::Unknown)
        .count();
    unknown >= min_unknown
}

/// Greedy thinning in id order: keeps a point iff it is at least `radius`
/// from every point kept before it.
pub fn dedup(points: &[FrontierPoint], radius: f64) -> Vec<FrontierPoint> {
    let mut ordered = points.to_vec();
    ordered.sort_by_key(|p| p.id);
    let mut kept: Vec<FrontierPoint> = Vec::with_capacity(ordered.len());
    for p in ordered {
        if kept.iter().all(|k| k.position.distance(p.position) >= radius) {
            kept.push(p);
        }
    }
    kept
}

/// Owns the persistent global tree and the detector's random source.
#[derive(Debug, Clone)]
pub struct FrontierDetector {
    cfg: FrontierConfig,
    rng: ChaCha8Rng,
    global: Option<RrtTree>,
}

impl FrontierDetector {
    pub fn new(cfg: FrontierConfig, seed: u64) -> Self {
        Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            global: None,
        }
    }

    pub fn config(&self) -> &FrontierConfig {
        &self.cfg
    }

    pub fn global_tree(&self) -> Option<&RrtTree> {
        self.global.as_ref()
    }

    /// Runs one detection round. An empty result means no candidate
    /// survived filtering, which may signal that exploration is complete.
    pub fn detect(&mut self, grid: &OccupancyGrid, state: &RobotState) -> FrontierSet {
        let cfg = &self.cfg;
        let empty = FrontierSet {
            points: Vec::new(),
            capacity: cfg.n_fp,
        };
        let Ok(rect) = grid.map_aabb() else {
            return empty;
        };
        if !grid.is_known_free_at(state.p_bot) {
            return empty;
        }
        let cap = cfg.node_cap(grid.known_area_m2());

        let global = self.global.get_or_insert_with(|| RrtTree::new(state.p_bot, cap, rect));
        global.cap = global.cap.max(cap);
        global.sampling_rect = rect;

        let mut raw = Vec::new();
        for _ in 0..cfg.global_samples {
            let sample = sample_in(&mut self.rng, &rect);
            if let Extension::Frontier(p) = global.extend(grid, sample, cfg.rrt_step_m) {
                raw.push(p);
            }
        }

        let mut local = RrtTree::new(state.p_bot, cfg.local_nodes, rect);
        for _ in 0..cfg.local_samples {
            let sample = sample_in(&mut self.rng, &rect);
            if let Extension::Frontier(p) = local.extend(grid, sample, cfg.rrt_step_m) {
                raw.push(p);
            }
        }

        let candidates: Vec<FrontierPoint> = raw
            .into_iter()
            .enumerate()
            .map(|(id, position)| FrontierPoint { id, position })
            .filter(|c| epsilon_filter(c.position, grid, cfg.epsilon_m, cfg.min_unknown_cells))
            .collect();
        let mut points = dedup(&candidates, cfg.dedup_radius_m);
        points.truncate(cfg.n_fp);
        FrontierSet {
            points,
            capacity: cfg.n_fp,
        }
    }
}

fn sample_in(rng: &mut ChaCha8Rng, rect: &Rect) -> Point {
    Point::new(
        rng.gen_range(rect.x_min..rect.x_max),
        rng.gen_range(rect.y_min..rect.y_max),
    )
}
