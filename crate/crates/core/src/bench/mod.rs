//! Seeded multi-run benchmarks and their summary statistics.

mod report;

pub use report::{emit_report, PlannerRuns, Report};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::PlannerKind;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::explore::{resolve_map, run, RunOutput};
use crate::geometry::Point;
use crate::navigate::Mode;
use crate::world::GroundTruthMap;

/// Outcome of one run. Apart from the wall-clock latencies, every field is
/// a deterministic function of map, planner, seed and configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub planner: PlannerKind,
    pub seed: u64,
    pub ticks: u64,
    pub final_mode: Mode,
    /// Tick of each entry of the two series below.
    pub sample_ticks: Vec<u64>,
    pub explored_area_m2: Vec<f64>,
    pub distance_m: Vec<f64>,
    /// Final explored area over final distance traveled, in m²/m.
    pub exploration_rate: f64,
    /// Share of the ground-truth free cells reachable from the start that
    /// ended up known.
    pub coverage: f64,
    pub final_position: Point,
    pub return_error_m: f64,
    pub plan_invocations: usize,
    #[serde(skip)]
    pub plan_latencies_ms: Vec<f64>,
}

impl RunMetrics {
    pub fn final_distance(&self) -> f64 {
        self.distance_m.last().copied().unwrap_or(0.0)
    }

    pub fn final_area(&self) -> f64 {
        self.explored_area_m2.last().copied().unwrap_or(0.0)
    }

    pub fn mean_latency_ms(&self) -> Option<f64> {
        mean(&self.plan_latencies_ms)
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Population statistics over the runs of one planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub planner: PlannerKind,
    pub runs: usize,
    pub distance_max_m: f64,
    pub distance_min_m: f64,
    pub distance_std_m: f64,
    pub distance_avg_m: f64,
    pub rate_avg: f64,
    pub rate_std: f64,
    pub coverage_min: f64,
    #[serde(skip)]
    pub latency_samples: usize,
    #[serde(skip)]
    pub latency_mean_ms: Option<f64>,
}

/// Panics on an empty run list.
pub fn aggregate(runs: &[RunMetrics]) -> AggregateStats {
    assert!(!runs.is_empty(), "aggregate needs at least one run");
    let dist: Vec<f64> = runs.iter().map(RunMetrics::final_distance).collect();
    let rate: Vec<f64> = runs.iter().map(|r| r.exploration_rate).collect();
    let latencies: Vec<f64> = runs.iter().flat_map(|r| r.plan_latencies_ms.iter().copied()).collect();
    let (d_avg, d_std) = mean_std(&dist);
    let (r_avg, r_std) = mean_std(&rate);
    AggregateStats {
        planner: runs[0].planner,
        runs: runs.len(),
        distance_max_m: dist.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        distance_min_m: dist.iter().copied().fold(f64::INFINITY, f64::min),
        distance_std_m: d_std,
        distance_avg_m: d_avg,
        rate_avg: r_avg,
        rate_std: r_std,
        coverage_min: runs.iter().map(|r| r.coverage).fold(f64::INFINITY, f64::min),
        latency_samples: latencies.len(),
        latency_mean_ms: mean(&latencies),
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    // rounding can push the mean a hair outside [min, max]
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (m.clamp(lo, hi), var.sqrt())
}

/// One run per seed on an already loaded map, in parallel. Results keep
/// the order of `seeds`.
pub fn run_seeds(
    gt: &GroundTruthMap,
    planner: PlannerKind,
    seeds: &[u64],
    cfg: &ScenarioConfig,
) -> Result<Vec<RunOutput>> {
    seeds
        .par_iter()
        .map(|&seed| {
            run(gt, cfg, planner, seed).map_err(|e| Error::Run {
                seed,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn run_experiment(map: &str, planner: PlannerKind, seeds: &[u64], cfg: &ScenarioConfig) -> Result<Vec<RunOutput>> {
    let mut distinct = seeds.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != seeds.len() {
        return Err(Error::config("seeds", "seeds must be distinct"));
    }
    let gt = resolve_map(map)?;
    run_seeds(&gt, planner, seeds, cfg)
}
