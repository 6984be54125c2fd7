use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{AggregateStats, RunMetrics};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::explore::RunOutput;
use crate::revenue::INDICATOR_CSV_HEADER;
use crate::world::write_pgm;

#[derive(Debug, Clone)]
pub struct PlannerRuns {
    pub stats: AggregateStats,
    pub runs: Vec<RunOutput>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: ScenarioConfig,
    pub planners: Vec<PlannerRuns>,
}

#[derive(Serialize)]
struct RunJson<'a> {
    config: BTreeMap<String, serde_json::Value>,
    planners: Vec<&'static str>,
    aggregate: Vec<&'a AggregateStats>,
    runs: Vec<&'a RunMetrics>,
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the summary tables, series, trajectories and the JSON echo into
/// `out_dir`, creating it if needed. Returns the written paths.
///
/// `table2.csv` is the only file holding wall-clock measurements.
pub fn emit_report(report: &Report, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out_dir.as_ref();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();

    let mut t1 = String::from(
        "planner,runs,distance_max_m,distance_min_m,distance_std_m,distance_avg_m,exploration_rate_avg,exploration_rate_std,coverage_min\n",
    );
    let mut t2 = String::from("planner,invocations,mean_latency_ms\n");
    let mut curve = String::from("planner,seed,tick,distance_m,area_m2\n");
    let mut audit = format!("seed,{INDICATOR_CSV_HEADER}\n");
    let mut audit_rows = 0;
    for pr in &report.planners {
        let s = &pr.stats;
        let tag = s.planner.tag();
        writeln!(
            t1,
            "{tag},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            s.runs,
            s.distance_max_m,
            s.distance_min_m,
            s.distance_std_m,
            s.distance_avg_m,
            s.rate_avg,
            s.rate_std,
            s.coverage_min
        )
        .expect("writing to a String");
        let latency = s.latency_mean_ms.map_or("n/a".to_string(), |m| format!("{m:.4}"));
        writeln!(t2, "{tag},{},{latency}", s.latency_samples).expect("writing to a String");
        for run in &pr.runs {
            let m = &run.metrics;
            for k in 0..m.sample_ticks.len() {
                writeln!(
                    curve,
                    "{tag},{},{},{:.4},{:.4}",
                    m.seed, m.sample_ticks[k], m.distance_m[k], m.explored_area_m2[k]
                )
                .expect("writing to a String");
            }
            for row in &run.indicator_rows {
                writeln!(audit, "{},{row}", m.seed).expect("writing to a String");
                audit_rows += 1;
            }
        }
    }
    write(out.join("table1.csv"), &t1, &mut written)?;
    write(out.join("table2.csv"), &t2, &mut written)?;
    write(out.join("rate_curve.csv"), &curve, &mut written)?;
    if audit_rows > 0 {
        write(out.join("indicators.csv"), &audit, &mut written)?;
    }

    let nested = report.planners.len() > 1;
    for pr in &report.planners {
        let dir = if nested {
            out.join(pr.stats.planner.tag())
        } else {
            out.to_path_buf()
        };
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for run in &pr.runs {
            let path = dir.join(format!("trajectory_{}.pgm", run.metrics.seed));
            write_pgm(&run.grid, &run.trajectory, &path)?;
            written.push(path);
        }
    }

    let json = RunJson {
        config: report.config.entries(),
        planners: report.planners.iter().map(|p| p.stats.planner.tag()).collect(),
        aggregate: report.planners.iter().map(|p| &p.stats).collect(),
        runs: report
            .planners
            .iter()
            .flat_map(|p| p.runs.iter().map(|r| &r.metrics))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&json)?;
    text.push('\n');
    write(out.join("run.json"), &text, &mut written)?;
    Ok(written)
}
