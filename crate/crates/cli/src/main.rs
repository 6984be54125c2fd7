//! `tdle` command-line driver: single exploration runs, seeded benchmarks
//! and a numerical self-test.

mod overrides;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tdle::bench::{aggregate, emit_report, run_seeds, PlannerRuns, Report};
use tdle::config::parse_seeds;
use tdle::explore::resolve_map;
use tdle::{PlannerKind, ScenarioConfig};

use overrides::Overrides;

#[derive(Parser, Debug)]
#[command(
    name = "tdle",
    version,
    about = "Grid-world exploration planner and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Map file, or `museum` / `library` for a bundled map.
    #[arg(long)]
    map: Option<String>,
    /// Output directory for reports.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Flat `key = value` scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tick budget per run (same as `--tick_budget`).
    #[arg(long)]
    ticks_max: Option<u64>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one exploration and write its report.
    Explore {
        #[arg(long)]
        planner: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run every seed with every planner and write the comparison tables.
    Bench {
        /// Comma-separated planner tags.
        #[arg(long)]
        planners: Option<String>,
        /// `1..10`, `3`, or `1,4,9`.
        #[arg(long)]
        seeds: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the numerical building blocks against independent oracles.
    Selftest,
}

/// Failures that map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    Usage(e.to_string()).into()
}

fn parse_planner(tag: &str) -> Result<PlannerKind> {
    tag.parse().map_err(|_| {
        let valid: Vec<_> = PlannerKind::ALL.iter().map(|k| k.tag()).collect();
        usage(format!("unknown planner `{tag}`; valid planners: {}", valid.join(", ")))
    })
}

/// Defaults, then the config file, then flags.
fn build_config(common: &Common) -> Result<(ScenarioConfig, bool)> {
    let mut cfg = ScenarioConfig::default();
    let mut seeds_from_file = false;
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_text(&text).map_err(usage)?;
        seeds_from_file = text
            .lines()
            .any(|l| matches!(l.split('=').next().map(str::trim), Some("seeds" | "seed")));
    }
    if let Some(map) = &common.map {
        cfg.map = map.clone();
    }
    for (key, value) in &common.overrides.0 {
        cfg.set(key, value).map_err(usage)?;
    }
    if let Some(t) = common.ticks_max {
        cfg.nav.tick_budget = t;
    }
    Ok((cfg, seeds_from_file))
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("TDLE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("TDLE_SEED `{v}` is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn execute(cfg: &ScenarioConfig, planners: &[PlannerKind], out: &PathBuf) -> Result<Report> {
    cfg.validate().map_err(usage)?;
    let gt = resolve_map(&cfg.map)?;
    let mut report = Report {
        config: cfg.clone(),
        planners: Vec::new(),
    };
    for &planner in planners {
        let runs = run_seeds(&gt, planner, &cfg.seeds, cfg)?;
        let metrics: Vec<_> = runs.iter().map(|r| r.metrics.clone()).collect();
        report.planners.push(PlannerRuns {
            stats: aggregate(&metrics),
            runs,
        });
    }
    emit_report(&report, out).with_context(|| format!("writing report to {}", out.display()))?;
    Ok(report)
}

fn cmd_explore(planner: Option<String>, seed: Option<u64>, common: Common) -> Result<()> {
    let (mut cfg, seeds_from_file) = build_config(&common)?;
    if let Some(p) = planner {
        cfg.planner = parse_planner(&p)?;
    }
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    } else if !seeds_from_file {
        if let Some(s) = env_seed()? {
            cfg.seeds = vec![s];
        }
    }
    if cfg.seeds.len() != 1 {
        return Err(usage("explore runs exactly one seed; use `bench` for several"));
    }
    let report = execute(&cfg, &[cfg.planner], &common.out)?;
    let m = &report.planners[0].runs[0].metrics;
    println!(
        "{} seed {}: {:?} after {} ticks, distance {:.2} m, area {:.2} m2, rate {:.3} m2/m, coverage {:.1}%",
        cfg.planner,
        m.seed,
        m.final_mode,
        m.ticks,
        m.final_distance(),
        m.final_area(),
        m.exploration_rate,
        100.0 * m.coverage
    );
    Ok(())
}

fn cmd_bench(planners: Option<String>, seeds: Option<String>, common: Common) -> Result<()> {
    let (mut cfg, seeds_from_file) = build_config(&common)?;
    if let Some(s) = seeds {
        cfg.seeds = parse_seeds(&s).map_err(usage)?;
    } else if !seeds_from_file {
        if let Some(s) = env_seed()? {
            cfg.seeds = vec![s];
        }
    }
    let kinds = match planners {
        Some(list) => {
            let kinds = list
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| parse_planner(t.trim()))
                .collect::<Result<Vec<_>>>()?;
            if kinds.is_empty() {
                return Err(usage("planner list is empty"));
            }
            kinds
        }
        None => vec![cfg.planner],
    };
    let report = execute(&cfg, &kinds, &common.out)?;
    println!("planner  runs  dist_avg_m  dist_std_m  rate_avg  latency_ms");
    for pr in &report.planners {
        let s = &pr.stats;
        let lat = s.latency_mean_ms.map_or("n/a".to_string(), |m| format!("{m:.3}"));
        println!(
            "{:<8} {:>5} {:>11.2} {:>11.2} {:>9.3} {:>11}",
            s.planner.tag(),
            s.runs,
            s.distance_avg_m,
            s.distance_std_m,
            s.rate_avg,
            lat
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Explore { planner, seed, common } => cmd_explore(planner, seed, common),
        Command::Bench {
            planners,
            seeds,
            common,
        } => cmd_bench(planners, seeds, common),
        Command::Selftest => {
            return if selftest::run() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
