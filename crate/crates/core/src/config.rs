//! Scenario configuration: every tunable of every module under one flat
//! key space, loadable from `key = value` text.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::baselines::PlannerKind;
use crate::error::{Error, Result};
use crate::frontier::FrontierConfig;
use crate::geometry::Point;
use crate::navigate::NavConfig;
use crate::ordering::AsaConfig;
use crate::regions::RegionConfig;
use crate::revenue::RevenueWeights;
use crate::world::SensorModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    /// Map file path, or the name of a bundled map.
    pub map: String,
    pub planner: PlannerKind,
    pub seeds: Vec<u64>,
    pub start_x_m: f64,
    pub start_y_m: f64,
    /// Consecutive empty detections required before exploration ends.
    pub empty_confirm_calls: usize,
    /// Radius around an abandoned target in which frontier points are ignored.
    pub blacklist_radius_m: f64,
    /// Metrics are sampled every this many ticks, plus the final tick.
    pub record_every: u64,
    pub sensor: SensorModel,
    pub frontier: FrontierConfig,
    pub regions: RegionConfig,
    pub asa: AsaConfig,
    pub revenue: RevenueWeights,
    pub nav: NavConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            map: "museum".to_string(),
            planner: PlannerKind::Tdle,
            seeds: vec![1],
            start_x_m: 1.5,
            start_y_m: 1.5,
            empty_confirm_calls: 3,
            blacklist_radius_m: 0.5,
            record_every: 10,
            sensor: SensorModel::default(),
            frontier: FrontierConfig::default(),
            regions: RegionConfig::default(),
            asa: AsaConfig::default(),
            revenue: RevenueWeights::default(),
            nav: NavConfig::default(),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{}`", value.trim())))
}

macro_rules! scalar_keys {
    ($($key:literal => $($field:ident).+ : $ty:ty),* $(,)?) => {
        const SCALAR_KEYS: &[&str] = &[$($key),*];

        impl ScenarioConfig {
            fn set_scalar(&mut self, key: &str, value: &str) -> Result<bool> {
                match key {
                    $($key => self.$($field).+ = parse_value::<$ty>(key, value)?,)*
                    _ => return Ok(false),
                }
                Ok(true)
            }

            fn scalar_entries(&self) -> Vec<(&'static str, serde_json::Value)> {
                vec![$(($key, serde_json::json!(self.$($field).+))),*]
            }
        }
    };
}

scalar_keys! {
    "start_x_m" => start_x_m: f64,
    "start_y_m" => start_y_m: f64,
    "empty_confirm_calls" => empty_confirm_calls: usize,
    "blacklist_radius_m" => blacklist_radius_m: f64,
    "record_every" => record_every: u64,
    "range_m" => sensor.range_m: f64,
    "beam_count" => sensor.beam_count: usize,
    "n_nd_min" => frontier.n_nd_min: usize,
    "n_nd_per_m2" => frontier.n_nd_per_m2: f64,
    "n_nd_max" => frontier.n_nd_max: usize,
    "rrt_step_m" => frontier.rrt_step_m: f64,
    "epsilon_m" => frontier.epsilon_m: f64,
    "min_unknown_cells" => frontier.min_unknown_cells: usize,
    "dedup_radius_m" => frontier.dedup_radius_m: f64,
    "n_fp" => frontier.n_fp: usize,
    "local_nodes" => frontier.local_nodes: usize,
    "global_samples" => frontier.global_samples: usize,
    "local_samples" => frontier.local_samples: usize,
    "n_sr" => regions.n_sr: usize,
    "tau_unknown" => regions.tau_unknown: f64,
    "samples_per_axis" => regions.samples_per_axis: usize,
    "t0" => asa.t0: f64,
    "t_stop" => asa.t_stop: f64,
    "n_ite" => asa.n_ite: usize,
    "eta0" => asa.eta0: f64,
    "mu" => asa.mu: f64,
    "lambda_s" => asa.lambda_s: f64,
    "lambda_d" => asa.lambda_d: f64,
    "lambda_l" => asa.lambda_l: f64,
    "lambda_c" => revenue.lambda_c: f64,
    "lambda_i" => revenue.lambda_i: f64,
    "lambda_m" => revenue.lambda_m: f64,
    "robot_radius_m" => nav.robot_radius_m: f64,
    "clearance_m" => nav.clearance_m: f64,
    "speed_mps" => nav.speed_mps: f64,
    "dt_s" => nav.dt_s: f64,
    "arrival_tol_m" => nav.arrival_tol_m: f64,
    "stall_ticks" => nav.stall_ticks: u64,
    "stall_progress_m" => nav.stall_progress_m: f64,
    "tick_budget" => nav.tick_budget: u64,
}

/// Parses `7`, `1,4,9` or the inclusive range `1..10`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::config("seeds", "seed list is empty"));
    }
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = parse_value("seeds", lo)?;
            let hi: u64 = parse_value("seeds", hi.trim_start_matches('='))?;
            if hi < lo {
                return Err(Error::config("seeds", format!("empty range `{part}`")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(parse_value("seeds", part)?);
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = seeds.iter().find(|s| !seen.insert(**s)) {
        return Err(Error::config("seeds", format!("seed {dup} listed twice")));
    }
    Ok(seeds)
}

impl ScenarioConfig {
    /// Every accepted key, in echo order.
    pub fn keys() -> impl Iterator<Item = &'static str> {
        ["map", "planner", "seeds"]
            .into_iter()
            .chain(SCALAR_KEYS.iter().copied())
    }

    pub fn start(&self) -> Point {
        Point::new(self.start_x_m, self.start_y_m)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "map" => self.map = value.trim().to_string(),
            "planner" => self.planner = value.parse()?,
            "seeds" | "seed" => self.seeds = parse_seeds(value)?,
            _ => {
                if !self.set_scalar(key, value)? {
                    return Err(Error::config(key, "unknown key"));
                }
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines. `#` starts a comment; blank lines are
    /// skipped; a key may appear once per text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(line, format!("line {}: expected `key = value`", n + 1)));
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::config(key, format!("line {}: duplicate key", n + 1)));
            }
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "seed list is empty"));
        }
        if !(self.start_x_m.is_finite() && self.start_y_m.is_finite()) {
            return Err(Error::config("start_x_m", "start must be finite"));
        }
        if self.empty_confirm_calls == 0 {
            return Err(Error::config("empty_confirm_calls", "must be >= 1"));
        }
        if !(self.blacklist_radius_m >= 0.0) {
            return Err(Error::config("blacklist_radius_m", "must be >= 0"));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every", "must be >= 1"));
        }
        self.sensor.validate()?;
        self.frontier.validate()?;
        self.regions.validate()?;
        self.asa.validate()?;
        self.revenue.validate()?;
        self.nav.validate()
    }

    /// Effective value of every key, defaults included.
    pub fn entries(&self) -> BTreeMap<String, serde_json::Value> {
        let mut out: BTreeMap<String, serde_json::Value> = self
            .scalar_entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        out.insert("map".into(), serde_json::json!(self.map));
        out.insert("planner".into(), serde_json::json!(self.planner.tag()));
        out.insert("seeds".into(), serde_json::json!(self.seeds));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_syntax() {
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("3, 1,9").unwrap(), vec![3, 1, 9]);
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("5..2").is_err());
        assert!(parse_seeds("1,1").is_err());
    }

    #[test]
    fn text_overrides_defaults() {
        let mut c = ScenarioConfig::default();
        c.apply_text("# comment\nmu = 0.5\n\nplanner = greedy  # inline\nn_sr=9\n")
            .unwrap();
        assert_eq!(c.asa.mu, 0.5);
        assert_eq!(c.planner, PlannerKind::GreedyFrontier);
        assert_eq!(c.regions.n_sr, 9);
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let mut c = ScenarioConfig::default();
        assert!(matches!(c.apply_text("bogus = 1"), Err(Error::Config { .. })));
        assert!(c.apply_text("n_ite = many").is_err());
        assert!(c.apply_text("n_ite 5").is_err());
        assert!(c.apply_text("mu = 1\nmu = 2").is_err());
    }

    #[test]
    fn echo_covers_every_key() {
        let c = ScenarioConfig::default();
        let e = c.entries();
        for k in ScenarioConfig::keys() {
            assert!(e.contains_key(k), "{k} missing from echo");
        }
        assert_eq!(e.len(), ScenarioConfig::keys().count());
    }

    #[test]
    fn every_key_is_settable() {
        let c = ScenarioConfig::default();
        let entries = c.entries();
        for k in ScenarioConfig::keys() {
            let v = match &entries[k] {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(_) => "1..3".into(),
                other => other.to_string(),
            };
            let mut d = ScenarioConfig::default();
            d.set(k, &v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn defaults_validate() {
        ScenarioConfig::default().validate().unwrap();
    }
}
