//! Deterministic 2D grid-world exploration.
//!
//! The planner divides the mapped bounding box into subregions, orders the
//! worth-exploring ones with adaptive simulated annealing (route similarity
//! measured by dynamic time warping), and inside the current subregion picks
//! the frontier point with the best normalized revenue. A greedy
//! nearest-frontier planner and a TSP-ordering planner share the same
//! simulator, detector and navigator for comparison.

// `!(x >= 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod config;
pub mod error;
pub mod explore;
pub mod frontier;
pub mod geometry;
pub mod navigate;
pub mod ordering;
pub mod regions;
pub mod revenue;
pub mod world;

pub use baselines::PlannerKind;
pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use geometry::{Point, Rect};
