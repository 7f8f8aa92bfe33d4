//! Risk-aware path planning on occupancy grids.
//!
//! A plan maximizes utility, the discounted reward gathered along a simple
//! path divided by the path's risk. [`planners::exact_enumerate`] searches
//! every simple path from the start; [`planners::risk_aware_dijkstra`]
//! followed by [`planners::max_utility_select`] is the polynomial
//! approximation.

pub mod domain;
pub mod io;
pub mod oracles;
pub mod planners;
pub mod reward;
pub mod risk;

pub use domain::{grid_to_graph, Connectivity, OccupancyGrid, Path, PlanningGraph, VertexId};
pub use planners::{plan, PlanMode, PlanResult};
pub use reward::{RewardMap, Utility};
pub use risk::{RiskEvaluator, RiskModel};
