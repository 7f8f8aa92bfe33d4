//! Planners: exhaustive enumeration of simple paths, and the two-stage
//! approximation (directional minimum-risk search followed by max-utility
//! selection over the resulting ensemble).

mod directional;
mod exact;
mod select;

use std::cmp::Ordering;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainError, OccupancyGrid, Path, PlanningGraph, VertexId};
use crate::reward::{RewardError, RewardMap, Utility};
use crate::risk::{RiskBreakdown, RiskError, RiskEvaluator, RiskModel};

pub use directional::{
    check_monotone, risk_aware_dijkstra, EnsembleEntry, MinRiskEnsemble, MonotonicityViolation,
    SearchStats, MONOTONE_SAMPLES,
};
pub use exact::{exact_enumerate, EnumerationStats, Limits};
pub use select::max_utility_select;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    NonMonotone(#[from] MonotonicityViolation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Exact,
    #[serde(rename = "approx")]
    Approximate,
}

/// Which planner produced the returned path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Exact,
    Approximate,
    Stay,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanStats {
    /// Simple paths evaluated by the exact planner.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths_enumerated: Option<u64>,
    /// Directions closed by the minimum-risk search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions_closed: Option<u64>,
    /// Paths in the minimum-risk ensemble.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble_size: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub path: Path,
    pub utility: Utility,
    pub breakdown: RiskBreakdown,
    pub planner: PlannerKind,
    pub mode: PlanMode,
    pub truncated: bool,
    pub stats: PlanStats,
}

/// A scored candidate path.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub path: Path,
    pub utility: Utility,
}

/// Ordering used to pick among candidates: higher utility first, then the
/// shorter path, then the lexicographically smaller vertex sequence.
pub(crate) fn preference(a_value: f64, a: &[VertexId], b_value: f64, b: &[VertexId]) -> Ordering {
    b_value
        .total_cmp(&a_value)
        .then(a.len().cmp(&b.len()))
        .then_with(|| a.cmp(b))
}

/// Returns the moving candidate only if it strictly beats staying put.
pub(crate) fn finish(
    best: Option<Candidate>,
    risk: &RiskEvaluator,
    rewards: &RewardMap,
    mode: PlanMode,
    moving_kind: PlannerKind,
) -> PlanResult {
    let start = risk.graph().start();
    let (stay, stay_breakdown) = crate::reward::stay_utility(start, rewards, risk);
    match best {
        Some(c) if c.utility.value > stay.value => {
            let breakdown = risk.path_risk(&c.path);
            PlanResult {
                path: c.path,
                utility: c.utility,
                breakdown,
                planner: moving_kind,
                mode,
                truncated: false,
                stats: PlanStats::default(),
            }
        }
        _ => PlanResult {
            path: Path::unit(start),
            utility: stay,
            breakdown: stay_breakdown,
            planner: PlannerKind::Stay,
            mode,
            truncated: false,
            stats: PlanStats::default(),
        },
    }
}

/// Runs either the exact planner or the two-stage approximation.
pub fn plan(
    graph: &PlanningGraph,
    grid: &OccupancyGrid,
    rewards: &RewardMap,
    model: &RiskModel,
    mode: PlanMode,
    limits: &Limits,
) -> Result<PlanResult, PlanError> {
    model.validate()?;
    rewards.check_graph(graph)?;
    let risk = RiskEvaluator::new(model, graph, grid);
    plan_with(&risk, rewards, mode, limits)
}

/// As [`plan`], with a prepared evaluator.
pub fn plan_with(
    risk: &RiskEvaluator,
    rewards: &RewardMap,
    mode: PlanMode,
    limits: &Limits,
) -> Result<PlanResult, PlanError> {
    rewards.check_graph(risk.graph())?;
    match mode {
        PlanMode::Exact => Ok(exact_enumerate(risk, rewards, limits).0),
        PlanMode::Approximate => {
            let (ensemble, stats) = risk_aware_dijkstra(risk)?;
            let mut result = max_utility_select(&ensemble, rewards, risk);
            result.stats.directions_closed = Some(stats.closed as u64);
            Ok(result)
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_paths: 5_000_000,
            max_time: Some(Duration::from_secs(60)),
        }
    }
}
