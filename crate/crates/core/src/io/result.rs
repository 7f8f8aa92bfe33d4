use serde::{Deserialize, Serialize};

use super::{Config, Error};
use crate::domain::{grid_to_graph, OccupancyGrid, Path, PlanningGraph};
use crate::planners::{PlanMode, PlanResult, PlanStats, PlannerKind};
use crate::reward::{accumulate_reward, RewardMap, Utility};
use crate::risk::{RiskBreakdown, RiskEvaluator};

/// Tolerance for the re-evaluation check.
pub const SELF_CHECK_TOL: f64 = 1e-9;

/// Serialized plan: the path as cell coordinates plus everything needed to
/// re-evaluate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub mode: PlanMode,
    pub planner: PlannerKind,
    pub path: Vec<Vec<usize>>,
    pub utility: Utility,
    pub breakdown: RiskBreakdown,
    pub stats: PlanStats,
    pub truncated: bool,
    pub config: Config,
}

impl ResultFile {
    pub fn new(result: &PlanResult, graph: &PlanningGraph, config: &Config) -> Self {
        let path = result
            .path
            .vertices()
            .iter()
            .map(|&v| graph.vertex(v).coord[..graph.ndim()].to_vec())
            .collect();
        Self {
            mode: result.mode,
            planner: result.planner,
            path,
            utility: result.utility,
            breakdown: result.breakdown.clone(),
            stats: result.stats.clone(),
            truncated: result.truncated,
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, file: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            file: file.to_owned(),
            source,
        })
    }

    /// Resolves the serialized coordinates back into a path of `graph`.
    pub fn resolve_path(&self, grid: &OccupancyGrid, graph: &PlanningGraph) -> Result<Path, Error> {
        let mut ids = Vec::with_capacity(self.path.len());
        for (i, c) in self.path.iter().enumerate() {
            let key = format!("path[{i}]");
            if c.len() != grid.ndim() {
                return Err(Error::invariant(
                    key,
                    "coordinate has the wrong number of axes",
                ));
            }
            let mut coord = [0usize; 3];
            for (axis, (&v, &d)) in c.iter().zip(grid.dims()).enumerate() {
                if v >= d {
                    return Err(Error::invariant(key, "coordinate is outside the map"));
                }
                coord[axis] = v;
            }
            let v = graph
                .vertex_of_cell(grid.cell(coord))
                .ok_or_else(|| Error::invariant(&key, "cell is occupied"))?;
            ids.push(v);
        }
        Path::new(graph, ids).map_err(|e| Error::invariant("path", e))
    }
}

/// Re-evaluates a result under its echoed configuration and checks that risk,
/// reward and utility agree with the serialized values.
pub fn verify_result(
    result: &ResultFile,
    grid: &OccupancyGrid,
    rewards_by_cell: &[f64],
) -> Result<(), Error> {
    let cfg = &result.config;
    cfg.validate()?;
    let graph = grid_to_graph(grid, cfg.connectivity).map_err(|e| Error::invariant("map", e))?;
    let path = result.resolve_path(grid, &graph)?;
    if path.origin() != graph.start() {
        return Err(Error::invariant(
            "path[0]",
            "path does not begin at the start",
        ));
    }
    let per_vertex = graph
        .vertices()
        .iter()
        .map(|v| rewards_by_cell[v.cell])
        .collect();
    let rewards =
        RewardMap::new(per_vertex, cfg.gamma).map_err(|e| Error::invariant("rewards", e))?;
    let risk = RiskEvaluator::new(&cfg.risk, &graph, grid);
    let breakdown = risk.path_risk(&path);
    let reward = if path.len() == 1 {
        rewards.get(path.origin())
    } else {
        accumulate_reward(&path, &rewards)
    };
    let checks = [
        ("breakdown.total", breakdown.total, result.breakdown.total),
        (
            "breakdown.integrated_states_risk",
            breakdown.integrated_states_risk,
            result.breakdown.integrated_states_risk,
        ),
        (
            "breakdown.path_risk_component",
            breakdown.path_risk_component,
            result.breakdown.path_risk_component,
        ),
        ("utility.risk", breakdown.total, result.utility.risk),
        ("utility.reward", reward, result.utility.reward),
        (
            "utility.value",
            reward / breakdown.total,
            result.utility.value,
        ),
    ];
    for (key, expected, got) in checks {
        if (expected - got).abs() > SELF_CHECK_TOL * expected.abs().max(1.0) {
            return Err(Error::invariant(
                key,
                format!("re-evaluated {expected}, file has {got}"),
            ));
        }
    }
    Ok(())
}

/// Checks that a breakdown is internally consistent.
pub fn breakdown_consistent(b: &RiskBreakdown, floor: f64) -> bool {
    let sum: f64 = b.per_state.iter().map(|(_, r)| r).sum();
    (sum - b.integrated_states_risk).abs() <= SELF_CHECK_TOL && b.total == b.raw.max(floor)
}
