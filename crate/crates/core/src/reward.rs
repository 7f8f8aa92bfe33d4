//! Reward maps, discounted reward accumulation and the reward/risk utility.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{OccupancyGrid, Path, PlanningGraph, VertexId};
use crate::risk::{RiskBreakdown, RiskEvaluator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("reward {value} at vertex {vertex} is outside [0, 1]")]
    OutOfRange { vertex: VertexId, value: f64 },
    #[error("gamma {0} is outside [0, 1]")]
    Gamma(f64),
    #[error("reward map has {got} entries, graph has {expected} vertices")]
    Length { expected: usize, got: usize },
    #[error("a discount factor of 0 cannot be inverted")]
    NonInvertible,
    #[error("synthetic rewards need a point of interest")]
    MissingPoi,
}

/// Reward per vertex plus the discount factor used when accumulating them.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardMap {
    reward: Vec<f64>,
    gamma: f64,
}

impl RewardMap {
    pub fn new(reward: Vec<f64>, gamma: f64) -> Result<Self, RewardError> {
        check_gamma(gamma)?;
        if let Some((vertex, &value)) = reward
            .iter()
            .enumerate()
            .find(|(_, r)| !(0.0..=1.0).contains(*r))
        {
            return Err(RewardError::OutOfRange { vertex, value });
        }
        Ok(Self { reward, gamma })
    }

    /// Checks that the map covers exactly the vertices of `graph`.
    pub fn check_graph(&self, graph: &PlanningGraph) -> Result<(), RewardError> {
        if self.reward.len() != graph.vertex_count() {
            return Err(RewardError::Length {
                expected: graph.vertex_count(),
                got: self.reward.len(),
            });
        }
        Ok(())
    }

    pub fn zeros(n: usize, gamma: f64) -> Result<Self, RewardError> {
        Self::new(vec![0.0; n], gamma)
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.reward[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.reward
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self, RewardError> {
        check_gamma(gamma)?;
        Ok(Self {
            reward: self.reward.clone(),
            gamma,
        })
    }
}

fn check_gamma(gamma: f64) -> Result<(), RewardError> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(RewardError::Gamma(gamma))
    }
}

/// `r <- gamma * r + reward(v)` over every vertex after the origin.
pub fn accumulate_reward(path: &Path, rewards: &RewardMap) -> f64 {
    accumulate_sequence(path.vertices(), rewards)
}

pub(crate) fn accumulate_sequence(vertices: &[VertexId], rewards: &RewardMap) -> f64 {
    vertices
        .iter()
        .skip(1)
        .fold(0.0, |r, &v| rewards.gamma * r + rewards.reward[v])
}

/// Undoes one accumulation step.
pub fn unaccumulate_reward(r: f64, v_reward: f64, gamma: f64) -> Result<f64, RewardError> {
    if gamma == 0.0 {
        return Err(RewardError::NonInvertible);
    }
    Ok((r - v_reward) / gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Utility {
    pub reward: f64,
    pub risk: f64,
    pub value: f64,
}

impl Utility {
    pub fn new(reward: f64, risk: f64) -> Self {
        Self {
            reward,
            risk,
            value: reward / risk,
        }
    }

    /// Risk spent per unit of reward.
    pub fn inverse(&self) -> f64 {
        self.risk / self.reward
    }
}

/// Utility of travelling `path`.
pub fn utility(path: &Path, rewards: &RewardMap, risk: &RiskEvaluator) -> (Utility, RiskBreakdown) {
    let breakdown = risk.path_risk(path);
    (
        Utility::new(accumulate_reward(path, rewards), breakdown.total),
        breakdown,
    )
}

/// Utility of remaining at the start. Unlike a moving path, the unit path is
/// credited with the start vertex's own reward.
pub fn stay_utility(
    start: VertexId,
    rewards: &RewardMap,
    risk: &RiskEvaluator,
) -> (Utility, RiskBreakdown) {
    let breakdown = risk.path_risk(&Path::unit(start));
    (Utility::new(rewards.get(start), breakdown.total), breakdown)
}

/// Shape of the synthetic viewpoint-quality field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    /// Distance from the point of interest with the best view.
    pub standoff: f64,
    /// Distance beyond (or short of) the standoff at which reward reaches 0.
    /// `None` uses the farthest cell of the map.
    #[serde(default)]
    pub falloff: Option<f64>,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            standoff: 2.0,
            falloff: None,
        }
    }
}

/// Synthetic reward field peaking on a ring of radius `standoff` around
/// `poi`: `clamp(1 - |d - standoff| / falloff, 0, 1)`.
pub fn synth_reward_map(
    grid: &OccupancyGrid,
    graph: &PlanningGraph,
    poi: usize,
    params: SynthParams,
    gamma: f64,
) -> Result<RewardMap, RewardError> {
    let centre = grid.coord(poi);
    let dist = |c: [usize; 3]| -> f64 {
        (0..3)
            .map(|a| (c[a] as f64 - centre[a] as f64).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let falloff = params.falloff.unwrap_or_else(|| {
        let farthest = (0..grid.cell_count())
            .map(|c| (dist(grid.coord(c)) - params.standoff).abs())
            .fold(0.0, f64::max);
        farthest.max(1.0)
    });
    let reward = graph
        .vertices()
        .iter()
        .map(|v| (1.0 - (dist(v.coord) - params.standoff).abs() / falloff).clamp(0.0, 1.0))
        .collect();
    RewardMap::new(reward, gamma)
}
