use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{finish, preference, Candidate, PlanMode, PlanResult, PlannerKind};
use crate::domain::Path;
use crate::reward::{RewardMap, Utility};
use crate::risk::RiskEvaluator;

/// Caps for the exhaustive planner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_paths: u64,
    /// Wall-clock budget. `None` disables the check.
    #[serde(with = "opt_secs")]
    pub max_time: Option<Duration>,
}

mod opt_secs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(v: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|d| d.as_secs_f64()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        let secs = Option::<f64>::deserialize(d)?;
        match secs {
            Some(s) if !(s.is_finite() && s >= 0.0) => Err(serde::de::Error::custom(
                "max_time must be a non-negative number",
            )),
            Some(s) => Ok(Some(Duration::from_secs_f64(s))),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Simple paths of length >= 1 evaluated.
    pub paths: u64,
    pub truncated: bool,
    /// Measured only when a time budget is set.
    pub elapsed: Option<Duration>,
}

/// Evaluates every simple path from the start and returns the one with the
/// highest reward/risk utility, or the unit path if nothing beats staying.
///
/// The depth-first search keeps an explicit stack, so depth is bounded only
/// by the number of vertices. Accumulated rewards are kept per depth and
/// popped on backtrack, which also covers `gamma = 0`.
pub fn exact_enumerate(
    risk: &RiskEvaluator,
    rewards: &RewardMap,
    limits: &Limits,
) -> (PlanResult, EnumerationStats) {
    // no clock without a budget, so the planner also runs where time is unavailable
    let clock = limits.max_time.map(|_| Instant::now());
    let graph = risk.graph();
    let gamma = rewards.gamma();
    let start = graph.start();

    let mut path = vec![start];
    let mut on_path = vec![false; graph.vertex_count()];
    on_path[start] = true;
    let mut reward_at = vec![0.0];
    let mut cursor = vec![0usize];

    let mut best: Option<Candidate> = None;
    let mut paths = 0u64;
    let mut truncated = false;

    'search: loop {
        let depth = path.len() - 1;
        let adj = graph.neighbors(path[depth]).expect("vertex on path");
        if cursor[depth] == adj.len() {
            if depth == 0 {
                break;
            }
            let v = path.pop().expect("non-empty");
            on_path[v] = false;
            reward_at.pop();
            cursor.pop();
            continue;
        }
        let (v, _) = adj[cursor[depth]];
        cursor[depth] += 1;
        if on_path[v] {
            continue;
        }
        if paths >= limits.max_paths {
            truncated = true;
            break 'search;
        }
        if let (Some(budget), Some(clock)) = (limits.max_time, clock) {
            if paths.is_multiple_of(1024) && clock.elapsed() > budget {
                truncated = true;
                break 'search;
            }
        }

        path.push(v);
        on_path[v] = true;
        let reward = gamma * reward_at[depth] + rewards.get(v);
        reward_at.push(reward);
        cursor.push(0);
        paths += 1;

        let total = risk.evaluate_sequence(&path).total;
        let value = reward / total;
        let better = match &best {
            None => true,
            Some(b) => preference(value, &path, b.utility.value, b.path.vertices()).is_lt(),
        };
        if better {
            best = Some(Candidate {
                path: Path::from_trusted(path.clone()),
                utility: Utility::new(reward, total),
            });
        }
    }

    let mut result = finish(best, risk, rewards, PlanMode::Exact, PlannerKind::Exact);
    result.truncated = truncated;
    result.stats.paths_enumerated = Some(paths);
    let stats = EnumerationStats {
        paths,
        truncated,
        elapsed: clock.map(|c| c.elapsed()),
    };
    (result, stats)
}
