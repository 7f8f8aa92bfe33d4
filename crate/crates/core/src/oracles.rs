//! Brute-force reference implementations and the utility/edge-weight analysis.
//!
//! Nothing in here calls into the planners: each oracle walks the adjacency
//! lists with its own plain recursion, so a traversal bug cannot hide in both.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{grid_to_graph, Connectivity, OccupancyGrid, Path, PlanningGraph, VertexId};
use crate::planners::{PlanMode, PlanResult, PlanStats, PlannerKind};
use crate::reward::{RewardMap, Utility};
use crate::risk::{RiskEvaluator, RiskModel, StateElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathCount {
    pub count: u64,
    pub truncated: bool,
}

/// Number of simple paths with at least one edge that start at `origin`.
/// Counting stops at `cap` when given.
pub fn count_simple_paths(graph: &PlanningGraph, origin: VertexId, cap: Option<u64>) -> PathCount {
    fn walk(
        graph: &PlanningGraph,
        u: VertexId,
        seen: &mut [bool],
        count: &mut u64,
        cap: u64,
    ) -> bool {
        for &(v, _) in graph.neighbors(u).expect("known vertex") {
            if seen[v] {
                continue;
            }
            if *count >= cap {
                return false;
            }
            *count += 1;
            seen[v] = true;
            let done = walk(graph, v, seen, count, cap);
            seen[v] = false;
            if !done {
                return false;
            }
        }
        true
    }
    let mut seen = vec![false; graph.vertex_count()];
    seen[origin] = true;
    let mut count = 0;
    let complete = walk(
        graph,
        origin,
        &mut seen,
        &mut count,
        cap.unwrap_or(u64::MAX),
    );
    PathCount {
        count,
        truncated: !complete,
    }
}

/// Visits every simple path from `origin` (length >= 1) with the current
/// vertex sequence.
fn each_simple_path(graph: &PlanningGraph, origin: VertexId, f: &mut dyn FnMut(&[VertexId])) {
    fn rec(graph: &PlanningGraph, seq: &mut Vec<VertexId>, f: &mut dyn FnMut(&[VertexId])) {
        let u = *seq.last().expect("non-empty");
        for &(v, _) in graph.neighbors(u).expect("known vertex") {
            if seq.contains(&v) {
                continue;
            }
            seq.push(v);
            f(seq);
            rec(graph, seq, f);
            seq.pop();
        }
    }
    let mut seq = vec![origin];
    rec(graph, &mut seq, f);
}

fn lighter(a: (f64, &[VertexId]), b: (f64, &[VertexId])) -> bool {
    a.0.total_cmp(&b.0)
        .then(a.1.len().cmp(&b.1.len()))
        .then_with(|| a.1.cmp(b.1))
        == Ordering::Less
}

/// Minimum-risk simple path from the start to every vertex, by exhaustive
/// enumeration. The start itself and unreachable vertices map to `None`.
pub fn min_risk_table(risk: &RiskEvaluator) -> Vec<Option<(Path, f64)>> {
    let graph = risk.graph();
    let mut best: Vec<Option<(Vec<VertexId>, f64, f64)>> = vec![None; graph.vertex_count()];
    each_simple_path(graph, graph.start(), &mut |seq| {
        let b = risk.evaluate_sequence(seq);
        let slot = &mut best[*seq.last().expect("non-empty")];
        let replace = match slot {
            None => true,
            Some((p, raw, _)) => lighter((b.raw, seq), (*raw, p)),
        };
        if replace {
            *slot = Some((seq.to_vec(), b.raw, b.total));
        }
    });
    best.into_iter()
        .map(|e| e.map(|(p, _, total)| (Path::from_trusted(p), total)))
        .collect()
}

/// Minimum-risk simple path from the start to `target`.
pub fn min_risk_oracle(risk: &RiskEvaluator, target: VertexId) -> Option<(Path, f64)> {
    min_risk_table(risk).into_iter().nth(target).flatten()
}

/// Globally best-utility simple path from the start, including the option of
/// staying put. Ties go to the shorter path, then the lexicographically
/// smaller one; staying wins any tie.
pub fn max_utility_oracle(risk: &RiskEvaluator, rewards: &RewardMap) -> PlanResult {
    let graph = risk.graph();
    let start = graph.start();
    let gamma = rewards.gamma();
    let mut best: Option<(Vec<VertexId>, f64, f64)> = None;
    let mut paths = 0u64;
    each_simple_path(graph, start, &mut |seq| {
        paths += 1;
        let mut reward = 0.0;
        for &v in &seq[1..] {
            reward = gamma * reward + rewards.get(v);
        }
        let risk_total = risk.evaluate_sequence(seq).total;
        let value = reward / risk_total;
        let better = match &best {
            None => true,
            Some((p, r, t)) => lighter((-value, seq), (-(r / t), p)),
        };
        if better {
            best = Some((seq.to_vec(), reward, risk_total));
        }
    });

    let stay_risk = risk.evaluate_sequence(&[start]);
    let stay = Utility::new(rewards.get(start), stay_risk.total);
    let (path, utility, planner) = match best {
        Some((p, reward, total)) if reward / total > stay.value => (
            Path::from_trusted(p),
            Utility::new(reward, total),
            PlannerKind::Exact,
        ),
        _ => (Path::unit(start), stay, PlannerKind::Stay),
    };
    PlanResult {
        breakdown: risk.path_risk(&path),
        path,
        utility,
        planner,
        mode: PlanMode::Exact,
        truncated: false,
        stats: PlanStats {
            paths_enumerated: Some(paths),
            ..PlanStats::default()
        },
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain is empty")]
    Empty,
    #[error("first prefix must hold exactly two vertices, got {0}")]
    FirstPrefix(usize),
    #[error("prefix {0} does not extend the previous prefix by one vertex")]
    NotAChain(usize),
}

/// Directed graph with real (possibly negative) edge weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDigraph {
    pub vertex_count: usize,
    pub edges: Vec<(VertexId, VertexId, f64)>,
}

/// Turns the inverse utilities of a chain of growing prefixes into edge
/// weights: the weight of step `k` is the change in inverse utility it causes,
/// with the origin-only prefix counted as 0. Summing weights along the chain
/// recovers the inverse utilities.
pub fn utility_to_edge_weights(
    chain: &[(Vec<VertexId>, f64)],
) -> Result<WeightedDigraph, ChainError> {
    let (first, _) = chain.first().ok_or(ChainError::Empty)?;
    if first.len() != 2 {
        return Err(ChainError::FirstPrefix(first.len()));
    }
    for (k, pair) in chain.windows(2).enumerate() {
        let (prev, next) = (&pair[0].0, &pair[1].0);
        if next.len() != prev.len() + 1 || next[..prev.len()] != prev[..] {
            return Err(ChainError::NotAChain(k + 1));
        }
    }
    let mut previous = 0.0;
    let mut edges = Vec::with_capacity(chain.len());
    for (prefix, inv) in chain {
        let n = prefix.len();
        edges.push((prefix[n - 2], prefix[n - 1], inv - previous));
        previous = *inv;
    }
    let vertex_count = chain
        .last()
        .map(|(p, _)| p.iter().max().map_or(0, |m| m + 1))
        .unwrap_or(0);
    Ok(WeightedDigraph {
        vertex_count,
        edges,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeCycle {
    /// Cycle vertices in travel order; the first vertex is not repeated.
    pub vertices: Vec<VertexId>,
    /// Indices into the digraph's edge list, parallel to `vertices`: edge `k`
    /// leaves `vertices[k]`.
    pub edges: Vec<usize>,
    pub total: f64,
}

/// Bellman-Ford from a virtual source joined to every vertex; returns one
/// cycle of negative total weight if any exists.
pub fn find_negative_cycle(g: &WeightedDigraph) -> Option<NegativeCycle> {
    let n = g.vertex_count;
    if n == 0 {
        return None;
    }
    let mut dist = vec![0.0f64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..n {
        last = None;
        for (i, &(a, b, w)) in g.edges.iter().enumerate() {
            if dist[a] + w < dist[b] {
                dist[b] = dist[a] + w;
                pred[b] = Some(i);
                last = Some(b);
            }
        }
        last?;
    }
    let mut x = last?;
    for _ in 0..n {
        x = g.edges[pred[x]?].0;
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut cur = x;
    loop {
        let e = pred[cur]?;
        let a = g.edges[e].0;
        vertices.push(a);
        edges.push(e);
        cur = a;
        if a == x {
            break;
        }
    }
    vertices.reverse();
    edges.reverse();
    let total = edges.iter().map(|&e| g.edges[e].2).sum();
    Some(NegativeCycle {
        vertices,
        edges,
        total,
    })
}

/// A corridor instance showing why shortest-path algorithms do not apply:
/// revisiting two rewarding cells keeps lowering the inverse utility, so the
/// converted digraph has a negative cycle and no finite optimum exists once
/// paths may repeat vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeCycleDemo {
    pub map: String,
    pub walk: Vec<VertexId>,
    pub prefix_inverse_utilities: Vec<f64>,
    pub digraph: WeightedDigraph,
    pub cycle: Option<NegativeCycle>,
}

pub fn negative_cycle_demo() -> NegativeCycleDemo {
    let grid = OccupancyGrid::empty_2d(3, 1);
    let graph = grid_to_graph(&grid, Connectivity::Orthogonal).expect("valid grid");
    let model = RiskModel {
        state_elements: vec![StateElement::ActionLength {
            weight: 1.0,
            per_step: 0.05,
        }],
        path_elements: vec![],
        w_states: 1.0,
        w_path: 0.0,
        risk_floor: crate::risk::DEFAULT_RISK_FLOOR,
    };
    let risk = RiskEvaluator::new(&model, &graph, &grid);
    let rewards = RewardMap::new(vec![0.0, 1.0, 1.0], 1.0).expect("valid rewards");
    let walk = vec![0, 1, 2, 1, 2];

    let mut chain = Vec::new();
    for k in 2..=walk.len() {
        let prefix = walk[..k].to_vec();
        let reward = crate::reward::accumulate_sequence(&prefix, &rewards);
        let inverse = risk.evaluate_sequence(&prefix).total / reward;
        chain.push((prefix, inverse));
    }
    let prefix_inverse_utilities = chain.iter().map(|(_, inv)| *inv).collect();
    let digraph = utility_to_edge_weights(&chain).expect("walk prefixes form a chain");
    let cycle = find_negative_cycle(&digraph);
    NegativeCycleDemo {
        map: "S..".to_owned(),
        walk,
        prefix_inverse_utilities,
        digraph,
        cycle,
    }
}
