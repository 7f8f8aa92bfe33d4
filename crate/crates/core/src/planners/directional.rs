//! Minimum-risk search over directions.
//!
//! Path risk here is not a sum of edge weights: a step's cost depends on the
//! path that led to it, so the minimum-risk path to `v` through `u` need not
//! extend the minimum-risk path to `u`. The search therefore keeps one label
//! per (vertex, incoming edge) pair, evaluates every candidate extension on
//! the whole backtracked path, and closes directions rather than vertices.
//! Closing is sound as long as risk never decreases when a path is extended.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{directions, Direction, EdgeId, Path, PlanningGraph, VertexId};
use crate::risk::RiskEvaluator;

/// Extensions sampled by the monotonicity check before each search.
pub const MONOTONE_SAMPLES: usize = 64;
const MONOTONE_SEED: u64 = 0x5eed;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("risk decreased from {before} to {after} when extending {path:?}")]
pub struct MonotonicityViolation {
    pub path: Vec<VertexId>,
    pub before: f64,
    pub after: f64,
}

/// Samples random simple-path extensions and fails on the first one whose
/// risk is lower than its prefix's.
pub fn check_monotone<F>(
    graph: &PlanningGraph,
    risk_of: F,
    samples: usize,
    seed: u64,
) -> Result<(), MonotonicityViolation>
where
    F: Fn(&[VertexId]) -> f64,
{
    if graph.edge_count() == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < samples && attempts < samples * 8 {
        attempts += 1;
        let mut walk = vec![rng.gen_range(0..graph.vertex_count())];
        let mut before = risk_of(&walk);
        loop {
            let last = *walk.last().expect("non-empty");
            let open: Vec<VertexId> = graph
                .neighbors(last)
                .expect("known vertex")
                .iter()
                .map(|(v, _)| *v)
                .filter(|v| !walk.contains(v))
                .collect();
            if open.is_empty() || checked >= samples {
                break;
            }
            walk.push(open[rng.gen_range(0..open.len())]);
            let after = risk_of(&walk);
            checked += 1;
            if after < before {
                return Err(MonotonicityViolation {
                    path: walk,
                    before,
                    after,
                });
            }
            before = after;
        }
    }
    Ok(())
}

/// Minimum-risk path found for one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEntry {
    pub path: Path,
    /// Floored total risk of `path`.
    pub risk: f64,
}

/// Minimum-risk paths from the start to every reachable vertex other than
/// the start itself.
#[derive(Debug, Clone, PartialEq)]
pub struct MinRiskEnsemble {
    start: VertexId,
    entries: Vec<Option<EnsembleEntry>>,
}

impl MinRiskEnsemble {
    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn get(&self, v: VertexId) -> Option<&EnsembleEntry> {
        self.entries.get(v).and_then(Option::as_ref)
    }

    /// Entries in vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &EnsembleEntry)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(v, e)| e.as_ref().map(|e| (v, e)))
    }

    pub fn len(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub directions: usize,
    pub closed: usize,
    pub relaxations: usize,
    /// Extensions that would have lowered an already closed label. Always 0
    /// for a model whose risk never decreases along a path.
    pub closing_violations: usize,
}

#[derive(Debug, Clone)]
struct Label {
    /// Unfloored risk; the search key.
    r: f64,
    total: f64,
    pd: Option<usize>,
    len: usize,
    closed: bool,
    version: u32,
}

#[derive(Debug, PartialEq)]
struct QueueEntry {
    r: f64,
    len: usize,
    dir: Direction,
    id: usize,
    version: u32,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .r
            .total_cmp(&self.r)
            .then(other.len.cmp(&self.len))
            .then(other.dir.cmp(&self.dir))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct DirectionIndex {
    dirs: Vec<Direction>,
    offsets: Vec<usize>,
}

impl DirectionIndex {
    fn new(graph: &PlanningGraph) -> Self {
        let dirs = directions(graph);
        let mut offsets = vec![0; graph.vertex_count() + 1];
        for d in &dirs {
            offsets[d.vertex + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        Self { dirs, offsets }
    }

    fn id(&self, vertex: VertexId, incoming: Option<EdgeId>) -> usize {
        let lo = self.offsets[vertex];
        let slice = &self.dirs[lo..self.offsets[vertex + 1]];
        lo + slice
            .binary_search_by(|d| d.incoming.cmp(&incoming))
            .expect("direction exists")
    }

    fn of_vertex(&self, vertex: VertexId) -> std::ops::Range<usize> {
        self.offsets[vertex]..self.offsets[vertex + 1]
    }
}

fn backtrack(labels: &[Label], dirs: &[Direction], mut id: usize) -> Vec<VertexId> {
    let mut rev = vec![dirs[id].vertex];
    while let Some(prev) = labels[id].pd {
        rev.push(dirs[prev].vertex);
        id = prev;
    }
    rev.reverse();
    rev
}

/// Minimum-risk paths from the start to every reachable vertex.
///
/// Labels start at infinity except the start's own direction, which starts at
/// zero. The open direction with the smallest risk (ties by path length, then
/// vertex, then incoming edge) is popped; every neighbor not already on its
/// backtracked path is appended and the extended path is evaluated in full;
/// the matching direction of the neighbor is relaxed on strict improvement.
/// Each vertex finally keeps its cheapest direction.
pub fn risk_aware_dijkstra(
    risk: &RiskEvaluator,
) -> Result<(MinRiskEnsemble, SearchStats), MonotonicityViolation> {
    let graph = risk.graph();
    check_monotone(
        graph,
        |p| risk.evaluate_sequence(p).raw,
        MONOTONE_SAMPLES,
        MONOTONE_SEED,
    )?;

    let index = DirectionIndex::new(graph);
    let mut labels: Vec<Label> = index
        .dirs
        .iter()
        .map(|_| Label {
            r: f64::INFINITY,
            total: f64::INFINITY,
            pd: None,
            len: 0,
            closed: false,
            version: 0,
        })
        .collect();
    let mut stats = SearchStats {
        directions: index.dirs.len(),
        ..SearchStats::default()
    };

    let start = graph.start();
    let origin = index.id(start, None);
    labels[origin].r = 0.0;
    labels[origin].total = risk.evaluate_sequence(&[start]).total;
    labels[origin].len = 1;

    let mut heap = BinaryHeap::new();
    heap.push(QueueEntry {
        r: 0.0,
        len: 1,
        dir: index.dirs[origin],
        id: origin,
        version: 0,
    });
    let mut last_closed = f64::NEG_INFINITY;

    while let Some(entry) = heap.pop() {
        let u_id = entry.id;
        if labels[u_id].closed || labels[u_id].version != entry.version {
            continue;
        }
        debug_assert!(labels[u_id].r >= last_closed);
        last_closed = labels[u_id].r;

        let path_u = backtrack(&labels, &index.dirs, u_id);
        let u = index.dirs[u_id].vertex;
        let mut path_v = path_u.clone();
        path_v.push(usize::MAX);
        for &(v, e) in graph.neighbors(u).expect("known vertex") {
            if path_u.contains(&v) {
                continue;
            }
            *path_v.last_mut().expect("non-empty") = v;
            let b = risk.evaluate_sequence(&path_v);
            let v_id = index.id(v, Some(e));
            let label = &mut labels[v_id];
            if label.closed {
                if b.raw < label.r {
                    stats.closing_violations += 1;
                }
                continue;
            }
            if b.raw < label.r {
                label.r = b.raw;
                label.total = b.total;
                label.pd = Some(u_id);
                label.len = path_v.len();
                label.version += 1;
                stats.relaxations += 1;
                heap.push(QueueEntry {
                    r: b.raw,
                    len: path_v.len(),
                    dir: index.dirs[v_id],
                    id: v_id,
                    version: label.version,
                });
            }
        }
        labels[u_id].closed = true;
        stats.closed += 1;
    }

    let entries = (0..graph.vertex_count())
        .map(|v| {
            if v == start {
                return None;
            }
            let best = index
                .of_vertex(v)
                .filter(|&id| labels[id].r.is_finite())
                .min_by(|&a, &b| {
                    labels[a]
                        .r
                        .total_cmp(&labels[b].r)
                        .then(labels[a].len.cmp(&labels[b].len))
                        .then(a.cmp(&b))
                })?;
            Some(EnsembleEntry {
                path: Path::from_trusted(backtrack(&labels, &index.dirs, best)),
                risk: labels[best].total,
            })
        })
        .collect();

    Ok((MinRiskEnsemble { start, entries }, stats))
}
