//! Explicit risk representation.
//!
//! Risk has two parts. *States risk* belongs to individual cells: each state
//! element maps a vertex to a unit value in `[0, 1]`, the elements are blended
//! by weight, and the blend is summed over the vertices of a path (one time
//! unit per vertex). *Path risk* depends on the shape of the whole path
//! (turns, length) and is evaluated once per path. The two are combined with
//! a weighted sum and floored at a small positive value so that utilities
//! stay finite.
//!
//! Totals are deliberately left unbounded above: renormalising by path length
//! would make risk decrease along some extensions, and the directional search
//! relies on risk never decreasing as a path grows.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Connectivity, OccupancyGrid, Path, PlanningGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiskError {
    #[error("{key}: {reason}")]
    InvalidParameter { key: String, reason: String },
    #[error("state risk table has {got} entries, graph has {expected} vertices")]
    TableLength { expected: usize, got: usize },
    #[error("state risk {value} at vertex {vertex} is outside [0, 1]")]
    TableValue { vertex: VertexId, value: f64 },
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> RiskError {
    RiskError::InvalidParameter {
        key: key.into(),
        reason: reason.into(),
    }
}

/// A risk element that depends on the vertex alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateElement {
    /// `clamp(1 - d / d_max, 0, 1)` with `d` the step distance to the nearest
    /// obstacle or map boundary.
    DistanceToObstacle { weight: f64, d_max: f64 },
    /// Fraction of occupied (or off-map) cells in a Chebyshev window.
    Visibility { weight: f64, radius: usize },
    /// Constant risk for every action taken.
    ActionLength { weight: f64, per_step: f64 },
}

impl StateElement {
    pub fn weight(&self) -> f64 {
        match *self {
            StateElement::DistanceToObstacle { weight, .. }
            | StateElement::Visibility { weight, .. }
            | StateElement::ActionLength { weight, .. } => weight,
        }
    }

    fn validate(&self, key: &str) -> Result<(), RiskError> {
        check_weight(&format!("{key}.weight"), self.weight())?;
        match *self {
            StateElement::DistanceToObstacle { d_max, .. } => {
                if !(d_max.is_finite() && d_max > 0.0) {
                    return Err(invalid(format!("{key}.d_max"), "must be a positive number"));
                }
            }
            StateElement::Visibility { .. } => {}
            StateElement::ActionLength { per_step, .. } => {
                if !(0.0..=1.0).contains(&per_step) {
                    return Err(invalid(format!("{key}.per_step"), "must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathElementKind {
    Tortuosity,
    PathLength,
}

/// A risk element that needs the whole path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathElement {
    /// `min(1, turns * risk_per_turn)`.
    Tortuosity { weight: f64, risk_per_turn: f64 },
    /// `min(1, steps * risk_per_step)`.
    PathLength { weight: f64, risk_per_step: f64 },
}

impl PathElement {
    pub fn weight(&self) -> f64 {
        match *self {
            PathElement::Tortuosity { weight, .. } | PathElement::PathLength { weight, .. } => {
                weight
            }
        }
    }

    pub fn kind(&self) -> PathElementKind {
        match self {
            PathElement::Tortuosity { .. } => PathElementKind::Tortuosity,
            PathElement::PathLength { .. } => PathElementKind::PathLength,
        }
    }

    fn unit_value(&self, vertices: &[VertexId], graph: &PlanningGraph) -> f64 {
        match *self {
            PathElement::Tortuosity { risk_per_turn, .. } => {
                (count_turns(vertices, graph) as f64 * risk_per_turn).min(1.0)
            }
            PathElement::PathLength { risk_per_step, .. } => {
                (vertices.len().saturating_sub(1) as f64 * risk_per_step).min(1.0)
            }
        }
    }

    fn validate(&self, key: &str) -> Result<(), RiskError> {
        check_weight(&format!("{key}.weight"), self.weight())?;
        let (name, rate) = match *self {
            PathElement::Tortuosity { risk_per_turn, .. } => ("risk_per_turn", risk_per_turn),
            PathElement::PathLength { risk_per_step, .. } => ("risk_per_step", risk_per_step),
        };
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(invalid(
                format!("{key}.{name}"),
                "must be a non-negative number",
            ));
        }
        Ok(())
    }
}

fn check_weight(key: &str, w: f64) -> Result<(), RiskError> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(invalid(key, "must be a non-negative number"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiskModel {
    pub state_elements: Vec<StateElement>,
    pub path_elements: Vec<PathElement>,
    pub w_states: f64,
    pub w_path: f64,
    pub risk_floor: f64,
}

pub const DEFAULT_RISK_FLOOR: f64 = 1e-6;

impl Default for RiskModel {
    fn default() -> Self {
        Self {
            state_elements: vec![
                StateElement::DistanceToObstacle {
                    weight: 1.0,
                    d_max: 3.0,
                },
                StateElement::Visibility {
                    weight: 1.0,
                    radius: 2,
                },
                StateElement::ActionLength {
                    weight: 1.0,
                    per_step: 0.05,
                },
            ],
            path_elements: vec![
                PathElement::Tortuosity {
                    weight: 1.0,
                    risk_per_turn: 0.1,
                },
                PathElement::PathLength {
                    weight: 1.0,
                    risk_per_step: 0.02,
                },
            ],
            w_states: 1.0,
            w_path: 1.0,
            risk_floor: DEFAULT_RISK_FLOOR,
        }
    }
}

impl RiskModel {
    /// Checks weights and parameters; error keys are paths into the model.
    pub fn validate(&self) -> Result<(), RiskError> {
        for (i, el) in self.state_elements.iter().enumerate() {
            el.validate(&format!("state_elements[{i}]"))?;
        }
        for (i, el) in self.path_elements.iter().enumerate() {
            el.validate(&format!("path_elements[{i}]"))?;
        }
        check_weight("w_states", self.w_states)?;
        check_weight("w_path", self.w_path)?;
        if self.w_states + self.w_path <= 0.0 {
            return Err(invalid("w_states", "w_states + w_path must be positive"));
        }
        if !(self.risk_floor.is_finite() && self.risk_floor > 0.0) {
            return Err(invalid("risk_floor", "must be positive"));
        }
        Ok(())
    }

    /// Copy whose total risk is `factor` times this model's, floor included.
    pub fn scaled(&self, factor: f64) -> RiskModel {
        let mut m = self.clone();
        m.w_states *= factor;
        m.w_path *= factor;
        m.risk_floor *= factor;
        m
    }
}

/// Per-path risk decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskBreakdown {
    pub per_state: Vec<(VertexId, f64)>,
    pub integrated_states_risk: f64,
    pub per_path_element: Vec<(PathElementKind, f64)>,
    pub path_risk_component: f64,
    /// Combined risk before the floor is applied.
    pub raw: f64,
    pub total: f64,
}

/// Number of heading changes along a vertex sequence.
pub fn count_turns(vertices: &[VertexId], graph: &PlanningGraph) -> usize {
    vertices
        .windows(3)
        .filter(|w| graph.displacement(w[0], w[1]) != graph.displacement(w[1], w[2]))
        .count()
}

pub fn turns(path: &Path, graph: &PlanningGraph) -> usize {
    count_turns(path.vertices(), graph)
}

/// Step distance from every cell to the nearest occupied cell or the map
/// boundary, under `connectivity`. Occupied cells get 0; a free cell on the
/// map edge gets 1.
pub fn distance_field(grid: &OccupancyGrid, connectivity: Connectivity) -> Vec<u32> {
    let offsets = connectivity.offsets(grid.ndim());
    let mut dist = vec![u32::MAX; grid.cell_count()];
    let mut queue = VecDeque::new();
    for (cell, d) in dist.iter_mut().enumerate() {
        if grid.is_occupied(cell) {
            *d = 0;
            continue;
        }
        let coord = grid.coord(cell);
        let touches = offsets.iter().any(|off| {
            grid.offset_cell(coord, *off)
                .is_none_or(|n| grid.is_occupied(n))
        });
        if touches {
            *d = 1;
            queue.push_back(cell);
        }
    }
    while let Some(cell) = queue.pop_front() {
        let coord = grid.coord(cell);
        for off in &offsets {
            if let Some(n) = grid.offset_cell(coord, *off) {
                if dist[n] == u32::MAX {
                    dist[n] = dist[cell] + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    dist
}

/// Distance to the nearest obstacle or boundary for every vertex of `graph`,
/// using the graph's connectivity.
pub fn distance_transform(grid: &OccupancyGrid, graph: &PlanningGraph) -> Vec<u32> {
    let field = distance_field(grid, graph.connectivity());
    graph.vertices().iter().map(|v| field[v.cell]).collect()
}

fn visibility_unit(grid: &OccupancyGrid, cell: usize, radius: usize) -> f64 {
    let r = radius as i64;
    if r == 0 {
        return 0.0;
    }
    let coord = grid.coord(cell);
    let zr = if grid.ndim() == 3 { r } else { 0 };
    let (mut blocked, mut total) = (0usize, 0usize);
    for dz in -zr..=zr {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx == 0 && dy == 0 && dz == 0 {
                    continue;
                }
                total += 1;
                if grid
                    .offset_cell(coord, [dx, dy, dz])
                    .is_none_or(|c| grid.is_occupied(c))
                {
                    blocked += 1;
                }
            }
        }
    }
    blocked as f64 / total as f64
}

fn state_risk_table(model: &RiskModel, graph: &PlanningGraph, grid: &OccupancyGrid) -> Vec<f64> {
    let total_weight: f64 = model.state_elements.iter().map(StateElement::weight).sum();
    if model.state_elements.is_empty() || total_weight <= 0.0 {
        return vec![0.0; graph.vertex_count()];
    }
    let needs_distance = model
        .state_elements
        .iter()
        .any(|e| matches!(e, StateElement::DistanceToObstacle { .. }));
    let dist = needs_distance.then(|| distance_field(grid, graph.connectivity()));
    graph
        .vertices()
        .iter()
        .map(|vert| {
            let weighted: f64 = model
                .state_elements
                .iter()
                .map(|el| {
                    let unit = match *el {
                        StateElement::DistanceToObstacle { d_max, .. } => {
                            let d = dist.as_ref().expect("computed")[vert.cell] as f64;
                            (1.0 - d / d_max).clamp(0.0, 1.0)
                        }
                        StateElement::Visibility { radius, .. } => {
                            visibility_unit(grid, vert.cell, radius)
                        }
                        StateElement::ActionLength { per_step, .. } => per_step.clamp(0.0, 1.0),
                    };
                    el.weight() * unit
                })
                .sum();
            (weighted / total_weight).clamp(0.0, 1.0)
        })
        .collect()
}

/// Weighted state-element risk of one vertex, renormalised to `[0, 1]`.
///
/// Recomputes the distance field on every call; use [`RiskEvaluator`] when
/// evaluating many vertices or paths.
pub fn state_risk(
    model: &RiskModel,
    graph: &PlanningGraph,
    grid: &OccupancyGrid,
    v: VertexId,
) -> Option<f64> {
    if !graph.contains(v) {
        return None;
    }
    Some(state_risk_table(model, graph, grid)[v])
}

/// A risk model bound to a graph, with state risks precomputed.
#[derive(Debug, Clone)]
pub struct RiskEvaluator<'a> {
    model: &'a RiskModel,
    graph: &'a PlanningGraph,
    state: Vec<f64>,
}

impl<'a> RiskEvaluator<'a> {
    pub fn new(model: &'a RiskModel, graph: &'a PlanningGraph, grid: &OccupancyGrid) -> Self {
        let state = state_risk_table(model, graph, grid);
        Self {
            model,
            graph,
            state,
        }
    }

    /// Uses an externally supplied state-risk value per vertex instead of the
    /// model's state elements. Path elements and weights still apply.
    pub fn with_state_risks(
        model: &'a RiskModel,
        graph: &'a PlanningGraph,
        state: Vec<f64>,
    ) -> Result<Self, RiskError> {
        if state.len() != graph.vertex_count() {
            return Err(RiskError::TableLength {
                expected: graph.vertex_count(),
                got: state.len(),
            });
        }
        if let Some((vertex, &value)) = state
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(RiskError::TableValue { vertex, value });
        }
        Ok(Self {
            model,
            graph,
            state,
        })
    }

    pub fn model(&self) -> &RiskModel {
        self.model
    }

    pub fn graph(&self) -> &PlanningGraph {
        self.graph
    }

    pub fn state_risk(&self, v: VertexId) -> f64 {
        self.state[v]
    }

    pub fn state_risks(&self) -> &[f64] {
        &self.state
    }

    pub fn path_risk(&self, path: &Path) -> RiskBreakdown {
        self.evaluate_sequence(path.vertices())
    }

    /// Evaluates any edge-connected vertex sequence, including walks that
    /// revisit vertices.
    pub fn evaluate_sequence(&self, vertices: &[VertexId]) -> RiskBreakdown {
        let per_state: Vec<(VertexId, f64)> =
            vertices.iter().map(|&v| (v, self.state[v])).collect();
        let integrated_states_risk: f64 = per_state.iter().map(|(_, r)| r).sum();
        let per_path_element: Vec<(PathElementKind, f64)> = self
            .model
            .path_elements
            .iter()
            .map(|el| (el.kind(), el.unit_value(vertices, self.graph)))
            .collect();
        let path_risk_component: f64 = self
            .model
            .path_elements
            .iter()
            .zip(&per_path_element)
            .map(|(el, (_, unit))| el.weight() * unit)
            .sum();
        let raw =
            self.model.w_states * integrated_states_risk + self.model.w_path * path_risk_component;
        RiskBreakdown {
            per_state,
            integrated_states_risk,
            per_path_element,
            path_risk_component,
            raw,
            total: raw.max(self.model.risk_floor),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid_to_graph;

    fn open(nx: usize, ny: usize) -> (OccupancyGrid, PlanningGraph) {
        let grid = OccupancyGrid::empty_2d(nx, ny);
        let graph = grid_to_graph(&grid, Connectivity::Orthogonal).unwrap();
        (grid, graph)
    }

    fn only_state(el: StateElement) -> RiskModel {
        RiskModel {
            state_elements: vec![el],
            path_elements: vec![],
            ..RiskModel::default()
        }
    }

    #[test]
    fn distance_transform_examples() {
        let (grid, graph) = open(5, 5);
        let d = distance_transform(&grid, &graph);
        assert_eq!(d[12], 3);
        assert_eq!(d[0], 1);
        assert_eq!(d[6], 2);
        let (g1, gr1) = open(1, 1);
        assert_eq!(distance_transform(&g1, &gr1), vec![1]);

        // obstacle in the middle of a 7x7 grid
        let mut occ = vec![false; 49];
        occ[24] = true;
        let grid = OccupancyGrid::new(vec![7, 7], occ, 0, None).unwrap();
        let graph = grid_to_graph(&grid, Connectivity::Orthogonal).unwrap();
        let d = distance_transform(&grid, &graph);
        let v = graph.vertex_of_cell(23).unwrap();
        assert_eq!(d[v], 1);
    }

    #[test]
    fn distance_unit_risk_next_to_obstacle() {
        let grid = OccupancyGrid::new(
            vec![7, 7],
            {
                let mut o = vec![false; 49];
                o[24] = true;
                o
            },
            0,
            None,
        )
        .unwrap();
        let graph = grid_to_graph(&grid, Connectivity::Orthogonal).unwrap();
        let model = only_state(StateElement::DistanceToObstacle {
            weight: 1.0,
            d_max: 3.0,
        });
        let v = graph.vertex_of_cell(23).unwrap();
        let r = state_risk(&model, &graph, &grid, v).unwrap();
        assert!((r - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn distance_risk_saturates_to_zero() {
        let (grid, graph) = open(7, 7);
        let model = only_state(StateElement::DistanceToObstacle {
            weight: 1.0,
            d_max: 3.0,
        });
        // center cell is 4 steps from the boundary surface
        let v = graph.vertex_of_cell(24).unwrap();
        assert_eq!(state_risk(&model, &graph, &grid, v), Some(0.0));
    }

    #[test]
    fn calibration_fixture_state_risk() {
        let (grid, graph) = open(6, 3);
        let model = only_state(StateElement::ActionLength {
            weight: 1.0,
            per_step: 0.1,
        });
        let eval = RiskEvaluator::new(&model, &graph, &grid);
        assert!(eval.state_risks().iter().all(|r| *r == 0.1));
    }

    #[test]
    fn empty_state_elements_give_zero() {
        let (grid, graph) = open(3, 3);
        let model = RiskModel {
            state_elements: vec![],
            ..RiskModel::default()
        };
        assert_eq!(state_risk(&model, &graph, &grid, 4), Some(0.0));
        assert_eq!(state_risk(&model, &graph, &grid, 9), None);
    }

    #[test]
    fn visibility_counts_boundary() {
        let (grid, _) = open(3, 3);
        // corner: of the 8 surrounding cells, 5 are off-map
        assert!((visibility_unit(&grid, 0, 1) - 5.0 / 8.0).abs() < 1e-12);
        assert_eq!(visibility_unit(&grid, 4, 1), 0.0);
    }

    #[test]
    fn turn_counts() {
        let (_, graph) = open(6, 3);
        let straight = Path::new(&graph, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(turns(&straight, &graph), 0);
        let ell = Path::new(&graph, vec![0, 1, 7]).unwrap();
        assert_eq!(turns(&ell, &graph), 1);
        assert_eq!(turns(&Path::unit(0), &graph), 0);
    }

    /// Ten states, six heading changes: up, right, up, right x3, down, right, down.
    fn six_turn_path(graph: &PlanningGraph) -> Path {
        let cells = [
            [0, 2],
            [0, 1],
            [1, 1],
            [1, 0],
            [2, 0],
            [3, 0],
            [4, 0],
            [4, 1],
            [5, 1],
            [5, 2],
        ];
        let ids = cells.iter().map(|[x, y]| x + 6 * y).collect();
        Path::new(graph, ids).unwrap()
    }

    #[test]
    fn six_turn_fixture_risk() {
        let (grid, graph) = open(6, 3);
        let path = six_turn_path(&graph);
        assert_eq!(path.len(), 10);
        assert_eq!(turns(&path, &graph), 6);
        let model = RiskModel {
            state_elements: vec![StateElement::ActionLength {
                weight: 1.0,
                per_step: 0.1,
            }],
            path_elements: vec![PathElement::Tortuosity {
                weight: 1.0,
                risk_per_turn: 0.1,
            }],
            w_states: 1.0,
            w_path: 1.0,
            risk_floor: DEFAULT_RISK_FLOOR,
        };
        let b = RiskEvaluator::new(&model, &graph, &grid).path_risk(&path);
        assert!((b.integrated_states_risk - 1.0).abs() < 1e-12);
        assert!((b.path_risk_component - 0.6).abs() < 1e-12);
        assert!((b.total - 1.6).abs() < 1e-12);
    }

    #[test]
    fn floor_engages_on_zero_risk() {
        let (grid, graph) = open(7, 7);
        let model = only_state(StateElement::DistanceToObstacle {
            weight: 1.0,
            d_max: 3.0,
        });
        let eval = RiskEvaluator::new(&model, &graph, &grid);
        let b = eval.path_risk(&Path::unit(24));
        assert_eq!(b.raw, 0.0);
        assert_eq!(b.total, DEFAULT_RISK_FLOOR);
    }

    #[test]
    fn straight_path_has_no_tortuosity() {
        let (grid, graph) = open(4, 1);
        let model = RiskModel {
            state_elements: vec![],
            path_elements: vec![PathElement::Tortuosity {
                weight: 1.0,
                risk_per_turn: 0.1,
            }],
            ..RiskModel::default()
        };
        let eval = RiskEvaluator::new(&model, &graph, &grid);
        let b = eval.path_risk(&Path::new(&graph, vec![0, 1, 2]).unwrap());
        assert_eq!(b.path_risk_component, 0.0);
    }

    #[test]
    fn validation_names_key() {
        let mut m = RiskModel::default();
        m.path_elements[1] = PathElement::PathLength {
            weight: -1.0,
            risk_per_step: 0.1,
        };
        assert_eq!(
            m.validate().unwrap_err().to_string(),
            "path_elements[1].weight: must be a non-negative number"
        );
        let m = RiskModel {
            w_states: 0.0,
            w_path: 0.0,
            ..RiskModel::default()
        };
        assert!(m.validate().is_err());
        let m = RiskModel {
            risk_floor: 0.0,
            ..RiskModel::default()
        };
        assert!(m.validate().is_err());
        assert!(RiskModel::default().validate().is_ok());
    }

    #[test]
    fn explicit_table_checked() {
        let (_, graph) = open(2, 1);
        let model = RiskModel::default();
        assert!(RiskEvaluator::with_state_risks(&model, &graph, vec![0.1]).is_err());
        assert!(RiskEvaluator::with_state_risks(&model, &graph, vec![0.1, 1.5]).is_err());
        assert!(RiskEvaluator::with_state_risks(&model, &graph, vec![0.1, 0.5]).is_ok());
    }
}
