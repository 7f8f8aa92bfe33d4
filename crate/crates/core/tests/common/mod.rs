#![allow(dead_code)]

use riskplan::domain::{grid_to_graph, Connectivity, OccupancyGrid, PlanningGraph, VertexId};
use riskplan::io::parse_map;
use riskplan::risk::{PathElement, RiskModel};

/// Two routes around a wall from S to the bottom-right corner. Route A
/// hugs the top (11 states, 6 turns), route B runs straight along the bottom
/// row (5 states, no turns).
pub const TWO_ROUTE_MAP: &str = "\
#...#
..#..
.###.
S....
";

pub struct TwoRoute {
    pub grid: OccupancyGrid,
    pub graph: PlanningGraph,
    pub goal: VertexId,
    pub route_a: Vec<VertexId>,
    pub route_b: Vec<VertexId>,
    pub state: Vec<f64>,
}

pub fn vertex_at(grid: &OccupancyGrid, graph: &PlanningGraph, x: usize, y: usize) -> VertexId {
    graph
        .vertex_of_cell(grid.cell([x, y, 0]))
        .expect("free cell")
}

pub fn two_route() -> TwoRoute {
    let grid = parse_map(TWO_ROUTE_MAP).unwrap();
    let graph = grid_to_graph(&grid, Connectivity::Orthogonal).unwrap();
    let at = |x, y| vertex_at(&grid, &graph, x, y);
    let route_a: Vec<VertexId> = [
        (0, 3),
        (0, 2),
        (0, 1),
        (1, 1),
        (1, 0),
        (2, 0),
        (3, 0),
        (3, 1),
        (4, 1),
        (4, 2),
        (4, 3),
    ]
    .iter()
    .map(|&(x, y)| at(x, y))
    .collect();
    let route_b: Vec<VertexId> = (0..5).map(|x| at(x, 3)).collect();
    // safe states carry 0.1 each; the open bottom row is riskier
    let mut state = vec![0.1; graph.vertex_count()];
    for &v in &route_b[1..4] {
        state[v] = 0.5;
    }
    TwoRoute {
        goal: at(4, 3),
        grid,
        graph,
        route_a,
        route_b,
        state,
    }
}

/// Route A costs 1.1 + 0.6 w and route B 1.7, so B takes over above w = 1.
pub fn tortuosity_model(w: f64) -> RiskModel {
    RiskModel {
        state_elements: vec![],
        path_elements: vec![PathElement::Tortuosity {
            weight: w,
            risk_per_turn: 0.1,
        }],
        w_states: 1.0,
        w_path: 1.0,
        risk_floor: riskplan::risk::DEFAULT_RISK_FLOOR,
    }
}

pub const TORTUOSITY_SWEEP: [f64; 9] = [0.0, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 4.0];

/// Every simple path from `origin`, by plain recursion.
pub fn all_simple_paths(graph: &PlanningGraph, origin: VertexId) -> Vec<Vec<VertexId>> {
    fn go(graph: &PlanningGraph, path: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        out.push(path.clone());
        let last = *path.last().unwrap();
        for &(v, _) in graph.neighbors(last).unwrap() {
            if !path.contains(&v) {
                path.push(v);
                go(graph, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(graph, &mut vec![origin], &mut out);
    out
}
