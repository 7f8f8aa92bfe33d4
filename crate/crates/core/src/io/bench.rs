//! Randomized comparison of the exact and approximate planners.

use std::collections::VecDeque;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{grid_to_graph, Connectivity, OccupancyGrid, PlanningGraph};
use crate::oracles::min_risk_table;
use crate::planners::{
    exact_enumerate, max_utility_select, risk_aware_dijkstra, Limits, PlanResult,
};
use crate::reward::RewardMap;
use crate::risk::{PathElement, RiskEvaluator, RiskModel, StateElement};

/// Tolerance when comparing ensemble risks against the oracle.
pub const ORACLE_TOL: f64 = 1e-9;

/// Bounds for random instances.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub min_dim: usize,
    pub max_dim: usize,
    pub obstacle_density: f64,
    pub connectivity: Connectivity,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            min_dim: 2,
            max_dim: 4,
            obstacle_density: 0.25,
            connectivity: Connectivity::Orthogonal,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub grid: OccupancyGrid,
    pub graph: PlanningGraph,
    pub rewards: RewardMap,
    pub model: RiskModel,
}

/// Random risk model over the shipped elements. Per-turn and per-step rates
/// stay at or below 0.06, so on maps of at most 16 cells (at most 15 steps)
/// neither path element saturates and every risk increment depends only on
/// the last step, the new step and the new vertex.
pub fn random_model(rng: &mut impl Rng) -> RiskModel {
    RiskModel {
        state_elements: vec![
            StateElement::DistanceToObstacle {
                weight: rng.gen_range(0.1..1.0),
                d_max: rng.gen_range(2.0..4.0),
            },
            StateElement::Visibility {
                weight: rng.gen_range(0.1..1.0),
                radius: rng.gen_range(1..=2),
            },
            StateElement::ActionLength {
                weight: rng.gen_range(0.1..1.0),
                per_step: rng.gen_range(0.01..0.2),
            },
        ],
        path_elements: vec![
            PathElement::Tortuosity {
                weight: rng.gen_range(0.0..2.0),
                risk_per_turn: rng.gen_range(0.01..0.06),
            },
            PathElement::PathLength {
                weight: rng.gen_range(0.0..2.0),
                risk_per_step: rng.gen_range(0.005..0.06),
            },
        ],
        w_states: rng.gen_range(0.2..1.0),
        w_path: rng.gen_range(0.2..2.0),
        risk_floor: crate::risk::DEFAULT_RISK_FLOOR,
    }
}

/// Random grid with its start connected to every free cell: cells the start
/// cannot reach are turned into obstacles.
pub fn random_grid(rng: &mut impl Rng, spec: &GeneratorSpec) -> OccupancyGrid {
    let nx = rng.gen_range(spec.min_dim..=spec.max_dim);
    let ny = rng.gen_range(spec.min_dim..=spec.max_dim);
    let n = nx * ny;
    let start = rng.gen_range(0..n);
    let mut occupied: Vec<bool> = (0..n)
        .map(|c| c != start && rng.gen_bool(spec.obstacle_density))
        .collect();
    let grid = OccupancyGrid::new(vec![nx, ny], occupied.clone(), start, None).expect("valid grid");
    let graph = grid_to_graph(&grid, spec.connectivity).expect("start is free");
    let mut seen = vec![false; graph.vertex_count()];
    seen[graph.start()] = true;
    let mut queue = VecDeque::from([graph.start()]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in graph.neighbors(u).expect("known vertex") {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    for (v, vert) in graph.vertices().iter().enumerate() {
        if !seen[v] {
            occupied[vert.cell] = true;
        }
    }
    OccupancyGrid::new(vec![nx, ny], occupied, start, None).expect("valid grid")
}

pub fn random_instance(rng: &mut impl Rng, spec: &GeneratorSpec) -> Instance {
    let grid = random_grid(rng, spec);
    let graph = grid_to_graph(&grid, spec.connectivity).expect("start is free");
    let rewards = (0..graph.vertex_count())
        .map(|_| rng.gen_range(0.0..=1.0))
        .collect();
    let gamma = if rng.gen_bool(0.5) {
        1.0
    } else {
        rng.gen_range(0.5..1.0)
    };
    let rewards = RewardMap::new(rewards, gamma).expect("rewards in range");
    let model = random_model(rng);
    Instance {
        grid,
        graph,
        rewards,
        model,
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub trial: usize,
    pub nx: usize,
    pub ny: usize,
    pub free_cells: usize,
    pub exact_utility: f64,
    pub approx_utility: f64,
    pub gap: f64,
    pub exact_len: usize,
    pub approx_len: usize,
    pub exact_states_risk: f64,
    pub exact_path_risk: f64,
    pub approx_states_risk: f64,
    pub approx_path_risk: f64,
    pub exact_paths: u64,
    pub truncated: bool,
    pub approx_within_exact: bool,
    pub ensemble_matches_oracle: bool,
    pub exact_ms: f64,
    pub approx_ms: f64,
}

pub struct TrialOutcome {
    pub row: BenchRow,
    pub exact: PlanResult,
    pub approx: PlanResult,
}

/// Runs both planners and the minimum-risk oracle on one instance.
pub fn run_trial(trial: usize, inst: &Instance, limits: &Limits) -> TrialOutcome {
    let risk = RiskEvaluator::new(&inst.model, &inst.graph, &inst.grid);

    let t = Instant::now();
    let (exact, stats) = exact_enumerate(&risk, &inst.rewards, limits);
    let exact_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let (ensemble, _) = risk_aware_dijkstra(&risk).expect("shipped elements are monotone");
    let approx = max_utility_select(&ensemble, &inst.rewards, &risk);
    let approx_ms = t.elapsed().as_secs_f64() * 1e3;

    let oracle = min_risk_table(&risk);
    let ensemble_matches_oracle =
        oracle
            .iter()
            .enumerate()
            .all(|(v, o)| match (o, ensemble.get(v)) {
                (None, None) => true,
                (Some((_, r)), Some(e)) => (r - e.risk).abs() <= ORACLE_TOL,
                _ => false,
            });

    let [nx, ny, _] = inst.grid.extent();
    let row = BenchRow {
        trial,
        nx,
        ny,
        free_cells: inst.graph.vertex_count(),
        exact_utility: exact.utility.value,
        approx_utility: approx.utility.value,
        gap: exact.utility.value - approx.utility.value,
        exact_len: exact.path.len(),
        approx_len: approx.path.len(),
        exact_states_risk: exact.breakdown.integrated_states_risk,
        exact_path_risk: exact.breakdown.path_risk_component,
        approx_states_risk: approx.breakdown.integrated_states_risk,
        approx_path_risk: approx.breakdown.path_risk_component,
        exact_paths: stats.paths,
        truncated: stats.truncated,
        approx_within_exact: approx.utility.value <= exact.utility.value + ORACLE_TOL,
        ensemble_matches_oracle,
        exact_ms,
        approx_ms,
    };
    TrialOutcome { row, exact, approx }
}

/// Runs `trials` seeded trials.
pub fn run_bench(spec: &GeneratorSpec, trials: usize, seed: u64, limits: &Limits) -> Vec<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|t| {
            let inst = random_instance(&mut rng, spec);
            run_trial(t, &inst, limits).row
        })
        .collect()
}

/// CSV with a comment line recording the seed and generator, then a header
/// row. Runtime columns are appended only when `timing` is set, since they
/// differ between runs.
pub fn bench_csv(rows: &[BenchRow], spec: &GeneratorSpec, seed: u64, timing: bool) -> String {
    let mut out = format!(
        "# seed={seed} trials={} min_dim={} max_dim={} obstacle_density={} connectivity={:?}\n",
        rows.len(),
        spec.min_dim,
        spec.max_dim,
        spec.obstacle_density,
        spec.connectivity
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "trial",
        "nx",
        "ny",
        "free_cells",
        "exact_utility",
        "approx_utility",
        "gap",
        "exact_len",
        "approx_len",
        "exact_states_risk",
        "exact_path_risk",
        "approx_states_risk",
        "approx_path_risk",
        "exact_paths",
        "truncated",
        "approx_within_exact",
        "ensemble_matches_oracle",
    ];
    if timing {
        header.extend(["exact_ms", "approx_ms"]);
    }
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let mut rec = vec![
            r.trial.to_string(),
            r.nx.to_string(),
            r.ny.to_string(),
            r.free_cells.to_string(),
            r.exact_utility.to_string(),
            r.approx_utility.to_string(),
            r.gap.to_string(),
            r.exact_len.to_string(),
            r.approx_len.to_string(),
            r.exact_states_risk.to_string(),
            r.exact_path_risk.to_string(),
            r.approx_states_risk.to_string(),
            r.approx_path_risk.to_string(),
            r.exact_paths.to_string(),
            r.truncated.to_string(),
            r.approx_within_exact.to_string(),
            r.ensemble_matches_oracle.to_string(),
        ];
        if timing {
            rec.push(format!("{:.3}", r.exact_ms));
            rec.push(format!("{:.3}", r.approx_ms));
        }
        w.write_record(&rec).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
    out
}
