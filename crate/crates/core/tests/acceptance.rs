//! Acceptance gate: runs each criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path as FsPath;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riskplan::io::bench::{random_instance, run_trial, GeneratorSpec};
use riskplan::io::commands::{cmd_negcycle, cmd_plan, PlanArgs, RewardSource, Scenario};
use riskplan::io::{parse_map, verify_result, write_map, Config, ResultFile};
use riskplan::oracles::{
    count_simple_paths, min_risk_oracle, negative_cycle_demo, utility_to_edge_weights,
};
use riskplan::planners::{exact_enumerate, plan, risk_aware_dijkstra, Limits, PlannerKind};
use riskplan::reward::{RewardMap, Utility};
use riskplan::risk::{RiskEvaluator, RiskModel};
use riskplan::{grid_to_graph, Connectivity, OccupancyGrid, PlanMode, VertexId};

use common::{tortuosity_model, two_route, TORTUOSITY_SWEEP};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn within(elapsed: Duration, budget: Duration, detail: String) -> Outcome {
    if elapsed < budget {
        Ok(format!("{detail}; {elapsed:.2?} < {budget:?}"))
    } else {
        Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
    }
}

fn edge_weight_chain() -> Outcome {
    let first = Utility::new(5.0, 5.0).inverse();
    let second = Utility::new(16.0, 8.0).inverse();
    let chain = vec![(vec![1, 2], first), (vec![1, 2, 3], second)];
    let t = Instant::now();
    let g = utility_to_edge_weights(&chain).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let weights: Vec<f64> = g.edges.iter().map(|e| e.2).collect();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    if !(close(first, 1.0) && close(second, 0.5)) {
        return Err(format!("inverse utilities {first}, {second}"));
    }
    if weights.len() != 2 || !close(weights[0], 1.0) || !close(weights[1], -0.5) {
        return Err(format!("edge weights {weights:?}"));
    }
    within(
        elapsed,
        Duration::from_millis(1),
        format!("inverse utilities [1, 0.5], weights {weights:?}"),
    )
}

fn path_count_growth() -> Outcome {
    let t = Instant::now();
    let five = OccupancyGrid::empty_2d(5, 5);
    let g5 = grid_to_graph(&five, Connectivity::Orthogonal).unwrap();
    let c5 = count_simple_paths(&g5, g5.start(), None);
    if c5.count <= 10_000 {
        return Err(format!("5x5 count {}", c5.count));
    }
    let four = OccupancyGrid::empty_2d(4, 4);
    let g4 = grid_to_graph(&four, Connectivity::Orthogonal).unwrap();
    let c4 = count_simple_paths(&g4, g4.start(), None);
    let model = RiskModel::default();
    let risk = RiskEvaluator::new(&model, &g4, &four);
    let rewards = RewardMap::zeros(16, 1.0).unwrap();
    let (_, stats) = exact_enumerate(
        &risk,
        &rewards,
        &Limits {
            max_paths: u64::MAX,
            max_time: None,
        },
    );
    if c4.count != stats.paths {
        return Err(format!(
            "4x4 count {} but enumeration saw {}",
            c4.count, stats.paths
        ));
    }
    within(
        t.elapsed(),
        Duration::from_secs(10),
        format!(
            "5x5 count {}, 4x4 count {} = enumerated",
            c5.count, c4.count
        ),
    )
}

const TRIALS: usize = 200;

fn spec_for(i: usize) -> GeneratorSpec {
    GeneratorSpec {
        connectivity: if i % 4 == 3 {
            Connectivity::Full
        } else {
            Connectivity::Orthogonal
        },
        ..GeneratorSpec::default()
    }
}

fn suboptimality_bound() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let limits = Limits {
        max_paths: u64::MAX,
        max_time: None,
    };
    let mut worst_gap = 0.0f64;
    for i in 0..TRIALS {
        let inst = random_instance(&mut rng, &spec_for(i));
        let out = run_trial(i, &inst, &limits);
        if out.row.truncated {
            return Err(format!("trial {i} truncated"));
        }
        if !out.row.approx_within_exact {
            return Err(format!(
                "trial {i}: approx {} > exact {}",
                out.row.approx_utility, out.row.exact_utility
            ));
        }
        worst_gap = worst_gap.max(out.row.gap);
    }
    within(
        t.elapsed(),
        Duration::from_secs(60),
        format!("{TRIALS}/{TRIALS} trials approx <= exact, largest gap {worst_gap:.4}"),
    )
}

fn ensemble_optimality() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4048);
    let mut vertices = 0usize;
    for i in 0..TRIALS {
        let inst = random_instance(&mut rng, &spec_for(i));
        let risk = RiskEvaluator::new(&inst.model, &inst.graph, &inst.grid);
        let (ensemble, _) = risk_aware_dijkstra(&risk).map_err(|e| e.to_string())?;
        for v in 0..inst.graph.vertex_count() {
            let oracle = min_risk_oracle(&risk, v);
            match (oracle, ensemble.get(v)) {
                (Some((_, r)), Some(e)) if (r - e.risk).abs() <= 1e-9 => vertices += 1,
                (None, None) => {}
                (o, e) => {
                    return Err(format!(
                        "trial {i} vertex {v}: oracle {:?} ensemble {:?}",
                        o.map(|x| x.1),
                        e.map(|x| x.risk)
                    ))
                }
            }
        }
    }
    within(
        t.elapsed(),
        Duration::from_secs(120),
        format!("{vertices} reachable vertices over {TRIALS} trials match the oracle"),
    )
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let mut pairs = 0usize;
    let mut instances = 0usize;
    while pairs < 12_000 {
        let inst = random_instance(&mut rng, &spec_for(instances));
        instances += 1;
        let risk = RiskEvaluator::new(&inst.model, &inst.graph, &inst.grid);
        for _ in 0..8 {
            let mut walk: Vec<VertexId> = vec![rng.gen_range(0..inst.graph.vertex_count())];
            let mut before = risk.evaluate_sequence(&walk).total;
            loop {
                let last = *walk.last().unwrap();
                let open: Vec<VertexId> = inst
                    .graph
                    .neighbors(last)
                    .unwrap()
                    .iter()
                    .map(|e| e.0)
                    .filter(|v| !walk.contains(v))
                    .collect();
                if open.is_empty() {
                    break;
                }
                walk.push(open[rng.gen_range(0..open.len())]);
                let after = risk.evaluate_sequence(&walk).total;
                pairs += 1;
                if after < before {
                    return Err(format!("risk fell from {before} to {after} on {walk:?}"));
                }
                before = after;
            }
        }
    }
    Ok(format!(
        "{pairs} extensions over {instances} instances, no decrease"
    ))
}

fn two_route_flip() -> Outcome {
    let f = two_route();
    let mut winners = Vec::new();
    for w in TORTUOSITY_SWEEP {
        let model = tortuosity_model(w);
        let risk = RiskEvaluator::with_state_risks(&model, &f.graph, f.state.clone())
            .map_err(|e| e.to_string())?;
        let (oracle, _) = min_risk_oracle(&risk, f.goal).ok_or("goal unreachable")?;
        let (ensemble, _) = risk_aware_dijkstra(&risk).map_err(|e| e.to_string())?;
        let ours = &ensemble
            .get(f.goal)
            .ok_or("goal missing from ensemble")?
            .path;
        if *ours != oracle {
            return Err(format!("w = {w}: search picked {ours}, oracle {oracle}"));
        }
        let label = if oracle.vertices() == f.route_a.as_slice() {
            'A'
        } else if oracle.vertices() == f.route_b.as_slice() {
            'B'
        } else {
            return Err(format!("w = {w}: unexpected route {oracle}"));
        };
        winners.push((w, label));
    }
    let flip = winners.windows(2).find(|p| p[0].1 == 'A' && p[1].1 == 'B');
    let monotone = winners
        .windows(2)
        .all(|p| !(p[0].1 == 'B' && p[1].1 == 'A'));
    match flip {
        Some(p) if monotone && winners[0].1 == 'A' => Ok(format!(
            "winner flips A -> B between tortuosity weight {} and {}; search agrees at all {} points",
            p[0].0,
            p[1].0,
            winners.len()
        )),
        _ => Err(format!("winners {winners:?}")),
    }
}

fn stay_at_start() -> Outcome {
    let grid = OccupancyGrid::empty_2d(4, 4);
    let config = Config::default();
    let graph = grid_to_graph(&grid, config.connectivity).unwrap();
    let mut cells = vec![0.0; 16];
    cells[grid.start()] = 1.0;
    let rewards = RewardMap::new(
        graph.vertices().iter().map(|v| cells[v.cell]).collect(),
        1.0,
    )
    .unwrap();
    let res = plan(
        &graph,
        &grid,
        &rewards,
        &config.risk,
        PlanMode::Approximate,
        &config.limits,
    )
    .map_err(|e| e.to_string())?;
    if res.planner != PlannerKind::Stay || res.path.len() != 1 {
        return Err(format!("planned {} with {:?}", res.path, res.planner));
    }
    let json = ResultFile::new(&res, &graph, &config).to_json();
    let back = ResultFile::from_json(&json, "result").map_err(|e| e.to_string())?;
    verify_result(&back, &grid, &cells).map_err(|e| e.to_string())?;
    Ok(format!(
        "unit path at the start, utility {:.1}, re-evaluation within 1e-9",
        res.utility.value
    ))
}

fn determinism_and_round_trip() -> Outcome {
    let data = FsPath::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for mode in [PlanMode::Exact, PlanMode::Approximate] {
        for run in 0..2 {
            let out = dir.path().join(format!("{mode:?}{run}.json"));
            let svg = dir.path().join(format!("{mode:?}{run}.svg"));
            cmd_plan(&PlanArgs {
                map: data.join("demo_map.txt"),
                config: Some(data.join("demo_config.json")),
                rewards: RewardSource::Synth,
                mode,
                gamma: None,
                svg: Some(svg.clone()),
                out: Some(out.clone()),
            })
            .map_err(|e| e.to_string())?;
            outputs.push((fs::read(&out).unwrap(), fs::read(&svg).unwrap()));
        }
    }
    if outputs[0] != outputs[1] || outputs[2] != outputs[3] {
        return Err("repeated runs differ".into());
    }

    let map_text = fs::read_to_string(data.join("demo_map.txt")).unwrap();
    let grid = parse_map(&map_text).map_err(|e| e.to_string())?;
    if write_map(&grid) != map_text
        || parse_map(&write_map(&grid)).map_err(|e| e.to_string())? != grid
    {
        return Err("map round trip".into());
    }
    let cfg_text = fs::read_to_string(data.join("demo_config.json")).unwrap();
    let cfg = Config::from_json(&cfg_text, "config").map_err(|e| e.to_string())?;
    if Config::from_json(&cfg.to_json(), "config").map_err(|e| e.to_string())? != cfg {
        return Err("config round trip".into());
    }
    let sc =
        Scenario::from_text(&map_text, Some(&cfg_text), None, None).map_err(|e| e.to_string())?;
    let rewards_csv = riskplan::io::write_rewards(&sc.grid, &sc.graph, &sc.rewards);
    let reparsed =
        riskplan::io::parse_rewards(&rewards_csv, &sc.grid, &sc.graph, cfg.gamma, "rewards")
            .map_err(|e| e.to_string())?;
    if reparsed != sc.rewards {
        return Err("reward grid round trip".into());
    }
    for (json, _) in [&outputs[0], &outputs[2]] {
        let text = String::from_utf8(json.clone()).unwrap();
        let res = ResultFile::from_json(&text, "result").map_err(|e| e.to_string())?;
        if res.to_json() != text
            || ResultFile::from_json(&res.to_json(), "r").map_err(|e| e.to_string())? != res
        {
            return Err("result round trip".into());
        }
    }
    Ok(
        "byte-identical results and SVGs in both modes; map, config, rewards and result round-trip"
            .into(),
    )
}

fn negative_cycle() -> Outcome {
    let demo = negative_cycle_demo();
    let cycle = demo.cycle.as_ref().ok_or("no cycle found")?;
    let n = cycle.vertices.len();
    let mut sum = 0.0;
    for (k, &e) in cycle.edges.iter().enumerate() {
        let (a, b, w) = demo.digraph.edges[e];
        if a != cycle.vertices[k] || b != cycle.vertices[(k + 1) % n] {
            return Err(format!(
                "edge {e} does not continue the cycle {:?}",
                cycle.vertices
            ));
        }
        sum += w;
    }
    if !(cycle.total < 0.0 && (sum - cycle.total).abs() < 1e-12 && cycle.edges.len() == n) {
        return Err(format!(
            "cycle {:?} total {} edge sum {sum}",
            cycle.vertices, cycle.total
        ));
    }
    if !cmd_negcycle().contains("negative cycle") {
        return Err("report does not show the cycle".into());
    }
    Ok(format!(
        "cycle {:?} with total weight {:.4}",
        cycle.vertices, cycle.total
    ))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("edge-weight chain arithmetic", edge_weight_chain),
        ("simple-path count growth", path_count_growth),
        ("suboptimality bound", suboptimality_bound),
        ("ensemble optimality", ensemble_optimality),
        ("risk monotonicity", monotonicity),
        ("two-route tortuosity flip", two_route_flip),
        ("stay at start", stay_at_start),
        ("determinism and round trip", determinism_and_round_trip),
        ("negative-cycle demonstration", negative_cycle),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
