//! The work behind each CLI subcommand. Every command is deterministic for
//! identical inputs; only `count`'s elapsed time and `bench --timing` columns
//! vary between runs.

use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use super::bench::{bench_csv, run_bench, GeneratorSpec};
use super::{
    parse_map, parse_rewards, read_file, render_svg, verify_result, write_file, Config, Error,
    ResultFile,
};
use crate::domain::{grid_to_graph, OccupancyGrid, PlanningGraph};
use crate::oracles::{count_simple_paths, negative_cycle_demo};
use crate::planners::{plan, PlanMode, PlannerKind};
use crate::reward::{synth_reward_map, RewardMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewardSource {
    Synth,
    File(PathBuf),
}

impl std::str::FromStr for RewardSource {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s == "SYNTH" {
            RewardSource::Synth
        } else {
            RewardSource::File(PathBuf::from(s))
        })
    }
}

/// Map, configuration and rewards loaded and cross-checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: OccupancyGrid,
    pub graph: PlanningGraph,
    pub config: Config,
    pub rewards: RewardMap,
}

impl Scenario {
    pub fn from_text(
        map: &str,
        config: Option<&str>,
        rewards_csv: Option<&str>,
        gamma: Option<f64>,
    ) -> Result<Self, Error> {
        let grid = parse_map(map).map_err(|source| Error::Parse {
            file: "map".into(),
            source,
        })?;
        let mut config = match config {
            Some(text) => Config::from_json(text, "config")?,
            None => Config::default(),
        };
        if let Some(g) = gamma {
            config.gamma = g;
            config.validate()?;
        }
        let graph =
            grid_to_graph(&grid, config.connectivity).map_err(|e| Error::invariant("map", e))?;
        let rewards = match rewards_csv {
            Some(text) => parse_rewards(text, &grid, &graph, config.gamma, "rewards")?,
            None => {
                let poi = grid.poi().ok_or_else(|| {
                    Error::Usage("synthetic rewards need a 'P' cell in the map".into())
                })?;
                synth_reward_map(&grid, &graph, poi, config.synth, config.gamma)
                    .map_err(|e| Error::invariant("rewards", e))?
            }
        };
        Ok(Self {
            grid,
            graph,
            config,
            rewards,
        })
    }

    pub fn load(
        map: &FsPath,
        config: Option<&FsPath>,
        rewards: &RewardSource,
        gamma: Option<f64>,
    ) -> Result<Self, Error> {
        let map_text = read_file(map)?;
        let config_text = config.map(read_file).transpose()?;
        let rewards_text = match rewards {
            RewardSource::Synth => None,
            RewardSource::File(p) => Some(read_file(p)?),
        };
        Self::from_text(
            &map_text,
            config_text.as_deref(),
            rewards_text.as_deref(),
            gamma,
        )
        .map_err(|e| relabel(e, map, config, rewards))
    }

    /// Reward per cell, 0 on obstacles.
    pub fn rewards_by_cell(&self) -> Vec<f64> {
        let mut cells = vec![0.0; self.grid.cell_count()];
        for (v, vert) in self.graph.vertices().iter().enumerate() {
            cells[vert.cell] = self.rewards.get(v);
        }
        cells
    }
}

fn relabel(e: Error, map: &FsPath, config: Option<&FsPath>, rewards: &RewardSource) -> Error {
    let name = |f: &str| -> String {
        match f {
            "map" => map.display().to_string(),
            "config" => config.map(|p| p.display().to_string()).unwrap_or_default(),
            "rewards" => match rewards {
                RewardSource::File(p) => p.display().to_string(),
                RewardSource::Synth => "SYNTH".into(),
            },
            other => other.to_owned(),
        }
    };
    match e {
        Error::Parse { file, source } => Error::Parse {
            file: name(&file),
            source,
        },
        Error::Json { file, source } => Error::Json {
            file: name(&file),
            source,
        },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub result: ResultFile,
    pub json: String,
    pub svg: Option<String>,
}

/// Plans on a loaded scenario, self-checks the serialized result and
/// optionally renders it.
pub fn plan_scenario(sc: &Scenario, mode: PlanMode, render: bool) -> Result<PlanOutcome, Error> {
    let res = plan(
        &sc.graph,
        &sc.grid,
        &sc.rewards,
        &sc.config.risk,
        mode,
        &sc.config.limits,
    )
    .map_err(|e| Error::invariant("plan", e))?;
    let file = ResultFile::new(&res, &sc.graph, &sc.config);
    let json = file.to_json();
    let reparsed = ResultFile::from_json(&json, "result")?;
    verify_result(&reparsed, &sc.grid, &sc.rewards_by_cell())?;
    let svg = if render {
        let layer = (sc.grid.ndim() == 3).then(|| sc.graph.vertex(sc.graph.start()).coord[2]);
        Some(
            render_svg(
                &sc.grid,
                &sc.graph,
                Some(&sc.rewards),
                &[(res.planner, &res.path)],
                layer,
            )
            .map_err(|e| Error::Usage(e.to_string()))?,
        )
    } else {
        None
    };
    Ok(PlanOutcome {
        result: file,
        json,
        svg,
    })
}

#[derive(Debug, Clone)]
pub struct PlanArgs {
    pub map: PathBuf,
    pub config: Option<PathBuf>,
    pub rewards: RewardSource,
    pub mode: PlanMode,
    pub gamma: Option<f64>,
    pub svg: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Runs `plan`, writing the result (and SVG when requested). Returns the
/// outcome so the caller can print the JSON when no output file was given.
pub fn cmd_plan(args: &PlanArgs) -> Result<PlanOutcome, Error> {
    let sc = Scenario::load(&args.map, args.config.as_deref(), &args.rewards, args.gamma)?;
    let outcome = plan_scenario(&sc, args.mode, args.svg.is_some())?;
    if let Some(out) = &args.out {
        write_file(out, &outcome.json)?;
    }
    if let (Some(path), Some(svg)) = (&args.svg, &outcome.svg) {
        write_file(path, svg)?;
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub count: u64,
    pub truncated: bool,
    pub elapsed_ms: u128,
}

impl CountReport {
    pub fn render(&self) -> String {
        let mut s = format!("simple paths from start: {}\n", self.count);
        let _ = writeln!(s, "elapsed: {} ms", self.elapsed_ms);
        if self.truncated {
            s.push_str("TRUNCATED: path cap reached\n");
        }
        s
    }
}

pub fn count_scenario(grid: &OccupancyGrid, config: &Config) -> Result<CountReport, Error> {
    let graph = grid_to_graph(grid, config.connectivity).map_err(|e| Error::invariant("map", e))?;
    let t = Instant::now();
    let c = count_simple_paths(&graph, graph.start(), Some(config.limits.max_paths));
    Ok(CountReport {
        count: c.count,
        truncated: c.truncated,
        elapsed_ms: t.elapsed().as_millis(),
    })
}

pub fn cmd_count(map: &FsPath, config: Option<&FsPath>) -> Result<CountReport, Error> {
    let grid = parse_map(&read_file(map)?).map_err(|source| Error::Parse {
        file: map.display().to_string(),
        source,
    })?;
    let config = match config {
        Some(p) => Config::from_json(&read_file(p)?, &p.display().to_string())?,
        None => Config::default(),
    };
    count_scenario(&grid, &config)
}

pub fn cmd_bench(
    spec: &GeneratorSpec,
    trials: usize,
    seed: u64,
    timing: bool,
    out: Option<&FsPath>,
) -> Result<String, Error> {
    if spec.min_dim == 0 || spec.min_dim > spec.max_dim {
        return Err(Error::Usage("need 1 <= min-dim <= max-dim".into()));
    }
    if !(0.0..1.0).contains(&spec.obstacle_density) {
        return Err(Error::Usage("obstacle density must lie in [0, 1)".into()));
    }
    let rows = run_bench(spec, trials, seed, &Config::default().limits);
    let csv = bench_csv(&rows, spec, seed, timing);
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    Ok(csv)
}

#[derive(Debug, Clone)]
pub struct RenderArgs {
    pub map: PathBuf,
    pub config: Option<PathBuf>,
    pub rewards: Option<RewardSource>,
    pub results: Vec<PathBuf>,
    pub layer: Option<usize>,
    pub svg: PathBuf,
}

pub fn cmd_render(args: &RenderArgs) -> Result<String, Error> {
    let (grid, graph, rewards) = match &args.rewards {
        Some(src) => {
            let sc = Scenario::load(&args.map, args.config.as_deref(), src, None)?;
            (sc.grid, sc.graph, Some(sc.rewards))
        }
        None => {
            let grid = parse_map(&read_file(&args.map)?).map_err(|source| Error::Parse {
                file: args.map.display().to_string(),
                source,
            })?;
            let config = match &args.config {
                Some(p) => Config::from_json(&read_file(p)?, &p.display().to_string())?,
                None => Config::default(),
            };
            let graph = grid_to_graph(&grid, config.connectivity)
                .map_err(|e| Error::invariant("map", e))?;
            (grid, graph, None)
        }
    };
    let mut paths = Vec::new();
    for p in &args.results {
        let file = ResultFile::from_json(&read_file(p)?, &p.display().to_string())?;
        let graph = grid_to_graph(&grid, file.config.connectivity)
            .map_err(|e| Error::invariant("map", e))?;
        let kind = match (file.planner, file.mode) {
            (PlannerKind::Stay, _) => PlannerKind::Stay,
            (_, PlanMode::Exact) => PlannerKind::Exact,
            (_, PlanMode::Approximate) => PlannerKind::Approximate,
        };
        paths.push((kind, file.resolve_path(&grid, &graph)?));
    }
    let overlays: Vec<(PlannerKind, &crate::domain::Path)> =
        paths.iter().map(|(k, p)| (*k, p)).collect();
    let svg = render_svg(&grid, &graph, rewards.as_ref(), &overlays, args.layer)
        .map_err(|e| Error::Usage(e.to_string()))?;
    write_file(&args.svg, &svg)?;
    Ok(svg)
}

/// Text report of the negative-cycle construction.
pub fn cmd_negcycle() -> String {
    let demo = negative_cycle_demo();
    let mut s = String::new();
    let _ = writeln!(s, "map: {}", demo.map);
    let _ = writeln!(s, "walk (revisits allowed): {:?}", demo.walk);
    for (k, inv) in demo.prefix_inverse_utilities.iter().enumerate() {
        let _ = writeln!(
            s,
            "prefix {:?}: inverse utility {inv:.6}",
            &demo.walk[..k + 2]
        );
    }
    for (a, b, w) in &demo.digraph.edges {
        let _ = writeln!(s, "edge {a} -> {b}: weight {w:+.6}");
    }
    match &demo.cycle {
        Some(c) => {
            let _ = writeln!(
                s,
                "negative cycle {:?} with total weight {:+.6}",
                c.vertices, c.total
            );
            s.push_str(
                "looping on it lowers inverse utility without bound, so the search is restricted to simple paths\n",
            );
        }
        None => s.push_str("no negative cycle\n"),
    }
    s
}
