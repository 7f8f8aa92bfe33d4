use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use riskplan::io::bench::GeneratorSpec;
use riskplan::io::commands::{
    cmd_bench, cmd_count, cmd_negcycle, cmd_plan, cmd_render, PlanArgs, RenderArgs, RewardSource,
};
use riskplan::io::Error;
use riskplan::{Connectivity, PlanMode};

#[derive(Parser)]
#[command(
    name = "riskplan",
    version,
    about = "Risk-aware path planning on occupancy grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnArg {
    Orthogonal,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a maximum-utility path.
    Plan {
        /// Map text file.
        #[arg(long)]
        map: PathBuf,
        /// Config JSON; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Reward grid CSV, or SYNTH to derive rewards from the map's 'P' cell.
        #[arg(long, default_value = "SYNTH")]
        rewards: RewardSource,
        #[arg(long, value_enum, default_value = "approx")]
        mode: ModeArg,
        /// Overrides the configured discount factor.
        #[arg(long)]
        gamma: Option<f64>,
        /// Also draw the plan as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Result JSON destination; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count simple paths from the start.
    Count {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare both planners on seeded random maps.
    Bench {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_dim: usize,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long, default_value_t = 0.25)]
        density: f64,
        #[arg(long, value_enum, default_value = "orthogonal")]
        connectivity: ConnArg,
        /// Append per-trial runtimes (these vary between runs).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a map with optional rewards and result paths.
    Render {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        rewards: Option<RewardSource>,
        #[arg(long = "result")]
        results: Vec<PathBuf>,
        #[arg(long)]
        layer: Option<usize>,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Show why revisiting walks make utility maximization ill-posed.
    Negcycle,
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Plan {
            map,
            config,
            rewards,
            mode,
            gamma,
            svg,
            out,
        } => {
            let mode = match mode {
                ModeArg::Exact => PlanMode::Exact,
                ModeArg::Approx => PlanMode::Approximate,
            };
            let print = out.is_none();
            let outcome = cmd_plan(&PlanArgs {
                map,
                config,
                rewards,
                mode,
                gamma,
                svg,
                out,
            })?;
            if print {
                print!("{}", outcome.json);
            }
            if outcome.result.truncated {
                eprintln!(
                    "TRUNCATED: enumeration hit its limit; the result is the best path found"
                );
                return Ok(3);
            }
            Ok(0)
        }
        Command::Count { map, config } => {
            let report = cmd_count(&map, config.as_deref())?;
            print!("{}", report.render());
            Ok(if report.truncated { 3 } else { 0 })
        }
        Command::Bench {
            trials,
            seed,
            min_dim,
            max_dim,
            density,
            connectivity,
            timing,
            out,
        } => {
            let spec = GeneratorSpec {
                min_dim,
                max_dim,
                obstacle_density: density,
                connectivity: match connectivity {
                    ConnArg::Orthogonal => Connectivity::Orthogonal,
                    ConnArg::Full => Connectivity::Full,
                },
            };
            let csv = cmd_bench(&spec, trials, seed, timing, out.as_deref())?;
            if out.is_none() {
                print!("{csv}");
            }
            Ok(0)
        }
        Command::Render {
            map,
            config,
            rewards,
            results,
            layer,
            svg,
        } => {
            cmd_render(&RenderArgs {
                map,
                config,
                rewards,
                results,
                layer,
                svg,
            })?;
            Ok(0)
        }
        Command::Negcycle => {
            print!("{}", cmd_negcycle());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
