//! Command-line front end: `plan`, `bench`, `maps` and `validate`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bench::{export_records, load_environment, render_svg, run_benchmark, BenchmarkConfig, Environment, Metric};
use crate::error::{Error, Result};
use crate::heuristics::SeededRng;
use crate::planners::trace::{parse_trace, validate_trace, write_trace, MapSource, TraceHeader};
use crate::planners::{plan, PlanOptions, PlannerKind};
use crate::workspace::{builtin_map, write_text_map, BuiltinMap, Point};

#[derive(Debug, Parser)]
#[command(
    name = "mtrrt",
    version,
    about = "Kinodynamic multi-tree RRT planning and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one query and print its metrics as JSON.
    Plan(PlanArgs),
    /// Run paired-seed trials and export records, statistics and config.
    Bench(BenchArgs),
    /// Write the builtin maps as text maps and SVG previews.
    Maps(MapsArgs),
    /// Re-check a trace file against the tree and trajectory invariants.
    Validate(ValidateArgs),
}

/// Settings shared by `plan` and `bench`. Unset flags keep the defaults
/// (or the values of a `--config` file).
#[derive(Debug, Args, Default)]
struct Overrides {
    /// Start position as `h,v` (required for map files).
    #[arg(long, value_parser = parse_point)]
    start: Option<Point>,
    /// Goal position as `h,v` (required for map files).
    #[arg(long, value_parser = parse_point)]
    goal: Option<Point>,
    #[arg(long)]
    goal_radius: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Robot radius used to dilate obstacles (px).
    #[arg(long)]
    inflate: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    lambda_connect: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    kappa_max: Option<usize>,
    #[arg(long)]
    guidance_budget: Option<usize>,
    #[arg(long)]
    goal_bias: Option<f64>,
}

impl Overrides {
    fn apply(&self, c: &mut BenchmarkConfig) {
        macro_rules! set {
            ($($src:ident => $dst:expr),* $(,)?) => {
                $(if let Some(v) = self.$src { $dst = v; })*
            };
        }
        if self.start.is_some() {
            c.start = self.start;
        }
        if self.goal.is_some() {
            c.goal = self.goal;
        }
        set!(
            goal_radius => c.goal_radius,
            max_iterations => c.max_iterations,
            inflate => c.inflate,
            lambda => c.planner.lambda,
            lambda_connect => c.planner.lambda_connect,
            sigma => c.planner.sigma,
            kappa_max => c.planner.kappa_max,
            guidance_budget => c.planner.guidance_budget,
            goal_bias => c.planner.goal_bias,
        );
    }
}

#[derive(Debug, Args)]
struct PlanArgs {
    /// Builtin map name (room, clutter, maze).
    #[arg(long, conflicts_with = "map", default_value = "room")]
    builtin: String,
    /// Map file (text or PGM).
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, default_value = "mtrrt")]
    planner: PlannerKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write an SVG of the final forest and trajectory.
    #[arg(long)]
    render: Option<PathBuf>,
    /// Write a trace file for `validate`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the trajectory states as JSON.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// JSON benchmark configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated planner names.
    #[arg(long, value_delimiter = ',')]
    planners: Option<Vec<PlannerKind>>,
    /// Comma-separated builtin names or map paths.
    #[arg(long, value_delimiter = ',')]
    envs: Option<Vec<String>>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (default `bench_out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct MapsArgs {
    /// Directory receiving `<name>.map` and `<name>.svg`.
    #[arg(long, default_value = "maps")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    trace: PathBuf,
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (h, v) = s.split_once(',').ok_or("expected `h,v`")?;
    let h: f64 = h.trim().parse().map_err(|e| format!("{e}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Point::new(h, v))
}

/// Runs the CLI on `argv` (program name first) and returns the exit code:
/// 0 on success, 1 when planning fails or a check finds violations, 2 on
/// usage, configuration or I/O errors.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Bench(a) => run_bench(a),
        Command::Maps(a) => run_maps(a),
        Command::Validate(a) => run_validate(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run_plan(a: PlanArgs) -> Result<i32> {
    let mut config = BenchmarkConfig::default();
    a.overrides.apply(&mut config);
    let spec = match &a.map {
        Some(p) => p.to_string_lossy().into_owned(),
        None => a.builtin.clone(),
    };
    let env = load_environment(&spec, config.inflate, config.start, config.goal)?;
    let query = config.query(&env);
    let options = PlanOptions {
        trace: a.trace.is_some(),
        audit: false,
    };
    let result = plan(a.planner, &query, &env.grid, &mut SeededRng::new(a.seed), options)?;

    if let Some(path) = &a.trajectory {
        let text = serde_json::to_string_pretty(&result.trajectory)?;
        write_file(path, &text)?;
    }
    if let Some(path) = &a.render {
        render_svg(&env.grid, &result.trees, &result.trajectory, env.start, env.goal, path)?;
    }
    if let Some(path) = &a.trace {
        let header = TraceHeader {
            planner: a.planner,
            seed: a.seed,
            map: env.source.clone(),
            inflate: config.inflate,
            start: query.start,
            goal: query.goal,
            goal_radius: query.goal_radius,
            dt: query.params.dt,
        };
        write_file(path, &write_trace(&header, &result))?;
    }
    let c = &result.counters;
    let metrics = json!({
        "planner": a.planner,
        "env": env.id,
        "seed": a.seed,
        "success": result.success,
        "time_s": c.wall_time,
        "traj_len_px": result.success.then(|| result.trajectory_length()),
        "invalid_connections": c.invalid_connections,
        "iterations": c.iterations,
        "trajectory_states": result.trajectory.len(),
        "trees_spawned": c.trees_spawned,
        "merges": c.merges,
        "guidance_rounds": c.guidance_rounds,
    });
    println!("{}", serde_json::to_string_pretty(&metrics)?);
    Ok(if result.success { 0 } else { 1 })
}

fn run_bench(a: BenchArgs) -> Result<i32> {
    let mut config = match &a.config {
        Some(p) => BenchmarkConfig::load(p)?,
        None => BenchmarkConfig::default(),
    };
    a.overrides.apply(&mut config);
    if let Some(t) = a.trials {
        config.trials = t;
    }
    if let Some(p) = a.planners {
        config.planners = p;
    }
    if let Some(e) = a.envs {
        config.environments = e;
    }
    if let Some(s) = a.base_seed {
        config.base_seed = s;
    }
    if let Some(j) = a.jobs {
        config.jobs = j;
    }
    if let Some(o) = a.out {
        config.output_dir = Some(o);
    }
    let dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("bench_out"));
    let outcome = run_benchmark(&config)?;
    let paths = export_records(&outcome.records, &outcome.stats, &config, &dir)?;

    println!(
        "{:<8} {:<7} {:>8} {:>11} {:>9} {:>11} {:>9}",
        "env", "planner", "success", "time_ms", "time/rrt", "invalid", "inv/rrt"
    );
    for env in &config.environments {
        for &p in &config.planners {
            let Some(cell) = outcome.stats.cell(p, env) else {
                continue;
            };
            let t = cell.metric(Metric::TimeS);
            let ic = cell.metric(Metric::InvalidConnections);
            println!(
                "{:<8} {:<7} {:>4}/{:<3} {:>11} {:>9} {:>11} {:>9}",
                env,
                p.name(),
                cell.successes,
                cell.trials,
                fmt_opt(t.mean.map(|x| x * 1e3), 2),
                fmt_opt(t.normalized_mean, 3),
                fmt_opt(ic.mean, 1),
                fmt_opt(ic.normalized_mean, 3),
            );
        }
    }
    println!(
        "{} records written to {}",
        outcome.records.len(),
        paths.records.display()
    );
    for v in &outcome.violations {
        eprintln!("violation: {} {} seed {}: {}", v.planner, v.env, v.seed, v.message);
    }
    Ok(if outcome.violations.is_empty() { 0 } else { 1 })
}

fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.digits$}"))
}

fn run_maps(a: MapsArgs) -> Result<i32> {
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    for name in BuiltinMap::NAMES {
        let m = builtin_map(name)?;
        let text_path = a.out.join(format!("{name}.map"));
        write_file(&text_path, &write_text_map(&m.grid))?;
        let svg_path = a.out.join(format!("{name}.svg"));
        render_svg(&m.grid, &[], &[], m.start, m.goal, &svg_path)?;
        println!(
            "{name}: start {},{} goal {},{} -> {}",
            m.start.h,
            m.start.v,
            m.goal.h,
            m.goal.v,
            text_path.display()
        );
    }
    Ok(0)
}

fn run_validate(a: ValidateArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&a.trace).map_err(|e| Error::io(&a.trace, e))?;
    let trace = parse_trace(&text)?;
    let h = &trace.header;
    let spec = match &h.map {
        MapSource::Builtin(name) => name.clone(),
        MapSource::File(path) => path.clone(),
    };
    let env: Environment = load_environment(&spec, h.inflate, Some(h.start.pos), Some(h.goal))?;
    let violations = validate_trace(&trace, &env.grid);
    if violations.is_empty() {
        println!(
            "ok: {} trees, {} trajectory nodes, {} events",
            trace.trees.len(),
            trace.trajectory.len(),
            trace.events.len()
        );
        Ok(0)
    } else {
        for v in &violations {
            println!("violation: {v}");
        }
        Ok(1)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
