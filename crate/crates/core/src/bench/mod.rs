//! Benchmark harness: paired-seed trials over planners and environments,
//! statistics normalized to RRT, CSV/JSON export and SVG rendering.

mod export;
mod render;
mod stats;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::SeededRng;
use crate::kinodynamics::{KinodynamicParams, State};
use crate::planners::trace::MapSource;
use crate::planners::{plan, validate_trajectory, PlanOptions, PlannerKind, PlannerParams, Query};
use crate::planners::{DEFAULT_GOAL_RADIUS, DEFAULT_MAX_ITERATIONS};
use crate::workspace::{builtin_map, load_map, BuiltinMap, OccupancyGrid, Point};

pub use export::{export_records, read_records, ExportPaths, CSV_HEADER};
pub use render::{obstacle_rects, render_svg, svg_string, HEURISTIC_COLOR, ROOTED_COLOR, TRAJECTORY_COLOR};
pub use stats::{compute_stats, mean_variance, BenchmarkStats, CellStats, Metric, MetricStats};

/// Version tag written into every exported configuration.
pub const SCHEMA_VERSION: u32 = 1;

/// A loaded map together with the query endpoints used on it.
#[derive(Debug, Clone)]
pub struct Environment {
    /// Builtin name or the path as given.
    pub id: String,
    pub source: MapSource,
    /// The map after inflation.
    pub grid: OccupancyGrid,
    pub start: Point,
    pub goal: Point,
}

/// Resolves a builtin name or a map file path. Builtin maps supply their
/// own endpoints; file maps need `start` and `goal`. The grid is inflated by
/// `inflate` pixels.
pub fn load_environment(spec: &str, inflate: f64, start: Option<Point>, goal: Option<Point>) -> Result<Environment> {
    let (source, grid, default_start, default_goal) = if BuiltinMap::NAMES.contains(&spec) {
        let m = builtin_map(spec)?;
        (
            MapSource::Builtin(spec.to_string()),
            m.grid,
            Some(m.start),
            Some(m.goal),
        )
    } else if Path::new(spec).exists() {
        (
            MapSource::File(spec.to_string()),
            load_map(Path::new(spec))?,
            None,
            None,
        )
    } else {
        return Err(Error::UnknownMap(spec.to_string()));
    };
    let start = start
        .or(default_start)
        .ok_or_else(|| Error::Config(format!("map `{spec}` needs an explicit start")))?;
    let goal = goal
        .or(default_goal)
        .ok_or_else(|| Error::Config(format!("map `{spec}` needs an explicit goal")))?;
    Ok(Environment {
        id: spec.to_string(),
        source,
        grid: grid.inflate(inflate),
        start,
        goal,
    })
}

/// Everything needed to replay a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub schema_version: u32,
    /// Builtin map names or map file paths.
    pub environments: Vec<String>,
    pub planners: Vec<PlannerKind>,
    pub trials: usize,
    /// Trial `i` runs every planner with seed `base_seed + i`.
    pub base_seed: u64,
    /// Overrides the map's start (required for file maps).
    pub start: Option<Point>,
    /// Overrides the map's goal (required for file maps).
    pub goal: Option<Point>,
    pub goal_radius: f64,
    pub max_iterations: usize,
    /// Robot radius used to dilate obstacles (px).
    pub inflate: f64,
    pub params: KinodynamicParams,
    pub planner: PlannerParams,
    /// Trials run concurrently.
    pub jobs: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            schema_version: SCHEMA_VERSION,
            environments: BuiltinMap::NAMES.iter().map(|s| s.to_string()).collect(),
            planners: PlannerKind::ALL.to_vec(),
            trials: 50,
            base_seed: 1,
            start: None,
            goal: None,
            goal_radius: DEFAULT_GOAL_RADIUS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            inflate: 0.0,
            params: KinodynamicParams::default(),
            planner: PlannerParams::default(),
            jobs: 1,
            output_dir: None,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.jobs < 1 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.environments.is_empty() || self.planners.is_empty() {
            return Err(Error::Config("need at least one environment and one planner".into()));
        }
        if self.inflate.is_nan() || self.inflate < 0.0 {
            return Err(Error::Config("inflate must be non-negative".into()));
        }
        Ok(())
    }

    pub fn seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    pub fn query(&self, env: &Environment) -> Query {
        Query {
            start: State::at_rest(env.start, 0.0),
            goal: env.goal,
            goal_radius: self.goal_radius,
            max_iterations: self.max_iterations,
            params: self.params.clone(),
            planner: self.planner.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: BenchmarkConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One trial of one planner on one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub planner: PlannerKind,
    pub env: String,
    pub seed: u64,
    pub success: bool,
    pub time_s: f64,
    /// Empty for failed trials.
    pub traj_len_px: Option<f64>,
    pub invalid_connections: u64,
}

/// A trajectory-validity complaint raised during a benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialViolation {
    pub planner: PlannerKind,
    pub env: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    /// Sorted by planner name, environment, seed.
    pub records: Vec<MetricRecord>,
    pub stats: BenchmarkStats,
    /// Validity problems found in successful trajectories; empty when all
    /// of them check out.
    pub violations: Vec<TrialViolation>,
}

/// Runs every (trial, environment, planner) combination with paired seeds.
///
/// Work is issued trial by trial with the planners interleaved, so slow
/// drifts in machine load touch all planners alike. With `jobs > 1` trials
/// run on a dedicated thread pool; results do not depend on scheduling.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkOutcome> {
    config.validate()?;
    let envs = config
        .environments
        .iter()
        .map(|spec| load_environment(spec, config.inflate, config.start, config.goal))
        .collect::<Result<Vec<_>>>()?;
    let mut work = Vec::with_capacity(config.trials * envs.len() * config.planners.len());
    for trial in 0..config.trials {
        for env in &envs {
            for &planner in &config.planners {
                work.push((trial, env, planner));
            }
        }
    }
    let run = |&(trial, env, planner): &(usize, &Environment, PlannerKind)| run_trial(config, env, planner, trial);
    let results: Vec<(MetricRecord, Vec<TrialViolation>)> = if config.jobs == 1 {
        work.iter().map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| work.par_iter().map(run).collect::<Result<_>>())?
    };
    let mut records = Vec::with_capacity(results.len());
    let mut violations = Vec::new();
    for (rec, mut v) in results {
        records.push(rec);
        violations.append(&mut v);
    }
    sort_records(&mut records);
    let stats = compute_stats(&records);
    Ok(BenchmarkOutcome {
        records,
        stats,
        violations,
    })
}

fn run_trial(
    config: &BenchmarkConfig,
    env: &Environment,
    planner: PlannerKind,
    trial: usize,
) -> Result<(MetricRecord, Vec<TrialViolation>)> {
    let seed = config.seed(trial);
    let query = config.query(env);
    let mut rng = SeededRng::new(seed);
    let result = plan(planner, &query, &env.grid, &mut rng, PlanOptions::default())?;
    let violations = validate_trajectory(&result, &query, &env.grid)
        .into_iter()
        .map(|message| TrialViolation {
            planner,
            env: env.id.clone(),
            seed,
            message,
        })
        .collect();
    let record = MetricRecord {
        planner,
        env: env.id.clone(),
        seed,
        success: result.success,
        time_s: result.counters.wall_time,
        traj_len_px: result.success.then(|| result.trajectory_length()),
        invalid_connections: result.counters.invalid_connections,
    };
    Ok((record, violations))
}

/// Canonical export order: planner name, then environment, then seed.
pub fn sort_records(records: &mut [MetricRecord]) {
    records.sort_by(|a, b| (a.planner.name(), a.env.as_str(), a.seed).cmp(&(b.planner.name(), b.env.as_str(), b.seed)));
}
