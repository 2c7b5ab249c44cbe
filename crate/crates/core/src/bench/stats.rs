use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricRecord;
use crate::planners::PlannerKind;

/// Per-trial quantities summarized by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TimeS,
    TrajLenPx,
    InvalidConnections,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::TimeS, Metric::TrajLenPx, Metric::InvalidConnections];

    pub fn name(self) -> &'static str {
        match self {
            Metric::TimeS => "time_s",
            Metric::TrajLenPx => "traj_len_px",
            Metric::InvalidConnections => "invalid_connections",
        }
    }

    /// Value of this metric for a successful trial.
    pub fn value(self, r: &MetricRecord) -> Option<f64> {
        match self {
            Metric::TimeS => Some(r.time_s),
            Metric::TrajLenPx => r.traj_len_px,
            Metric::InvalidConnections => Some(r.invalid_connections as f64),
        }
    }
}

/// Raw and RRT-normalized moments of one metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: Option<f64>,
    /// Population variance.
    pub variance: Option<f64>,
    pub normalized_mean: Option<f64>,
    pub normalized_variance: Option<f64>,
}

/// Summary of one planner on one environment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub trials: usize,
    pub successes: usize,
    /// Failed trials, left out of every metric.
    pub excluded: usize,
    pub metrics: BTreeMap<Metric, MetricStats>,
}

impl CellStats {
    pub fn metric(&self, m: Metric) -> MetricStats {
        self.metrics.get(&m).copied().unwrap_or_default()
    }

    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Statistics keyed by planner name, then environment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkStats {
    pub planners: BTreeMap<String, BTreeMap<String, CellStats>>,
}

impl BenchmarkStats {
    pub fn cell(&self, planner: PlannerKind, env: &str) -> Option<&CellStats> {
        self.planners.get(planner.name())?.get(env)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Single-pass (Welford) mean and population variance; `None` when empty.
pub fn mean_variance(xs: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for x in xs {
        n += 1;
        let d = x - mean;
        mean += d / n as f64;
        m2 += d * (x - mean);
    }
    (n > 0).then(|| (mean, m2 / n as f64))
}

/// Aggregates successful trials per (planner, environment). Normalized
/// values divide by RRT's raw value on the same environment and stay empty
/// when RRT has no value there or the value is zero.
pub fn compute_stats(records: &[MetricRecord]) -> BenchmarkStats {
    let mut groups: BTreeMap<(&str, &str), Vec<&MetricRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.planner.name(), r.env.as_str())).or_default().push(r);
    }
    let mut stats = BenchmarkStats::default();
    for ((planner, env), recs) in &groups {
        let ok: Vec<_> = recs.iter().filter(|r| r.success).collect();
        let mut cell = CellStats {
            trials: recs.len(),
            successes: ok.len(),
            excluded: recs.len() - ok.len(),
            metrics: BTreeMap::new(),
        };
        for m in Metric::ALL {
            let mv = mean_variance(ok.iter().filter_map(|r| m.value(r)));
            cell.metrics.insert(
                m,
                MetricStats {
                    mean: mv.map(|p| p.0),
                    variance: mv.map(|p| p.1),
                    ..MetricStats::default()
                },
            );
        }
        stats
            .planners
            .entry(planner.to_string())
            .or_default()
            .insert(env.to_string(), cell);
    }
    let baseline = stats.planners.get(PlannerKind::Rrt.name()).cloned();
    for envs in stats.planners.values_mut() {
        for (env, cell) in envs.iter_mut() {
            let base = baseline.as_ref().and_then(|b| b.get(env));
            for (m, s) in cell.metrics.iter_mut() {
                let Some(b) = base.map(|c| c.metric(*m)) else { continue };
                s.normalized_mean = ratio(s.mean, b.mean);
                s.normalized_variance = ratio(s.variance, b.variance);
            }
        }
    }
    stats
}

fn ratio(x: Option<f64>, base: Option<f64>) -> Option<f64> {
    match (x, base) {
        (Some(x), Some(b)) if b != 0.0 => Some(x / b),
        _ => None,
    }
}
