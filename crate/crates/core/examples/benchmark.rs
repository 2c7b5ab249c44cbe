//! A small paired-seed benchmark with export to a temporary directory.
//!
//! cargo run --release --example benchmark [trials]

use mtrrt::bench::{export_records, run_benchmark, BenchmarkConfig, Metric};
use mtrrt::planners::PlannerKind;

fn main() -> mtrrt::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let config = BenchmarkConfig {
        trials,
        environments: vec!["room".into(), "maze".into()],
        ..BenchmarkConfig::default()
    };
    let outcome = run_benchmark(&config)?;
    for env in &config.environments {
        for p in PlannerKind::ALL {
            let cell = outcome.stats.cell(p, env).expect("every cell ran");
            let t = cell.metric(Metric::TimeS);
            println!(
                "{env:<5} {:<6} {}/{} solved, time x{:.2} of RRT, invalid x{:.2} of RRT",
                p.name(),
                cell.successes,
                cell.trials,
                t.normalized_mean.unwrap_or(f64::NAN),
                cell.metric(Metric::InvalidConnections)
                    .normalized_mean
                    .unwrap_or(f64::NAN),
            );
        }
    }
    let dir = std::env::temp_dir().join("mtrrt_bench_example");
    let paths = export_records(&outcome.records, &outcome.stats, &config, &dir)?;
    println!("wrote {}", paths.records.display());
    Ok(())
}
