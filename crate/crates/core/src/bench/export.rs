use std::path::{Path, PathBuf};

use super::{sort_records, BenchmarkConfig, BenchmarkStats, MetricRecord};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "planner,env,seed,success,time_s,traj_len_px,invalid_connections";

/// Files written by [`export_records`].
#[derive(Debug, Clone)]
pub struct ExportPaths {
    pub records: PathBuf,
    pub stats: PathBuf,
    pub config: PathBuf,
}

/// Writes `records.csv`, `stats.json` and `config.json` into `dir`,
/// creating it if needed. Records are written in canonical order.
pub fn export_records(
    records: &[MetricRecord],
    stats: &BenchmarkStats,
    config: &BenchmarkConfig,
    dir: &Path,
) -> Result<ExportPaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &sorted {
        w.serialize(r)?;
    }
    if sorted.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    let csv_bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    let paths = ExportPaths {
        records: dir.join("records.csv"),
        stats: dir.join("stats.json"),
        config: dir.join("config.json"),
    };
    write(&paths.records, &csv_bytes)?;
    write(&paths.stats, stats.to_json().as_bytes())?;
    write(&paths.config, config.to_json().as_bytes())?;
    Ok(paths)
}

/// Reads a `records.csv` written by [`export_records`].
pub fn read_records(path: &Path) -> Result<Vec<MetricRecord>> {
    let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_slice());
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Config(format!(
            "{}: unexpected header `{header}`",
            path.display()
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
