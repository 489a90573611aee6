//! Runs every (replication, kernel) pair and writes the result files.
//!
//! Layout of the output directory:
//!
//! ```text
//! runs/<kernel>_rep<r>.json   full run record
//! runs/<kernel>_rep<r>.csv    one row per evaluation
//! gaps.csv                    kernel, rep, seed, gap, evals, wall_ms
//! summary.json
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use rembo::{run, DistanceMode};

use crate::config::BenchmarkConfig;
use crate::error::{BenchError, IoContext, Result};
use crate::summary::{summarize, write_gap_rows, GapRow, Summary};

#[derive(Clone, Debug)]
pub struct BenchmarkReport {
    pub rows: Vec<GapRow>,
    pub summary: Summary,
    pub failed: usize,
    pub total: usize,
}

impl BenchmarkReport {
    /// More than 10% of the runs failed.
    pub fn excessive_failures(&self) -> bool {
        self.failed * 10 > self.total
    }
}

pub fn run_file_stem(kernel: DistanceMode, rep: usize) -> String {
    format!("{}_rep{rep}", kernel.kernel_name())
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
fn write_atomically(path: &Path, fill: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let file = fs::File::create(&tmp).at(&tmp)?;
        let mut w = BufWriter::new(file);
        fill(&mut w)?;
        w.flush().at(&tmp)?;
    }
    fs::rename(&tmp, path).at(path)
}

fn run_one(config: &BenchmarkConfig, runs_dir: &Path, kernel: DistanceMode, rep: usize) -> GapRow {
    let rc = config.run_config(kernel, rep);
    let seed = rc.seeds.embedding;
    let stem = run_file_stem(kernel, rep);
    let failed = |evals: usize, wall_ms: u64| GapRow {
        kernel: kernel.kernel_name().to_string(),
        rep,
        seed,
        gap: f64::NAN,
        evals,
        wall_ms,
    };
    let record = match run(&rc) {
        Ok(r) => r,
        Err(e) => {
            warn!("{stem}: run failed: {e}");
            return failed(0, 0);
        }
    };
    let json_path = runs_dir.join(format!("{stem}.json"));
    let csv_path = runs_dir.join(format!("{stem}.csv"));
    let written = write_atomically(&json_path, |w| Ok(serde_json::to_writer(w, &record)?))
        .and_then(|_| write_atomically(&csv_path, |w| record.write_csv(w).at(&csv_path)));
    if let Err(e) = written {
        warn!("{stem}: could not write run files: {e}");
        return failed(record.evaluations.len(), record.wall_ms);
    }
    if !record.is_complete() {
        warn!("{stem}: {:?}", record.status);
        return failed(record.evaluations.len(), record.wall_ms);
    }
    info!("{stem}: gap {:.6} after {} evaluations ({} ms)", record.final_gap, record.evaluations.len(), record.wall_ms);
    GapRow {
        kernel: kernel.kernel_name().to_string(),
        rep,
        seed,
        gap: record.final_gap,
        evals: record.evaluations.len(),
        wall_ms: record.wall_ms,
    }
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let runs_dir: PathBuf = config.out.join("runs");
    fs::create_dir_all(&runs_dir).at(&runs_dir)?;

    let jobs: Vec<(usize, DistanceMode)> = (0..config.reps)
        .flat_map(|rep| config.kernels.iter().map(move |&k| (rep, k)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(p) = config.parallel {
        builder = builder.num_threads(p);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let mut rows: Vec<GapRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(rep, kernel)| run_one(config, &runs_dir, kernel, rep))
            .collect()
    });
    let order = |name: &str| config.kernels.iter().position(|k| k.kernel_name() == name);
    rows.sort_by_key(|r| (order(&r.kernel), r.rep));

    let gaps_path = config.out.join("gaps.csv");
    write_atomically(&gaps_path, |w| write_gap_rows(&rows, w))?;

    let failed = rows.iter().filter(|r| !r.succeeded()).count();
    let total = rows.len();
    let summary = summarize(&rows)?;
    let summary_path = config.out.join("summary.json");
    write_atomically(&summary_path, |w| Ok(serde_json::to_writer_pretty(w, &summary)?))?;
    Ok(BenchmarkReport { rows, summary, failed, total })
}
