//! Gap tables and their per-kernel statistics.

use std::collections::BTreeMap;
use std::path::Path;

use rembo::DistanceMode;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// One line of `gaps.csv`. A failed run carries a NaN gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub kernel: String,
    pub rep: usize,
    pub seed: u64,
    pub gap: f64,
    pub evals: usize,
    pub wall_ms: u64,
}

impl GapRow {
    pub fn succeeded(&self) -> bool {
        self.gap.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelStats {
    pub kernel: String,
    pub count: usize,
    pub failed: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationGaps {
    pub rep: usize,
    pub seed: u64,
    pub gaps: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kernels: Vec<KernelStats>,
    pub replications: Vec<ReplicationGaps>,
}

impl Summary {
    pub fn kernel(&self, name: &str) -> Option<&KernelStats> {
        self.kernels.iter().find(|k| k.kernel == name)
    }
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn kernel_rank(name: &str) -> (usize, String) {
    match name.parse::<DistanceMode>() {
        Ok(m) => (DistanceMode::ALL.iter().position(|&k| k == m).unwrap_or(0), String::new()),
        Err(_) => (DistanceMode::ALL.len(), name.to_string()),
    }
}

/// Statistics over the rows with a finite gap; kernels in `kY, kX, kPsi` order.
pub fn summarize(rows: &[GapRow]) -> Result<Summary> {
    if !rows.iter().any(GapRow::succeeded) {
        return Err(BenchError::NoGaps);
    }
    let mut by_kernel: BTreeMap<(usize, String), (String, Vec<f64>, usize)> = BTreeMap::new();
    let mut by_rep: BTreeMap<usize, ReplicationGaps> = BTreeMap::new();
    for row in rows {
        let entry = by_kernel
            .entry(kernel_rank(&row.kernel))
            .or_insert_with(|| (row.kernel.clone(), Vec::new(), 0));
        if row.succeeded() {
            entry.1.push(row.gap);
            by_rep
                .entry(row.rep)
                .or_insert_with(|| ReplicationGaps { rep: row.rep, seed: row.seed, gaps: BTreeMap::new() })
                .gaps
                .insert(row.kernel.clone(), row.gap);
        } else {
            entry.2 += 1;
        }
    }
    let kernels = by_kernel
        .into_values()
        .filter(|(_, gaps, _)| !gaps.is_empty())
        .map(|(kernel, mut gaps, failed)| {
            gaps.sort_by(f64::total_cmp);
            KernelStats {
                kernel,
                count: gaps.len(),
                failed,
                min: gaps[0],
                q1: quantile_type7(&gaps, 0.25),
                median: quantile_type7(&gaps, 0.5),
                q3: quantile_type7(&gaps, 0.75),
                max: gaps[gaps.len() - 1],
                mean: gaps.iter().sum::<f64>() / gaps.len() as f64,
            }
        })
        .collect();
    Ok(Summary { kernels, replications: by_rep.into_values().collect() })
}

pub fn read_gap_rows(path: &Path) -> Result<Vec<GapRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_gap_rows<W: std::io::Write>(rows: &[GapRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Concatenates the gap tables and summarizes them.
pub fn summarize_files<P: AsRef<Path>>(paths: &[P]) -> Result<Summary> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_gap_rows(p.as_ref())?);
    }
    summarize(&rows)
}
