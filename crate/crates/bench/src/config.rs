use std::path::{Path, PathBuf};

use rembo::{DistanceMode, KernelFamily, RunConfig64, Seeds, YBox};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, IoContext, Result};

/// A replicated comparison of kernels. Replication `r` of every kernel uses
/// embedding seed `base_seed + r`, so all kernels see the same embeddings and
/// the same objective instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub dim_high: usize,
    pub dim_low: usize,
    pub budget: usize,
    pub reps: usize,
    pub kernels: Vec<DistanceMode>,
    pub base_seed: u64,
    pub out: PathBuf,
    /// Worker threads; all available cores when absent.
    pub parallel: Option<usize>,
    pub ybox: YBox<f64>,
    pub family: KernelFamily,
    pub n_init: Option<usize>,
    pub ei_budget: Option<usize>,
    pub nugget: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            dim_high: 25,
            dim_low: 6,
            budget: 120,
            reps: 20,
            kernels: DistanceMode::ALL.to_vec(),
            base_seed: 0,
            out: PathBuf::from("bench-out"),
            parallel: None,
            ybox: YBox::SqrtD,
            family: KernelFamily::Matern52,
            n_init: None,
            ei_budget: None,
            nugget: 1e-8,
        }
    }
}

impl BenchmarkConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).at(path)?;
        serde_json::from_str(&text).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
    }

    pub fn seeds(&self, rep: usize) -> Seeds {
        Seeds::from_base(self.base_seed.wrapping_add(rep as u64))
    }

    pub fn run_config(&self, kernel: DistanceMode, rep: usize) -> RunConfig64 {
        RunConfig64 {
            ambient_dim: self.dim_high,
            low_dim: self.dim_low,
            mode: kernel,
            family: self.family,
            budget: self.budget,
            n_init: self.n_init,
            y_box: self.ybox,
            seeds: self.seeds(rep),
            nugget: self.nugget,
            ei_budget: self.ei_budget,
            ..RunConfig64::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(BenchError::Config("reps must be at least 1".into()));
        }
        if self.kernels.is_empty() {
            return Err(BenchError::Config("at least one kernel is required".into()));
        }
        let mut seen = self.kernels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.kernels.len() {
            return Err(BenchError::Config("kernels are listed more than once".into()));
        }
        if self.parallel == Some(0) {
            return Err(BenchError::Config("parallel must be at least 1".into()));
        }
        if self.dim_high < 6 {
            return Err(BenchError::Config(format!("dim-high {} is below the 6 effective variables", self.dim_high)));
        }
        self.run_config(self.kernels[0], 0)
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))
    }
}

/// Parses `kY,kX,kPsi`.
pub fn parse_kernels(list: &str) -> Result<Vec<DistanceMode>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<DistanceMode>().map_err(|e| BenchError::Config(e.to_string())))
        .collect()
}
