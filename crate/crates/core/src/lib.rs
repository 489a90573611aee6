//! Bayesian optimization of high-dimensional functions with low effective
//! dimension through a random linear embedding.
//!
//! The search runs in a small box `Y ⊂ R^d`; each `y` is evaluated at
//! `p_X(Ay)`, the clamp of `Ay` onto `X = [-1, 1]^D`. Three Gaussian-process
//! kernels are provided, differing in where distances are measured
//! ([`DistanceMode`]): in `Y`, between clamped images in `X`, or between
//! warped images that stay on the range of `A` ([`Embedding::warp`]).
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod acquisition;
pub mod design;
pub mod error;
pub mod geometry;
pub mod gp;
pub mod kernels;
pub mod linalg;
pub mod objectives;
pub mod optimizer;
pub mod rng;
pub mod scalar;

pub use acquisition::{expected_improvement, maximize_ei, AcqResult};
pub use error::{Error, Result};
pub use geometry::{convex_project, Embedding, Warped};
pub use gp::{fit, log_marginal_likelihood, Dataset, FitOptions, GpModel, ModelSummary};
pub use kernels::{covariance_matrix, effective_distance, DistanceMode, KernelFamily, KernelSpec};
pub use linalg::{Cholesky, Matrix};
pub use objectives::{embed_objective, hartmann6, Core, ObjectiveInstance};
pub use optimizer::{initial_design, run, run_on, RunConfig, RunRecord, RunStatus, Seeds, YBox};
pub use scalar::Real;

pub type Embedding64 = Embedding<f64>;
pub type KernelSpec64 = KernelSpec<f64>;
pub type Dataset64 = Dataset<f64>;
pub type GpModel64<'e> = GpModel<'e, f64>;
pub type ObjectiveInstance64 = ObjectiveInstance<f64>;
pub type RunConfig64 = RunConfig<f64>;
pub type RunRecord64 = RunRecord<f64>;

pub type Embedding32 = Embedding<f32>;
pub type RunConfig32 = RunConfig<f32>;
