//! The embedded Bayesian-optimization loop: space-filling start, then
//! refit → maximize EI → evaluate until the evaluation budget is spent.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::acquisition::maximize_ei;
use crate::design::{greedy_maximin, latin_hypercube, uniform_point};
use crate::error::{Error, Result};
use crate::geometry::Embedding;
use crate::gp::{fit, Dataset, FitOptions, ModelSummary};
use crate::kernels::{DistanceMode, KernelFamily, KernelSpec};
use crate::objectives::{embed_objective, Core, ObjectiveInstance, ObjectiveRecord};
use crate::rng::{derive_seed, seeded};
use crate::scalar::{sup_dist, Real};

/// Two evaluated points closer than this in sup-norm count as the same point of `X`.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Candidate pool size for the warped initial design, as a multiple of `n_init`.
pub const PSI_OVERSAMPLING: usize = 5;

/// Half-width of the low-dimensional box `Y = [-h, h]^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum YBox<T> {
    /// `h = √d`
    SqrtD,
    /// `h = γ` of the sampled embedding.
    Gamma,
    HalfWidth(T),
}

impl<T: Real> YBox<T> {
    pub fn resolve(&self, e: &Embedding<T>) -> Result<T> {
        let h = match *self {
            YBox::SqrtD => T::from_count(e.low_dim()).sqrt(),
            YBox::Gamma => e.gamma_bound()?,
            YBox::HalfWidth(h) => h,
        };
        if !(h > T::zero() && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("box half-width must be positive, got {h}")));
        }
        Ok(h)
    }
}

impl<T: Real> fmt::Display for YBox<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YBox::SqrtD => f.write_str("sqrt_d"),
            YBox::Gamma => f.write_str("gamma"),
            YBox::HalfWidth(h) => write!(f, "{h}"),
        }
    }
}

impl<T: Real> FromStr for YBox<T> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sqrt_d" => Ok(YBox::SqrtD),
            "gamma" => Ok(YBox::Gamma),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|h| *h > 0.0 && h.is_finite())
                .map(|h| YBox::HalfWidth(T::lit(h)))
                .ok_or_else(|| Error::InvalidArgument(format!("ybox must be sqrt_d, gamma or a positive number, got '{other}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum YBoxRepr<T> {
    Named(String),
    Width(T),
}

impl<T: Real> Serialize for YBox<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            YBox::HalfWidth(h) => YBoxRepr::Width(h).serialize(s),
            _ => YBoxRepr::<T>::Named(self.to_string()).serialize(s),
        }
    }
}

impl<'de, T: Real> Deserialize<'de> for YBox<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match YBoxRepr::<T>::deserialize(d)? {
            YBoxRepr::Named(s) => s.parse().map_err(serde::de::Error::custom),
            YBoxRepr::Width(h) => Ok(YBox::HalfWidth(h)),
        }
    }
}

/// Independent streams of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub embedding: u64,
    pub objective: u64,
    pub design: u64,
    pub acquisition: u64,
}

impl Seeds {
    /// Embedding seed `base`, the others derived from it.
    pub fn from_base(base: u64) -> Self {
        Self {
            embedding: base,
            objective: derive_seed(base, 1),
            design: derive_seed(base, 2),
            acquisition: derive_seed(base, 3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleSettings {
    pub n_starts: usize,
    pub evals_per_start: usize,
}

impl Default for MleSettings {
    fn default() -> Self {
        Self { n_starts: 10, evals_per_start: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct RunConfig<T: Real> {
    pub ambient_dim: usize,
    pub low_dim: usize,
    pub mode: DistanceMode,
    pub family: KernelFamily,
    pub core: Core,
    /// Total objective evaluations, initial design included.
    pub budget: usize,
    /// Initial design size; `10·d` when absent.
    pub n_init: Option<usize>,
    pub y_box: YBox<T>,
    pub seeds: Seeds,
    /// Nugget relative to the process variance.
    pub nugget: f64,
    /// EI evaluations per iteration; `2000·d` when absent.
    pub ei_budget: Option<usize>,
    /// Re-draw design points whose convex projections coincide (`kY`, `kX`).
    pub filter_duplicates: bool,
    pub mle: MleSettings,
}

impl<T: Real> Default for RunConfig<T> {
    fn default() -> Self {
        Self {
            ambient_dim: 25,
            low_dim: 6,
            mode: DistanceMode::PsiDist,
            family: KernelFamily::Matern52,
            core: Core::Hartmann6,
            budget: 250,
            n_init: None,
            y_box: YBox::SqrtD,
            seeds: Seeds::from_base(0),
            nugget: 1e-8,
            ei_budget: None,
            filter_duplicates: true,
            mle: MleSettings::default(),
        }
    }
}

impl<T: Real> RunConfig<T> {
    pub fn n_init(&self) -> usize {
        self.n_init.unwrap_or(10 * self.low_dim)
    }

    pub fn ei_budget(&self) -> usize {
        self.ei_budget.unwrap_or(2000 * self.low_dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.low_dim == 0 || self.low_dim > self.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= d <= D, got d = {}, D = {}",
                self.low_dim, self.ambient_dim
            )));
        }
        let n_init = self.n_init();
        if n_init == 0 || n_init > self.budget {
            return Err(Error::InvalidArgument(format!(
                "initial design size {n_init} must lie in 1..={}",
                self.budget
            )));
        }
        if n_init < 2 && self.budget > n_init {
            return Err(Error::InvalidArgument("fitting a model needs an initial design of at least 2 points".into()));
        }
        if !(self.nugget >= 0.0 && self.nugget.is_finite()) {
            return Err(Error::InvalidArgument(format!("nugget must be nonnegative, got {}", self.nugget)));
        }
        if let YBox::HalfWidth(h) = self.y_box {
            if !(h > T::zero()) {
                return Err(Error::InvalidArgument(format!("box half-width must be positive, got {h}")));
            }
        }
        Ok(())
    }

    fn fit_options(&self, seed: u64) -> FitOptions {
        let mut ladder = vec![self.nugget];
        ladder.extend([1e-6, 1e-4].into_iter().filter(|&v| v > self.nugget));
        FitOptions {
            n_starts: self.mle.n_starts,
            evals_per_start: self.mle.evals_per_start,
            nugget_ladder: ladder,
            center: true,
            seed,
        }
    }
}

/// Initial design inside `[-half_width, half_width]^d`.
///
/// `kY`/`kX`: a Latin hypercube whose points are re-drawn while their convex
/// projection duplicates an earlier one (when filtering is on). `kPsi`: a
/// Latin hypercube [`PSI_OVERSAMPLING`] times larger, thinned by greedy
/// maximin in the warped metric.
pub fn initial_design<T: Real>(config: &RunConfig<T>, e: &Embedding<T>, half_width: T) -> Result<Vec<Vec<T>>> {
    let n = config.n_init();
    let d = e.low_dim();
    let mut rng = seeded(config.seeds.design);
    match config.mode {
        DistanceMode::PsiDist => {
            let pool = latin_hypercube(PSI_OVERSAMPLING * n, d, half_width, &mut rng);
            let warped: Vec<Vec<T>> = pool.iter().map(|y| e.warp_point(y)).collect();
            Ok(greedy_maximin(&warped, n).into_iter().map(|i| pool[i].clone()).collect())
        }
        DistanceMode::YDist | DistanceMode::XDist => {
            let mut design = latin_hypercube(n, d, half_width, &mut rng);
            if !config.filter_duplicates {
                return Ok(design);
            }
            let tol = T::lit(DUPLICATE_TOL);
            let max_draws = 100 * n;
            let mut draws = 0;
            let mut images: Vec<Vec<T>> = Vec::with_capacity(n);
            for i in 0..n {
                let mut img = e.embed(&design[i]);
                while images.iter().any(|o| sup_dist(o, &img) <= tol) {
                    if draws == max_draws {
                        return Err(Error::DuplicateElimination { draws });
                    }
                    draws += 1;
                    design[i] = uniform_point(d, half_width, &mut rng);
                    img = e.embed(&design[i]);
                }
                images.push(img);
            }
            Ok(design)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Evaluation<T: Real> {
    /// 0 for the initial design, then the EI iteration number.
    pub iteration: usize,
    pub y: Vec<T>,
    /// `p_X(Ay)`, where the objective was evaluated.
    pub x: Vec<T>,
    /// `Ψ(y)` for the warped kernel.
    pub warped: Option<Vec<T>>,
    pub value: T,
    pub best_so_far: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationFit {
    pub iteration: usize,
    pub model: ModelSummary,
    pub ei_value: f64,
    pub ei_evals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Truncated { reason: String },
}

/// One optimization trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct RunRecord<T: Real> {
    pub config: RunConfig<T>,
    pub embedding: Embedding<T>,
    pub objective: ObjectiveRecord,
    pub y_half_width: T,
    pub evaluations: Vec<Evaluation<T>>,
    pub fits: Vec<IterationFit>,
    pub best_value: T,
    pub final_gap: T,
    pub wall_ms: u64,
    #[serde(flatten)]
    pub status: RunStatus,
}

impl<T: Real> RunRecord<T> {
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn best_so_far(&self) -> Vec<T> {
        self.evaluations.iter().map(|e| e.best_so_far).collect()
    }

    /// Pairs `(i, j)`, `i < j`, of evaluations at different `y` whose points
    /// of `X` coincide within `tol` in sup-norm.
    pub fn duplicate_images(&self, tol: T) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.evaluations.len() {
            for i in 0..j {
                let (a, b) = (&self.evaluations[i], &self.evaluations[j]);
                if a.y != b.y && sup_dist(&a.x, &b.x) <= tol {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// One row per evaluation: `iteration, y0.., x0.., value, best_so_far`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let d = self.embedding.low_dim();
        let big_d = self.embedding.ambient_dim();
        let mut header = vec!["iteration".to_string()];
        header.extend((0..d).map(|i| format!("y{i}")));
        header.extend((0..big_d).map(|i| format!("x{i}")));
        header.extend(["value".to_string(), "best_so_far".to_string()]);
        out.write_record(&header)?;
        for ev in &self.evaluations {
            let mut row = vec![ev.iteration.to_string()];
            row.extend(ev.y.iter().map(ToString::to_string));
            row.extend(ev.x.iter().map(ToString::to_string));
            row.push(ev.value.to_string());
            row.push(ev.best_so_far.to_string());
            out.write_record(&row)?;
        }
        out.flush()
    }
}

/// Runs the loop on the Hartmann-type objective and embedding named by the config seeds.
pub fn run<T: Real>(config: &RunConfig<T>) -> Result<RunRecord<T>> {
    config.validate()?;
    let embedding = Embedding::sample(config.ambient_dim, config.low_dim, config.seeds.embedding)?;
    let objective = embed_objective(config.core, config.ambient_dim, config.seeds.objective)?;
    run_on(config, embedding, &objective)
}

/// Runs the loop with an explicit embedding and objective.
///
/// A model that cannot be fitted ends the run early with
/// [`RunStatus::Truncated`]; the evaluations so far are kept.
pub fn run_on<T: Real>(config: &RunConfig<T>, embedding: Embedding<T>, objective: &ObjectiveInstance<T>) -> Result<RunRecord<T>> {
    config.validate()?;
    if embedding.ambient_dim() != objective.ambient_dim() || embedding.low_dim() != config.low_dim {
        return Err(Error::InvalidArgument("embedding, objective and config dimensions disagree".into()));
    }
    let started = Instant::now();
    let half_width = config.y_box.resolve(&embedding)?;
    let template = KernelSpec::new(config.family, T::one(), T::one(), config.mode)?;

    let mut evaluations: Vec<Evaluation<T>> = Vec::with_capacity(config.budget);
    let mut best = T::infinity();
    let mut evaluate = |iteration: usize, y: Vec<T>, evaluations: &mut Vec<Evaluation<T>>| -> Result<()> {
        let x = embedding.embed(&y);
        let value = objective.eval(&x)?;
        best = best.min(value);
        let warped = (config.mode == DistanceMode::PsiDist).then(|| embedding.warp_point(&y));
        evaluations.push(Evaluation { iteration, y, x, warped, value, best_so_far: best });
        Ok(())
    };

    for y in initial_design(config, &embedding, half_width)? {
        evaluate(0, y, &mut evaluations)?;
    }

    let mut fits = Vec::new();
    let mut status = RunStatus::Completed;
    let mut iteration = 0;
    while evaluations.len() < config.budget {
        iteration += 1;
        let ys = evaluations.iter().map(|e| e.y.clone()).collect();
        let zs = evaluations.iter().map(|e| e.value).collect();
        let data = Dataset::new(ys, zs)?;
        let options = config.fit_options(derive_seed(config.seeds.acquisition, 2 * iteration as u64));
        let model = match fit(data, &template, &embedding, &options) {
            Ok(m) => m,
            Err(err) => {
                status = RunStatus::Truncated { reason: format!("iteration {iteration}: {err}") };
                break;
            }
        };
        let acq_seed = derive_seed(config.seeds.acquisition, 2 * iteration as u64 + 1);
        let acq = maximize_ei(&model, half_width, config.ei_budget(), acq_seed);
        fits.push(IterationFit {
            iteration,
            model: model.summary(),
            ei_value: acq.ei_value.as_f64(),
            ei_evals: acq.n_evals,
        });
        evaluate(iteration, acq.y_star, &mut evaluations)?;
    }

    let best_value = evaluations.last().map_or(T::infinity(), |e| e.best_so_far);
    let final_gap = objective.optimality_gap(best_value)?;
    Ok(RunRecord {
        config: config.clone(),
        objective: objective.clone().into(),
        embedding,
        y_half_width: half_width,
        evaluations,
        fits,
        best_value,
        final_gap,
        wall_ms: started.elapsed().as_millis() as u64,
        status,
    })
}
