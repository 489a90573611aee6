//! Kriging on the low-dimensional domain with any [`DistanceMode`], and
//! maximum-likelihood estimation of the variance and isotropic lengthscale.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::design::latin_hypercube;
use crate::error::{Error, Result};
use crate::geometry::Embedding;
use crate::kernels::{covariance_from_distances, distance_matrix, KernelSpec};
use crate::linalg::{Cholesky, Matrix};
use crate::rng::seeded;
use crate::scalar::{dist, dot, Real};

/// Observations `z_i = g(y_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Dataset<T: Real> {
    ys: Vec<Vec<T>>,
    zs: Vec<T>,
}

impl<T: Real> Dataset<T> {
    pub fn new(ys: Vec<Vec<T>>, zs: Vec<T>) -> Result<Self> {
        if ys.is_empty() {
            return Err(Error::InvalidArgument("dataset needs at least one point".into()));
        }
        if ys.len() != zs.len() {
            return Err(Error::InvalidArgument(format!("{} inputs but {} observations", ys.len(), zs.len())));
        }
        let dim = ys[0].len();
        if ys.iter().any(|y| y.len() != dim) {
            return Err(Error::InvalidArgument("inputs have differing lengths".into()));
        }
        if ys.iter().flatten().chain(&zs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dataset contains non-finite values".into()));
        }
        Ok(Self { ys, zs })
    }

    pub fn len(&self) -> usize {
        self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zs.is_empty()
    }

    pub fn ys(&self) -> &[Vec<T>] {
        &self.ys
    }

    pub fn zs(&self) -> &[T] {
        &self.zs
    }

    pub fn min_observation(&self) -> T {
        self.zs.iter().fold(T::infinity(), |m, &z| m.min(z))
    }
}

/// Knobs of the maximum-likelihood search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Starting points, the first being the moment heuristic.
    pub n_starts: usize,
    /// Likelihood evaluations allowed per local search.
    pub evals_per_start: usize,
    /// Nugget values relative to the variance, tried in order until the
    /// covariance factorizes.
    pub nugget_ladder: Vec<f64>,
    /// Subtract the sample mean of the observations before fitting.
    pub center: bool,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            n_starts: 10,
            evals_per_start: 200,
            nugget_ladder: vec![1e-8, 1e-6, 1e-4],
            center: true,
            seed: 0,
        }
    }
}

/// Hyperparameters and likelihood of a fitted model, for run logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub variance: f64,
    pub lengthscale: f64,
    pub log_likelihood: f64,
    pub nugget: f64,
    pub offset: f64,
}

/// A conditioned Gaussian process. Immutable; `predict` takes `&self`.
#[derive(Clone, Debug)]
pub struct GpModel<'e, T: Real> {
    data: Dataset<T>,
    spec: KernelSpec<T>,
    embedding: &'e Embedding<T>,
    images: Vec<Vec<T>>,
    chol: Cholesky<T>,
    alpha: Vec<T>,
    nugget: T,
    offset: T,
    log_likelihood: T,
}

impl<'e, T: Real> GpModel<'e, T> {
    /// Conditions a zero-mean process with fixed hyperparameters; `nugget` is
    /// absolute.
    pub fn condition(data: Dataset<T>, spec: KernelSpec<T>, e: &'e Embedding<T>, nugget: T) -> Result<Self> {
        spec.validate()?;
        let images = images_of(&spec, e, data.ys())?;
        let dists = distance_matrix(&images);
        Self::assemble(data, spec, e, images, &dists, nugget, T::zero())
    }

    fn assemble(
        data: Dataset<T>,
        spec: KernelSpec<T>,
        embedding: &'e Embedding<T>,
        images: Vec<Vec<T>>,
        dists: &Matrix<T>,
        nugget: T,
        offset: T,
    ) -> Result<Self> {
        let k = covariance_from_distances(&spec, dists, nugget);
        let chol = Cholesky::new(&k)?;
        let centered: Vec<T> = data.zs().iter().map(|&z| z - offset).collect();
        let whitened = chol.solve_lower(&centered);
        let alpha = chol.solve_upper(&whitened);
        let log_likelihood = gaussian_log_density(&chol, &whitened);
        Ok(Self { data, spec, embedding, images, chol, alpha, nugget, offset, log_likelihood })
    }

    /// Posterior mean and standard deviation at `y`.
    pub fn predict(&self, y: &[T]) -> (T, T) {
        let image = self.spec.mode.image(self.embedding, y);
        let k: Vec<T> = self.images.iter().map(|xi| self.spec.covariance(dist(&image, xi))).collect();
        let mean = dot(&k, &self.alpha) + self.offset;
        let v = self.chol.solve_lower(&k);
        let var = self.spec.variance - dot(&v, &v);
        (mean, var.max(T::zero()).sqrt())
    }

    pub fn data(&self) -> &Dataset<T> {
        &self.data
    }

    pub fn spec(&self) -> &KernelSpec<T> {
        &self.spec
    }

    pub fn embedding(&self) -> &'e Embedding<T> {
        self.embedding
    }

    pub fn cholesky(&self) -> &Cholesky<T> {
        &self.chol
    }

    /// `K⁻¹ (Z − offset)`
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// Absolute nugget on the diagonal of `K`.
    pub fn nugget(&self) -> T {
        self.nugget
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn log_likelihood(&self) -> T {
        self.log_likelihood
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            variance: self.spec.variance.as_f64(),
            lengthscale: self.spec.lengthscale.as_f64(),
            log_likelihood: self.log_likelihood.as_f64(),
            nugget: self.nugget.as_f64(),
            offset: self.offset.as_f64(),
        }
    }
}

fn images_of<T: Real>(spec: &KernelSpec<T>, e: &Embedding<T>, ys: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    if let Some(y) = ys.iter().find(|y| y.len() != e.low_dim()) {
        return Err(Error::InvalidArgument(format!(
            "input of length {} for an embedding of dimension {}",
            y.len(),
            e.low_dim()
        )));
    }
    Ok(ys.iter().map(|y| spec.mode.image(e, y)).collect())
}

/// `−½ wᵀw − ½ log det K − (n/2) log 2π` with `w = L⁻¹ z`.
fn gaussian_log_density<T: Real>(chol: &Cholesky<T>, whitened: &[T]) -> T {
    let half = T::lit(0.5);
    let n = T::from_count(whitened.len());
    -half * dot(whitened, whitened) - half * chol.log_det() - half * n * (T::lit(2.0) * T::PI()).ln()
}

/// Gaussian log density of the observations under a zero-mean process with
/// covariance `K + nugget·I`; `-∞` when that matrix does not factorize.
pub fn log_marginal_likelihood<T: Real>(spec: &KernelSpec<T>, e: &Embedding<T>, data: &Dataset<T>, nugget: T) -> T {
    match images_of(spec, e, data.ys()) {
        Ok(images) => lml_from_distances(spec, &distance_matrix(&images), data.zs(), nugget),
        Err(_) => T::neg_infinity(),
    }
}

fn lml_from_distances<T: Real>(spec: &KernelSpec<T>, dists: &Matrix<T>, zs: &[T], nugget: T) -> T {
    let k = covariance_from_distances(spec, dists, nugget);
    match Cholesky::new(&k) {
        Ok(chol) => {
            let w = chol.solve_lower(zs);
            let v = gaussian_log_density(&chol, &w);
            if v.is_finite() {
                v
            } else {
                T::neg_infinity()
            }
        }
        Err(_) => T::neg_infinity(),
    }
}

/// Fits variance and lengthscale by maximum likelihood, then conditions.
///
/// The nugget is a fixed fraction of the variance, so for each lengthscale
/// the likelihood is maximized in closed form by `v = zᵀ(R + ηI)⁻¹z / n`
/// (clamped to its bounds), leaving a search over `log l` alone. Bounds are
/// `l ∈ [1e-2, 10]·median distance` and `v ∈ [1e-3, 1e3]·sample variance`;
/// starts are the median-distance heuristic plus stratified draws, each
/// polished by a bounded compass search. When no candidate factorizes, the
/// next nugget of the ladder is tried.
pub fn fit<'e, T: Real>(
    data: Dataset<T>,
    template: &KernelSpec<T>,
    e: &'e Embedding<T>,
    options: &FitOptions,
) -> Result<GpModel<'e, T>> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidArgument("maximum likelihood needs at least two observations".into()));
    }
    let images = images_of(template, e, data.ys())?;
    let dists = distance_matrix(&images);

    let offset = if options.center {
        data.zs().iter().copied().sum::<T>() / T::from_count(n)
    } else {
        T::zero()
    };
    let centered: Vec<T> = data.zs().iter().map(|&z| z - offset).collect();

    let (var0, len0) = heuristic_start(&centered, &dists);
    let var_bounds = (var0 * 1e-3, var0 * 1e3);
    let lo = [(len0 * 1e-2).ln()];
    let hi = [(len0 * 10.0).ln()];

    let mut starts = vec![[len0.ln()]];
    if options.n_starts > 1 {
        let mut rng = seeded(options.seed);
        for p in latin_hypercube::<f64>(options.n_starts - 1, 1, 1.0, &mut rng) {
            starts.push([lo[0] + (p[0] + 1.0) / 2.0 * (hi[0] - lo[0])]);
        }
    }

    for (level, &rel_nugget) in options.nugget_ladder.iter().enumerate() {
        let objective = |p: [f64; 1]| -> f64 {
            profiled_likelihood(template, &dists, &centered, p[0].exp(), rel_nugget, var_bounds).0
        };
        let mut best: Option<([f64; 1], f64)> = None;
        for s in &starts {
            let (p, val) = compass_search(objective, *s, lo, hi, options.evals_per_start);
            if val.is_finite() && best.map_or(true, |(_, b)| val > b) {
                best = Some((p, val));
            }
        }
        if let Some((p, _)) = best {
            let l = p[0].exp();
            let (_, v) = profiled_likelihood(template, &dists, &centered, l, rel_nugget, var_bounds);
            let spec = template.with_hyperparameters(T::lit(v), T::lit(l));
            let nugget = T::lit(v * rel_nugget);
            if let Ok(model) = GpModel::assemble(data.clone(), spec, e, images.clone(), &dists, nugget, offset) {
                return Ok(model);
            }
        }
        if level + 1 < options.nugget_ladder.len() {
            warn!(
                "covariance not factorizable with relative nugget {rel_nugget:e}; escalating to {:e}",
                options.nugget_ladder[level + 1]
            );
        }
    }
    Err(Error::Conditioning {
        nugget: options.nugget_ladder.last().copied().unwrap_or(0.0),
    })
}

/// Log likelihood at lengthscale `l` maximized over the variance, and that
/// variance. `(-∞, NaN)` when the correlation matrix does not factorize.
fn profiled_likelihood<T: Real>(
    template: &KernelSpec<T>,
    dists: &Matrix<T>,
    zs: &[T],
    l: f64,
    rel_nugget: f64,
    (v_lo, v_hi): (f64, f64),
) -> (f64, f64) {
    let unit = template.with_hyperparameters(T::one(), T::lit(l));
    let r = covariance_from_distances(&unit, dists, T::lit(rel_nugget));
    let Ok(chol) = Cholesky::new(&r) else {
        return (f64::NEG_INFINITY, f64::NAN);
    };
    let w = chol.solve_lower(zs);
    let n = zs.len() as f64;
    let q = dot(&w, &w).as_f64();
    let v = (q / n).clamp(v_lo, v_hi);
    let lml = -0.5 * q / v - 0.5 * n * v.ln() - 0.5 * chol.log_det().as_f64()
        - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
    if lml.is_finite() {
        (lml, v)
    } else {
        (f64::NEG_INFINITY, f64::NAN)
    }
}

/// Sample variance of the (centered) observations and median pairwise
/// distance, each replaced by 1 when degenerate.
fn heuristic_start<T: Real>(centered: &[T], dists: &Matrix<T>) -> (f64, f64) {
    let n = centered.len();
    let var = centered.iter().map(|z| z.as_f64().powi(2)).sum::<f64>() / n as f64;
    let mut pair: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pair.push(dists[(i, j)].as_f64());
        }
    }
    pair.sort_by(f64::total_cmp);
    let median = if pair.is_empty() {
        1.0
    } else if pair.len() % 2 == 1 {
        pair[pair.len() / 2]
    } else {
        0.5 * (pair[pair.len() / 2 - 1] + pair[pair.len() / 2])
    };
    let pos = |v: f64| if v > 1e-12 && v.is_finite() { v } else { 1.0 };
    (pos(var), pos(median))
}

/// Log-space step below which the compass search stops early.
const COMPASS_TOL: f64 = 1e-2;

/// Bounded coordinate search maximizing `f`: a successful move doubles that
/// axis' step, a sweep without progress halves both.
fn compass_search<const N: usize>(
    mut f: impl FnMut([f64; N]) -> f64,
    start: [f64; N],
    lo: [f64; N],
    hi: [f64; N],
    budget: usize,
) -> ([f64; N], f64) {
    let clamp = |p: [f64; N]| std::array::from_fn(|k| p[k].clamp(lo[k], hi[k]));
    let mut x = clamp(start);
    let mut fx = f(x);
    let mut evals = 1;
    let max_step: [f64; N] = std::array::from_fn(|k| (hi[k] - lo[k]) / 4.0);
    let mut step: [f64; N] = std::array::from_fn(|k| max_step[k] / 2.0);
    while evals < budget {
        let mut improved = false;
        'axes: for k in 0..N {
            for sign in [1.0, -1.0] {
                if evals >= budget {
                    break 'axes;
                }
                let mut cand = x;
                cand[k] += sign * step[k];
                let cand = clamp(cand);
                if cand == x {
                    continue;
                }
                let fc = f(cand);
                evals += 1;
                if fc > fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    step[k] = (step[k] * 2.0).min(max_step[k]);
                    break 'axes;
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s /= 2.0);
            if step.iter().all(|&s| s < COMPASS_TOL) {
                break;
            }
        }
    }
    (x, fx)
}
