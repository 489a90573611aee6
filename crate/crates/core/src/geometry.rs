//! Random embedding of a low-dimensional box into `X = [-1, 1]^D`.
//!
//! A point `y` of the low-dimensional domain is lifted to `A y`, clamped onto
//! the hypercube (convex projection) and, for the warped kernel, pulled back
//! onto `Ran(A)` and stretched along its ray ([`Embedding::warp`]).

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::rng::seeded;
use crate::scalar::{dist, norm, Real};

const MAX_DRAWS: usize = 16;

/// Coordinates of `A y` within this distance of `[-1, 1]` count as inside `X`.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Below this norm the back-projection has no usable ray.
pub const DEGENERATE_PIVOT_TOL: f64 = 1e-12;

/// The random matrix `A` (`D × d`) with its cached orthogonal projector onto
/// `Ran(A)` and the γ bound. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "EmbeddingRecord<T>", try_from = "EmbeddingRecord<T>")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Embedding<T: Real> {
    a: Matrix<T>,
    seed: u64,
    proj: Matrix<T>,
    gamma: Option<T>,
}

/// Wire form: `{"D", "d", "seed", "A"}` with `A` as a list of rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct EmbeddingRecord<T> {
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    #[serde(rename = "d")]
    pub low_dim: usize,
    pub seed: u64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<T>>,
}

impl<T: Real> From<Embedding<T>> for EmbeddingRecord<T> {
    fn from(e: Embedding<T>) -> Self {
        Self {
            ambient_dim: e.ambient_dim(),
            low_dim: e.low_dim(),
            seed: e.seed,
            a: (0..e.a.rows()).map(|i| e.a.row(i).to_vec()).collect(),
        }
    }
}

impl<T: Real> TryFrom<EmbeddingRecord<T>> for Embedding<T> {
    type Error = Error;

    fn try_from(r: EmbeddingRecord<T>) -> Result<Self> {
        if r.a.len() != r.ambient_dim || r.a.iter().any(|row| row.len() != r.low_dim) {
            return Err(Error::InvalidArgument("matrix shape disagrees with D and d".into()));
        }
        let a = Matrix::from_row_major(r.ambient_dim, r.low_dim, r.a.concat())?;
        Embedding::from_matrix(a, r.seed)
    }
}

/// Result of [`Embedding::warp`].
#[derive(Clone, Debug, PartialEq)]
pub struct Warped<T> {
    pub point: Vec<T>,
    /// `A y` was already inside `X`.
    pub interior: bool,
    /// The back-projection vanished; `point` is the origin.
    pub degenerate: bool,
}

impl<T: Real> Embedding<T> {
    /// Draws `A` with i.i.d. standard normal entries from the stream keyed by
    /// `seed`. A rank-deficient draw is replaced by the next one in the same
    /// stream.
    pub fn sample(ambient_dim: usize, low_dim: usize, seed: u64) -> Result<Self> {
        if low_dim == 0 || low_dim > ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= d <= D, got d = {low_dim}, D = {ambient_dim}"
            )));
        }
        let mut rng = seeded(seed);
        for _ in 0..MAX_DRAWS {
            let a = Matrix::from_fn(ambient_dim, low_dim, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                T::lit(v)
            });
            match Self::from_matrix(a, seed) {
                Err(Error::RankDeficient { .. }) => continue,
                other => return other,
            }
        }
        Err(Error::RankDeficient { attempts: MAX_DRAWS })
    }

    /// Wraps an explicit matrix; fails when `AᵀA` is numerically singular.
    pub fn from_matrix(a: Matrix<T>, seed: u64) -> Result<Self> {
        let (big_d, d) = (a.rows(), a.cols());
        if d == 0 || d > big_d {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= d <= D, got d = {d}, D = {big_d}"
            )));
        }
        if a.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("embedding matrix has non-finite entries".into()));
        }
        let at = a.transpose();
        let gram = at.matmul(&a);
        let chol = Cholesky::new(&gram).map_err(|_| Error::RankDeficient { attempts: 1 })?;
        let l = chol.factor();
        let max_diag = (0..d).fold(T::zero(), |m, i| m.max(gram[(i, i)]));
        let min_pivot = (0..d).fold(T::infinity(), |m, i| m.min(l[(i, i)] * l[(i, i)]));
        if min_pivot <= T::epsilon() * T::from_count(d) * max_diag {
            return Err(Error::RankDeficient { attempts: 1 });
        }
        // The d×d inverse is formed once here and folded into the projector.
        let gram_inv = chol.inverse();
        let proj = a.matmul(&gram_inv).matmul(&at);
        let gamma = gamma_of(&a).ok();
        Ok(Self { a, seed, proj, gamma })
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.a.rows()
    }

    #[inline]
    pub fn low_dim(&self) -> usize {
        self.a.cols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    /// `A (AᵀA)⁻¹ Aᵀ`
    pub fn projector(&self) -> &Matrix<T> {
        &self.proj
    }

    /// `A y`
    pub fn lift(&self, y: &[T]) -> Vec<T> {
        self.a.mul_vec(y)
    }

    /// `p_X(A y)`, the point at which the objective is evaluated.
    pub fn embed(&self, y: &[T]) -> Vec<T> {
        convex_project(&self.lift(y))
    }

    /// Orthogonal projection onto `Ran(A)`. The result may leave `X`.
    pub fn back_project(&self, x: &[T]) -> Vec<T> {
        self.proj.mul_vec(x)
    }

    /// The warping Ψ.
    ///
    /// Inside `X` this is `A y`. Otherwise the clamped point is back-projected
    /// to `z`, the pivot `z' = z / max|z_i|` is taken on `∂X`, and the result
    /// is placed on the ray through `z` at distance `‖p_X(Ay) − z'‖` beyond the
    /// pivot.
    pub fn warp(&self, y: &[T]) -> Warped<T> {
        let ay = self.lift(y);
        let tol = T::lit(MEMBERSHIP_TOL);
        if ay.iter().all(|v| v.abs() <= T::one() + tol) {
            return Warped { point: ay, interior: true, degenerate: false };
        }
        let clamped = convex_project(&ay);
        let z = self.back_project(&clamped);
        stretch_along_ray(&clamped, z)
    }

    /// Ψ(y) as a plain point.
    pub fn warp_point(&self, y: &[T]) -> Vec<T> {
        self.warp(y).point
    }

    /// `γ` with `γ⁻¹ = min_j Σ_i |A_ji|`: the box `[-γ, γ]^d` pushed through
    /// `A` reaches both `-1` and `+1` in every coordinate.
    pub fn gamma_bound(&self) -> Result<T> {
        match self.gamma {
            Some(g) => Ok(g),
            None => gamma_of(&self.a),
        }
    }
}

/// Steps 6–7 of the warping given the clamped point and its back-projection.
///
/// Since `z · Ay = p_X(Ay) · Ay > 0` whenever `Ay ≠ 0`, a vanishing `z` only
/// arises from rounding; it is reported rather than divided by.
fn stretch_along_ray<T: Real>(clamped: &[T], z: Vec<T>) -> Warped<T> {
    let z_norm = norm(&z);
    let sup = z.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if !(z_norm > T::lit(DEGENERATE_PIVOT_TOL)) || sup == T::zero() {
        return Warped { point: z, interior: false, degenerate: true };
    }
    let pivot: Vec<T> = z.iter().map(|&v| v / sup).collect();
    let stretch = dist(clamped, &pivot) / norm(&pivot);
    let point = pivot.iter().map(|&p| p + stretch * p).collect();
    Warped { point, interior: false, degenerate: false }
}

/// γ of an arbitrary matrix; fails on a zero row.
pub fn gamma_of<T: Real>(a: &Matrix<T>) -> Result<T> {
    let mut min_sum = T::infinity();
    for j in 0..a.rows() {
        let s: T = a.row(j).iter().map(|v| v.abs()).sum();
        if s == T::zero() {
            return Err(Error::ZeroRow { row: j });
        }
        min_sum = min_sum.min(s);
    }
    Ok(min_sum.recip())
}

/// Componentwise clamp onto `[-1, 1]^D`.
pub fn convex_project<T: Real>(x: &[T]) -> Vec<T> {
    x.iter().map(|&v| v.max(-T::one()).min(T::one())).collect()
}

/// Whether every coordinate lies in `[-1, 1]`.
pub fn in_hypercube<T: Real>(x: &[T]) -> bool {
    x.iter().all(|v| v.abs() <= T::one())
}
