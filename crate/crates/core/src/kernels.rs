//! Stationary kernels composed with the three ways of measuring distance
//! between low-dimensional points: directly in `Y`, between convex-projected
//! images in `X`, or between warped images.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Embedding;
use crate::linalg::Matrix;
use crate::scalar::{dist, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    #[serde(alias = "se")]
    SquaredExponential,
    Matern52,
}

/// Where distances are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistanceMode {
    /// `‖y − y'‖` in the low-dimensional box.
    #[serde(alias = "kY")]
    YDist,
    /// `‖p_X(Ay) − p_X(Ay')‖` in the hypercube.
    #[serde(alias = "kX")]
    XDist,
    /// `‖Ψ(y) − Ψ(y')‖` after warping.
    #[serde(alias = "kPsi")]
    PsiDist,
}

impl DistanceMode {
    pub const ALL: [DistanceMode; 3] = [DistanceMode::YDist, DistanceMode::XDist, DistanceMode::PsiDist];

    /// Short kernel name: `kY`, `kX` or `kPsi`.
    pub fn kernel_name(self) -> &'static str {
        match self {
            DistanceMode::YDist => "kY",
            DistanceMode::XDist => "kX",
            DistanceMode::PsiDist => "kPsi",
        }
    }

    /// The point whose Euclidean distances this mode uses.
    pub fn image<T: Real>(self, e: &Embedding<T>, y: &[T]) -> Vec<T> {
        match self {
            DistanceMode::YDist => y.to_vec(),
            DistanceMode::XDist => e.embed(y),
            DistanceMode::PsiDist => e.warp_point(y),
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kernel_name())
    }
}

impl FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kY" | "YDist" => Ok(DistanceMode::YDist),
            "kX" | "XDist" => Ok(DistanceMode::XDist),
            "kPsi" | "PsiDist" => Ok(DistanceMode::PsiDist),
            other => Err(Error::InvalidArgument(format!("unknown kernel '{other}' (expected kY, kX or kPsi)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct KernelSpec<T: Real> {
    pub family: KernelFamily,
    pub variance: T,
    pub lengthscale: T,
    pub mode: DistanceMode,
}

impl<T: Real> KernelSpec<T> {
    pub fn new(family: KernelFamily, variance: T, lengthscale: T, mode: DistanceMode) -> Result<Self> {
        let spec = Self { family, variance, lengthscale, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance > T::zero() && self.variance.is_finite()) {
            return Err(Error::InvalidArgument(format!("variance must be positive, got {}", self.variance)));
        }
        if !(self.lengthscale > T::zero() && self.lengthscale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lengthscale must be positive, got {}",
                self.lengthscale
            )));
        }
        Ok(())
    }

    pub fn with_hyperparameters(&self, variance: T, lengthscale: T) -> Self {
        Self { variance, lengthscale, ..*self }
    }

    /// Correlation at distance `r`, in `(0, 1]`.
    #[inline]
    pub fn correlation(&self, r: T) -> T {
        correlation(self.family, r / self.lengthscale)
    }

    #[inline]
    pub fn covariance(&self, r: T) -> T {
        self.variance * self.correlation(r)
    }
}

/// Unit-variance correlation at scaled distance `h = r / l`.
#[inline]
pub fn correlation<T: Real>(family: KernelFamily, h: T) -> T {
    match family {
        KernelFamily::SquaredExponential => (-(h * h) / T::lit(2.0)).exp(),
        KernelFamily::Matern52 => {
            let s = T::lit(5.0).sqrt() * h;
            (T::one() + s + s * s / T::lit(3.0)) * (-s).exp()
        }
    }
}

pub fn effective_distance<T: Real>(mode: DistanceMode, e: &Embedding<T>, y1: &[T], y2: &[T]) -> T {
    dist(&mode.image(e, y1), &mode.image(e, y2))
}

/// `K_ij = σ² ρ(‖·‖) + nugget·[i = j]`. The upper triangle is computed and
/// mirrored, so the result is exactly symmetric.
pub fn covariance_matrix<T: Real>(spec: &KernelSpec<T>, e: &Embedding<T>, ys: &[Vec<T>], nugget: T) -> Matrix<T> {
    let images: Vec<Vec<T>> = ys.iter().map(|y| spec.mode.image(e, y)).collect();
    covariance_from_distances(spec, &distance_matrix(&images), nugget)
}

pub(crate) fn distance_matrix<T: Real>(images: &[Vec<T>]) -> Matrix<T> {
    let n = images.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = dist(&images[i], &images[j]);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

pub(crate) fn covariance_from_distances<T: Real>(spec: &KernelSpec<T>, dists: &Matrix<T>, nugget: T) -> Matrix<T> {
    let n = dists.rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = spec.variance + nugget;
        for j in i + 1..n {
            let v = spec.covariance(dists[(i, j)]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}
