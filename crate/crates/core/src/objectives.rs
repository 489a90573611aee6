//! Test functions of known effective dimension: a low-dimensional core placed
//! on a random subset of the ambient coordinates of `X = [-1, 1]^D`.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Real;

const H6_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

const H6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

const H6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

/// Global minimizer on `[0, 1]^6`, refined to full double precision from the
/// usual six-digit tabulation.
pub const HARTMANN6_ARGMIN: [f64; 6] = [
    0.201_689_509_093_657_46,
    0.150_010_693_541_113_74,
    0.476_873_972_925_099_8,
    0.275_332_427_522_078_2,
    0.311_651_617_239_568_6,
    0.657_300_534_553_670_2,
];

/// Six-dimensional Hartmann function on `[0, 1]^6`.
pub fn hartmann6<T: Real>(u: &[T]) -> Result<T> {
    if u.len() != 6 {
        return Err(Error::InvalidArgument(format!("hartmann6 takes 6 inputs, got {}", u.len())));
    }
    for (index, &v) in u.iter().enumerate() {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::OutOfDomain { index, value: v.as_f64() });
        }
    }
    let mut total = T::zero();
    for i in 0..4 {
        let inner: T = (0..6)
            .map(|j| {
                let diff = u[j] - T::lit(H6_P[i][j]);
                T::lit(H6_A[i][j]) * diff * diff
            })
            .sum();
        total = total + T::lit(H6_ALPHA[i]) * (-inner).exp();
    }
    Ok(-total)
}

/// Low-dimensional function placed on the effective coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Core {
    Hartmann6,
}

impl Core {
    pub fn dim(self) -> usize {
        match self {
            Core::Hartmann6 => 6,
        }
    }

    pub fn eval<T: Real>(self, u: &[T]) -> Result<T> {
        match self {
            Core::Hartmann6 => hartmann6(u),
        }
    }

    pub fn argmin<T: Real>(self) -> Vec<T> {
        match self {
            Core::Hartmann6 => HARTMANN6_ARGMIN.iter().map(|&v| T::lit(v)).collect(),
        }
    }
}

/// `f(x) = core((x_axes + 1) / 2)`: depends only on the selected axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ObjectiveRecord", try_from = "ObjectiveRecord")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ObjectiveInstance<T: Real> {
    core: Core,
    ambient_dim: usize,
    axes: Vec<usize>,
    seed: u64,
    f_min: T,
    x_min_core: Vec<T>,
}

/// Wire form `{"core", "D", "axes", "seed"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveRecord {
    pub core: Core,
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    pub axes: Vec<usize>,
    pub seed: u64,
}

impl<T: Real> From<ObjectiveInstance<T>> for ObjectiveRecord {
    fn from(o: ObjectiveInstance<T>) -> Self {
        Self { core: o.core, ambient_dim: o.ambient_dim, axes: o.axes, seed: o.seed }
    }
}

impl<T: Real> TryFrom<ObjectiveRecord> for ObjectiveInstance<T> {
    type Error = Error;
    fn try_from(r: ObjectiveRecord) -> Result<Self> {
        let mut o = ObjectiveInstance::with_axes(r.core, r.ambient_dim, r.axes)?;
        o.seed = r.seed;
        Ok(o)
    }
}

/// Embeds `core` into `D` dimensions on axes drawn without replacement from
/// the stream keyed by `axes_seed`; `axes[k]` carries core coordinate `k`.
pub fn embed_objective<T: Real>(core: Core, ambient_dim: usize, axes_seed: u64) -> Result<ObjectiveInstance<T>> {
    if ambient_dim < core.dim() {
        return Err(Error::InvalidArgument(format!(
            "ambient dimension {ambient_dim} is below the effective dimension {}",
            core.dim()
        )));
    }
    let axes = sample(&mut seeded(axes_seed), ambient_dim, core.dim()).into_vec();
    let mut o = ObjectiveInstance::with_axes(core, ambient_dim, axes)?;
    o.seed = axes_seed;
    Ok(o)
}

impl<T: Real> ObjectiveInstance<T> {
    pub fn with_axes(core: Core, ambient_dim: usize, axes: Vec<usize>) -> Result<Self> {
        if axes.len() != core.dim() {
            return Err(Error::InvalidArgument(format!("core needs {} axes, got {}", core.dim(), axes.len())));
        }
        let mut seen = vec![false; ambient_dim];
        for &a in &axes {
            if a >= ambient_dim || std::mem::replace(&mut seen[a], true) {
                return Err(Error::InvalidArgument(format!("axes must be distinct and below {ambient_dim}")));
            }
        }
        let x_min_core = core.argmin::<T>();
        let f_min = core.eval(&x_min_core)?;
        Ok(Self { core, ambient_dim, axes, seed: 0, f_min, x_min_core })
    }

    pub fn core(&self) -> Core {
        self.core
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn effective_dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn f_min(&self) -> T {
        self.f_min
    }

    pub fn core_argmin(&self) -> &[T] {
        &self.x_min_core
    }

    /// Evaluates at `x ∈ [-1, 1]^D`.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "objective takes {} inputs, got {}",
                self.ambient_dim,
                x.len()
            )));
        }
        let two = T::lit(2.0);
        let u: Vec<T> = self.axes.iter().map(|&a| (x[a] + T::one()) / two).collect();
        self.core.eval(&u)
    }

    /// A point of `X` attaining `f_min`, zero off the active axes.
    pub fn lifted_argmin(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.ambient_dim];
        for (&a, &u) in self.axes.iter().zip(&self.x_min_core) {
            x[a] = T::lit(2.0) * u - T::one();
        }
        x
    }

    /// `best_observed − f_min`; a shortfall within 1e-9 is read as zero,
    /// beyond that the recorded minimum is wrong.
    pub fn optimality_gap(&self, best_observed: T) -> Result<T> {
        let gap = best_observed - self.f_min;
        if gap >= T::zero() {
            Ok(gap)
        } else if gap >= -T::lit(1e-9) {
            Ok(T::zero())
        } else {
            Err(Error::NegativeGap { gap: gap.as_f64() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_minimum() {
        let v: f64 = hartmann6(&[0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573]).unwrap();
        assert!((v - -3.322_368_011_391_339).abs() < 1e-12);
    }

    #[test]
    fn frozen_values() {
        // Evaluated with an independent implementation before this one.
        let zero = hartmann6(&[0.0f64; 6]).unwrap();
        assert!((zero - -0.005_089_112_883_664_44).abs() < 1e-15);
        let mut rev = HARTMANN6_ARGMIN;
        rev.reverse();
        let mut tab = [0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573];
        tab.reverse();
        let v: f64 = hartmann6(&tab).unwrap();
        assert!((v - -0.182_022_619_136_388_73).abs() < 1e-12);
        assert!(hartmann6(&rev).unwrap() > -3.0);
    }

    #[test]
    fn refined_argmin_is_at_least_as_low() {
        let refined = hartmann6(&HARTMANN6_ARGMIN).unwrap();
        let tab = hartmann6(&[0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573]).unwrap();
        assert!(refined <= tab);
        assert!((refined - -3.322_368_011_415_515).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(matches!(hartmann6(&[1.1, 0.0, 0.0, 0.0, 0.0, 0.0]), Err(Error::OutOfDomain { index: 0, .. })));
        assert!(hartmann6(&[0.5; 5]).is_err());
    }

    #[test]
    fn identity_axes() {
        let o: ObjectiveInstance<f64> = ObjectiveInstance::with_axes(Core::Hartmann6, 6, (0..6).collect()).unwrap();
        let x = [0.1, -0.3, 0.5, 0.9, -1.0, 0.2];
        let u: Vec<f64> = x.iter().map(|v| (v + 1.0) / 2.0).collect();
        assert_eq!(o.eval(&x).unwrap(), hartmann6(&u).unwrap());
    }

    #[test]
    fn lifted_argmin_has_zero_gap() {
        let o: ObjectiveInstance<f64> = embed_objective(Core::Hartmann6, 25, 4).unwrap();
        let v = o.eval(&o.lifted_argmin()).unwrap();
        assert_eq!(o.optimality_gap(v).unwrap(), 0.0);
    }

    #[test]
    fn gap_rules() {
        let o: ObjectiveInstance<f64> = embed_objective(Core::Hartmann6, 8, 0).unwrap();
        let f = o.f_min();
        assert_eq!(o.optimality_gap(f).unwrap(), 0.0);
        assert!((o.optimality_gap(f + 1.5).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(o.optimality_gap(f - 1e-12).unwrap(), 0.0);
        assert!(matches!(o.optimality_gap(f - 1e-6), Err(Error::NegativeGap { .. })));
    }

    #[test]
    fn too_small_ambient_dimension() {
        assert!(embed_objective::<f64>(Core::Hartmann6, 5, 0).is_err());
        assert!(ObjectiveInstance::<f64>::with_axes(Core::Hartmann6, 6, vec![0, 1, 2, 3, 4, 4]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let o: ObjectiveInstance<f64> = embed_objective(Core::Hartmann6, 25, 17).unwrap();
        let v = serde_json::to_value(&o).unwrap();
        assert_eq!(v["core"], "hartmann6");
        assert_eq!(v["D"], 25);
        assert_eq!(v["seed"], 17);
        let back: ObjectiveInstance<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, o);
    }
}
