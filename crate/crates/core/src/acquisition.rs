//! Expected Improvement and its maximization over the low-dimensional box.

use serde::{Deserialize, Serialize};

use crate::design::shifted_halton;
use crate::gp::GpModel;
use crate::rng::seeded;
use crate::scalar::Real;

/// Number of best quasi-random samples handed to the local polish.
pub const POLISH_STARTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct AcqResult<T: Real> {
    pub y_star: Vec<T>,
    pub ei_value: T,
    pub n_evals: usize,
}

fn std_normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn std_normal_cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u / std::f64::consts::SQRT_2)
}

/// `E[max(f_min − Z, 0)]` for `Z ~ N(mean, sd²)`:
/// `(f_min − m) Φ(u) + s φ(u)` with `u = (f_min − m)/s`.
pub fn expected_improvement<T: Real>(mean: T, sd: T, f_min: T) -> T {
    let (m, s, f) = (mean.as_f64(), sd.as_f64(), f_min.as_f64());
    let gain = f - m;
    if !(s > 0.0) {
        return T::lit(gain.max(0.0));
    }
    let u = gain / s;
    let ei = gain * std_normal_cdf(u) + s * std_normal_pdf(u);
    T::lit(ei.max(0.0))
}

/// Maximizes EI over `[-half_width, half_width]^d` with exactly `budget` EI
/// evaluations at most: `⌊0.8·budget⌋` (at least one) shifted-Halton samples,
/// then the remainder split between coordinate-descent polishes of the best
/// [`POLISH_STARTS`] samples. Ties resolve to the earliest candidate.
pub fn maximize_ei<T: Real>(model: &GpModel<'_, T>, half_width: T, budget: usize, seed: u64) -> AcqResult<T> {
    let dim = model.embedding().low_dim();
    let f_min = model.data().min_observation();
    let ei = |y: &[T]| {
        let (m, s) = model.predict(y);
        expected_improvement(m, s, f_min)
    };

    let budget = budget.max(1);
    let n_samples = ((budget as f64 * 0.8).floor() as usize).clamp(1, budget);
    let mut rng = seeded(seed);
    let samples: Vec<Vec<T>> = shifted_halton(n_samples, dim, half_width, &mut rng);
    let scores: Vec<T> = samples.iter().map(|y| ei(y)).collect();
    let mut evals = n_samples;

    let mut order: Vec<usize> = (0..n_samples).collect();
    // Stable sort keeps the lowest index first among equal scores.
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal));
    let starts: Vec<usize> = order.into_iter().take(POLISH_STARTS).collect();

    let mut best_y = samples[starts[0]].clone();
    let mut best_v = scores[starts[0]];

    let remaining = budget - n_samples;
    let per_start = remaining / starts.len();
    if per_start > 0 {
        for &s in &starts {
            let (y, v, used) = coordinate_polish(&ei, samples[s].clone(), scores[s], half_width, per_start);
            evals += used;
            if v > best_v {
                best_v = v;
                best_y = y;
            }
        }
    }
    AcqResult { y_star: best_y, ei_value: best_v, n_evals: evals }
}

/// Box-constrained coordinate ascent with steps halving after a sweep without
/// progress.
fn coordinate_polish<T: Real>(
    f: &impl Fn(&[T]) -> T,
    mut y: Vec<T>,
    mut fy: T,
    half_width: T,
    budget: usize,
) -> (Vec<T>, T, usize) {
    let mut step = half_width * T::lit(0.1);
    let floor = half_width * T::lit(1e-7);
    let mut used = 0;
    while used < budget && step > floor {
        let mut improved = false;
        for k in 0..y.len() {
            for sign in [T::one(), -T::one()] {
                if used >= budget {
                    break;
                }
                let moved = (y[k] + sign * step).max(-half_width).min(half_width);
                if moved == y[k] {
                    continue;
                }
                let mut cand = y.clone();
                cand[k] = moved;
                let fc = f(&cand);
                used += 1;
                if fc > fy {
                    y = cand;
                    fy = fc;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step = step / T::lit(2.0);
        }
    }
    (y, fy, used)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_and_hopeless_cases() {
        assert_eq!(expected_improvement(1.0, 0.0, 1.0), 0.0);
        assert_eq!(expected_improvement(0.5, 0.0, 1.0), 0.5);
        assert!(expected_improvement(11.0, 1e-6, 1.0) < 1e-12);
    }

    #[test]
    fn zero_gain_unit_sd_is_pdf_at_zero() {
        let v: f64 = expected_improvement(2.0, 1.0, 2.0);
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn increasing_in_sd() {
        let vals: Vec<f64> = (1..50).map(|i| expected_improvement(0.3, i as f64 * 0.05, 0.0)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn cdf_sanity() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((std_normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
    }
}
