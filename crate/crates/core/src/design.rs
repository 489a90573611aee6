//! Space-filling point sets: Latin hypercubes, shifted Halton sequences and
//! greedy maximin subset selection.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::rng::Rng;
use crate::scalar::{dist, Real};

/// Latin hypercube of `n` points in `[-half_width, half_width]^dim`.
pub fn latin_hypercube<T: Real>(n: usize, dim: usize, half_width: T, rng: &mut Rng) -> Vec<Vec<T>> {
    let mut points = vec![vec![T::zero(); dim]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    let nf = n as f64;
    for k in 0..dim {
        perm.shuffle(rng);
        for (p, &slot) in points.iter_mut().zip(&perm) {
            let u = (slot as f64 + rng.gen::<f64>()) / nf;
            p[k] = to_box(u, half_width);
        }
    }
    points
}

/// One point drawn uniformly in `[-half_width, half_width]^dim`.
pub fn uniform_point<T: Real>(dim: usize, half_width: T, rng: &mut Rng) -> Vec<T> {
    (0..dim).map(|_| to_box(rng.gen::<f64>(), half_width)).collect()
}

#[inline]
fn to_box<T: Real>(u: f64, half_width: T) -> T {
    T::lit(2.0 * u - 1.0) * half_width
}

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton sequence with a random Cranley–Patterson shift, mapped to the box.
///
/// Supports up to 32 dimensions.
pub fn shifted_halton<T: Real>(n: usize, dim: usize, half_width: T, rng: &mut Rng) -> Vec<Vec<T>> {
    assert!(dim <= PRIMES.len(), "Halton sequence supports at most {} dimensions", PRIMES.len());
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (0..n)
        .map(|i| {
            (0..dim)
                .map(|k| {
                    let u = (radical_inverse(i as u64 + 1, PRIMES[k] as u64) + shift[k]).fract();
                    to_box(u, half_width)
                })
                .collect()
        })
        .collect()
}

/// Greedily selects `k` indices of `points` maximizing the minimum pairwise
/// Euclidean distance: the farthest pair first, then repeatedly the point
/// farthest from the current selection. Ties go to the lowest index.
pub fn greedy_maximin<T: Real>(points: &[Vec<T>], k: usize) -> Vec<usize> {
    let n = points.len();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    if k == 1 || n == 1 {
        return vec![0];
    }
    let (mut bi, mut bj, mut best) = (0, 1, T::neg_infinity());
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&points[i], &points[j]);
            if d > best {
                best = d;
                bi = i;
                bj = j;
            }
        }
    }
    let mut chosen = vec![bi, bj];
    let mut nearest: Vec<T> = (0..n)
        .map(|i| dist(&points[i], &points[bi]).min(dist(&points[i], &points[bj])))
        .collect();
    while chosen.len() < k {
        let mut pick = None;
        let mut far = T::neg_infinity();
        for (i, &d) in nearest.iter().enumerate() {
            if !chosen.contains(&i) && d > far {
                far = d;
                pick = Some(i);
            }
        }
        let Some(p) = pick else { break };
        chosen.push(p);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dist(&points[i], &points[p]));
        }
    }
    chosen
}

/// Smallest pairwise distance of a point set (`+inf` below two points).
pub fn min_pairwise_distance<T: Real>(points: &[Vec<T>]) -> T {
    let mut m = T::infinity();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min(dist(&points[i], &points[j]));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn lhs_stratifies_every_axis() {
        let n = 12;
        let pts: Vec<Vec<f64>> = latin_hypercube(n, 3, 2.0, &mut seeded(3));
        for k in 0..3 {
            let mut bins: Vec<usize> = pts
                .iter()
                .map(|p| (((p[k] / 2.0 + 1.0) / 2.0) * n as f64).floor() as usize)
                .collect();
            bins.sort_unstable();
            assert_eq!(bins, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn halton_stays_in_box() {
        let pts: Vec<Vec<f32>> = shifted_halton(500, 6, 1.5, &mut seeded(1));
        assert!(pts.iter().flatten().all(|v| v.abs() <= 1.5));
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn maximin_on_a_line_takes_the_ends() {
        let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.5, 0.55, 1.0].iter().map(|&v| vec![v]).collect();
        let mut sel = greedy_maximin(&pts, 3);
        sel.sort_unstable();
        assert_eq!(sel, vec![0, 2, 4]);
    }
}
