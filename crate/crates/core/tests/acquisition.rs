mod common;

use common::*;
use rand_distr::{Distribution, StandardNormal};
use rembo::{expected_improvement, maximize_ei, Dataset64, DistanceMode, Embedding64, GpModel64, KernelFamily, KernelSpec};

#[test]
fn closed_form_agrees_with_monte_carlo() {
    let mut r = rng(2024);
    for _ in 0..20 {
        let mean = r_uniform(&mut r, -2.0, 2.0);
        let sd = r_uniform(&mut r, 0.05, 2.0);
        let f_min = r_uniform(&mut r, -2.0, 2.0);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut r);
            let g = (f_min - (mean + sd * z)).max(0.0);
            s += g;
            s2 += g * g;
        }
        let mc = s / n as f64;
        let se = ((s2 / n as f64 - mc * mc) / n as f64).sqrt();
        let ei = expected_improvement(mean, sd, f_min);
        assert!((ei - mc).abs() <= 3.0 * se + 1e-12, "m={mean} s={sd} f={f_min}: {ei} vs {mc} ± {se}");
    }
}

fn r_uniform(r: &mut rand_chacha::ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    r.gen_range(lo..hi)
}

#[test]
fn vanishing_sd_limit() {
    for (m, f) in [(0.0, 1.0), (1.0, 0.0), (-0.3, -0.2), (2.0, 2.0)] {
        let ei = expected_improvement(m, 1e-14, f);
        assert!((ei - f64::max(f - m, 0.0)).abs() <= 1e-9);
    }
}

#[test]
fn nonnegative_and_monotone_in_incumbent() {
    let mut r = rng(1);
    for _ in 0..2000 {
        let m = r_uniform(&mut r, -5.0, 5.0);
        let s = r_uniform(&mut r, 0.0, 3.0);
        let f = r_uniform(&mut r, -5.0, 5.0);
        let a = expected_improvement(m, s, f);
        assert!(a >= 0.0);
        assert!(expected_improvement(m, s, f + 0.1) >= a);
    }
}

fn deep_center_model(e: &Embedding64) -> GpModel64<'_> {
    let data = Dataset64::new(vec![vec![0.0, 0.0], vec![1.5, -1.5]], vec![-10.0, 0.0]).unwrap();
    let s = KernelSpec::new(KernelFamily::Matern52, 25.0, 0.8, DistanceMode::YDist).unwrap();
    GpModel64::condition(data, s, e, 1e-8 * 25.0).unwrap()
}

#[test]
fn maximizer_stays_in_box_and_is_deterministic() {
    let e = Embedding64::sample(10, 2, 0).unwrap();
    let m = deep_center_model(&e);
    let a = maximize_ei(&m, 2.0, 4000, 7);
    let b = maximize_ei(&m, 2.0, 4000, 7);
    assert_eq!(a, b);
    assert!(a.y_star.iter().all(|v| v.abs() <= 2.0));
    assert!(a.n_evals <= 4000);
    assert!(a.ei_value > 0.0);
    // EI vanishes at the noiseless incumbent.
    assert!(norm(&a.y_star) > 1e-3);
}

#[test]
fn single_evaluation_budget() {
    let e = Embedding64::sample(10, 2, 0).unwrap();
    let m = deep_center_model(&e);
    let a = maximize_ei(&m, 2.0, 1, 3);
    assert_eq!(a.n_evals, 1);
    let f_min = m.data().min_observation();
    let (mean, sd) = m.predict(&a.y_star);
    assert_eq!(a.ei_value, expected_improvement(mean, sd, f_min));
}
