mod common;

use common::*;
use rand::Rng;
use proptest::prelude::*;
use sliced_core::measures::project_1d;
use sliced_core::ot_exact::{dual_gap, w1_exact};
use sliced_core::slicing::sample_grassmannian;
use sliced_core::{w1_cdf, DiscreteMeasure};

#[test]
fn matches_hungarian_on_uniform_instances() {
    let mut r = rng(1);
    for n in [1, 2, 3, 5, 8, 13, 21, 34, 64] {
        for d in [1, 2, 3] {
            let a = distinct_points(&mut r, d, n);
            let b = distinct_points(&mut r, d, n);
            let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| euclid(x, y)).collect()).collect();
            let want = hungarian(&cost) / n as f64;
            let plan = w1_exact(
                &DiscreteMeasure::uniform(&a).unwrap(),
                &DiscreteMeasure::uniform(&b).unwrap(),
            )
            .unwrap();
            assert!((plan.cost - want).abs() < 1e-9, "n={n} d={d}: {} vs {want}", plan.cost);
        }
    }
}

#[test]
fn certificates_on_degenerate_lattice_instances() {
    let mut r = rng(2);
    for _ in 0..200 {
        let d = r.random_range(1..=3);
        let na = r.random_range(1..=25);
        let a = lattice_measure(&mut r, d, na);
        let nb = r.random_range(1..=25);
        let b = lattice_measure(&mut r, d, nb);
        let plan = w1_exact(&a, &b).unwrap();
        assert!(plan.marginal_error() < 1e-9);
        assert!(plan.entries.iter().all(|e| e.2 >= 0.0));
        assert!(plan.slackness_violation(&a, &b).unwrap() < 1e-7);
        assert!(dual_gap(&plan).unwrap() <= 1e-7 * (1.0 + plan.cost));
    }
}

#[test]
fn one_dimensional_instances_agree_with_cdf_formula() {
    let mut r = rng(3);
    for _ in 0..300 {
        let na = r.random_range(1..=12);
        let a = lattice_measure(&mut r, 1, na);
        let nb = r.random_range(1..=12);
        let b = random_measure(&mut r, 1, nb);
        let exact = w1_exact(&a, &b).unwrap().cost;
        let cdf = w1_cdf(&project_1d(&a, &[1.0]).unwrap(), &project_1d(&b, &[1.0]).unwrap()).value;
        assert!((exact - cdf).abs() < 1e-9, "{exact} vs {cdf}");
    }
}

#[test]
fn projection_never_increases_cost() {
    let mut r = rng(4);
    for _ in 0..40 {
        let d = r.random_range(2..=5);
        let a = random_measure(&mut r, d, 15);
        let b = random_measure(&mut r, d, 15);
        let full = w1_exact(&a, &b).unwrap().cost;
        for k in 1..d {
            for f in sample_grassmannian(d, k, 3, r.random()).unwrap() {
                let p = w1_exact(&f.project(&a).unwrap(), &f.project(&b).unwrap()).unwrap().cost;
                assert!(p <= full + 1e-9, "k={k}: {p} > {full}");
            }
        }
    }
}

#[test]
fn deterministic_output() {
    let mut r = rng(5);
    let a = lattice_measure(&mut r, 2, 30);
    let b = lattice_measure(&mut r, 2, 30);
    assert_eq!(w1_exact(&a, &b).unwrap(), w1_exact(&a, &b).unwrap());
}

#[test]
fn moderate_instance_certifies() {
    let mut r = rng(6);
    let a = random_measure(&mut r, 3, 400);
    let b = random_measure(&mut r, 3, 400);
    let plan = w1_exact(&a, &b).unwrap();
    assert!(plan.marginal_error() < 1e-9);
    assert!(dual_gap(&plan).unwrap() <= 1e-7 * (1.0 + plan.cost));
    assert!(plan.slackness_violation(&a, &b).unwrap() < 1e-7);
}

fn measure_strategy(d: usize, max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((prop::collection::vec(-3.0f64..3.0, d), 0.01f64..1.0), 1..=max_atoms).prop_map(
        |atoms| {
            let (p, w): (Vec<Vec<f64>>, Vec<f64>) = atoms.into_iter().unzip();
            DiscreteMeasure::new(&p, &w).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric(a in measure_strategy(2, 30), b in measure_strategy(2, 30)) {
        let ab = w1_exact(&a, &b).unwrap().cost;
        let ba = w1_exact(&b, &a).unwrap().cost;
        prop_assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn triangle(a in measure_strategy(3, 20), b in measure_strategy(3, 20), c in measure_strategy(3, 20)) {
        let ab = w1_exact(&a, &b).unwrap().cost;
        let bc = w1_exact(&b, &c).unwrap().cost;
        let ac = w1_exact(&a, &c).unwrap().cost;
        prop_assert!(ac <= ab + bc + 1e-8);
    }

    #[test]
    fn self_distance_zero(a in measure_strategy(3, 30)) {
        prop_assert!(w1_exact(&a, &a).unwrap().cost.abs() < 1e-12);
    }
}
