mod common;

use proptest::prelude::*;
use rand::Rng;
use sliced_core::counterexample::{
    discretize, discretize_signed_atoms, inner_cancellation, projected_cdf, sw1_mu_mueps, CounterexampleFamily,
    QuadSpec,
};
use sliced_core::quadrature::{log_log_fit, GaussLegendre};
use sliced_core::slicing::{msw, sw};
use sliced_core::w1_signed;
use statrs::function::beta::beta_reg;
use std::f64::consts::FRAC_PI_2;

/// Marginal CDF of `μ` through the regularized incomplete beta of statrs.
fn marginal_cdf(d: usize, t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = 1.5 * d as f64 + 1.0;
    beta_reg(a, a, 0.5 * (1.0 + t))
}

fn panels(rule: &GaussLegendre, bps: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for w in bps.windows(2) {
        if w[1] > w[0] {
            total += rule.integrate(&mut f, w[0], w[1]);
        }
    }
    total
}

fn uniform_breaks(a: f64, b: f64, n: usize, extra: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    v.extend(extra.iter().copied().filter(|x| *x > a && *x < b));
    v.sort_by(f64::total_cmp);
    v
}

/// `SW₁(μ, μ_ε)` for `d = 3`, written from scratch: the vertical component
/// of a uniform direction is uniform on `[−1, 1]`, parametrized here as
/// `z = sin φ`.
fn sw1_d3_oracle(eps: f64) -> f64 {
    let fam = CounterexampleFamily::new(3).unwrap();
    let g = |s: f64| fam.g.eval(s);
    let rule = GaussLegendre::new(8);
    let phi_breaks = uniform_breaks(0.0, FRAC_PI_2, 48, &[]);
    panels(&rule, &phi_breaks, |phi| {
        let (z, c) = phi.sin_cos();
        let h = eps * z;
        let reach = c + h;
        let t_breaks = uniform_breaks(-reach, reach, 96, &[-c - h, -c + h, c - h, c + h, -c, c]);
        let inner = panels(&rule, &t_breaks, |t| {
            let base = marginal_cdf(3, t / c);
            let mut kinks = vec![-1.0, 1.0];
            if h > 0.0 {
                kinks.extend([(t - c) / h, (t + c) / h].into_iter().filter(|s| s.abs() < 1.0));
            }
            kinks.sort_by(f64::total_cmp);
            let mut breaks = Vec::new();
            for w in kinks.windows(2) {
                breaks.extend(uniform_breaks(w[0], w[1], 4, &[]));
            }
            breaks.dedup();
            let moved = panels(&rule, &breaks, |s| g(s) * marginal_cdf(3, (t - h * s) / c));
            (base - moved).abs()
        });
        inner * c
    })
}

#[test]
fn sw1_matches_independent_quadrature() {
    let fam = CounterexampleFamily::new(3).unwrap();
    for eps in [0.3, 0.15] {
        let lib = sw1_mu_mueps(&fam, eps, &QuadSpec::default()).unwrap().total;
        let oracle = sw1_d3_oracle(eps);
        assert!((lib / oracle - 1.0).abs() < 5e-3, "eps {eps}: {lib} vs {oracle}");
    }
}

#[test]
fn sw1_self_convergence() {
    let fam = CounterexampleFamily::new(3).unwrap();
    let spec = QuadSpec::default();
    let coarse = sw1_mu_mueps(&fam, 0.2, &spec).unwrap().total;
    let fine = sw1_mu_mueps(&fam, 0.2, &spec.refined()).unwrap().total;
    assert!((coarse / fine - 1.0).abs() < 1e-4, "{coarse} vs {fine}");
    assert!((fine - 3.158_488_645_8e-4).abs() < 1e-4 * fine);
}

#[test]
fn marginal_density_exponent_from_ball_integral() {
    // marginal of (1 − |x|²)^{d+1} on the unit ball of R^{d−1} at offset t
    let rule = GaussLegendre::new(40);
    let marginal = |d: usize, t: f64| -> f64 {
        let rho2: f64 = 1.0 - t * t;
        let rho = rho2.sqrt();
        match d {
            3 => rule.integrate(|y| (rho2 - y * y).powi(4), -rho, rho),
            4 => rule.integrate(|r| 2.0 * std::f64::consts::PI * r * (rho2 - r * r).powi(5), 0.0, rho),
            _ => unreachable!(),
        }
    };
    for d in [3, 4] {
        let fam = CounterexampleFamily::new(d).unwrap();
        let at0 = marginal(d, 0.0);
        for t in [0.1, 0.4, 0.7, 0.95] {
            let expected = marginal(d, t) / at0;
            let got = fam.f(t) / fam.f(0.0);
            assert!((got / expected - 1.0).abs() < 1e-10, "d={d} t={t}");
        }
    }
}

#[test]
fn marginal_cdf_matches_statrs() {
    for d in [3, 4, 5] {
        let fam = CounterexampleFamily::new(d).unwrap();
        for t in [-0.9, -0.3, 0.0, 0.2, 0.77] {
            assert!((fam.cdf(t) - marginal_cdf(d, t)).abs() < 1e-12, "d={d} t={t}");
        }
    }
}

#[test]
fn inner_cancellation_order() {
    // moments through order d + 1 vanish and g is even, so the remainder is
    // of the first even order ≥ d + 2
    for d in [3, 4] {
        let fam = CounterexampleFamily::new(d).unwrap();
        let eps = [0.2, 0.1, 0.05, 0.025];
        let vals: Vec<f64> = eps
            .iter()
            .map(|&e| inner_cancellation(&fam, 0.7, e, 0.3, 32).unwrap().abs())
            .collect();
        let (slope, _, _) = log_log_fit(&eps, &vals);
        let order = (d + 2).next_multiple_of(2) as f64;
        assert!((slope - order).abs() < 0.1, "d={d}: slope {slope}");
    }
}

#[test]
fn discretized_w1_dominates_lower_bound() {
    // φ(x) = |x_d| is 1-Lipschitz and the split rules integrate |s| g exactly
    let fam = CounterexampleFamily::new(3).unwrap();
    for eps in [0.3, 0.1] {
        let split = discretize(&fam, eps, 6, 8).unwrap();
        let w = w1_signed(&split).unwrap();
        let atoms = discretize_signed_atoms(&fam, eps, 6, 8).unwrap();
        let pairing: f64 = -atoms.iter().map(|(p, w)| w * p[2].abs()).sum::<f64>();
        let lower = fam.w1_lower_bound(eps).unwrap();
        assert!((pairing - lower).abs() < 1e-12 * lower.max(1.0));
        assert!(w >= lower - 1e-10, "eps {eps}: {w} < {lower}");
    }
}

#[test]
fn discretized_sliced_distances_ordered() {
    let fam = CounterexampleFamily::new(3).unwrap();
    let split = discretize(&fam, 0.3, 6, 8).unwrap();
    let w = w1_signed(&split).unwrap() / split.mass;
    let s = sw(&split.positive, &split.negative, 1.0, 400, 3).unwrap();
    let m = msw(&split.positive, &split.negative, 64, 30, 3).unwrap();
    assert!(s.value <= m.value + 3.0 * s.std_error);
    assert!(m.value <= w + 1e-9);
}

/// Slow: the grid must resolve scale ε for the moment cancellation to show.
#[test]
#[ignore]
fn discretized_sw1_within_five_percent() {
    let fam = CounterexampleFamily::new(3).unwrap();
    let eps = 0.2;
    let split = discretize(&fam, eps, 540, 8).unwrap();
    let est = sw(&split.positive, &split.negative, 1.0, 4000, 5).unwrap();
    let exact = sw1_mu_mueps(&fam, eps, &QuadSpec::default()).unwrap().total;
    let got = split.mass * est.value;
    assert!((got / exact - 1.0).abs() < 0.05 + 3.0 * est.std_error / est.value, "{got} vs {exact}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projected_cdf_monotone(theta in -1.5f64..1.5, t0 in -1.2f64..1.2, dt in 0.0f64..0.5) {
        let fam = CounterexampleFamily::new(3).unwrap();
        let a = projected_cdf(&fam, theta, t0).unwrap();
        let b = projected_cdf(&fam, theta, t0 + dt).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-15);
    }

    #[test]
    fn lower_bound_linear(e1 in 0.01f64..0.5, e2 in 0.01f64..0.5) {
        let fam = CounterexampleFamily::new(3).unwrap();
        let r = fam.w1_lower_bound(e1).unwrap() / fam.w1_lower_bound(e2).unwrap();
        prop_assert!((r - e1 / e2).abs() < 1e-12 * (e1 / e2));
    }

    #[test]
    fn discretization_balanced(eps in 0.01f64..0.5, n in 2usize..8) {
        let fam = CounterexampleFamily::new(3).unwrap();
        let atoms = discretize_signed_atoms(&fam, eps, n, 6).unwrap();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        prop_assert!(total.abs() < 1e-12);
    }
}

#[test]
fn seeded_discretization_is_reproducible() {
    let fam = CounterexampleFamily::new(3).unwrap();
    let mut rng = common::rng(4);
    let eps: f64 = rng.random_range(0.05..0.4);
    let a = discretize_signed_atoms(&fam, eps, 5, 6).unwrap();
    let b = discretize_signed_atoms(&fam, eps, 5, 6).unwrap();
    assert_eq!(a, b);
}
