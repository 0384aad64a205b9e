mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;
use sliced_core::transforms::*;

use common::{rng, simpson};

fn gaussian_nd(x: &[f64]) -> f64 {
    (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp()
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

/// Orthonormal basis of `θ⊥` by Gram–Schmidt against the standard basis.
fn complement(theta: &[f64]) -> Vec<Vec<f64>> {
    let d = theta.len();
    let mut basis: Vec<Vec<f64>> = vec![theta.to_vec()];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        for b in &basis {
            let p: f64 = e.iter().zip(b).map(|(a, c)| a * c).sum();
            e.iter_mut().zip(b).for_each(|(a, c)| *a -= p * c);
        }
        let n = e.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            basis.push(e.into_iter().map(|a| a / n).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

fn radon_by_quadrature(theta: &[f64], t: f64) -> f64 {
    let perp = complement(theta);
    let point = |coef: &[f64]| -> Vec<f64> {
        (0..theta.len())
            .map(|i| t * theta[i] + coef.iter().zip(&perp).map(|(c, b)| c * b[i]).sum::<f64>())
            .collect()
    };
    match perp.len() {
        1 => simpson(|a| gaussian_nd(&point(&[a])), -6.0, 6.0, 2000),
        2 => simpson(
            |a| simpson(|b| gaussian_nd(&point(&[a, b])), -6.0, 6.0, 600),
            -6.0,
            6.0,
            600,
        ),
        _ => unreachable!(),
    }
}

#[test]
fn radon_gaussian_matches_hyperplane_quadrature() {
    let mut r = rng(11);
    for d in 2..=3 {
        for _ in 0..3 {
            let theta = unit((0..d).map(|_| r.random_range(-1.0..1.0)).collect());
            for &t in &[0.0, 0.4, 1.0] {
                let q = radon_by_quadrature(&theta, t);
                let v = radon_gaussian(&theta, t).unwrap();
                assert!((q - v).abs() < 1e-10, "d={d} t={t}: {q} vs {v}");
            }
        }
    }
    let theta = unit(vec![0.3, -0.2, 0.9]);
    assert!((radon_gaussian(&theta, 0.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((radon_gaussian(&theta, 1.0).unwrap() - (-PI).exp()).abs() < 1e-15);
}

#[test]
fn radon_gaussian_is_direction_independent() {
    let mut r = rng(12);
    let a = unit((0..4).map(|_| r.random_range(-1.0..1.0)).collect());
    let b = unit((0..4).map(|_| r.random_range(-1.0..1.0)).collect());
    for &t in &[0.0, 0.3, 1.7] {
        assert!((radon_gaussian(&a, t).unwrap() - radon_gaussian(&b, t).unwrap()).abs() < 1e-12);
    }
    assert!(radon_gaussian(&[1.0, 1.0], 0.0).is_err());
}

#[test]
fn fourier_slice_formula_for_the_gaussian() {
    let mut r = rng(13);
    for d in [2, 3, 5] {
        let theta = unit((0..d).map(|_| r.random_range(-1.0..1.0)).collect());
        for &rad in &[0.0, 0.3, 1.0, 2.0] {
            let lhs = radon_gaussian_fourier(&theta, rad).unwrap();
            let xi: Vec<f64> = theta.iter().map(|v| rad * v).collect();
            let rhs = gaussian_fourier(&xi);
            assert!((lhs - rhs).abs() < 1e-10, "d={d} r={rad}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn hilbert_outside_support_matches_direct_quadrature() {
    for (k, radius) in [(0, 1.0), (1, 0.7), (2, 1.3)] {
        let f = TestFunction1D::bump_derivative(k, BUMP_EXPONENT, radius).unwrap();
        let t = 2.0 * radius;
        let direct = simpson(|s| f.evaluate(s) / (t - s), -radius, radius, 20_000) / PI;
        let v = hilbert(&f, t).unwrap();
        assert!((v - direct).abs() < 1e-10, "k={k}: {v} vs {direct}");
    }
}

#[test]
fn hilbert_fft_agrees_with_principal_value() {
    let grid = PeriodicGrid {
        n: 1 << 21,
        period: 4096.0,
    };
    let mut r = rng(14);
    for _ in 0..3 {
        let k = r.random_range(0..3);
        let radius = r.random_range(0.5..1.5);
        let center = r.random_range(-0.5..0.5);
        let f = TestFunction1D::bump_derivative(k, BUMP_EXPONENT, radius)
            .unwrap()
            .shifted(center);
        let spectral = hilbert_fft(&f, grid).unwrap();
        let (a, b) = f.support();
        let j0 = grid.index_of((a / grid.spacing()).ceil() * grid.spacing()).unwrap();
        let j1 = grid.index_of((b / grid.spacing()).floor() * grid.spacing()).unwrap();
        let mut worst: f64 = 0.0;
        for j in (j0..=j1).step_by(37) {
            let pv = hilbert(&f, grid.coord(j)).unwrap();
            worst = worst.max((pv - spectral[j]).abs());
        }
        assert!(worst < 1e-6, "k={k} R={radius} c={center}: {worst:e}");
    }
}

#[test]
fn hilbert_is_anti_self_adjoint() {
    let mut r = rng(15);
    let rule = sliced_core::quadrature::GaussLegendre::new(48);
    for _ in 0..4 {
        let f = TestFunction1D::bump_derivative(r.random_range(0..2), BUMP_EXPONENT, r.random_range(0.5..1.5))
            .unwrap()
            .shifted(r.random_range(-1.0..1.0));
        let g = TestFunction1D::bump_derivative(r.random_range(0..2), BUMP_EXPONENT, r.random_range(0.5..1.5))
            .unwrap()
            .shifted(r.random_range(-1.0..1.0));
        let pair = |u: &TestFunction1D, v: &TestFunction1D| {
            let (a, b) = v.support();
            rule.integrate(|s| hilbert(u, s).unwrap() * v.evaluate(s), a, b)
        };
        let s = pair(&f, &g) + pair(&g, &f);
        assert!(s.abs() < 1e-6, "{s:e}");
    }
}

#[test]
fn hilbert_of_gaussian_matches_principal_value() {
    for &t in &[0.0, 0.2, 0.7, 1.5, 3.0] {
        let psi = |x: f64| (-PI * x * x).exp();
        let limit = 4.0 * PI * t * psi(t);
        let pv = simpson(
            |s| if s == 0.0 { limit } else { (psi(t - s) - psi(t + s)) / s },
            0.0,
            12.0,
            24_000,
        ) / PI;
        assert!((hilbert_gaussian(t) - pv).abs() < 1e-10, "t={t}");
    }
}

#[test]
fn hilbert_tail_slopes() {
    let grid = log_grid(4.0, 64.0, 13);
    let wide = log_grid(4.0, 128.0, 15);
    for k in 0..4 {
        let fit = hilbert_decay_check(k, &grid).unwrap();
        let expected = -(k as f64 + 1.0);
        let band = if k == 0 { 0.15 } else { 0.2 };
        assert!((fit.slope - expected).abs() < band, "k={k}: slope {}", fit.slope);
        assert!(fit.trimmed.is_empty());
        let doubled = hilbert_decay_check(k, &wide).unwrap();
        let ratio = doubled.sup_scaled / fit.sup_scaled;
        assert!((0.8..1.2).contains(&ratio), "k={k}: ratio {ratio}");
    }
}

/// `R_j f(x)` for `x` away from the unit disc, by iterated Gauss–Legendre
/// over the disc in Cartesian coordinates.
fn riesz_disc_direct(f: &BumpField, j: usize, x: &[f64]) -> f64 {
    let rule = sliced_core::quadrature::GaussLegendre::new(96);
    let c = 1.0 / (2.0 * PI);
    rule.integrate(
        |y1| {
            let h = (1.0 - y1 * y1).max(0.0).sqrt();
            rule.integrate(
                |y2| {
                    let y = [y1, y2];
                    let dz = [x[0] - y1, x[1] - y2];
                    let r2 = dz[0] * dz[0] + dz[1] * dz[1];
                    dz[j] / r2.powf(1.5) * f.evaluate(&y)
                },
                -h,
                h,
            )
        },
        -1.0,
        1.0,
    ) * c
}

#[test]
fn riesz_far_field_matches_cartesian_quadrature() {
    let bump = BumpFunction::new(2, BUMP_EXPONENT, 1.0).unwrap();
    let fields = [BumpField::value(bump.clone()), BumpField::partial(bump, 1)];
    for f in &fields {
        for x in [[8.0, 0.0], [8.0 / 2f64.sqrt(), -8.0 / 2f64.sqrt()], [3.0, 2.0]] {
            for j in 0..2 {
                let want = riesz_disc_direct(f, j, &x);
                let got = riesz(f, j, &x).unwrap();
                assert!((want - got).abs() < 1e-8, "x={x:?} j={j}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn riesz_tail_slopes_need_zero_mean() {
    let grid = log_grid(4.0, 32.0, 9);
    for k in 1..=2 {
        let zero_mean = riesz_decay_check(k, &grid, true).unwrap();
        let plain = riesz_decay_check(k, &grid, false).unwrap();
        let kf = k as f64;
        assert!((zero_mean.slope + kf + 1.0).abs() < 0.25, "k={k}: {}", zero_mean.slope);
        assert!((plain.slope + kf).abs() < 0.25, "k={k}: {}", plain.slope);
        assert!(plain.slope > zero_mean.slope + 0.5);
    }
}

#[test]
fn representation_in_three_dimensions() {
    let rep = representation_check(3, &radial_points(3, &[0.0, 0.5, 1.0])).unwrap();
    assert!(rep.max_error <= 1e-3, "{}", rep.max_error);
    assert_eq!(rep.resolved_sign, rep.nominal_sign);
    assert!((rep.prefactor + 1.0 / (8.0 * PI * PI)).abs() < 1e-15);
}

#[test]
fn representation_in_two_dimensions_resolves_sign() {
    let rep = representation_check(2, &radial_points(2, &[0.0, 0.3, 0.5, 1.0])).unwrap();
    let origin = &rep.points[0];
    assert!((origin.reconstruction - 1.0).abs() <= 1e-3);
    assert!(rep.max_error <= 1e-3, "{}", rep.max_error);
    assert!(rep.rejected_sign_error > 1.0);
    assert_eq!(rep.resolved_sign, 1.0);
    assert_eq!(rep.nominal_sign, -1.0);
}

#[test]
fn half_laplacian_decomposes_into_riesz_transforms() {
    for k in 1..=2 {
        let rep = riesz_decomposition_check(k, &default_decomposition_points(k), default_decomposition_grid(k)).unwrap();
        assert!(rep.max_error < 1e-5, "k={k}: {:?}", rep);
    }
}

#[test]
fn decomposition_rejects_off_grid_points() {
    let grid = default_decomposition_grid(2);
    assert!(riesz_decomposition_check(2, &[vec![0.01, 0.0]], grid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shifted_bump_derivatives_keep_vanishing_moments(
        k in 0usize..4,
        radius in 0.3f64..2.0,
        center in -1.0f64..1.0,
    ) {
        let f = TestFunction1D::bump_derivative(k, BUMP_EXPONENT, radius).unwrap().shifted(center);
        let scale = f.sup_abs() * radius * (1.0 + center.abs() + radius).powi(k as i32);
        for j in 0..k {
            prop_assert!(f.moment(j).abs() < 1e-10 * scale.max(1.0));
        }
        let coarse = f.lipschitz_estimate(2000);
        let fine = f.lipschitz_estimate(8000);
        prop_assert!(coarse.is_finite() && fine.is_finite());
        prop_assert!(coarse <= fine * 1.01);
    }

    #[test]
    fn bump_partials_match_finite_differences(
        y in proptest::collection::vec(-0.7f64..0.7, 3),
        j in 0usize..3,
        i in 0usize..3,
    ) {
        let b = BumpFunction::new(3, BUMP_EXPONENT, 1.3).unwrap();
        let step = |v: &[f64], idx: usize, h: f64| {
            let mut w = v.to_vec();
            w[idx] += h;
            w
        };
        for h in [1e-3, 5e-4] {
            let fd = (b.evaluate(&step(&y, j, h)) - b.evaluate(&step(&y, j, -h))) / (2.0 * h);
            prop_assert!((fd - b.partial(j, &y)).abs() < 200.0 * h * h);
            let fd2 = (b.partial(j, &step(&y, i, h)) - b.partial(j, &step(&y, i, -h))) / (2.0 * h);
            prop_assert!((fd2 - b.partial2(i, j, &y)).abs() < 2000.0 * h * h);
        }
        let outside = vec![1.3, 0.1, 0.0];
        prop_assert_eq!(b.evaluate(&outside), 0.0);
        prop_assert_eq!(b.partial(j, &outside), 0.0);
    }
}
