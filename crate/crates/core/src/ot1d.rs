//! Exact one-dimensional transport between step CDFs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::StepCDF;
use crate::special::expected_abs_normal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct W1Result {
    pub value: f64,
    pub method: &'static str,
}

/// `∫|F_a − F_b|`, summed exactly over the merged breakpoint partition.
pub fn w1_cdf(a: &StepCDF, b: &StepCDF) -> W1Result {
    let (xa, ca) = (a.breakpoints(), a.cumulative());
    let (xb, cb) = (b.breakpoints(), b.cumulative());
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev = f64::NAN;
    let mut sum = 0.0;
    let mut comp = 0.0;
    while i < xa.len() || j < xb.len() {
        let next = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        if !prev.is_nan() {
            let term = (fa - fb).abs() * (next - prev);
            let t = sum + term;
            comp += if sum >= term { (sum - t) + term } else { (term - t) + sum };
            sum = t;
        }
        while i < xa.len() && xa[i] == next {
            fa = ca[i];
            i += 1;
        }
        while j < xb.len() && xb[j] == next {
            fb = cb[j];
            j += 1;
        }
        prev = next;
    }
    W1Result {
        value: sum + comp,
        method: "cdf-l1",
    }
}

/// `(∫₀¹ |Q_a(u) − Q_b(u)|^p du)^{1/p}` from the monotone (north-west
/// corner) coupling of the sorted atoms.
pub fn wp_quantile(a: &StepCDF, b: &StepCDF, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("p must be a finite real >= 1, got {p}")));
    }
    let (xa, ca) = (a.breakpoints(), a.cumulative());
    let (xb, cb) = (b.breakpoints(), b.cumulative());
    let (mut i, mut j) = (0, 0);
    let mut level = 0.0;
    let mut sum = 0.0;
    let mut comp = 0.0;
    while i < xa.len() && j < xb.len() {
        let next = ca[i].min(cb[j]);
        let gap = (xa[i] - xb[j]).abs();
        let term = (next - level) * if p == 1.0 { gap } else { gap.powf(p) };
        let t = sum + term;
        comp += if sum >= term { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        level = next;
        if ca[i] == next {
            i += 1;
        }
        if cb[j] == next {
            j += 1;
        }
    }
    let total = sum + comp;
    Ok(if p == 1.0 { total } else { total.powf(1.0 / p) })
}

/// `W₁(N(0, σ₁²), N(0, σ₂²)) = |σ₁ − σ₂| E|Z|`.
pub fn w1_gaussian_1d(sigma1: f64, sigma2: f64) -> Result<f64> {
    if !(sigma1 >= 0.0 && sigma2 >= 0.0) || !sigma1.is_finite() || !sigma2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "standard deviations must be nonnegative, got {sigma1}, {sigma2}"
        )));
    }
    Ok((sigma1 - sigma2).abs() * expected_abs_normal())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cdf(v: &[f64], w: &[f64]) -> StepCDF {
        StepCDF::from_atoms(v, w).unwrap()
    }

    #[test]
    fn diracs() {
        assert_eq!(w1_cdf(&cdf(&[0.0], &[1.0]), &cdf(&[1.0], &[1.0])).value, 1.0);
        assert_eq!(wp_quantile(&cdf(&[0.0], &[1.0]), &cdf(&[1.0], &[1.0]), 2.0).unwrap(), 1.0);
    }

    #[test]
    fn identical_is_zero() {
        let a = cdf(&[0.0, 0.3, 2.0], &[0.2, 0.5, 0.3]);
        assert_eq!(w1_cdf(&a, &a).value, 0.0);
        assert_eq!(wp_quantile(&a, &a, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn two_point_examples() {
        // couplings of uniform{0,1} and uniform{0,2}: identity costs 0.5, swap costs 1.5
        let a = cdf(&[0.0, 1.0], &[1.0, 1.0]);
        let b = cdf(&[0.0, 2.0], &[1.0, 1.0]);
        let lp = f64::min(0.5 * (0.0 + 1.0), 0.5 * (2.0 + 1.0));
        assert!((w1_cdf(&a, &b).value - lp).abs() < 1e-15);

        let c = cdf(&[1.0, 2.0], &[1.0, 1.0]);
        let lp2 = f64::min(0.5 * (1.0 + 1.0), 0.5 * (4.0 + 0.0)).sqrt();
        assert!((wp_quantile(&a, &c, 2.0).unwrap() - lp2).abs() < 1e-15);
    }

    #[test]
    fn p_one_matches_cdf_formula() {
        let a = cdf(&[-1.0, 0.25, 0.5, 3.0], &[0.1, 0.4, 0.3, 0.2]);
        let b = cdf(&[-2.0, 0.5, 1.0], &[0.5, 0.25, 0.25]);
        let q = wp_quantile(&a, &b, 1.0).unwrap();
        assert!((q - w1_cdf(&a, &b).value).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_p() {
        let a = cdf(&[0.0], &[1.0]);
        assert!(wp_quantile(&a, &a, 0.5).is_err());
        assert!(wp_quantile(&a, &a, f64::NAN).is_err());
    }

    #[test]
    fn gaussian_closed_form() {
        assert_eq!(w1_gaussian_1d(0.7, 0.7).unwrap(), 0.0);
        let ez = w1_gaussian_1d(1.0, 0.0).unwrap();
        assert!((ez - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!(w1_gaussian_1d(-1.0, 0.0).is_err());
        let (alpha, eps) = (0.8_f64, 0.1);
        let s1 = alpha.cos().abs();
        let s2 = (alpha.cos().powi(2) + eps * eps * alpha.sin().powi(2)).sqrt();
        assert!((w1_gaussian_1d(s1, s2).unwrap() - ez * (s2 - s1)).abs() < 1e-15);
    }
}
