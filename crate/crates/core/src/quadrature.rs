//! Gauss–Legendre rules and a globally adaptive bisection integrator.

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guesses `cos(π(i + 3/4)/(n + 1/2))`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Applies the rule on each panel `[bp[i], bp[i+1]]`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, breakpoints: &[f64]) -> f64 {
        breakpoints
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| self.integrate(&mut f, w[0], w[1]))
            .sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint: P_n'(±1) = (±1)^{n-1} n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// Values of `P_0..=P_n` at `x`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        let kf = k as f64;
        let v = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(v);
    }
    out
}

/// Stopping rule for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-15,
            max_panels: 4096,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive integration: the panel with the largest local error
/// estimate (difference between the rule on the panel and on its two halves)
/// is bisected until the summed estimate meets the tolerance.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    breakpoints: &[f64],
    rule: &GaussLegendre,
    tol: Tolerance,
) -> Result<f64> {
    let mut panels: Vec<Panel> = Vec::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            panels.push(split_panel(&mut f, rule, w[0], w[1]));
        }
    }
    if panels.is_empty() {
        return Ok(0.0);
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= tol.max_panels {
            return Err(Error::Quadrature(format!(
                "panel budget {} exhausted (value {total:e}, error estimate {err:e})",
                tol.max_panels
            )));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| {
                if p.error > best.1 {
                    (i, p.error)
                } else {
                    best
                }
            });
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature("panel width underflow".into()));
        }
        panels.push(split_panel(&mut f, rule, p.a, mid));
        panels.push(split_panel(&mut f, rule, mid, p.b));
    }
}

fn split_panel<F: FnMut(f64) -> f64>(f: &mut F, rule: &GaussLegendre, a: f64, b: f64) -> Panel {
    let mid = 0.5 * (a + b);
    let whole = rule.integrate(&mut *f, a, b);
    let left = rule.integrate(&mut *f, a, mid);
    let right = rule.integrate(&mut *f, mid, b);
    let value = left + right;
    Panel {
        a,
        b,
        value,
        error: (whole - value).abs(),
    }
}

/// Least-squares line through `(x_i, y_i)`: returns `(slope, intercept, max |residual|)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - (intercept + slope * a)).abs())
        .fold(0.0, f64::max);
    (slope, intercept, max_residual)
}

/// `(slope, intercept, max residual)` of `log y` against `log x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..=20 {
            let rule = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got = rule.integrate(|x| x.powi(deg as i32), -1.0, 1.0);
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 7, 64, 128, 256] {
            let s: f64 = GaussLegendre::new(n).weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_kinks() {
        let rule = GaussLegendre::new(8);
        let v = adaptive(|x: f64| (x - 0.3).abs(), &[-1.0, 1.0], &rule, Tolerance::default()).unwrap();
        let want = 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7;
        assert!((v - want).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let rule = GaussLegendre::new(2);
        let tol = Tolerance {
            rel: 1e-15,
            abs: 0.0,
            max_panels: 4,
        };
        let r = adaptive(|x: f64| (1.0 / x.abs().max(1e-300)).sqrt(), &[-1.0, 1.0], &rule, tol);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }

    #[test]
    fn fitter_recovers_power_law() {
        let x = [0.3, 0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|e: &f64| 5.0 * e * e).collect();
        let (s, i, r) = log_log_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-12);
        assert!((i - 5f64.ln()).abs() < 1e-12);
        assert!(r < 1e-12);
    }
}
