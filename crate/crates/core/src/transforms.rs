//! Radon, Hilbert and Riesz transforms of analytic test functions, and the
//! numerical identity checks built on them.
//!
//! Conventions: `f̂(ξ) = ∫ f(x) e^{-2πi⟨x,ξ⟩} dx`; `Hf(t) = (1/π) pv∫ f(t-s)/s ds`
//! (multiplier `-i sgn ξ`); `R_j f(x) = c_k pv∫ (x_j - y_j)/|x-y|^{k+1} f(y) dy`
//! with `c_k = Γ((k+1)/2)/π^{(k+1)/2}` (multiplier `-i ξ_j/|ξ|`).

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, log_log_fit, GaussLegendre, Tolerance};
use crate::slicing::ordered_map;
use crate::special::{dawson, gamma};

/// Exponent `m` of the standard bump `(1 - s²)₊^m`.
pub const BUMP_EXPONENT: usize = 8;

/// Default excision radius for the principal value, relative to the support radius.
pub const DEFAULT_EXCISION: f64 = 1e-3;

/// A compactly supported polynomial test function on the line: a
/// derivative of a scaled, shifted bump `(1 - ((t - c)/R)²)₊^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction1D {
    center: f64,
    radius: f64,
    /// coefficients in the rescaled variable `x = (t - c)/R`, already
    /// multiplied by `R^{-k}`
    poly: Vec<f64>,
    moment_order: usize,
    sup_abs: f64,
    lipschitz: f64,
}

impl TestFunction1D {
    pub fn bump(m: usize, radius: f64) -> Result<Self> {
        Self::bump_derivative(0, m, radius)
    }

    /// `d^k/dt^k (1 - (t/R)²)₊^m`. Requires `m > k` so the result is Lipschitz.
    pub fn bump_derivative(k: usize, m: usize, radius: f64) -> Result<Self> {
        if m <= k {
            return Err(Error::InvalidInput(format!(
                "bump exponent {m} must exceed derivative order {k}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput("support radius must be positive".into()));
        }
        let mut poly = vec![0.0; 2 * m + 1];
        let mut binom = 1.0;
        for i in 0..=m {
            poly[2 * i] = if i % 2 == 0 { binom } else { -binom };
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        for _ in 0..k {
            poly = poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect();
        }
        let scale = radius.powi(-(k as i32));
        poly.iter_mut().for_each(|c| *c *= scale);
        let mut f = Self {
            center: 0.0,
            radius,
            poly,
            moment_order: k,
            sup_abs: 0.0,
            lipschitz: 0.0,
        };
        f.sup_abs = (0..=2000)
            .map(|i| f.evaluate(-radius + 2.0 * radius * i as f64 / 2000.0).abs())
            .fold(0.0, f64::max);
        f.lipschitz = f.lipschitz_estimate(4000);
        Ok(f)
    }

    pub fn shifted(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.radius;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        self.poly.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn support_radius(&self) -> f64 {
        self.radius
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// Number of leading moments `∫ f(s) s^j ds`, `j < k`, that vanish.
    pub fn moment_order(&self) -> usize {
        self.moment_order
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }

    /// `∫ f(s) s^j ds`, exact up to rounding (polynomial integrand).
    pub fn moment(&self, j: usize) -> f64 {
        let rule = GaussLegendre::new((self.poly.len() + j) / 2 + 2);
        let (a, b) = self.support();
        rule.integrate(|s| self.evaluate(s) * s.powi(j as i32), a, b)
    }

    /// Largest finite-difference slope on a uniform grid of `n` intervals.
    pub fn lipschitz_estimate(&self, n: usize) -> f64 {
        let (a, b) = self.support();
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| {
                let t = a + i as f64 * h;
                ((self.evaluate(t + h) - self.evaluate(t)) / h).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// The bump `(1 - |y - c|²/R²)₊^m` on `R^n`, with first and second partials.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    center: Vec<f64>,
    radius: f64,
    m: usize,
}

impl BumpFunction {
    pub fn new(dim: usize, m: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("bump dimension must be positive".into()));
        }
        if m < 2 {
            return Err(Error::InvalidInput("bump exponent must be at least 2".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput("support radius must be positive".into()));
        }
        Ok(Self {
            center: vec![0.0; dim],
            radius,
            m,
        })
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self> {
        if center.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                got: center.len(),
            });
        }
        self.center = center;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn exponent(&self) -> usize {
        self.m
    }

    fn base(&self, y: &[f64]) -> f64 {
        let r2: f64 = y
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            / (self.radius * self.radius);
        1.0 - r2
    }

    pub fn evaluate(&self, y: &[f64]) -> f64 {
        let b = self.base(y);
        if b <= 0.0 {
            0.0
        } else {
            b.powi(self.m as i32)
        }
    }

    pub fn partial(&self, j: usize, y: &[f64]) -> f64 {
        let b = self.base(y);
        if b <= 0.0 {
            return 0.0;
        }
        let m = self.m as f64;
        -2.0 * m * b.powi(self.m as i32 - 1) * (y[j] - self.center[j]) / (self.radius * self.radius)
    }

    pub fn partial2(&self, i: usize, j: usize, y: &[f64]) -> f64 {
        let b = self.base(y);
        if b <= 0.0 {
            return 0.0;
        }
        let m = self.m as f64;
        let r2 = self.radius * self.radius;
        let mut v = 4.0 * m * (m - 1.0) * b.powi(self.m as i32 - 2) * (y[i] - self.center[i]) * (y[j] - self.center[j])
            / (r2 * r2);
        if i == j {
            v -= 2.0 * m * b.powi(self.m as i32 - 1) / r2;
        }
        v
    }

    /// `∫ (1 - |y|²/R²)₊^m dy = R^n π^{n/2} Γ(m+1)/Γ(m + n/2 + 1)`.
    pub fn integral(&self) -> f64 {
        let n = self.dim() as f64;
        let m = self.m as f64;
        self.radius.powf(n) * PI.powf(0.5 * n) * gamma(m + 1.0) / gamma(m + 0.5 * n + 1.0)
    }
}

/// Which function of a [`BumpFunction`] a transform is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Value,
    Partial(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BumpField {
    pub bump: BumpFunction,
    pub component: Component,
}

impl BumpField {
    pub fn value(bump: BumpFunction) -> Self {
        Self {
            bump,
            component: Component::Value,
        }
    }

    pub fn partial(bump: BumpFunction, j: usize) -> Self {
        Self {
            bump,
            component: Component::Partial(j),
        }
    }

    pub fn evaluate(&self, y: &[f64]) -> f64 {
        match self.component {
            Component::Value => self.bump.evaluate(y),
            Component::Partial(j) => self.bump.partial(j, y),
        }
    }

    fn scale(&self) -> f64 {
        match self.component {
            Component::Value => 1.0,
            Component::Partial(_) => 2.0 * self.bump.m as f64 / self.bump.radius,
        }
    }
}

/// `exp(-π|x|²)`.
pub fn gaussian(x: &[f64]) -> f64 {
    (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp()
}

/// Fourier transform of [`gaussian`]: `exp(-π|ξ|²)`.
pub fn gaussian_fourier(xi: &[f64]) -> f64 {
    gaussian(xi)
}

/// Hyperplane integral of the standard Gaussian: `R^θψ(t) = exp(-πt²)`.
pub fn radon_gaussian(theta: &[f64], t: f64) -> Result<f64> {
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitDirection(norm));
    }
    Ok((-PI * t * t).exp())
}

/// `∫ R^θψ(t) e^{-2πirt} dt` by quadrature (the imaginary part vanishes by parity).
pub fn radon_gaussian_fourier(theta: &[f64], r: f64) -> Result<f64> {
    radon_gaussian(theta, 0.0)?;
    let rule = GaussLegendre::new(32);
    let tol = Tolerance {
        rel: 1e-14,
        abs: 1e-16,
        max_panels: 2048,
    };
    let bps: Vec<f64> = (0..=16).map(|i| -8.0 + i as f64).collect();
    adaptive(
        |t| (-PI * t * t).exp() * (2.0 * PI * r * t).cos(),
        &bps,
        &rule,
        tol,
    )
}

/// Fuglede's constant `c_{d,k} = π^{(d-k)/2} Γ(k/2)/Γ(d/2)`.
pub fn fuglede_constant(d: usize, k: usize) -> Result<f64> {
    if k == 0 || k > d {
        return Err(Error::InvalidInput(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    let (d, k) = (d as f64, k as f64);
    Ok(PI.powf(0.5 * (d - k)) * gamma(0.5 * k) / gamma(0.5 * d))
}

/// `Γ((k+1)/2)/π^{(k+1)/2}`.
pub fn riesz_constant(k: usize) -> f64 {
    let a = 0.5 * (k as f64 + 1.0);
    gamma(a) / PI.powf(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertOptions {
    /// excision radius as a fraction of the support radius
    pub excision: f64,
    pub rel_tol: f64,
}

impl Default for HilbertOptions {
    fn default() -> Self {
        Self {
            excision: DEFAULT_EXCISION,
            rel_tol: 1e-12,
        }
    }
}

/// `Hf(t)` with default options.
pub fn hilbert(f: &TestFunction1D, t: f64) -> Result<f64> {
    hilbert_with(f, t, HilbertOptions::default())
}

/// Outside the support the kernel is smooth and `(1/π)∫ f(s)/(t-s) ds` is
/// integrated directly. Inside, `(1/π)∫_h^L (f(t-s) - f(t+s))/s ds` is
/// computed for excision radii `h` and `h/2` and extrapolated as
/// `2 I(h/2) - I(h)`, which removes the `O(h)` term of the excised part.
pub fn hilbert_with(f: &TestFunction1D, t: f64, opts: HilbertOptions) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    let rule = GaussLegendre::new(16);
    let (a, b) = f.support();
    let tol = Tolerance {
        rel: opts.rel_tol,
        abs: 1e-15 * f.sup_abs() * f.support_radius(),
        max_panels: 2048,
    };
    if t <= a || t >= b {
        let v = adaptive(|s| f.evaluate(s) / (t - s), &[a, f.center(), b], &rule, tol)?;
        return Ok(v / PI);
    }
    // near s = 0 the difference quotient carries rounding of order ε·sup|f|/s
    let tol = Tolerance {
        abs: 1e-13 * f.sup_abs() * f.support_radius(),
        ..tol
    };
    let h = opts.excision * f.support_radius();
    if !(h > 0.0) {
        return Err(Error::InvalidInput("excision radius must be positive".into()));
    }
    let reach = (t - a).max(b - t);
    let integrand = |s: f64| (f.evaluate(t - s) - f.evaluate(t + s)) / s;
    let mut bps = vec![h, t - a, b - t, reach];
    bps.retain(|&v| v >= h);
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let outer = adaptive(integrand, &bps, &rule, tol)?;
    let inner = adaptive(integrand, &[0.5 * h, h], &rule, tol)?;
    let value = (outer + 2.0 * inner) / PI;
    // excised part over [h/2, h] is ~ -f'(t) h; anything far larger means
    // the extrapolation premise failed
    let slope_bound = f.lipschitz.max(f64::MIN_POSITIVE);
    if inner.abs() > 2.0 * slope_bound * h {
        return Err(Error::Quadrature(format!(
            "Richardson step inconsistent: excised part {inner:e} exceeds {:e}",
            slope_bound * h
        )));
    }
    Ok(value)
}

/// A periodic grid `x_j = -L/2 + j L/n`, `j = 0..n`, per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    pub n: usize,
    pub period: f64,
}

impl PeriodicGrid {
    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.period + j as f64 * self.spacing()
    }

    /// Index of the grid node at `x`, if `x` is one.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let u = (x + 0.5 * self.period) / self.spacing();
        let j = u.round();
        if (u - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Frequency of FFT bin `m`.
    fn frequency(&self, m: usize) -> f64 {
        let m = if m <= self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
        m / self.period
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(Error::InvalidInput("grid size must be a power of two >= 4".into()));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidInput("grid period must be positive".into()));
        }
        Ok(())
    }
}

fn apply_multiplier_1d(grid: PeriodicGrid, samples: &[f64], mult: impl Fn(f64, bool) -> Complex<f64>) -> Vec<f64> {
    let n = grid.n;
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (m, z) in buf.iter_mut().enumerate() {
        *z *= mult(grid.frequency(m), m == n / 2);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

fn fft_2d(buf: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    fft.process(buf);
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = buf[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            buf[r * n + c] = col[r];
        }
    }
}

/// Hilbert transform of the periodic extension of `f` on `grid`, by the
/// multiplier `-i sgn ξ` (zero at the Nyquist bin). Values at `grid.coord(j)`.
pub fn hilbert_fft(f: &TestFunction1D, grid: PeriodicGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    let (a, b) = f.support();
    if a < -0.5 * grid.period || b > 0.5 * grid.period {
        return Err(Error::InvalidInput("support does not fit in the periodic cell".into()));
    }
    let samples: Vec<f64> = (0..grid.n).map(|j| f.evaluate(grid.coord(j))).collect();
    Ok(apply_multiplier_1d(grid, &samples, |xi, nyquist| {
        if nyquist || xi == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, -xi.signum())
        }
    }))
}

/// `(-Δ)^{1/2} g` as the multiplier `|ξ|` on a periodic `grid` (per axis)
/// for `g` in dimension 1 or 2. Row-major values over the grid nodes.
pub fn half_laplacian_fft(g: &BumpFunction, grid: PeriodicGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    let reach = g.center().iter().map(|c| c.abs()).fold(0.0, f64::max) + g.radius();
    if reach > 0.5 * grid.period {
        return Err(Error::InvalidInput("support does not fit in the periodic cell".into()));
    }
    let n = grid.n;
    match g.dim() {
        1 => {
            let samples: Vec<f64> = (0..n).map(|j| g.evaluate(&[grid.coord(j)])).collect();
            Ok(apply_multiplier_1d(grid, &samples, |xi, _| Complex::new(xi.abs(), 0.0)))
        }
        2 => {
            let mut buf: Vec<Complex<f64>> = (0..n * n)
                .map(|idx| Complex::new(g.evaluate(&[grid.coord(idx / n), grid.coord(idx % n)]), 0.0))
                .collect();
            fft_2d(&mut buf, n, false);
            for (idx, z) in buf.iter_mut().enumerate() {
                let (u, v) = (grid.frequency(idx / n), grid.frequency(idx % n));
                *z *= (u * u + v * v).sqrt();
            }
            fft_2d(&mut buf, n, true);
            let norm = (n * n) as f64;
            Ok(buf.iter().map(|z| z.re / norm).collect())
        }
        k => Err(Error::InvalidInput(format!("half Laplacian grid supports k = 1, 2; got {k}"))),
    }
}

/// Nodes and weights of a rule on `S^{k-1}` (total weight `|S^{k-1}|`).
fn sphere_rule(k: usize, n: usize) -> Vec<(Vec<f64>, f64)> {
    match k {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => (0..n)
            .map(|i| {
                let a = 2.0 * PI * (i as f64 + 0.5) / n as f64;
                (vec![a.cos(), a.sin()], 2.0 * PI / n as f64)
            })
            .collect(),
        _ => {
            let rule = GaussLegendre::new(n);
            let n_phi = 2 * n;
            let mut out = Vec::with_capacity(n * n_phi);
            for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
                let s = (1.0 - u * u).max(0.0).sqrt();
                for i in 0..n_phi {
                    let a = 2.0 * PI * (i as f64 + 0.5) / n_phi as f64;
                    out.push((vec![s * a.cos(), s * a.sin(), u], w * 2.0 * PI / n_phi as f64));
                }
            }
            out
        }
    }
}

/// Parameter interval `{r ≥ 0 : |xc + r u| ≤ R}`, if non-empty.
fn chord(xc: &[f64], u: &[f64], q: f64) -> Option<(f64, f64)> {
    let b: f64 = xc.iter().zip(u).map(|(a, c)| a * c).sum();
    let disc = b * b - q;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let hi = -b + s;
    if hi <= 0.0 {
        return None;
    }
    Some(((-b - s).max(0.0), hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszOptions {
    pub rel_tol: f64,
    /// cap on angular refinement (nodes per angular axis)
    pub max_angular: usize,
}

impl Default for RieszOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            max_angular: 2048,
        }
    }
}

pub fn riesz(f: &BumpField, j: usize, x: &[f64]) -> Result<f64> {
    riesz_with(f, j, x, RieszOptions::default())
}

/// `R_j f(x)`. Near the support (`|x - c| < 2R`) the principal value is
/// taken in the symmetrised polar form
/// `(c_k/2) ∫_{S^{k-1}} ω_j ∫_0^∞ (f(x - rω) - f(x + rω))/r dr dω`,
/// whose radial integrand is a piecewise polynomial; farther away the
/// kernel is smooth on the support and a polar cubature about the centre is
/// used. Angular resolution is doubled until two successive values agree.
pub fn riesz_with(f: &BumpField, j: usize, x: &[f64], opts: RieszOptions) -> Result<f64> {
    let k = f.bump.dim();
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("Riesz transform supports k = 1..3, got {k}")));
    }
    if x.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: x.len() });
    }
    if j >= k {
        return Err(Error::InvalidInput(format!("component {j} out of range for k={k}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("x"));
    }
    let radius = f.bump.radius();
    let xc: Vec<f64> = x.iter().zip(f.bump.center()).map(|(a, c)| a - c).collect();
    let dist = xc.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r_order = (2 * f.bump.exponent() + 4).max(32);
    let rule = GaussLegendre::new(r_order);
    let ck = riesz_constant(k);
    let abs_floor = 1e-14 * f.scale() * radius;

    let near = |n_ang: usize| -> f64 {
        let q = dist * dist - radius * radius;
        let mut total = 0.0;
        let mut y = vec![0.0; k];
        let mut z = vec![0.0; k];
        for (omega, w) in sphere_rule(k, n_ang) {
            let neg: Vec<f64> = omega.iter().map(|v| -v).collect();
            let mut bps: Vec<f64> = Vec::with_capacity(4);
            for (lo, hi) in [chord(&xc, &neg, q), chord(&xc, &omega, q)].into_iter().flatten() {
                bps.push(lo);
                bps.push(hi);
            }
            if bps.is_empty() {
                continue;
            }
            bps.sort_by(f64::total_cmp);
            bps.dedup();
            let g = rule.integrate_panels(
                |r| {
                    for i in 0..k {
                        y[i] = x[i] - r * omega[i];
                        z[i] = x[i] + r * omega[i];
                    }
                    (f.evaluate(&y) - f.evaluate(&z)) / r
                },
                &bps,
            );
            total += w * omega[j] * g;
        }
        0.5 * ck * total
    };

    let far = |n_ang: usize| -> f64 {
        let radial = GaussLegendre::new(n_ang.clamp(r_order, 256));
        let sphere = sphere_rule(k, n_ang);
        let mut total = 0.0;
        let mut y = vec![0.0; k];
        for (rho, wr) in radial.mapped(0.0, radius) {
            let jac = wr * rho.powi(k as i32 - 1);
            for (u, wu) in &sphere {
                let mut d2 = 0.0;
                for i in 0..k {
                    y[i] = f.bump.center()[i] + rho * u[i];
                    let dz = x[i] - y[i];
                    d2 += dz * dz;
                }
                let kern = (x[j] - y[j]) / d2.powf(0.5 * (k as f64 + 1.0));
                total += jac * wu * kern * f.evaluate(&y);
            }
        }
        ck * total
    };

    let eval = |n_ang: usize| if dist < 2.0 * radius { near(n_ang) } else { far(n_ang) };
    if k == 1 && dist < 2.0 * radius {
        return Ok(near(2));
    }
    let mut n_ang = if k == 3 { 16 } else { 64 };
    let mut prev = eval(n_ang);
    loop {
        let next_n = 2 * n_ang;
        if next_n > opts.max_angular {
            return Err(Error::Quadrature(format!(
                "Riesz quadrature did not settle within {} angular nodes",
                opts.max_angular
            )));
        }
        let next = eval(next_n);
        if !next.is_finite() {
            return Err(Error::NonFinite("Riesz quadrature"));
        }
        if (next - prev).abs() <= opts.rel_tol * next.abs() + abs_floor {
            return Ok(next);
        }
        prev = next;
        n_ang = next_n;
    }
}

/// `n` log-spaced points on `[a, b]`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    (0..n)
        .map(|i| (a.ln() + (b / a).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Tail fit of `log|T f|` against `log t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub k: usize,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// `sup |T f(t)| (1 + t^{k+1})` over the retained grid
    pub sup_scaled: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// grid points dropped because `|T f|` fell below the noise floor
    pub trimmed: Vec<f64>,
}

fn fit_decay(k: usize, grid: &[f64], values: Vec<f64>, floor: f64) -> Result<DecayFit> {
    let mut kept_t = Vec::new();
    let mut kept_v = Vec::new();
    let mut trimmed = Vec::new();
    for (&t, &v) in grid.iter().zip(&values) {
        if v.abs() > floor {
            kept_t.push(t);
            kept_v.push(v);
        } else {
            trimmed.push(t);
        }
    }
    if kept_t.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "only {} grid points above the noise floor {floor:e}",
            kept_t.len()
        )));
    }
    let abs: Vec<f64> = kept_v.iter().map(|v| v.abs()).collect();
    let (slope, intercept, max_residual) = log_log_fit(&kept_t, &abs);
    let sup_scaled = kept_t
        .iter()
        .zip(&abs)
        .map(|(t, v)| v * (1.0 + t.powi(k as i32 + 1)))
        .fold(0.0, f64::max);
    Ok(DecayFit {
        k,
        slope,
        intercept,
        max_residual,
        sup_scaled,
        grid: kept_t,
        values: kept_v,
        trimmed,
    })
}

/// Tail of `H f` for `f` the `k`-th derivative of the standard bump.
pub fn hilbert_decay_check(k: usize, t_grid: &[f64]) -> Result<DecayFit> {
    if t_grid.iter().any(|t| !(t.is_finite() && *t > 1.0)) {
        return Err(Error::InvalidInput("decay grid must lie outside the support".into()));
    }
    let f = TestFunction1D::bump_derivative(k, BUMP_EXPONENT, 1.0)?;
    let values: Result<Vec<f64>> = ordered_map(t_grid, |&t| hilbert(&f, t)).into_iter().collect();
    fit_decay(k, t_grid, values?, 1e-13 * f.sup_abs())
}

/// Tail of `R_1 f` along the first axis in `R^k`, for `f = ∂_1` of the
/// standard bump (`zero_mean`) or the bump itself.
pub fn riesz_decay_check(k: usize, x_grid: &[f64], zero_mean: bool) -> Result<DecayFit> {
    if x_grid.iter().any(|t| !(t.is_finite() && *t > 1.0)) {
        return Err(Error::InvalidInput("decay grid must lie outside the support".into()));
    }
    let bump = BumpFunction::new(k, BUMP_EXPONENT, 1.0)?;
    let f = if zero_mean {
        BumpField::partial(bump, 0)
    } else {
        BumpField::value(bump)
    };
    let values: Result<Vec<f64>> = ordered_map(x_grid, |&t| {
        let mut x = vec![0.0; k];
        x[0] = t;
        riesz(&f, 0, &x)
    })
    .into_iter()
    .collect();
    fit_decay(k, x_grid, values?, 1e-13 * f.scale())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationPoint {
    pub x: Vec<f64>,
    pub reconstruction: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub d: usize,
    /// the prefactor used for the profile `ψ^θ`
    pub prefactor: f64,
    /// sign of `prefactor` relative to `1/(2^d π^{d-1})`
    pub resolved_sign: f64,
    /// sign `(-1)^{⌊d/2⌋}` of the textbook prefactor
    pub nominal_sign: f64,
    /// reconstruction error at `x = 0` with the opposite sign
    pub rejected_sign_error: f64,
    pub max_error: f64,
    pub points: Vec<RepresentationPoint>,
}

/// Profile `∂_t^{d-1}` of `R^θψ` (odd `d`) or of `H R^θψ` (even `d`) for
/// the standard Gaussian, without prefactor.
fn gaussian_profile(d: usize, t: f64) -> f64 {
    match d {
        // ∂_t (2/√π) D(√π t) = 2 (1 - 2uD(u)), u = √π t
        2 => {
            let u = PI.sqrt() * t;
            2.0 * (1.0 - 2.0 * u * dawson(u))
        }
        3 => (4.0 * PI * PI * t * t - 2.0 * PI) * (-PI * t * t).exp(),
        _ => unreachable!(),
    }
}

/// `Hf` of `exp(-πt²)`: `(2/√π) D(√π t)` with `D` Dawson's integral.
pub fn hilbert_gaussian(t: f64) -> f64 {
    2.0 / PI.sqrt() * dawson(PI.sqrt() * t)
}

/// Reconstructs `exp(-π|x|²)` as `∫_{S^{d-1}} ψ^θ(⟨x,θ⟩) dθ` for `d ∈ {2, 3}`.
/// For `d = 2` both signs of the prefactor are tried at `x = 0` and the one
/// reproducing `ψ(0) = 1` is kept.
pub fn representation_check(d: usize, x_points: &[Vec<f64>]) -> Result<RepresentationReport> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidInput(format!("representation check supports d = 2, 3; got {d}")));
    }
    for x in x_points {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
    }
    let magnitude = 1.0 / (2f64.powi(d as i32) * PI.powi(d as i32 - 1));
    let nominal_sign = if (d / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let sphere = sphere_rule(d, if d == 2 { 256 } else { 64 });
    let integrate = |x: &[f64]| -> f64 {
        sphere
            .iter()
            .map(|(theta, w)| {
                let t: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
                w * gaussian_profile(d, t)
            })
            .sum()
    };
    let at_zero = integrate(&vec![0.0; d]);
    let err_plus = (magnitude * at_zero - 1.0).abs();
    let err_minus = (-magnitude * at_zero - 1.0).abs();
    let (resolved_sign, rejected_sign_error) = if err_plus <= err_minus {
        (1.0, err_minus)
    } else {
        (-1.0, err_plus)
    };
    let prefactor = resolved_sign * magnitude;
    let points: Vec<RepresentationPoint> = ordered_map(x_points, |x| RepresentationPoint {
        x: x.clone(),
        reconstruction: prefactor * integrate(x),
        exact: gaussian(x),
    });
    let max_error = points
        .iter()
        .map(|p| (p.reconstruction - p.exact).abs())
        .fold(0.0, f64::max);
    if !max_error.is_finite() {
        return Err(Error::NonFinite("representation reconstruction"));
    }
    Ok(RepresentationReport {
        d,
        prefactor,
        resolved_sign,
        nominal_sign,
        rejected_sign_error,
        max_error,
        points,
    })
}

/// Points `r·u` for a fixed generic unit vector `u` in `R^d`.
pub fn radial_points(d: usize, norms: &[f64]) -> Vec<Vec<f64>> {
    let raw: Vec<f64> = (0..d).map(|i| 1.0 + 0.37 * i as f64).collect();
    let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    norms
        .iter()
        .map(|r| raw.iter().map(|v| r * v / n).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionPoint {
    pub x: Vec<f64>,
    /// `(-Δ)^{1/2} g` from the Fourier multiplier
    pub multiplier: f64,
    /// `(1/2π) Σ_j R_j ∂_j g` from the Riesz quadrature
    pub riesz_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub k: usize,
    pub grid: PeriodicGrid,
    pub max_error: f64,
    pub points: Vec<DecompositionPoint>,
}

/// Default periodic grid for [`riesz_decomposition_check`].
pub fn default_decomposition_grid(k: usize) -> PeriodicGrid {
    if k == 1 {
        PeriodicGrid {
            n: 1 << 17,
            period: 1024.0,
        }
    } else {
        PeriodicGrid { n: 2048, period: 128.0 }
    }
}

/// Compares `(-Δ)^{1/2} g` (multiplier `|ξ|`) with `(1/2π) Σ_j R_j ∂_j g`
/// for the standard bump `g` in `R^k`, `k ∈ {1, 2}`, at grid nodes `points`.
pub fn riesz_decomposition_check(k: usize, points: &[Vec<f64>], grid: PeriodicGrid) -> Result<DecompositionReport> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidInput(format!("decomposition check supports k = 1, 2; got {k}")));
    }
    let g = BumpFunction::new(k, BUMP_EXPONENT, 1.0)?;
    let mut idx = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: x.len() });
        }
        let mut flat = 0;
        for &c in x {
            let i = grid
                .index_of(c)
                .ok_or_else(|| Error::InvalidInput(format!("{c} is not a node of the grid")))?;
            flat = flat * grid.n + i;
        }
        idx.push(flat);
    }
    let lap = half_laplacian_fft(&g, grid)?;
    let sums: Result<Vec<f64>> = ordered_map(points, |x| {
        let mut s = 0.0;
        for j in 0..k {
            s += riesz(&BumpField::partial(g.clone(), j), j, x)?;
        }
        Ok(s / (2.0 * PI))
    })
    .into_iter()
    .collect();
    let points: Vec<DecompositionPoint> = points
        .iter()
        .zip(idx)
        .zip(sums?)
        .map(|((x, i), s)| DecompositionPoint {
            x: x.clone(),
            multiplier: lap[i],
            riesz_sum: s,
        })
        .collect();
    let max_error = points
        .iter()
        .map(|p| (p.multiplier - p.riesz_sum).abs())
        .fold(0.0, f64::max);
    Ok(DecompositionReport {
        k,
        grid,
        max_error,
        points,
    })
}

/// Default evaluation nodes for [`riesz_decomposition_check`]: inside,
/// near and outside the unit support.
pub fn default_decomposition_points(k: usize) -> Vec<Vec<f64>> {
    if k == 1 {
        vec![vec![0.0], vec![0.25], vec![-0.5], vec![0.875], vec![1.5], vec![3.0]]
    } else {
        vec![
            vec![0.0, 0.0],
            vec![0.25, 0.125],
            vec![-0.5, 0.375],
            vec![0.0, -0.75],
            vec![1.25, 0.5],
            vec![2.5, -1.0],
        ]
    }
}
