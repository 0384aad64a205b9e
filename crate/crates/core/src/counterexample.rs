//! A family `μ, μ_ε` on `R^d` with `W₁(μ, μ_ε) ≳ ε` but `SW₁(μ, μ_ε) ≲ ε^d`.
//!
//! `μ` lives on the hyperplane `x_d = 0` with density proportional to
//! `(1 − |x̄|²)₊^{d+1}`; `μ_ε = ∫ g(s) (τ_{εs e_d})#μ ds` averages vertical
//! translates of `μ` against a polynomial weight `g` whose moments of order
//! `1..=d+1` vanish. Any in-plane marginal of `μ` has density
//! `f(t) ∝ (1 − t²)^{3d/2}`, so its CDF is a regularized incomplete beta
//! function and `SW₁` reduces to a triple integral evaluated here by
//! adaptive Gauss–Legendre quadrature.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{signed_split, SignedDiscreteMeasure};
use crate::quadrature::{adaptive, legendre_all, log_log_fit, GaussLegendre, Tolerance};
use crate::special::{expected_abs_normal, ln_gamma, IncompleteBeta};

/// Polynomial weight `g = Σ c_k P_k` on `[−1, 1]` with `∫g = 1` and
/// `∫ s^k g = 0` for `k = 1..=degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentWeight {
    pub coeffs: Vec<f64>,
    pub degree: usize,
    pub abs_first_moment: f64,
}

impl MomentWeight {
    /// `g(s)` for `|s| ≤ 1`, zero outside.
    pub fn eval(&self, s: f64) -> f64 {
        if s.abs() > 1.0 {
            return 0.0;
        }
        // Clenshaw recurrence for Legendre series
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (0..self.coeffs.len()).rev() {
            let kf = k as f64;
            let alpha = (2.0 * kf + 1.0) / (kf + 1.0) * s;
            let beta = -(kf + 1.0) / (kf + 2.0);
            let b0 = self.coeffs[k] + alpha * b1 + beta * b2;
            b2 = b1;
            b1 = b0;
        }
        b1
    }

    /// `∫ s^k g(s) ds`, exact up to rounding.
    pub fn moment(&self, k: usize) -> f64 {
        let rule = GaussLegendre::new((self.degree + k) / 2 + 2);
        rule.integrate(|s| s.powi(k as i32) * self.eval(s), -1.0, 1.0)
    }

    /// Sign changes of `g` in `(−1, 1)`, located by bisection.
    pub fn roots(&self) -> Vec<f64> {
        const GRID: usize = 4000;
        let mut roots = Vec::new();
        let mut prev_x = -1.0;
        let mut prev = self.eval(-1.0);
        for i in 1..=GRID {
            let x = -1.0 + 2.0 * i as f64 / GRID as f64;
            let v = self.eval(x);
            if v == 0.0 && i < GRID {
                roots.push(x);
            } else if prev != 0.0 && v.signum() != prev.signum() {
                let (mut a, mut b, mut fa) = (prev_x, x, prev);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = self.eval(m);
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev_x = x;
            prev = v;
        }
        roots
    }

    /// `∫ g⁻`, integrated exactly between consecutive roots.
    pub fn negative_mass(&self) -> f64 {
        let mut bps = vec![-1.0];
        bps.extend(self.roots());
        bps.push(1.0);
        let rule = GaussLegendre::new(self.degree / 2 + 2);
        bps.windows(2)
            .map(|w| {
                let v = rule.integrate(|s| self.eval(s), w[0], w[1]);
                if v < 0.0 {
                    -v
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `∫ |g|`.
    pub fn total_variation(&self) -> f64 {
        1.0 + 2.0 * self.negative_mass()
    }
}

/// LU solve with partial pivoting on a small dense row-major system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[piv * n + col].abs() < 1e-14 {
            return Err(Error::Solver("singular moment system".into()));
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    Ok(x)
}

/// The unique polynomial of degree `≤ d + 1` with `m₀ = 1` and
/// `m₁ = … = m_{d+1} = 0`, in the Legendre basis.
pub fn build_weight(d: usize) -> Result<MomentWeight> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("moment weight needs d >= 2, got {d}")));
    }
    let n = d + 2;
    let rule = GaussLegendre::new(n + 2);
    let mut a = vec![0.0; n * n];
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        let p = legendre_all(n - 1, *x);
        for j in 0..n {
            let xj = x.powi(j as i32);
            for k in 0..n {
                a[j * n + k] += w * xj * p[k];
            }
        }
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    let mut coeffs = solve_dense(a, rhs)?;
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = 0.0;
        }
    }
    let mut g = MomentWeight {
        coeffs,
        degree: d + 1,
        abs_first_moment: 0.0,
    };
    let half = GaussLegendre::new(d / 2 + 3);
    g.abs_first_moment = half.integrate(|s| -s * g.eval(s), -1.0, 0.0)
        + half.integrate(|s| s * g.eval(s), 0.0, 1.0);
    if g.abs_first_moment.abs() <= 1e-6 {
        return Err(Error::Solver("first absolute moment of g vanishes".into()));
    }
    Ok(g)
}

/// The family `(μ, μ_ε)_ε` in dimension `d ≥ 3`.
#[derive(Debug, Clone)]
pub struct CounterexampleFamily {
    pub d: usize,
    pub g: MomentWeight,
    pub f_exponent: f64,
    pub f_norm: f64,
    beta: IncompleteBeta,
}

impl CounterexampleFamily {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidInput(format!("the construction needs d >= 3, got {d}")));
        }
        let g = build_weight(d)?;
        let f_exponent = 1.5 * d as f64;
        let a = f_exponent + 1.0;
        // ∫(1−t²)^{a−1} dt = 2^{2a−1} B(a, a)
        let ln_int = (2.0 * a - 1.0) * 2f64.ln() + 2.0 * ln_gamma(a) - ln_gamma(2.0 * a);
        Ok(Self {
            d,
            g,
            f_exponent,
            f_norm: (-ln_int).exp(),
            beta: IncompleteBeta::new(a, a),
        })
    }

    /// Density of any in-plane marginal of `μ`.
    pub fn f(&self, t: f64) -> f64 {
        if t.abs() >= 1.0 {
            0.0
        } else {
            self.f_norm * (1.0 - t * t).powf(self.f_exponent)
        }
    }

    /// CDF of `f`: `I_{(1+t)/2}(3d/2 + 1, 3d/2 + 1)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= -1.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            self.beta.eval(0.5 * (1.0 + t))
        }
    }

    /// `M_ε`, the mass of `(μ − μ_ε)⁺`. The two measures are mutually
    /// singular (one sits on the hyperplane, the other is spread across it),
    /// so this is `1 + ∫g⁻` for every `ε`.
    pub fn m_eps(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(1.0 + self.g.negative_mass())
    }

    /// `ε |∫|s| g|`, the value of `∫ φ d(μ_ε − μ)` for `φ(x) = |x_d|`.
    pub fn w1_lower_bound(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(eps * self.g.abs_first_moment.abs())
    }

    /// Normalizing constant of the vertical component `z` of a uniform
    /// direction: its density is `c (1 − z²)^{(d−3)/2}` on `[−1, 1]`.
    pub fn z_density_constant(&self) -> f64 {
        let d = self.d as f64;
        (ln_gamma(d / 2.0) - ln_gamma((d - 1.0) / 2.0)).exp() / PI.sqrt()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// `F_Θ(t)`, the CDF of the projection of `μ` on a direction at angle `Θ`
/// from the hyperplane.
pub fn projected_cdf(family: &CounterexampleFamily, theta: f64, t: f64) -> Result<f64> {
    let c = theta.cos();
    if c.abs() < 1e-300 {
        return Err(Error::InvalidInput(
            "projection onto the vertical axis is degenerate".into(),
        ));
    }
    Ok(if c > 0.0 {
        family.cdf(t / c)
    } else {
        1.0 - family.cdf(t / c.abs())
    })
}

/// Quadrature orders and tolerances for [`sw1_mu_mueps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Gauss–Legendre order per panel of the outer `z` integral.
    pub outer_order: usize,
    /// Order per panel of the `t` integral.
    pub t_order: usize,
    /// Order per panel of the inner `s` integral (fixed, split at the kinks).
    pub s_order: usize,
    pub outer_rel_tol: f64,
    pub t_rel_tol: f64,
    /// Absolute tolerance of the `t` integrals; the inner signed integral
    /// carries rounding noise near 1e-16 from the moment cancellation.
    pub t_abs_tol: f64,
    pub outer_abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            outer_order: 16,
            t_order: 16,
            s_order: 32,
            outer_rel_tol: 1e-6,
            t_rel_tol: 1e-8,
            t_abs_tol: 1e-14,
            outer_abs_tol: 1e-16,
            max_panels: 4000,
        }
    }
}

impl QuadSpec {
    /// All orders doubled and tolerances tightened tenfold.
    pub fn refined(&self) -> Self {
        Self {
            outer_order: 2 * self.outer_order,
            t_order: 2 * self.t_order,
            s_order: 2 * self.s_order,
            outer_rel_tol: self.outer_rel_tol / 10.0,
            t_rel_tol: self.t_rel_tol / 10.0,
            t_abs_tol: self.t_abs_tol / 10.0,
            outer_abs_tol: self.outer_abs_tol / 10.0,
            max_panels: 2 * self.max_panels,
        }
    }
}

/// `SW₁(μ, μ_ε)` split by zone of the vertical component `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sw1Breakdown {
    pub total: f64,
    /// Directions with `|cos Θ| > ε`.
    pub generic: f64,
    /// Directions with `|cos Θ| ≤ ε`.
    pub vertical: f64,
}

struct Rules {
    outer: GaussLegendre,
    t: GaussLegendre,
    s: GaussLegendre,
}

/// `∫ (F(x + η s) − F(x)) g(s) ds` with `F = cdf(·/c)` (`c > 0`); the
/// `s`-range is split where `x + ηs` crosses `±c`.
fn inner_signed(family: &CounterexampleFamily, rule: &GaussLegendre, c: f64, x: f64, eta: f64) -> f64 {
    let fx = family.cdf(x / c);
    let mut bps = [-1.0, 1.0, 1.0, 1.0];
    let mut len = 1;
    if eta != 0.0 {
        for edge in [-c, c] {
            let s = (edge - x) / eta;
            if s > -1.0 && s < 1.0 {
                bps[len] = s;
                len += 1;
            }
        }
    }
    bps[len] = 1.0;
    len += 1;
    bps[..len].sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in bps[..len].windows(2) {
        if w[1] > w[0] {
            total += rule.integrate(|s| (family.cdf((x + eta * s) / c) - fx) * family.g.eval(s), w[0], w[1]);
        }
    }
    total
}

/// `±c`, `±c ± h`, sorted: the kinks of `t ↦ ∫(F(t + hs) − F(t)) g ds`
/// when `F` is flat outside `[−c, c]`.
fn kink_breakpoints(c: f64, h: f64) -> Vec<f64> {
    let mut bps = vec![-c - h, -c, -c + h, c - h, c, c + h];
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps
}

/// `W₁` between the projections of `μ` and `μ_ε` on a direction with
/// vertical component `z` and `c = √(1 − z²)`.
fn w1_direction(
    family: &CounterexampleFamily,
    rules: &Rules,
    spec: &QuadSpec,
    eps: f64,
    z: f64,
    c: f64,
) -> Result<f64> {
    let shift = eps * z;
    let tol = Tolerance {
        rel: spec.t_rel_tol,
        abs: spec.t_abs_tol,
        max_panels: spec.max_panels,
    };
    if c > eps {
        // rescaled variable u = t / c keeps the kinks of F at ±1
        let eta = shift / c;
        let bps = kink_breakpoints(1.0, eta.abs());
        let v = adaptive(
            |u| inner_signed(family, &rules.s, 1.0, u, eta).abs(),
            &bps,
            &rules.t,
            tol,
        )?;
        Ok(c * v)
    } else {
        let bps = kink_breakpoints(c, shift.abs());
        if c == 0.0 {
            // μ projects to δ₀
            return adaptive(
                |t| {
                    let mut total = 0.0;
                    let cut = t / shift;
                    let step = |x: f64| if x >= 0.0 { 1.0 } else { 0.0 };
                    let mut b = [-1.0, cut.clamp(-1.0, 1.0), 1.0];
                    b.sort_by(f64::total_cmp);
                    for w in b.windows(2) {
                        if w[1] > w[0] {
                            total += rules
                                .s
                                .integrate(|s| (step(t + shift * s) - step(t)) * family.g.eval(s), w[0], w[1]);
                        }
                    }
                    total.abs()
                },
                &bps,
                &rules.t,
                tol,
            );
        }
        adaptive(
            |t| inner_signed(family, &rules.s, c, t, shift).abs(),
            &bps,
            &rules.t,
            tol,
        )
    }
}

/// `SW₁(μ, μ_ε) = ∫ W₁(μ^θ, μ_ε^θ) dσ(θ)`, reduced by rotational symmetry
/// to an integral over the vertical component `z` of `θ`.
///
/// Directions with `|cos Θ| > ε` are integrated in `z`; the near-vertical
/// cap `|cos Θ| ≤ ε` is integrated in `c = |cos Θ|` (where `dz = c dc / z`)
/// so the quadrature resolves it at scale `ε`.
pub fn sw1_mu_mueps(family: &CounterexampleFamily, eps: f64, spec: &QuadSpec) -> Result<Sw1Breakdown> {
    check_eps(eps)?;
    let rules = Rules {
        outer: GaussLegendre::new(spec.outer_order),
        t: GaussLegendre::new(spec.t_order),
        s: GaussLegendre::new(spec.s_order),
    };
    let dconst = family.z_density_constant();
    let dm3 = family.d as i32 - 3;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let outer_tol = Tolerance {
        rel: spec.outer_rel_tol,
        abs: spec.outer_abs_tol,
        max_panels: spec.max_panels,
    };
    let z_top = (1.0 - eps * eps).sqrt();
    // symmetric in z, so integrate over z ≥ 0 and double
    let generic = 2.0
        * adaptive(
            |z| {
                let c = (1.0 - z * z).sqrt();
                guard(w1_direction(family, &rules, spec, eps, z, c)) * dconst * c.powi(dm3)
            },
            &[0.0, 0.5 * z_top, z_top],
            &rules.outer,
            outer_tol,
        )?;
    let vertical = 2.0
        * adaptive(
            |c| {
                let z = (1.0 - c * c).sqrt();
                guard(w1_direction(family, &rules, spec, eps, z, c)) * dconst * c.powi(dm3) * c / z
            },
            &[0.0, 0.5 * eps, eps],
            &rules.outer,
            outer_tol,
        )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Sw1Breakdown {
        total: generic + vertical,
        generic,
        vertical,
    })
}

/// `∫ (F_Θ(t + εs sin Θ) − F_Θ(t)) g(s) ds` at one point, for `cos Θ > 0`.
pub fn inner_cancellation(family: &CounterexampleFamily, theta: f64, eps: f64, t: f64, s_order: usize) -> Result<f64> {
    let c = theta.cos();
    if c <= 0.0 {
        return Err(Error::InvalidInput("need cos Θ > 0".into()));
    }
    let rule = GaussLegendre::new(s_order);
    Ok(inner_signed(family, &rule, c, t, eps * theta.sin()))
}

/// Least-squares fit of `log values` against `log eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub eps_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

impl ScalingFit {
    pub fn fit(eps_grid: &[f64], values: &[f64]) -> Result<Self> {
        if eps_grid.len() != values.len() || eps_grid.len() < 2 {
            return Err(Error::InvalidInput("need at least two (eps, value) pairs".into()));
        }
        if eps_grid.iter().chain(values).any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput("log-log fit needs positive data".into()));
        }
        let (slope, intercept, max_residual) = log_log_fit(eps_grid, values);
        Ok(Self {
            eps_grid: eps_grid.to_vec(),
            values: values.to_vec(),
            slope,
            intercept,
            max_residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub eps: f64,
    pub sw1: f64,
    pub w1_lower: f64,
    pub m_eps: f64,
    pub sw1_normalized: f64,
    pub w1_normalized: f64,
    pub sw1_generic: f64,
    pub sw1_vertical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingScan {
    pub d: usize,
    pub rows: Vec<ScanRow>,
    pub sw1_fit: ScalingFit,
    pub w1_fit: ScalingFit,
    pub sw1_normalized_fit: ScalingFit,
    pub w1_normalized_fit: ScalingFit,
}

/// Runs [`sw1_mu_mueps`] and the `W₁` lower bound over a decreasing grid in
/// `(0, 0.5]` and fits both log-log slopes, raw and divided by `M_ε`.
pub fn scaling_scan(family: &CounterexampleFamily, eps_grid: &[f64], spec: &QuadSpec) -> Result<ScalingScan> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidInput("empty eps grid".into()));
    }
    if eps_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("eps grid must be strictly decreasing".into()));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e <= 0.5)) {
        return Err(Error::InvalidInput("eps grid must lie in (0, 0.5]".into()));
    }
    let sws = crate::slicing::ordered_map(eps_grid, |&e| sw1_mu_mueps(family, e, spec));
    let mut rows = Vec::with_capacity(eps_grid.len());
    for (&eps, sw) in eps_grid.iter().zip(sws) {
        let sw = sw?;
        let w1 = family.w1_lower_bound(eps)?;
        let m = family.m_eps(eps)?;
        rows.push(ScanRow {
            eps,
            sw1: sw.total,
            w1_lower: w1,
            m_eps: m,
            sw1_normalized: sw.total / m,
            w1_normalized: w1 / m,
            sw1_generic: sw.generic,
            sw1_vertical: sw.vertical,
        });
    }
    let col = |f: fn(&ScanRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    Ok(ScalingScan {
        d: family.d,
        sw1_fit: ScalingFit::fit(eps_grid, &col(|r| r.sw1))?,
        w1_fit: ScalingFit::fit(eps_grid, &col(|r| r.w1_lower))?,
        sw1_normalized_fit: ScalingFit::fit(eps_grid, &col(|r| r.sw1_normalized))?,
        w1_normalized_fit: ScalingFit::fit(eps_grid, &col(|r| r.w1_normalized))?,
        rows,
    })
}

/// `√(cos²α + ε² sin²α) − |cos α|`, written without cancellation.
fn gaussian_integrand(eps: f64, alpha: f64) -> f64 {
    let c = alpha.cos().abs();
    let es = eps * alpha.sin();
    es * es / ((c * c + es * es).sqrt() + c)
}

fn gaussian_breakpoints(eps: f64, a: f64, b: f64, kinks: &[f64]) -> Vec<f64> {
    let mut bps = vec![a, b];
    for &k in kinks {
        for m in [1.0, 4.0, 16.0] {
            for p in [k - m * eps, k + m * eps] {
                if p > a && p < b {
                    bps.push(p);
                }
            }
        }
        if k > a && k < b {
            bps.push(k);
        }
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps
}

fn gaussian_tol() -> Tolerance {
    Tolerance {
        rel: 1e-12,
        abs: 1e-300,
        max_panels: 4000,
    }
}

/// `SW₁(μ, ν_ε)` for `μ = N(0, diag(1, 0))`, `ν_ε = N(0, diag(1, ε²))` in
/// the plane: `(E|Z| / 2π) ∫₀^{2π} (√(cos²α + ε² sin²α) − |cos α|) dα`,
/// integrated over a quarter period and multiplied by four.
pub fn gaussian_example_sw_closed_form(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidInput(format!("eps must lie in (0, 1], got {eps}")));
    }
    let rule = GaussLegendre::new(20);
    let half_pi = PI / 2.0;
    let quarter = adaptive(
        |a| gaussian_integrand(eps, a),
        &gaussian_breakpoints(eps, 0.0, half_pi, &[half_pi]),
        &rule,
        gaussian_tol(),
    )?;
    Ok(expected_abs_normal() * 4.0 * quarter / (2.0 * PI))
}

/// The same integral over the full period, for cross-checking the symmetry
/// reduction.
pub fn gaussian_example_sw_full_period(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidInput(format!("eps must lie in (0, 1], got {eps}")));
    }
    let rule = GaussLegendre::new(20);
    let v = adaptive(
        |a| gaussian_integrand(eps, a),
        &gaussian_breakpoints(eps, 0.0, 2.0 * PI, &[PI / 2.0, 1.5 * PI]),
        &rule,
        gaussian_tol(),
    )?;
    Ok(expected_abs_normal() * v / (2.0 * PI))
}

/// `W₁(μ, ν_ε) = ε E|Z|`.
pub fn gaussian_example_w1(eps: f64) -> f64 {
    eps * expected_abs_normal()
}

/// Grid discretization of `μ − μ_ε`.
///
/// `μ` is replaced by the cell centres of an `n_grid^{d−1}` Cartesian grid on
/// `[−1, 1]^{d−1}` inside the unit ball, weighted by `(1 − |x̄|²)^{d+1}`;
/// each atom is translated vertically to the Gauss–Legendre nodes of
/// `[−1, 0]` and `[0, 1]` (`n_s / 2` each), scaled by `ε`, with weights
/// `ω_q g(s_q)`. These split rules integrate `|s| g` exactly.
pub fn discretize_signed_atoms(
    family: &CounterexampleFamily,
    eps: f64,
    n_grid: usize,
    n_s: usize,
) -> Result<Vec<(Vec<f64>, f64)>> {
    check_eps(eps)?;
    if n_grid < 2 || n_s < 2 {
        return Err(Error::InvalidInput("discretization needs n_grid >= 2 and n_s >= 2".into()));
    }
    // n_s / 2 nodes per half are exact for |s| g up to degree n_s − 1
    let needed = family.g.coeffs.len() + 1;
    if n_s / 2 * 2 < needed {
        return Err(Error::InvalidInput(format!(
            "n_s = {n_s} cannot integrate the weight exactly; need n_s >= {needed}"
        )));
    }
    let d = family.d;
    let h = 2.0 / n_grid as f64;
    let mut plane: Vec<(Vec<f64>, f64)> = Vec::new();
    let cells = n_grid.pow(d as u32 - 1);
    let mut total = 0.0;
    for idx in 0..cells {
        let mut rest = idx;
        let mut x = Vec::with_capacity(d);
        for _ in 0..d - 1 {
            x.push(-1.0 + h * (rest % n_grid) as f64 + 0.5 * h);
            rest /= n_grid;
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 < 1.0 {
            let w = (1.0 - r2).powi(d as i32 + 1);
            total += w;
            plane.push((x, w));
        }
    }
    let half = GaussLegendre::new(n_s / 2);
    let nodes: Vec<(f64, f64)> = half
        .mapped(-1.0, 0.0)
        .chain(half.mapped(0.0, 1.0))
        .map(|(s, w)| (s, w * family.g.eval(s)))
        .collect();
    let mut atoms = Vec::with_capacity(plane.len() * (nodes.len() + 1));
    for (x, w) in plane {
        let w = w / total;
        let mut p = x.clone();
        p.push(0.0);
        atoms.push((p, w));
        for &(s, gw) in &nodes {
            let mut q = x.clone();
            q.push(eps * s);
            atoms.push((q, -w * gw));
        }
    }
    Ok(atoms)
}

/// [`discretize_signed_atoms`] followed by [`signed_split`].
pub fn discretize(family: &CounterexampleFamily, eps: f64, n_grid: usize, n_s: usize) -> Result<SignedDiscreteMeasure> {
    signed_split(&discretize_signed_atoms(family, eps, n_grid, n_s)?)
}
