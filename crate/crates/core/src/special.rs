//! Special functions used by the analytic measures and transform checks.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// Regularized incomplete beta `I_x(a, b)` with the `ln B(a, b)` prefactor
/// precomputed, for repeated evaluation at fixed shape.
#[derive(Debug, Clone, Copy)]
pub struct IncompleteBeta {
    a: f64,
    b: f64,
    ln_beta: f64,
}

impl IncompleteBeta {
    pub fn new(a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > 0.0);
        Self {
            a,
            b,
            ln_beta: ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let (a, b) = (self.a, self.b);
        let front = (a * x.ln() + b * (1.0 - x).ln() - self.ln_beta).exp();
        if x < (a + 1.0) / (a + b + 2.0) {
            front * beta_continued_fraction(a, b, x) / a
        } else {
            1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
        }
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..400 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Dawson's integral `D(x) = e^{-x²} ∫₀ˣ e^{u²} du`, by Gauss–Legendre
/// quadrature of `∫₀ˣ e^{u² - x²} du` on panels of width at most 1/2.
pub fn dawson(x: f64) -> f64 {
    use crate::quadrature::GaussLegendre;
    use std::sync::OnceLock;
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(32));
    if x == 0.0 {
        return 0.0;
    }
    let sign = x.signum();
    let x = x.abs();
    if x > 8.0 {
        // asymptotic series
        let x2 = x * x;
        let mut term = 1.0 / (2.0 * x);
        let mut sum = term;
        for k in 1..20 {
            term *= (2.0 * k as f64 - 1.0) / (2.0 * x2);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return sign * sum;
    }
    let panels = (x / 0.5).ceil().max(1.0) as usize;
    let h = x / panels as f64;
    let x2 = x * x;
    let mut total = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        total += rule.integrate(|u| (u * u - x2).exp(), a, a + h);
    }
    sign * total
}

/// `E|Z|` for a standard normal `Z`, computed once by quadrature of
/// `2 ∫₀^∞ z φ(z) dz` (truncated at z = 40, where the tail is below 1e-300).
pub fn expected_abs_normal() -> f64 {
    use crate::quadrature::{adaptive, GaussLegendre, Tolerance};
    use std::sync::OnceLock;
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let rule = GaussLegendre::new(20);
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        let tol = Tolerance {
            rel: 1e-15,
            abs: 1e-17,
            max_panels: 1024,
        };
        2.0 * adaptive(|z| z * phi(z), &[0.0, 5.0, 10.0, 40.0], &rule, tol)
            .expect("E|Z| quadrature converges")
    })
}
