//! Direction and frame sampling, and the sliced estimators built on them.
//!
//! Every estimator draws from its own ChaCha8 stream keyed by `(seed, tag)`.
//! Directions are generated serially; per-direction distances may be computed
//! in parallel, and are reduced in index order, so estimates are bitwise
//! reproducible regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{compensated_sum, dot, project_unchecked, DiscreteMeasure};
use crate::ot1d::{w1_cdf, wp_quantile};
use crate::ot_exact::{w1_exact_with, SolverConfig};

/// Orthonormal `d × k` matrix (row-major) spanning a point of `G(d, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    d: usize,
    k: usize,
    matrix: Vec<f64>,
}

impl Frame {
    pub fn new(d: usize, k: usize, matrix: Vec<f64>) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::InvalidInput(format!("frame shape {d}x{k}")));
        }
        if matrix.len() != d * k {
            return Err(Error::DimensionMismatch {
                expected: d * k,
                got: matrix.len(),
            });
        }
        let f = Self { d, k, matrix };
        let err = f.orthonormality_error();
        if err > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "frame columns are not orthonormal (error {err:e})"
            )));
        }
        Ok(f)
    }

    /// A one-column frame.
    pub fn from_direction(theta: &[f64]) -> Result<Self> {
        Self::new(theta.len(), 1, theta.to_vec())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.d).map(|r| self.matrix[r * self.k + j]).collect()
    }

    /// `‖MᵀM − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.k {
            for b in 0..self.k {
                let g: f64 = (0..self.d)
                    .map(|r| self.matrix[r * self.k + a] * self.matrix[r * self.k + b])
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        worst
    }

    /// The frame made of the first `k` columns.
    pub fn prefix(&self, k: usize) -> Frame {
        assert!(k >= 1 && k <= self.k);
        let mut m = Vec::with_capacity(self.d * k);
        for r in 0..self.d {
            m.extend_from_slice(&self.matrix[r * self.k..r * self.k + k]);
        }
        Frame {
            d: self.d,
            k,
            matrix: m,
        }
    }

    /// Coordinates of `P_ξ # μ` in this frame's basis.
    pub fn project(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        if mu.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: mu.dim(),
            });
        }
        mu.project_linear(&self.matrix, self.k)
    }
}

/// A Monte Carlo (or deterministic) sliced estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicedEstimate {
    pub value: f64,
    pub std_error: f64,
    #[serde(rename = "n")]
    pub n_directions: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_direction: Option<Vec<f64>>,
}

pub(crate) fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// The RNG stream for `(seed, tag)`.
pub fn rng_stream(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(tag));
    rng
}

fn gaussian_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub(crate) fn sphere_from_rng(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| gaussian_unit(rng, d)).collect()
}

/// `n` i.i.d. uniform directions on `S^{d−1}` (normalized Gaussians).
pub fn sample_sphere(d: usize, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("sphere sampling needs d >= 2, got {d}")));
    }
    Ok(sphere_from_rng(&mut rng_stream(seed, "sphere"), d, n))
}

/// Modified Gram–Schmidt, applied twice; columns of the `d × k` row-major
/// input are replaced by the `Q` factor with positive `R` diagonal.
fn orthonormalize(d: usize, k: usize, a: &mut [f64]) -> bool {
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let r: f64 = (0..d).map(|row| a[row * k + i] * a[row * k + j]).sum();
                for row in 0..d {
                    a[row * k + j] -= r * a[row * k + i];
                }
            }
        }
        let norm = (0..d).map(|row| a[row * k + j].powi(2)).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return false;
        }
        for row in 0..d {
            a[row * k + j] /= norm;
        }
    }
    true
}

fn frame_from_rng(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Frame {
    loop {
        let mut a: Vec<f64> = (0..d * k).map(|_| StandardNormal.sample(rng)).collect();
        if orthonormalize(d, k, &mut a) {
            return Frame { d, k, matrix: a };
        }
    }
}

/// `n` frames distributed by the rotation-invariant law on `G(d, k)`: the
/// `Q` factor of a Gaussian `d × k` matrix.
pub fn sample_grassmannian(d: usize, k: usize, n: usize, seed: u64) -> Result<Vec<Frame>> {
    check_k(d, k)?;
    let mut rng = rng_stream(seed, "grassmannian");
    Ok((0..n).map(|_| frame_from_rng(&mut rng, d, k)).collect())
}

/// Nested frames: for each sample one `d × k_max` frame; its column prefixes
/// give subspaces `ξ₁ ⊂ ξ₂ ⊂ …`.
pub fn sample_nested_frames(d: usize, k_max: usize, n: usize, seed: u64) -> Result<Vec<Frame>> {
    if k_max == 0 || k_max > d {
        return Err(Error::InvalidInput(format!("k_max = {k_max} out of range for d = {d}")));
    }
    let mut rng = rng_stream(seed, "nested");
    Ok((0..n).map(|_| frame_from_rng(&mut rng, d, k_max)).collect())
}

fn check_k(d: usize, k: usize) -> Result<()> {
    if k == 0 || k >= d {
        return Err(Error::InvalidInput(format!("need 1 <= k <= d - 1, got k = {k}, d = {d}")));
    }
    Ok(())
}

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9).
pub(crate) fn inverse_normal(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let lo = 0.02425;
    if p < lo {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - lo {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal(1.0 - p)
    }
}

/// Quasi-uniform directions, reproducible from `seed`:
///
/// * `d = 2`: `n` equally spaced angles with a seeded offset;
/// * `d = 3`: the spherical Fibonacci lattice with a seeded azimuthal offset;
/// * `d ≥ 4`: a Cranley–Patterson rotated Halton sequence pushed through the
///   inverse normal CDF coordinatewise and normalized.
pub fn deterministic_directions(d: usize, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    use rand::Rng;
    use std::f64::consts::PI;
    if d < 2 {
        return Err(Error::InvalidInput(format!("directions need d >= 2, got {d}")));
    }
    if d > PRIMES.len() {
        return Err(Error::InvalidInput(format!("deterministic mode supports d <= {}", PRIMES.len())));
    }
    let mut rng = rng_stream(seed, "deterministic");
    let offset: f64 = rng.random();
    let nf = n as f64;
    Ok(match d {
        2 => (0..n)
            .map(|i| {
                let a = 2.0 * PI * (i as f64 + offset) / nf;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / nf;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * PI * ((i as f64 / golden + offset).fract());
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let shifts: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            (0..n)
                .map(|i| {
                    let v: Vec<f64> = (0..d)
                        .map(|c| {
                            let u = (radical_inverse(i as u64 + 1, PRIMES[c] as u64) + shifts[c]).fract();
                            inverse_normal(u.clamp(1e-12, 1.0 - 1e-12))
                        })
                        .collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                })
                .collect()
        }
    })
}

fn check_pair(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    Ok(())
}

fn check_directions(d: usize, directions: &[Vec<f64>]) -> Result<()> {
    if directions.is_empty() {
        return Err(Error::InvalidInput("no directions given".into()));
    }
    for t in directions {
        if t.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: t.len(),
            });
        }
        let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NonUnitDirection(norm));
        }
    }
    Ok(())
}

/// Maps `f` over `items` (in parallel when enabled), preserving order.
pub(crate) fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// `W₁(P_θ#μ, P_θ#ν)` for every direction, in order.
pub fn per_direction_w1(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    directions: &[Vec<f64>],
) -> Result<Vec<f64>> {
    check_pair(mu, nu)?;
    check_directions(mu.dim(), directions)?;
    Ok(ordered_map(directions, |t| {
        w1_cdf(&project_unchecked(mu, t), &project_unchecked(nu, t)).value
    }))
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `SW_p` on a fixed direction set. For `p > 1` the estimate is the plain
/// `p`-th root of the mean of `W_p^p` (no bias correction) and the standard
/// error is propagated by the delta method.
pub fn sw_on_directions(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    directions: &[Vec<f64>],
) -> Result<(f64, f64)> {
    check_pair(mu, nu)?;
    check_directions(mu.dim(), directions)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("p must be >= 1, got {p}")));
    }
    if p == 1.0 {
        let vals = per_direction_w1(mu, nu, directions)?;
        return Ok(mean_and_se(&vals));
    }
    let vals: Vec<f64> = ordered_map(directions, |t| {
        let w = wp_quantile(&project_unchecked(mu, t), &project_unchecked(nu, t), p)
            .expect("p validated");
        w.powf(p)
    });
    let (mean, se) = mean_and_se(&vals);
    let value = mean.powf(1.0 / p);
    let se = if mean > 0.0 {
        se * value / (p * mean)
    } else {
        0.0
    };
    Ok((value, se))
}

/// Monte Carlo `SW_p(μ, ν)` over `n_directions` uniform directions.
pub fn sw(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    n_directions: usize,
    seed: u64,
) -> Result<SlicedEstimate> {
    check_pair(mu, nu)?;
    if n_directions < 2 {
        return Err(Error::InvalidInput("sw needs at least two directions".into()));
    }
    if mu.dim() < 2 {
        return Err(Error::InvalidInput("sliced distances need d >= 2".into()));
    }
    let dirs = sphere_from_rng(&mut rng_stream(seed, "sw"), mu.dim(), n_directions);
    let (value, std_error) = sw_on_directions(mu, nu, p, &dirs)?;
    Ok(SlicedEstimate {
        value,
        std_error,
        n_directions,
        seed,
        best_direction: None,
    })
}

/// Exact mean of `W₁(P_θ#μ, P_θ#ν)` over the given directions.
pub fn empirical_sw(mu: &DiscreteMeasure, nu: &DiscreteMeasure, directions: &[Vec<f64>]) -> Result<f64> {
    let vals = per_direction_w1(mu, nu, directions)?;
    Ok(compensated_sum(vals.iter().copied()) / vals.len() as f64)
}

fn sliced_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure, t: &[f64]) -> f64 {
    w1_cdf(&project_unchecked(mu, t), &project_unchecked(nu, t)).value
}

/// Orthonormal basis of `θ⊥`.
fn tangent_basis(theta: &[f64]) -> Vec<Vec<f64>> {
    let d = theta.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for e in 0..d {
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for _ in 0..2 {
            let r = dot(&v, theta);
            for (x, t) in v.iter_mut().zip(theta) {
                *x -= r * t;
            }
            for b in &basis {
                let r = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= r * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
        if basis.len() == d - 1 {
            break;
        }
    }
    basis
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Lower bound on `MSW₁(μ, ν)`: the best of `n_candidates` random
/// directions, then `n_refine` rounds of pattern search on the sphere. Each
/// round tries `θ ± s·tᵢ` for a tangent basis `tᵢ`, moves to the best
/// improvement, and halves `s` when nothing improves.
pub fn msw(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    n_candidates: usize,
    n_refine: usize,
    seed: u64,
) -> Result<SlicedEstimate> {
    check_pair(mu, nu)?;
    if n_candidates == 0 {
        return Err(Error::InvalidInput("msw needs at least one candidate".into()));
    }
    if mu.dim() < 2 {
        return Err(Error::InvalidInput("sliced distances need d >= 2".into()));
    }
    let cands = sphere_from_rng(&mut rng_stream(seed, "msw"), mu.dim(), n_candidates);
    let vals = ordered_map(&cands, |t| sliced_1d(mu, nu, t));
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = i;
        }
    }
    let mut theta = cands[best].clone();
    let mut value = vals[best];
    let mut evaluations = n_candidates;
    let mut step = 0.5;
    for _ in 0..n_refine {
        let basis = tangent_basis(&theta);
        let mut trials = Vec::with_capacity(2 * basis.len());
        for b in &basis {
            for sign in [1.0, -1.0] {
                trials.push(normalized(
                    theta.iter().zip(b).map(|(t, x)| t + sign * step * x).collect(),
                ));
            }
        }
        let tv = ordered_map(&trials, |t| sliced_1d(mu, nu, t));
        evaluations += trials.len();
        let mut improved = None;
        let mut top = value;
        for (i, v) in tv.iter().enumerate() {
            if *v > top {
                top = *v;
                improved = Some(i);
            }
        }
        match improved {
            Some(i) => {
                theta = trials[i].clone();
                value = top;
            }
            None => step *= 0.5,
        }
        if step < 1e-12 {
            break;
        }
    }
    Ok(SlicedEstimate {
        value,
        std_error: 0.0,
        n_directions: evaluations,
        seed,
        best_direction: Some(theta),
    })
}

/// Per-frame `W₁(P_ξ#μ, P_ξ#ν)` by exact transport in `R^k`.
pub fn per_frame_w1(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    frames: &[Frame],
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    check_pair(mu, nu)?;
    for f in frames {
        if f.d() != mu.dim() {
            return Err(Error::DimensionMismatch {
                expected: mu.dim(),
                got: f.d(),
            });
        }
    }
    ordered_map(frames, |f| -> Result<f64> {
        let a = f.project(mu)?;
        let b = f.project(nu)?;
        Ok(w1_exact_with(&a, &b, config)?.cost)
    })
    .into_iter()
    .collect()
}

/// `SW₁ᵏ` on a fixed list of frames.
pub fn sw_k_on_frames(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    frames: &[Frame],
    config: &SolverConfig,
) -> Result<(f64, f64)> {
    if frames.is_empty() {
        return Err(Error::InvalidInput("no frames given".into()));
    }
    Ok(mean_and_se(&per_frame_w1(mu, nu, frames, config)?))
}

/// Monte Carlo `SW₁ᵏ(μ, ν)` over `n_frames` random `k`-planes.
pub fn sw_k(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    k: usize,
    n_frames: usize,
    seed: u64,
) -> Result<SlicedEstimate> {
    sw_k_with(mu, nu, k, n_frames, seed, &SolverConfig::default())
}

pub fn sw_k_with(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    k: usize,
    n_frames: usize,
    seed: u64,
    config: &SolverConfig,
) -> Result<SlicedEstimate> {
    check_pair(mu, nu)?;
    check_k(mu.dim(), k)?;
    let mut rng = rng_stream(seed, "swk");
    let frames: Vec<Frame> = (0..n_frames).map(|_| frame_from_rng(&mut rng, mu.dim(), k)).collect();
    let (value, std_error) = sw_k_on_frames(mu, nu, &frames, config)?;
    Ok(SlicedEstimate {
        value,
        std_error,
        n_directions: n_frames,
        seed,
        best_direction: None,
    })
}

/// `W₁(σ_{d−1}, m_N)` between the empirical measure of `directions` and a
/// reference discretization of the sphere, by exact transport with chordal
/// cost. The reference is `deterministic_directions(d, n_reference, seed)`,
/// so the result is itself an approximation with error of the order of the
/// reference's own quantification error.
pub fn quantification_error(directions: &[Vec<f64>], n_reference: usize, seed: u64) -> Result<f64> {
    let d = directions.first().map(|t| t.len()).unwrap_or(0);
    check_directions(d, directions)?;
    let reference = deterministic_directions(d, n_reference, seed)?;
    quantification_error_against(directions, &reference)
}

/// `W₁` between the empirical measures of two direction sets.
pub fn quantification_error_against(directions: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    let m = DiscreteMeasure::uniform(directions)?;
    let r = DiscreteMeasure::uniform(reference)?;
    Ok(crate::ot_exact::w1_exact(&m, &r)?.cost)
}

/// Right-hand side of the exponential-moment corollary:
/// `SW₁ + 2^{1/d} c_d SW₁^{1/d} ((1/α) log(M_α / SW₁))^{(d−1)/d}`.
///
/// The corollary is stated for odd `d`; any `d ≥ 2` is accepted here.
pub fn corollary_bound(sw1: f64, alpha: f64, m_alpha: f64, c_d: f64, d: usize) -> Result<f64> {
    if !(sw1 > 0.0) {
        return Err(Error::InvalidInput(format!("sw1 must be positive, got {sw1}")));
    }
    if !(sw1 < m_alpha) {
        return Err(Error::InvalidInput(format!(
            "sw1 = {sw1} must be below the exponential moment {m_alpha}"
        )));
    }
    if !(alpha > 0.0) || !(c_d > 0.0) || d < 2 {
        return Err(Error::InvalidInput("need alpha > 0, c_d > 0, d >= 2".into()));
    }
    let df = d as f64;
    let log_term = (m_alpha / sw1).ln() / alpha;
    Ok(sw1 + 2f64.powf(1.0 / df) * c_d * sw1.powf(1.0 / df) * log_term.powf((df - 1.0) / df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_samples_are_unit() {
        for d in [2, 3, 7] {
            for t in sample_sphere(d, 100, 1).unwrap() {
                let n = t.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
        assert!(sample_sphere(1, 3, 0).is_err());
    }

    #[test]
    fn sphere_moments() {
        let s = sample_sphere(2, 100_000, 7).unwrap();
        let mx: f64 = s.iter().map(|t| t[0]).sum::<f64>() / 1e5;
        let my: f64 = s.iter().map(|t| t[1]).sum::<f64>() / 1e5;
        assert!((mx * mx + my * my).sqrt() <= 0.02);
        let s = sample_sphere(3, 100_000, 8).unwrap();
        let z2: f64 = s.iter().map(|t| t[2] * t[2]).sum::<f64>() / 1e5;
        assert!((z2 - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn grassmannian_frames_are_orthonormal() {
        for (d, k) in [(3, 1), (3, 2), (5, 3), (4, 3)] {
            for f in sample_grassmannian(d, k, 50, 3).unwrap() {
                assert!(f.orthonormality_error() <= 1e-10);
            }
        }
        assert!(sample_grassmannian(3, 3, 1, 0).is_err());
        assert!(sample_grassmannian(3, 0, 1, 0).is_err());
    }

    #[test]
    fn deterministic_directions_are_unit_and_reproducible() {
        for d in [2, 3, 4, 6] {
            let a = deterministic_directions(d, 64, 5).unwrap();
            assert_eq!(a, deterministic_directions(d, 64, 5).unwrap());
            for t in &a {
                assert!((t.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sw_identical_is_zero() {
        let m = DiscreteMeasure::uniform(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        assert_eq!(sw(&m, &m, 1.0, 16, 0).unwrap().value, 0.0);
        assert_eq!(sw(&m, &m, 2.0, 16, 0).unwrap().value, 0.0);
        assert_eq!(msw(&m, &m, 8, 4, 0).unwrap().value, 0.0);
    }

    #[test]
    fn sw_dirac_pair_in_plane() {
        let a = DiscreteMeasure::dirac(&[0.0, 0.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[1.0, 0.0]).unwrap();
        let est = sw(&a, &b, 1.0, 20_000, 11).unwrap();
        assert!((est.value - 2.0 / PI).abs() < 3.0 * est.std_error);
    }

    #[test]
    fn msw_finds_axis() {
        let a = DiscreteMeasure::dirac(&[0.0, 0.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[1.0, 0.0]).unwrap();
        let est = msw(&a, &b, 16, 60, 2).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6);
        let t = est.best_direction.unwrap();
        assert!(t[0].abs() > 1.0 - 1e-6);
    }

    #[test]
    fn empirical_sw_examples() {
        let a = DiscreteMeasure::dirac(&[0.0, 0.0]).unwrap();
        let b = DiscreteMeasure::dirac(&[1.0, 0.0]).unwrap();
        assert_eq!(empirical_sw(&a, &b, &[vec![1.0, 0.0]]).unwrap(), 1.0);
        assert_eq!(empirical_sw(&a, &b, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 0.5);
        assert!(empirical_sw(&a, &b, &[vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn determinism() {
        let a = DiscreteMeasure::uniform(&[vec![0.0, 0.3, 1.0], vec![2.0, -1.0, 0.0]]).unwrap();
        let b = DiscreteMeasure::uniform(&[vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.5]]).unwrap();
        assert_eq!(sw(&a, &b, 1.0, 100, 9).unwrap(), sw(&a, &b, 1.0, 100, 9).unwrap());
        assert_eq!(sw_k(&a, &b, 2, 20, 9).unwrap(), sw_k(&a, &b, 2, 20, 9).unwrap());
        assert_ne!(sw(&a, &b, 1.0, 100, 9).unwrap().value, sw(&a, &b, 1.0, 100, 10).unwrap().value);
    }

    #[test]
    fn quantification_error_examples() {
        let refs = deterministic_directions(2, 256, 4).unwrap();
        assert!(quantification_error(&refs, 256, 4).unwrap() < 1e-12);
        let single = quantification_error(&[vec![1.0, 0.0]], 2048, 4).unwrap();
        assert!((single - 4.0 / PI).abs() < 1e-3, "{single}");
    }

    #[test]
    fn corollary_examples() {
        let v = corollary_bound(1e-3, 1.0, 1.0, 1.0, 3).unwrap();
        let want = 1e-3 + 2f64.powf(1.0 / 3.0) * 0.1 * (1000f64.ln()).powf(2.0 / 3.0);
        assert!((v - want).abs() < 1e-14);
        let near = corollary_bound(1.0 - 1e-12, 1.0, 1.0, 1.0, 3).unwrap();
        assert!((near - 1.0).abs() < 1e-3);
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let b = corollary_bound(1e-3, i as f64 * 0.2, 1.0, 1.0, 3).unwrap();
            assert!(b <= prev);
            prev = b;
        }
        assert!(corollary_bound(1.0, 1.0, 1.0, 1.0, 3).is_err());
        assert!(corollary_bound(0.0, 1.0, 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn inverse_normal_symmetry() {
        assert!(inverse_normal(0.5).abs() < 1e-15);
        assert!((inverse_normal(0.975) - 1.959_963_984_540_054).abs() < 1e-8);
        assert!((inverse_normal(0.01) + 2.326_347_874_040_841).abs() < 1e-8);
    }
}
