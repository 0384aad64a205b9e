//! Measure representations: weighted point clouds, signed measures split into
//! positive and negative parts, step CDFs of 1D discrete measures, and
//! analytic 1D measures given by density and CDF.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// A probability measure `Σ wᵢ δ_{xᵢ}` on `R^dim`.
///
/// Atoms are stored row-major in a flat buffer, sorted lexicographically with
/// duplicates merged and zero weights pruned. Weights sum to one.
#[derive(Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl fmt::Debug for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteMeasure")
            .field("dim", &self.dim)
            .field("len", &self.len())
            .finish()
    }
}

impl DiscreteMeasure {
    /// Validates, merges duplicates, drops zero-weight atoms, sorts atoms
    /// lexicographically and renormalizes the weights to sum to one (unless
    /// they already do, up to a few ulps per atom).
    pub fn new(points: &[Vec<f64>], weights: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("measure needs at least one atom".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have positive dimension".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, weights.to_vec())
    }

    /// Same as [`DiscreteMeasure::new`] on a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() != dim * weights.len() {
            return Err(Error::InvalidInput("coordinate buffer does not match weights".into()));
        }
        if weights.is_empty() {
            return Err(Error::InvalidInput("measure needs at least one atom".into()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("points"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("weights"));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0) {
            return Err(Error::InvalidInput(format!("negative weight {w}")));
        }
        let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
        if order.is_empty() {
            return Err(Error::ZeroMass);
        }
        let row = |i: usize| &coords[i * dim..(i + 1) * dim];
        order.sort_by(|&a, &b| lexicographic(row(a), row(b)));

        let mut out_coords: Vec<f64> = Vec::with_capacity(order.len() * dim);
        let mut out_weights: Vec<f64> = Vec::with_capacity(order.len());
        let mut groups: Vec<Vec<f64>> = Vec::with_capacity(order.len());
        for &i in &order {
            let same = out_weights
                .last()
                .is_some()
                && out_coords[out_coords.len() - dim..] == *row(i);
            if same {
                groups.last_mut().unwrap().push(weights[i]);
            } else {
                out_coords.extend_from_slice(row(i));
                out_weights.push(0.0);
                groups.push(vec![weights[i]]);
            }
        }
        for (w, g) in out_weights.iter_mut().zip(groups) {
            *w = compensated_sum(g);
        }
        let total = compensated_sum(out_weights.iter().copied());
        // weights already normalized to rounding are kept bit-for-bit, so a
        // serialized measure reloads unchanged
        if (total - 1.0).abs() > 4.0 * f64::EPSILON * out_weights.len() as f64 {
            for w in &mut out_weights {
                *w /= total;
            }
        }
        Ok(Self {
            dim,
            coords: out_coords,
            weights: out_weights,
        })
    }

    /// Uniform measure on the given points (duplicates merged).
    pub fn uniform(points: &[Vec<f64>]) -> Result<Self> {
        Self::new(points, &vec![1.0; points.len()])
    }

    pub fn dirac(point: &[f64]) -> Result<Self> {
        Self::new(&[point.to_vec()], &[1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// First moment `∫|x| dμ`.
    pub fn first_moment(&self) -> f64 {
        compensated_sum(
            self.points()
                .zip(&self.weights)
                .map(|(p, w)| w * p.iter().map(|v| v * v).sum::<f64>().sqrt()),
        )
    }

    /// Radius of the smallest origin-centred ball containing the support.
    pub fn support_radius(&self) -> f64 {
        self.points()
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Pushforward under the linear map `x ↦ Aᵀx`, `A` a `dim × k` row-major matrix.
    pub fn project_linear(&self, matrix: &[f64], k: usize) -> Result<Self> {
        if matrix.len() != self.dim * k {
            return Err(Error::DimensionMismatch {
                expected: self.dim * k,
                got: matrix.len(),
            });
        }
        let mut coords = Vec::with_capacity(self.len() * k);
        for p in self.points() {
            for c in 0..k {
                coords.push(p.iter().enumerate().map(|(r, v)| v * matrix[r * k + c]).sum());
            }
        }
        Self::from_flat(k, coords, self.weights.clone())
    }

    /// Applies `x ↦ Rx` with `R` a `dim × dim` row-major matrix.
    pub fn transform(&self, matrix: &[f64]) -> Result<Self> {
        let d = self.dim;
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: matrix.len(),
            });
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            for r in 0..d {
                coords.push((0..d).map(|c| matrix[r * d + c] * p[c]).sum());
            }
        }
        Self::from_flat(d, coords, self.weights.clone())
    }

    pub fn to_json(&self) -> MeasureFile {
        MeasureFile {
            dim: self.dim,
            points: self.points().map(|p| p.to_vec()).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(s)?;
        file.into_measure()
    }

    /// Loads a measure from a `.json` file (see [`MeasureFile`]) or a CSV file
    /// with one atom per row and the weight in the last column.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_csv = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("csv"))
            .unwrap_or(false);
        if is_csv {
            Self::from_csv_str(&text)
        } else {
            Self::from_json_str(&text)
        }
    }

    /// Rows `x1,...,xd,w`; blank lines and lines starting with `#` are
    /// skipped, as is a first row that does not parse as numbers (a header).
    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let fields = match fields {
                Ok(f) => f,
                Err(_) if points.is_empty() && weights.is_empty() && lineno == 0 => continue,
                Err(e) => return Err(Error::Io(format!("line {}: {e}", lineno + 1))),
            };
            if fields.len() < 2 {
                return Err(Error::Io(format!(
                    "line {}: need at least one coordinate and a weight",
                    lineno + 1
                )));
            }
            let (w, p) = fields.split_last().unwrap();
            points.push(p.to_vec());
            weights.push(*w);
        }
        Self::new(&points, &weights)
    }
}

/// On-disk JSON form: `{"dim": d, "points": [[..], ..], "weights": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl MeasureFile {
    pub fn into_measure(self) -> Result<DiscreteMeasure> {
        let m = DiscreteMeasure::new(&self.points, &self.weights)?;
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.dim(),
            });
        }
        Ok(m)
    }
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MeasureFile::deserialize(d)?
            .into_measure()
            .map_err(serde::de::Error::custom)
    }
}

/// `mass · (positive − negative)` with both parts probability measures.
#[derive(Debug, Clone)]
pub struct SignedDiscreteMeasure {
    pub positive: DiscreteMeasure,
    pub negative: DiscreteMeasure,
    pub mass: f64,
}

/// Splits a balanced signed atomic measure into normalized positive and
/// negative parts. Atoms at identical points are netted first.
pub fn signed_split(atoms: &[(Vec<f64>, f64)]) -> Result<SignedDiscreteMeasure> {
    if atoms.is_empty() {
        return Err(Error::InvalidInput("signed measure has no atoms".into()));
    }
    let dim = atoms[0].0.len();
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    for (p, w) in atoms {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        if !w.is_finite() || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("signed atoms"));
        }
    }
    order.sort_by(|&a, &b| lexicographic(&atoms[a].0, &atoms[b].0));
    let mut netted: Vec<(&[f64], Vec<f64>)> = Vec::new();
    for &i in &order {
        let (p, w) = &atoms[i];
        match netted.last_mut() {
            Some((q, ws)) if *q == p.as_slice() => ws.push(*w),
            _ => netted.push((p.as_slice(), vec![*w])),
        }
    }
    let mut pos_pts = Vec::new();
    let mut pos_w = Vec::new();
    let mut neg_pts = Vec::new();
    let mut neg_w = Vec::new();
    let mut abs_total = 0.0;
    for (p, ws) in netted {
        let w = compensated_sum(ws);
        abs_total += w.abs();
        if w > 0.0 {
            pos_pts.extend_from_slice(p);
            pos_w.push(w);
        } else if w < 0.0 {
            neg_pts.extend_from_slice(p);
            neg_w.push(-w);
        }
    }
    let plus = compensated_sum(pos_w.iter().copied());
    let minus = compensated_sum(neg_w.iter().copied());
    if (plus - minus).abs() > 1e-10 * abs_total.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "signed weights are unbalanced (total {:e})",
            plus - minus
        )));
    }
    if pos_w.is_empty() || neg_w.is_empty() {
        return Err(Error::InvalidInput(
            "signed measure needs both positive and negative weight".into(),
        ));
    }
    Ok(SignedDiscreteMeasure {
        positive: DiscreteMeasure::from_flat(dim, pos_pts, pos_w)?,
        negative: DiscreteMeasure::from_flat(dim, neg_pts, neg_w)?,
        mass: plus,
    })
}

/// Cumulative distribution function of a discrete measure on the line.
///
/// `cumulative[i]` is the measure of `(-∞, breakpoints[i]]`; the last entry
/// is exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCDF {
    breakpoints: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepCDF {
    /// Builds the CDF of `Σ wᵢ δ_{vᵢ}`. Atoms at bit-identical positions are
    /// merged; no tolerance-based merging.
    pub fn from_atoms(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() || values.is_empty() {
            return Err(Error::InvalidInput("values and weights must be nonempty and equal length".into()));
        }
        let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
        if pairs.iter().any(|(v, w)| !v.is_finite() || !w.is_finite()) {
            return Err(Error::NonFinite("1D atoms"));
        }
        if pairs.iter().any(|(_, w)| *w < 0.0) {
            return Err(Error::InvalidInput("negative weight".into()));
        }
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_sorted(pairs)
    }

    fn from_sorted(pairs: Vec<(f64, f64)>) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(pairs.len());
        let mut masses = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            if w == 0.0 {
                continue;
            }
            if breakpoints.last() == Some(&v) {
                *masses.last_mut().unwrap() += w;
            } else {
                breakpoints.push(v);
                masses.push(w);
            }
        }
        if breakpoints.is_empty() {
            return Err(Error::ZeroMass);
        }
        let mut cumulative = Vec::with_capacity(masses.len());
        let mut sum = 0.0;
        let mut comp = 0.0;
        for m in masses {
            let t = sum + m;
            if sum.abs() >= m.abs() {
                comp += (sum - t) + m;
            } else {
                comp += (m - t) + sum;
            }
            sum = t;
            cumulative.push(sum + comp);
        }
        let total = *cumulative.last().unwrap();
        for c in &mut cumulative {
            *c /= total;
        }
        Ok(Self {
            breakpoints,
            cumulative,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `F(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// Atom masses in breakpoint order.
    pub fn masses(&self) -> impl Iterator<Item = f64> + '_ {
        let mut prev = 0.0;
        self.cumulative.iter().map(move |&c| {
            let m = c - prev;
            prev = c;
            m
        })
    }

    /// The CDF of the image under `t ↦ t + shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|b| b + shift).collect(),
            cumulative: self.cumulative.clone(),
        }
    }

    /// The CDF of the image under `t ↦ λt`, `λ > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        Self {
            breakpoints: self.breakpoints.iter().map(|b| b * lambda).collect(),
            cumulative: self.cumulative.clone(),
        }
    }
}

/// CDF of the pushforward of `mu` under `x ↦ ⟨θ, x⟩`.
pub fn project_1d(mu: &DiscreteMeasure, theta: &[f64]) -> Result<StepCDF> {
    if theta.len() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: theta.len(),
        });
    }
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitDirection(norm));
    }
    Ok(project_unchecked(mu, theta))
}

pub(crate) fn project_unchecked(mu: &DiscreteMeasure, theta: &[f64]) -> StepCDF {
    let mut pairs: Vec<(f64, f64)> = mu
        .points()
        .zip(mu.weights())
        .map(|(p, &w)| (dot(p, theta), w))
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    StepCDF::from_sorted(pairs).expect("probability measure has positive mass")
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability measure on `[a, b]` given by its density and CDF.
#[derive(Clone)]
pub struct Analytic1DMeasure {
    density: RealFn,
    cdf: RealFn,
    support: (f64, f64),
}

impl fmt::Debug for Analytic1DMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analytic1DMeasure")
            .field("support", &self.support)
            .finish()
    }
}

impl Analytic1DMeasure {
    /// Checks `cdf(a) = 0`, `cdf(b) = 1` (within 1e-10) and monotonicity on a
    /// 2001-point grid.
    pub fn new<D, C>(density: D, cdf: C, support: (f64, f64)) -> Result<Self>
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (a, b) = support;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!("bad support [{a}, {b}]")));
        }
        if cdf(a).abs() > 1e-10 || (cdf(b) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "cdf does not run from 0 to 1: F(a) = {}, F(b) = {}",
                cdf(a),
                cdf(b)
            )));
        }
        const GRID: usize = 2000;
        let mut prev = cdf(a);
        for i in 1..=GRID {
            let t = a + (b - a) * i as f64 / GRID as f64;
            let v = cdf(t);
            if v < prev - 1e-14 {
                return Err(Error::InvalidInput(format!("cdf decreases near t = {t}")));
            }
            prev = v;
        }
        Ok(Self {
            density: Arc::new(density),
            cdf: Arc::new(cdf),
            support,
        })
    }

    pub fn density(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            0.0
        } else {
            (self.density)(t)
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= self.support.0 {
            0.0
        } else if t >= self.support.1 {
            1.0
        } else {
            (self.cdf)(t)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalizes_weights() {
        let m = DiscreteMeasure::new(&[vec![0.0, 0.0], vec![1.0, 0.0]], &[2.0, 2.0]).unwrap();
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn merges_duplicates() {
        let m = DiscreteMeasure::new(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[1.0, 1.0]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn rejects_zero_mass() {
        assert_eq!(DiscreteMeasure::new(&[vec![0.0]], &[0.0]), Err(Error::ZeroMass));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            DiscreteMeasure::new(&[vec![0.0, 1.0], vec![0.0]], &[1.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            DiscreteMeasure::new(&[vec![f64::NAN]], &[1.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new(&[vec![0.0]], &[f64::INFINITY]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn canonical_order_and_idempotence() {
        let m = DiscreteMeasure::new(
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![0.0, -1.0]],
            &[1.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(m.point(0), &[0.0, -1.0]);
        assert_eq!(m.point(2), &[1.0, 0.0]);
        let pts: Vec<Vec<f64>> = m.points().map(|p| p.to_vec()).collect();
        let again = DiscreteMeasure::new(&pts, m.weights()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn project_dirac() {
        let m = DiscreteMeasure::dirac(&[3.0, 4.0]).unwrap();
        let c = project_1d(&m, &[1.0, 0.0]).unwrap();
        assert_eq!(c.breakpoints(), &[3.0]);
        assert_eq!(c.cumulative(), &[1.0]);
    }

    #[test]
    fn project_collapses_atoms() {
        let m = DiscreteMeasure::uniform(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let c = project_1d(&m, &[0.0, 1.0]).unwrap();
        assert_eq!(c.breakpoints(), &[0.0]);
        assert_eq!(c.cumulative(), &[1.0]);
    }

    #[test]
    fn project_diagonal() {
        let m = DiscreteMeasure::uniform(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = project_1d(&m, &[s, s]).unwrap();
        // (1,1)·θ and (2,0)·θ are both s + s and 2s; equal in exact arithmetic
        let a = 1.0 * s + 1.0 * s;
        let b = 2.0 * s + 0.0 * s;
        assert_eq!(a, b);
        assert_eq!(c.len(), 2);
        assert_eq!(c.breakpoints()[0], 0.0);
        assert!((c.breakpoints()[1] - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.cumulative()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.cumulative()[1], 1.0);
    }

    #[test]
    fn project_rejects_non_unit() {
        let m = DiscreteMeasure::dirac(&[1.0, 1.0]).unwrap();
        assert!(matches!(project_1d(&m, &[1.0, 1.0]), Err(Error::NonUnitDirection(_))));
    }

    #[test]
    fn signed_split_examples() {
        let s = signed_split(&[(vec![0.0], 1.0), (vec![1.0], -1.0)]).unwrap();
        assert_eq!(s.mass, 1.0);
        assert_eq!(s.positive.point(0), &[0.0]);
        assert_eq!(s.negative.point(0), &[1.0]);

        let s = signed_split(&[(vec![0.0], 0.5), (vec![1.0], 0.5), (vec![2.0], -1.0)]).unwrap();
        assert_eq!(s.mass, 1.0);
        assert_eq!(s.positive.len(), 2);
        assert_eq!(s.positive.weights(), &[0.5, 0.5]);
        assert_eq!(s.negative.point(0), &[2.0]);
    }

    #[test]
    fn signed_split_errors() {
        assert!(signed_split(&[(vec![0.0], 1.0), (vec![1.0], -0.5)]).is_err());
        assert!(signed_split(&[(vec![0.0], 1.0), (vec![0.0], -1.0)]).is_err());
    }

    #[test]
    fn signed_split_nets_coincident_atoms() {
        let s = signed_split(&[
            (vec![0.0], 1.0),
            (vec![0.0], -0.5),
            (vec![1.0], -0.5),
        ])
        .unwrap();
        assert_eq!(s.mass, 0.5);
        assert_eq!(s.positive.len(), 1);
        assert_eq!(s.negative.point(0), &[1.0]);
    }

    #[test]
    fn json_and_csv_round_trip() {
        let m = DiscreteMeasure::new(&[vec![0.5, 1.0], vec![-1.0, 2.0]], &[1.0, 3.0]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"dim\":2"));
        let back = DiscreteMeasure::from_json_str(&text).unwrap();
        assert_eq!(back, m);
        let csv = "x,y,w\n0.5,1.0,1\n-1.0,2.0,3\n";
        assert_eq!(DiscreteMeasure::from_csv_str(csv).unwrap(), m);
    }

    #[test]
    fn analytic_measure_validation() {
        let uni = Analytic1DMeasure::new(|_| 0.5, |t| 0.5 * (t + 1.0), (-1.0, 1.0)).unwrap();
        assert_eq!(uni.cdf(5.0), 1.0);
        assert_eq!(uni.density(-3.0), 0.0);
        assert!(Analytic1DMeasure::new(|_| 0.5, |t| 0.5 * (1.0 - t), (-1.0, 1.0)).is_err());
        assert!(Analytic1DMeasure::new(|_| 1.0, |t| (t + 1.0).min(1.0), (-1.0, 1.0)).is_ok());
        assert!(Analytic1DMeasure::new(|_| 1.0, |t| 0.4 * (t + 1.0), (-1.0, 1.0)).is_err());
    }

    #[test]
    fn compensated_sum_of_many_small_weights() {
        let n = 1_000_000;
        let s = compensated_sum(std::iter::repeat_n(1.0 / n as f64, n));
        assert!((s - 1.0).abs() < 1e-15);
    }
}
