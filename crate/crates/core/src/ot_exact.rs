//! Exact discrete W₁ with Euclidean ground cost, solved as a transportation
//! problem by the primal network simplex method.
//!
//! The spanning tree is kept strongly feasible (Cunningham's leaving-arc rule)
//! which rules out cycling on degenerate pivots. Entering arcs are chosen by
//! block search with lowest-index tie-breaking, so the result is a
//! deterministic function of the canonical atom order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{compensated_sum, DiscreteMeasure, SignedDiscreteMeasure};

/// Default bound on `|supp μ|·|supp ν|`, the number of dense cost entries.
pub const DEFAULT_SIZE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub size_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

/// A transport plan together with the Kantorovich potentials certifying it.
///
/// Indices refer to the atoms of the (canonically ordered) input measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
    pub source_weights: Vec<f64>,
    pub target_weights: Vec<f64>,
    pub dual_source: Option<Vec<f64>>,
    pub dual_target: Option<Vec<f64>>,
}

impl TransportPlan {
    /// Dual objective `Σ fᵢ aᵢ + Σ gⱼ bⱼ`.
    pub fn dual_objective(&self) -> Option<f64> {
        let f = self.dual_source.as_ref()?;
        let g = self.dual_target.as_ref()?;
        Some(compensated_sum(
            f.iter()
                .zip(&self.source_weights)
                .map(|(x, w)| x * w)
                .chain(g.iter().zip(&self.target_weights).map(|(x, w)| x * w)),
        ))
    }

    /// Largest deviation of the plan's row and column sums from the marginals.
    pub fn marginal_error(&self) -> f64 {
        let mut rows = vec![0.0; self.source_weights.len()];
        let mut cols = vec![0.0; self.target_weights.len()];
        for &(i, j, m) in &self.entries {
            rows[i] += m;
            cols[j] += m;
        }
        rows.iter()
            .zip(&self.source_weights)
            .chain(cols.iter().zip(&self.target_weights))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of `fᵢ + gⱼ ≤ |xᵢ − yⱼ|` over all pairs, and of
    /// equality on the support of the plan.
    pub fn slackness_violation(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Option<f64> {
        let f = self.dual_source.as_ref()?;
        let g = self.dual_target.as_ref()?;
        let mut worst: f64 = 0.0;
        for (i, x) in mu.points().enumerate() {
            for (j, y) in nu.points().enumerate() {
                worst = worst.max(f[i] + g[j] - euclid(x, y));
            }
        }
        for &(i, j, _) in &self.entries {
            worst = worst.max((f[i] + g[j] - euclid(mu.point(i), nu.point(j))).abs());
        }
        Some(worst)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

/// Primal cost minus dual objective, clamped at zero.
pub fn dual_gap(plan: &TransportPlan) -> Result<f64> {
    let dual = plan
        .dual_objective()
        .ok_or_else(|| Error::InvalidInput("plan carries no dual potentials".into()))?;
    Ok((plan.cost - dual).max(0.0))
}

pub fn w1_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportPlan> {
    w1_exact_with(mu, nu, &SolverConfig::default())
}

pub fn w1_exact_with(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    config: &SolverConfig,
) -> Result<TransportPlan> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    let size = mu.len().saturating_mul(nu.len());
    if size > config.size_cap {
        return Err(Error::SizeCap {
            size,
            cap: config.size_cap,
        });
    }
    let costs = cost_matrix(mu, nu);
    let mut solver = NetworkSimplex::new(mu.weights(), nu.weights(), costs);
    solver.solve()?;
    Ok(solver.into_plan())
}

/// `M · W₁(positive, negative)`.
pub fn w1_signed(s: &SignedDiscreteMeasure) -> Result<f64> {
    Ok(s.mass * w1_exact(&s.positive, &s.negative)?.cost)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn cost_matrix(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<f64> {
    let m = nu.len();
    let mut costs = vec![0.0; mu.len() * m];
    let fill = |(i, row): (usize, &mut [f64])| {
        let x = mu.point(i);
        for (j, c) in row.iter_mut().enumerate() {
            *c = euclid(x, nu.point(j));
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        costs.par_chunks_mut(m).enumerate().for_each(fill);
    }
    #[cfg(not(feature = "parallel"))]
    costs.chunks_mut(m).enumerate().for_each(fill);
    costs
}

const NONE: usize = usize::MAX;

/// Network simplex on the complete bipartite graph sources → targets, with an
/// artificial root joined by arcs `source → root` and `root → target`.
struct NetworkSimplex {
    n: usize,
    m: usize,
    root: usize,
    supply: Vec<f64>,
    demand: Vec<f64>,
    costs: Vec<f64>,
    art_cost: f64,
    tol: f64,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_up: Vec<bool>,
    depth: Vec<usize>,
    first_child: Vec<usize>,
    next_sib: Vec<usize>,
    prev_sib: Vec<usize>,
    next_arc: usize,
}

impl NetworkSimplex {
    fn new(supply: &[f64], demand: &[f64], costs: Vec<f64>) -> Self {
        let (n, m) = (supply.len(), demand.len());
        let real = n * m;
        let nodes = n + m + 1;
        let root = n + m;
        let max_cost = costs.iter().copied().fold(0.0, f64::max);
        // any path source → root → target can be shortcut by the direct arc
        // once 2·art_cost exceeds the largest real cost
        let art_cost = max_cost + 1.0;
        let mut s = Self {
            n,
            m,
            root,
            supply: supply.to_vec(),
            demand: demand.to_vec(),
            costs,
            art_cost,
            tol: 1e-12 * art_cost,
            flow: vec![0.0; real + n + m],
            in_tree: vec![false; real + n + m],
            pi: vec![0.0; nodes],
            parent: vec![NONE; nodes],
            pred: vec![NONE; nodes],
            pred_up: vec![false; nodes],
            depth: vec![0; nodes],
            first_child: vec![NONE; nodes],
            next_sib: vec![NONE; nodes],
            prev_sib: vec![NONE; nodes],
            next_arc: 0,
        };
        for (i, &sup) in supply.iter().enumerate() {
            let a = real + i;
            s.flow[a] = sup;
            s.in_tree[a] = true;
            s.pred[i] = a;
            s.pred_up[i] = true;
            s.depth[i] = 1;
            s.pi[i] = -art_cost;
            s.attach(i, root);
        }
        for (j, &dem) in demand.iter().enumerate() {
            let a = real + n + j;
            let v = n + j;
            s.flow[a] = dem;
            s.in_tree[a] = true;
            s.pred[v] = a;
            s.pred_up[v] = false;
            s.depth[v] = 1;
            s.pi[v] = art_cost;
            s.attach(v, root);
        }
        s
    }

    fn num_arcs(&self) -> usize {
        self.flow.len()
    }

    fn tail_head(&self, a: usize) -> (usize, usize) {
        let real = self.n * self.m;
        if a < real {
            (a / self.m, self.n + a % self.m)
        } else if a < real + self.n {
            (a - real, self.root)
        } else {
            (self.root, self.n + (a - real - self.n))
        }
    }

    fn cost(&self, a: usize) -> f64 {
        if a < self.costs.len() {
            self.costs[a]
        } else {
            self.art_cost
        }
    }

    fn reduced_cost(&self, a: usize) -> f64 {
        let (u, v) = self.tail_head(a);
        self.cost(a) + self.pi[u] - self.pi[v]
    }

    fn attach(&mut self, child: usize, parent: usize) {
        self.parent[child] = parent;
        let head = self.first_child[parent];
        self.next_sib[child] = head;
        self.prev_sib[child] = NONE;
        if head != NONE {
            self.prev_sib[head] = child;
        }
        self.first_child[parent] = child;
    }

    fn detach(&mut self, child: usize) {
        let p = self.parent[child];
        let (prev, next) = (self.prev_sib[child], self.next_sib[child]);
        if prev == NONE {
            self.first_child[p] = next;
        } else {
            self.next_sib[prev] = next;
        }
        if next != NONE {
            self.prev_sib[next] = prev;
        }
        self.parent[child] = NONE;
        self.next_sib[child] = NONE;
        self.prev_sib[child] = NONE;
    }

    /// Block search: scans blocks of about √arcs arcs starting after the last
    /// entering arc and returns the most negative arc of the first block that
    /// contains one.
    fn find_entering(&mut self) -> Option<usize> {
        let total = self.num_arcs();
        let block = ((total as f64).sqrt() as usize).max(16);
        let mut best = NONE;
        let mut best_rc = -self.tol;
        let mut scanned = 0;
        let mut a = self.next_arc;
        while scanned < total {
            let end = (scanned + block).min(total);
            while scanned < end {
                if !self.in_tree[a] {
                    let rc = self.reduced_cost(a);
                    if rc < best_rc || (rc == best_rc && best != NONE && a < best) {
                        best_rc = rc;
                        best = a;
                    }
                }
                a += 1;
                if a == total {
                    a = 0;
                }
                scanned += 1;
            }
            if best != NONE {
                self.next_arc = a;
                return Some(best);
            }
        }
        None
    }

    fn solve(&mut self) -> Result<()> {
        let max_pivots = 50 * self.num_arcs() + 1000;
        let mut pivots = 0usize;
        while let Some(e) = self.find_entering() {
            self.pivot(e);
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::Solver(format!("no convergence after {pivots} pivots")));
            }
        }
        let real = self.n * self.m;
        let stray = self.flow[real..].iter().copied().fold(0.0, f64::max);
        if stray > 1e-9 {
            return Err(Error::Solver(format!(
                "artificial arcs carry flow {stray:e} at optimum"
            )));
        }
        Ok(())
    }

    fn pivot(&mut self, e: usize) {
        let (u, v) = self.tail_head(e);

        // apex of the cycle
        let (mut a, mut b) = (u, v);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        let apex = a;

        // cycle in flow direction starting at the apex: down to u, across e,
        // up from v; the leaving arc is the last blocking arc of minimal flow
        let mut u_side = Vec::new();
        let mut w = u;
        while w != apex {
            u_side.push(w);
            w = self.parent[w];
        }
        let mut v_side = Vec::new();
        let mut w = v;
        while w != apex {
            v_side.push(w);
            w = self.parent[w];
        }
        let mut delta = f64::INFINITY;
        let mut leaving = NONE;
        for &w in u_side.iter().rev() {
            // traversal parent → w: blocking when the arc points w → parent
            if self.pred_up[w] && self.flow[self.pred[w]] <= delta {
                delta = self.flow[self.pred[w]];
                leaving = w;
            }
        }
        for &w in &v_side {
            // traversal w → parent: blocking when the arc points parent → w
            if !self.pred_up[w] && self.flow[self.pred[w]] <= delta {
                delta = self.flow[self.pred[w]];
                leaving = w;
            }
        }
        debug_assert!(leaving != NONE, "uncapacitated cycle without blocking arc");

        if delta > 0.0 {
            self.flow[e] += delta;
            for &w in &u_side {
                let a = self.pred[w];
                if self.pred_up[w] {
                    self.flow[a] -= delta;
                } else {
                    self.flow[a] += delta;
                }
            }
            for &w in &v_side {
                let a = self.pred[w];
                if self.pred_up[w] {
                    self.flow[a] += delta;
                } else {
                    self.flow[a] -= delta;
                }
            }
        }
        let out_arc = self.pred[leaving];
        self.flow[out_arc] = 0.0;
        self.in_tree[out_arc] = false;
        self.in_tree[e] = true;

        // re-hang the subtree cut off below `leaving`
        let on_u_side = u_side.contains(&leaving);
        let (q, p) = if on_u_side { (u, v) } else { (v, u) };
        let mut path = Vec::new();
        let mut w = q;
        loop {
            path.push(w);
            if w == leaving {
                break;
            }
            w = self.parent[w];
        }
        let old_pred: Vec<usize> = path.iter().map(|&x| self.pred[x]).collect();
        let old_up: Vec<bool> = path.iter().map(|&x| self.pred_up[x]).collect();
        for &x in &path {
            self.detach(x);
        }
        self.attach(q, p);
        self.pred[q] = e;
        self.pred_up[q] = u == q;
        for k in 1..path.len() {
            let x = path[k];
            self.attach(x, path[k - 1]);
            self.pred[x] = old_pred[k - 1];
            self.pred_up[x] = !old_up[k - 1];
        }
        self.refresh_subtree(q);
    }

    /// Recomputes depth and potentials below (and including) `top` from its parent.
    fn refresh_subtree(&mut self, top: usize) {
        let mut stack = vec![top];
        while let Some(x) = stack.pop() {
            let p = self.parent[x];
            let c = self.cost(self.pred[x]);
            self.depth[x] = self.depth[p] + 1;
            self.pi[x] = if self.pred_up[x] {
                self.pi[p] - c
            } else {
                self.pi[p] + c
            };
            let mut ch = self.first_child[x];
            while ch != NONE {
                stack.push(ch);
                ch = self.next_sib[ch];
            }
        }
    }

    fn into_plan(self) -> TransportPlan {
        let real = self.n * self.m;
        let mut entries = Vec::new();
        for a in 0..real {
            if self.flow[a] > 0.0 {
                entries.push((a / self.m, a % self.m, self.flow[a]));
            }
        }
        let cost = compensated_sum(
            entries
                .iter()
                .map(|&(i, j, f)| f * self.costs[i * self.m + j]),
        );
        let shift = self.pi[0];
        let dual_source = (0..self.n).map(|i| shift - self.pi[i]).collect();
        let dual_target = (0..self.m).map(|j| self.pi[self.n + j] - shift).collect();
        TransportPlan {
            entries,
            cost,
            source_weights: self.supply,
            target_weights: self.demand,
            dual_source: Some(dual_source),
            dual_target: Some(dual_target),
        }
    }
}
