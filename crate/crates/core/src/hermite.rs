//! Gauss-Hermite velocity discretization and the orthonormal Hermite basis.
//!
//! Velocities are the 2N roots of the degree-2N Hermite polynomial (weight
//! `exp(-v^2)`). Moments of a discrete distribution `f` are `g_k = Σ_i
//! H_k(v_i) f_i` with the Hermite functions `H_k = P_k exp(-v^2/2)`. The
//! physical transport speed of velocity node `i` is `√2 v_i`.
//!
//! All Hermite function values are produced by a scaled recursion that
//! carries the `exp(-v^2/2)` factor in log form, so nothing overflows even for
//! the largest supported order.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::tridiag;

/// Largest supported half order N.
pub const MAX_HALF_ORDER: usize = 1500;

const RESCALE: f64 = 1e150;

/// Recursion coefficient `α_k = sqrt(k/2)`.
#[inline]
pub fn alpha(k: usize) -> f64 {
    (k as f64 / 2.0).sqrt()
}

/// Values `H_0(v) .. H_{count-1}(v)`.
pub fn hermite_functions(v: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    scaled_recursion(v, count, |_, h| out.push(h));
    out
}

/// Runs the orthonormal recursion at `v`, handing `(k, H_k(v))` to `sink`.
/// The mantissa is renormalized whenever it grows past `RESCALE`; the
/// accumulated log scale starts at `-v^2/2`.
fn scaled_recursion(v: f64, count: usize, mut sink: impl FnMut(usize, f64)) {
    if count == 0 {
        return;
    }
    let mut log_scale = -0.5 * v * v;
    let emit = |p: f64, log_scale: f64| -> f64 {
        if p == 0.0 {
            0.0
        } else {
            p.signum() * (log_scale + p.abs().ln()).exp()
        }
    };
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    sink(0, emit(cur, log_scale));
    for k in 1..count {
        // v P_{k-1} = α_k P_k + α_{k-1} P_{k-2}
        let next = (v * cur - alpha(k - 1) * prev) / alpha(k);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        sink(k, emit(cur, log_scale));
    }
}

/// Evaluates `Σ_k coeffs[k] H_k(v)` weighted by a further `H_0(v)`, i.e. the
/// reconstruction `H_0(v) Σ g_k H_k(v)` in scaled arithmetic.
pub fn weighted_series(v: f64, coeffs: &[f64]) -> f64 {
    // H_0 H_k = P_0 P_k exp(-v^2): run the recursion with a doubled log scale.
    if coeffs.is_empty() {
        return 0.0;
    }
    let p0 = PI.powf(-0.25);
    let mut log_scale = -v * v;
    let mut prev = 0.0;
    let mut cur = p0;
    let mut total = 0.0;
    let mut add = |p: f64, ls: f64, c: f64| {
        if p != 0.0 && c != 0.0 {
            total += c * p.signum() * p0 * (ls + p.abs().ln()).exp();
        }
    };
    add(cur, log_scale, coeffs[0]);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        let next = (v * cur - alpha(k - 1) * prev) / alpha(k);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        add(cur, log_scale, c);
    }
    total
}

/// 2N-point Gauss-Hermite rule for the weight `exp(-v^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    half: usize,
    /// Ascending nodes, antisymmetric about zero.
    pub nodes: Vec<f64>,
    /// Standard Gauss-Hermite weights (sum to √π).
    pub weights: Vec<f64>,
    /// `w_i exp(v_i^2)`, computed without forming the factors separately.
    pub scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the rule with 2N points by the Golub-Welsch construction.
    pub fn new(half: usize) -> Result<Self> {
        if half == 0 || half > MAX_HALF_ORDER {
            return Err(invalid(format!(
                "half order N must lie in 1..={MAX_HALF_ORDER}, got {half}"
            )));
        }
        let n = 2 * half;
        let off: Vec<f64> = (1..n).map(alpha).collect();
        let eig = tridiag::eigen_first_row(&vec![0.0; n], &off)?;
        let mut nodes = eig.values;
        let mut weights: Vec<f64> = eig.first.iter().map(|z| z * z * PI.sqrt()).collect();

        // Newton polish on P_n with P_n' = sqrt(2n) P_{n-1}.
        for v in nodes.iter_mut() {
            for _ in 0..3 {
                let h = hermite_functions(*v, n + 1);
                let denom = (2.0 * n as f64).sqrt() * h[n - 1];
                if denom == 0.0 {
                    break;
                }
                let step = h[n] / denom;
                *v -= step;
                if step.abs() < 1e-16 * v.abs().max(1.0) {
                    break;
                }
            }
        }
        for i in 0..half {
            let j = n - 1 - i;
            let mag = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -mag;
            nodes[j] = mag;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        for w in nodes.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::NumericFailure(format!(
                    "Gauss-Hermite nodes not strictly ascending for N={half}"
                )));
            }
        }
        let mut scaled_weights: Vec<f64> = nodes
            .iter()
            .map(|&v| {
                let s: f64 = hermite_functions(v, n).iter().map(|h| h * h).sum();
                1.0 / s
            })
            .collect();
        for i in 0..half {
            let j = n - 1 - i;
            let w = 0.5 * (scaled_weights[i] + scaled_weights[j]);
            scaled_weights[i] = w;
            scaled_weights[j] = w;
        }
        Ok(QuadratureRule {
            half,
            nodes,
            weights,
            scaled_weights,
        })
    }

    /// N, half the number of nodes.
    pub fn half_order(&self) -> usize {
        self.half
    }

    /// 2N, the number of nodes.
    pub fn order(&self) -> usize {
        2 * self.half
    }

    /// Index of the velocity `-v_i`.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        self.order() - 1 - i
    }

    /// Physical transport speeds `√2 v_i`.
    pub fn speeds(&self) -> Vec<f64> {
        self.nodes.iter().map(|v| SQRT_2 * v).collect()
    }

    /// `Σ w_i p(v_i)`.
    pub fn integrate(&self, p: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| w * p(v))
            .sum()
    }
}

/// Orthonormal Hermite data at the quadrature nodes.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    order: usize,
    /// `alpha[k] = sqrt(k/2)` for k = 0..=2N.
    pub alpha: Vec<f64>,
    /// Row-major, `weighted[k * 2N + i] = H_k(v_i)`.
    weighted: Vec<f64>,
    nodes: Vec<f64>,
}

impl HermiteTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `H_k(v_i)`.
    #[inline]
    pub fn h(&self, k: usize, i: usize) -> f64 {
        self.weighted[k * self.order + i]
    }

    /// `P_k(v_i) = H_k(v_i) exp(v_i^2/2)`. Only finite for moderate N.
    pub fn p(&self, k: usize, i: usize) -> f64 {
        let v = self.nodes[i];
        self.h(k, i) * (0.5 * v * v).exp()
    }

    /// Row `k` of the Hermite function table.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.weighted[k * self.order..(k + 1) * self.order]
    }

    /// Largest `|v P_k − α_{k+1} P_{k+1} − α_k P_{k−1}|` over nodes and
    /// k = 0..2N−2, measured on the Hermite functions.
    pub fn recursion_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.order - 1 {
            for (i, &v) in self.nodes.iter().enumerate() {
                let below = if k == 0 {
                    0.0
                } else {
                    self.alpha[k] * self.h(k - 1, i)
                };
                let r = v * self.h(k, i) - self.alpha[k + 1] * self.h(k + 1, i) - below;
                worst = worst.max(r.abs());
            }
        }
        worst
    }
}

/// The matrix `S` with rows `H_k(v_i)` mapping distributions to moments.
///
/// Discrete orthonormality gives `S W Sᵀ = I` with `W = diag(w_i e^{v_i²})`,
/// so `S = Q W^{-1/2}` with `Q` orthogonal. That factorization is what is
/// stored: the inverse is applied as `W Sᵀ` followed by one refinement
/// sweep, never formed.
#[derive(Debug, Clone)]
pub struct MomentTransform {
    order: usize,
    table: HermiteTable,
    scaled_weights: Vec<f64>,
}

impl MomentTransform {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &HermiteTable {
        &self.table
    }

    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// Dense copy of `S`, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        self.table.weighted.clone()
    }

    /// `G = S f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f.len())?;
        Ok((0..self.order)
            .map(|k| self.table.row(k).iter().zip(f).map(|(h, x)| h * x).sum())
            .collect())
    }

    fn apply_adjoint_weighted(&self, g: &[f64]) -> Vec<f64> {
        let n = self.order;
        let mut out = vec![0.0; n];
        for (k, &gk) in g.iter().enumerate() {
            if gk == 0.0 {
                continue;
            }
            for (o, h) in out.iter_mut().zip(self.table.row(k)) {
                *o += h * gk;
            }
        }
        for (o, w) in out.iter_mut().zip(&self.scaled_weights) {
            *o *= w;
        }
        out
    }

    /// Solves `S f = G`.
    pub fn solve(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(g.len())?;
        let mut f = self.apply_adjoint_weighted(g);
        let applied = self.apply(&f)?;
        let residual: Vec<f64> = g.iter().zip(&applied).map(|(a, b)| a - b).collect();
        let correction = self.apply_adjoint_weighted(&residual);
        for (x, c) in f.iter_mut().zip(correction) {
            *x += c;
        }
        Ok(f)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.order {
            return Err(Error::LengthMismatch {
                expected: self.order,
                got,
            });
        }
        Ok(())
    }

    /// Moments of a discrete distribution.
    pub fn moments(&self, f: &[f64]) -> Result<MomentSet> {
        Ok(MomentSet::new(self.apply(f)?))
    }

    /// `M_i = w_i e^{v_i²} (H_0 g_0 + H_1 g_1 + H_2 g_2)`.
    pub fn discrete_maxwellian(&self, g0: f64, g1: f64, g2: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.order];
        self.maxwellian_into(g0, g1, g2, &mut out);
        out
    }

    /// In-place variant of [`Self::discrete_maxwellian`] for hot loops.
    pub fn maxwellian_into(&self, g0: f64, g1: f64, g2: f64, out: &mut [f64]) {
        let (r0, r1, r2) = (self.table.row(0), self.table.row(1), self.table.row(2));
        for i in 0..self.order {
            out[i] = self.scaled_weights[i] * (r0[i] * g0 + r1[i] * g1 + r2[i] * g2);
        }
    }

    /// Linearized Maxwellian for the macroscopic state (ρ, q, S).
    pub fn maxwellian_from_state(&self, rho: f64, q: f64, s: f64) -> Vec<f64> {
        let (g0, g1, g2) = state_to_moments(rho, q, s);
        self.discrete_maxwellian(g0, g1, g2)
    }
}

/// `(g_0, g_1, g_2)` of the equilibrium with density ρ, flux q and energy S.
pub fn state_to_moments(rho: f64, q: f64, s: f64) -> (f64, f64, f64) {
    (rho / SQRT_2, q / SQRT_2, 0.5 * (s - rho))
}

/// Builds the Hermite table and moment transform for a rule.
pub fn build_tables(rule: &QuadratureRule) -> (HermiteTable, MomentTransform) {
    let n = rule.order();
    let mut weighted = vec![0.0; n * n];
    for (i, &v) in rule.nodes.iter().enumerate() {
        scaled_recursion(v, n, |k, h| weighted[k * n + i] = h);
    }
    let table = HermiteTable {
        order: n,
        alpha: (0..=n).map(alpha).collect(),
        weighted,
        nodes: rule.nodes.clone(),
    };
    let transform = MomentTransform {
        order: n,
        table: table.clone(),
        scaled_weights: rule.scaled_weights.clone(),
    };
    (table, transform)
}

/// Moment vector `g_0..g_{2N−1}` and the derived macroscopic quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub g: Vec<f64>,
    pub rho: f64,
    pub q: f64,
    /// Energy `S = ∫ v² f`.
    pub energy: f64,
    /// Third-order moment `h = ∫ v³ f = 3q + 2√3 g_3`.
    pub h: f64,
}

impl MomentSet {
    pub fn new(g: Vec<f64>) -> Self {
        let at = |k: usize| g.get(k).copied().unwrap_or(0.0);
        let rho = SQRT_2 * at(0);
        let q = SQRT_2 * at(1);
        let energy = 2.0 * at(2) + rho;
        let h = 3.0 * q + 2.0 * 3f64.sqrt() * at(3);
        MomentSet {
            g,
            rho,
            q,
            energy,
            h,
        }
    }
}

/// Everything the downstream modules need about the velocity grid.
#[derive(Debug, Clone)]
pub struct VelocityBasis {
    pub rule: QuadratureRule,
    pub transform: MomentTransform,
}

impl VelocityBasis {
    pub fn new(half: usize) -> Result<Self> {
        let rule = QuadratureRule::new(half)?;
        let (_, transform) = build_tables(&rule);
        Ok(VelocityBasis { rule, transform })
    }

    pub fn half_order(&self) -> usize {
        self.rule.half_order()
    }

    pub fn table(&self) -> &HermiteTable {
        self.transform.table()
    }

    /// Discrete values as samples of a function of the physical velocity:
    /// `(√2 v_i, H_0(v_i) f_i / ŵ_i)`.
    pub fn pointwise(&self, f: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.transform.check_len(f.len())?;
        let h0 = self.table().row(0);
        Ok(self
            .rule
            .nodes
            .iter()
            .zip(f)
            .zip(h0.iter().zip(self.transform.scaled_weights()))
            .map(|((&v, &x), (&h, &w))| (SQRT_2 * v, h * x / w))
            .collect())
    }
}
