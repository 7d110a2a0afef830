//! Discrete kinetic layer: the tridiagonal system for the non-conserved
//! moments `g_4 .. g_{2N-1}`, its stable manifold and the lift matrix `T`
//! that maps the layer unknowns `(D, C, B, γ)` to all moments at `x = 0`.
//!
//! In the layer the moments satisfy `√2 A ∂_x g = −g`. Eigenpairs `(λ, r)` of
//! `A` with `λ > 0` give the bounded modes `r exp(−x / (√2 λ))`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::hermite::alpha;
use crate::tridiag;

/// Symmetric zero-diagonal tridiagonal layer matrix of size 2(N−2).
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMatrix {
    half: usize,
    /// `α_5 .. α_{2N−1}`.
    pub offdiag: Vec<f64>,
}

impl LayerMatrix {
    pub fn new(half: usize) -> Result<Self> {
        if half < 4 {
            return Err(invalid(format!("layer system needs N >= 4, got N={half}")));
        }
        let offdiag = (5..2 * half).map(alpha).collect();
        Ok(LayerMatrix { half, offdiag })
    }

    pub fn half_order(&self) -> usize {
        self.half
    }

    pub fn dim(&self) -> usize {
        2 * (self.half - 2)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, &e) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    /// `A x` without forming `A`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for (i, &e) in self.offdiag.iter().enumerate() {
            y[i] += e * x[i + 1];
            y[i + 1] += e * x[i];
        }
        y
    }
}

/// Eigen-decomposition of the layer matrix and its stable manifold.
#[derive(Debug, Clone)]
pub struct LayerSpectrum {
    half: usize,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
    /// Indices into `eigenvalues` of the N−2 positive eigenvalues, ascending.
    pub positive_indices: Vec<usize>,
    /// `R₂⁺`: eigenvectors of the positive eigenvalues, 2(N−2) × (N−2).
    pub r2plus: DMatrix<f64>,
}

impl LayerSpectrum {
    /// Stable manifold via the tridiagonal QL solver.
    pub fn new(a: &LayerMatrix) -> Result<Self> {
        let dim = a.dim();
        let eig = tridiag::eigen(&vec![0.0; dim], &a.offdiag).map_err(|e| match e {
            Error::NumericFailure(_) => Error::NumericFailure(format!(
                "layer eigensolver did not converge for {dim}x{dim} matrix"
            )),
            other => other,
        })?;
        let mut vectors = DMatrix::zeros(dim, dim);
        for (j, v) in eig.vectors.iter().enumerate() {
            vectors.set_column(j, &DVector::from_column_slice(v));
        }
        Self::assemble(a.half, eig.values, vectors)
    }

    /// Same decomposition through nalgebra's dense symmetric solver. Kept
    /// for cross-validation at small N.
    pub fn dense(a: &LayerMatrix) -> Result<Self> {
        let eig = SymmetricEigen::new(a.to_dense());
        let mut order: Vec<usize> = (0..a.dim()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(a.dim(), a.dim());
        for (j, &i) in order.iter().enumerate() {
            vectors.set_column(j, &eig.eigenvectors.column(i));
        }
        Self::assemble(a.half, values, vectors)
    }

    fn assemble(half: usize, eigenvalues: Vec<f64>, mut vectors: DMatrix<f64>) -> Result<Self> {
        let dim = eigenvalues.len();
        for j in 0..dim {
            let mut col = vectors.column_mut(j);
            if let Some(&first) = col.iter().find(|x| **x != 0.0) {
                if first < 0.0 {
                    col.neg_mut();
                }
            }
        }
        let positive_indices: Vec<usize> = (0..dim).filter(|&j| eigenvalues[j] > 0.0).collect();
        if positive_indices.len() != half - 2 {
            return Err(Error::NumericFailure(format!(
                "expected {} positive layer eigenvalues, found {}",
                half - 2,
                positive_indices.len()
            )));
        }
        let mut r2plus = DMatrix::zeros(dim, half - 2);
        for (c, &j) in positive_indices.iter().enumerate() {
            r2plus.set_column(c, &vectors.column(j));
        }
        Ok(LayerSpectrum {
            half,
            eigenvalues,
            eigenvectors: vectors,
            positive_indices,
            r2plus,
        })
    }

    pub fn half_order(&self) -> usize {
        self.half
    }

    /// The N−2 positive eigenvalues, ascending.
    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        self.positive_indices
            .iter()
            .map(|&j| self.eigenvalues[j])
            .collect()
    }

    /// `e₁ᵀ R₂⁺`, the `g_4` component of each stable mode.
    pub fn first_row(&self) -> Vec<f64> {
        self.r2plus.row(0).iter().copied().collect()
    }

    /// Smallest gap between consecutive eigenvalues relative to the
    /// spectral radius.
    pub fn min_relative_gap(&self) -> f64 {
        let scale = self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.eigenvalues
            .windows(2)
            .map(|w| (w[1] - w[0]) / scale)
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_i |λ_i + λ_{m+1−i}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.eigenvalues.len();
        (0..m)
            .map(|i| (self.eigenvalues[i] + self.eigenvalues[m - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// `max_j ‖A r_j − λ_j r_j‖`.
    pub fn max_residual(&self, a: &LayerMatrix) -> f64 {
        (0..self.eigenvalues.len())
            .map(|j| {
                let r: Vec<f64> = self.eigenvectors.column(j).iter().copied().collect();
                let ar = a.mul_vec(&r);
                ar.iter()
                    .zip(&r)
                    .map(|(x, y)| (x - self.eigenvalues[j] * y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Layer moments `g(x) = Σ_i γ_i r_i exp(−x / (√2 λ_i))`.
    pub fn profile(&self, gamma: &[f64], x: f64) -> Result<Vec<f64>> {
        if !(x >= 0.0) {
            return Err(invalid(format!("layer profile needs x >= 0, got {x}")));
        }
        if gamma.len() != self.half - 2 {
            return Err(Error::LengthMismatch {
                expected: self.half - 2,
                got: gamma.len(),
            });
        }
        let lambdas = self.positive_eigenvalues();
        let mut g = vec![0.0; self.r2plus.nrows()];
        for (c, (&gam, lam)) in gamma.iter().zip(lambdas).enumerate() {
            let amp = gam * (-x / (std::f64::consts::SQRT_2 * lam)).exp();
            if amp == 0.0 {
                continue;
            }
            for (gi, r) in g.iter_mut().zip(self.r2plus.column(c).iter()) {
                *gi += amp * r;
            }
        }
        Ok(g)
    }
}

/// Lift matrix `G(0) = T (D, C, B, γ)`, size 2N × (N+1).
#[derive(Debug, Clone)]
pub struct LiftMatrix {
    pub t: DMatrix<f64>,
}

impl LiftMatrix {
    pub fn new(spectrum: &LayerSpectrum) -> Self {
        let half = spectrum.half;
        let mut t = DMatrix::zeros(2 * half, half + 1);
        let s2 = std::f64::consts::SQRT_2;
        let s3 = 3f64.sqrt();
        // Columns (D, C, B); rows g_0..g_3.
        t[(0, 2)] = 1.0 / s2;
        t[(1, 1)] = 1.0 / s2;
        t[(2, 0)] = 0.5;
        t[(2, 2)] = -0.5;
        let e1 = spectrum.first_row();
        for (c, r) in e1.iter().enumerate() {
            t[(0, 3 + c)] = 2.0 * s2 / s3 * r;
            t[(2, 3 + c)] = -2.0 / s3 * r;
        }
        t.view_mut((4, 3), (2 * half - 4, half - 2))
            .copy_from(&spectrum.r2plus);
        LiftMatrix { t }
    }

    /// Ratio of smallest to largest singular value.
    pub fn rank_ratio(&self) -> f64 {
        let sv = self.t.clone().singular_values();
        let max = sv.iter().fold(0.0f64, |m, x| m.max(*x));
        let min = sv.iter().fold(f64::INFINITY, |m, x| m.min(*x));
        min / max
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = self.t.clone().singular_values();
        let max = sv.iter().fold(0.0f64, |m, x| m.max(*x));
        sv.iter().filter(|&&s| s > rel_tol * max).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n4_matrix_entries() {
        let a = LayerMatrix::new(4).unwrap();
        assert_eq!(a.dim(), 4);
        let expect = [2.5f64.sqrt(), 3f64.sqrt(), 3.5f64.sqrt()];
        for (x, y) in a.offdiag.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
        let d = a.to_dense();
        assert_eq!(d.trace(), 0.0);
        assert_eq!(d, d.transpose());
    }

    #[test]
    fn rejects_small_orders() {
        for n in 0..4 {
            assert!(matches!(
                LayerMatrix::new(n),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn n4_eigenvalues_closed_form() {
        // det(A − λI) = λ⁴ − (a²+b²+c²) λ² + a²c² for offdiag (a, b, c).
        let (a2, b2, c2) = (2.5f64, 3.0f64, 3.5f64);
        let p = a2 + b2 + c2;
        let disc = (p * p - 4.0 * a2 * c2).sqrt();
        let hi = ((p + disc) / 2.0).sqrt();
        let lo = ((p - disc) / 2.0).sqrt();
        let s = LayerSpectrum::new(&LayerMatrix::new(4).unwrap()).unwrap();
        let expect = [-hi, -lo, lo, hi];
        for (x, y) in s.eigenvalues.iter().zip(expect) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
        assert_eq!(s.positive_indices, vec![2, 3]);
    }

    #[test]
    fn n5_matches_dense_solver() {
        let a = LayerMatrix::new(5).unwrap();
        let ql = LayerSpectrum::new(&a).unwrap();
        let dense = LayerSpectrum::dense(&a).unwrap();
        for (x, y) in ql.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((&ql.r2plus - &dense.r2plus).abs().max() < 1e-10);
    }

    #[test]
    fn trace_zero_and_sign_convention() {
        let s = LayerSpectrum::new(&LayerMatrix::new(12).unwrap()).unwrap();
        let sum: f64 = s.eigenvalues.iter().sum();
        assert!(sum.abs() < 1e-12);
        for j in 0..s.eigenvalues.len() {
            assert!(s.eigenvectors[(0, j)] > 0.0);
        }
    }

    #[test]
    fn lift_structure() {
        let s = LayerSpectrum::new(&LayerMatrix::new(8).unwrap()).unwrap();
        let lift = LiftMatrix::new(&s);
        let t = &lift.t;
        assert_eq!(t.shape(), (16, 9));
        let col_c: Vec<f64> = t.column(1).iter().copied().collect();
        for (k, x) in col_c.iter().enumerate() {
            if k == 1 {
                assert!((x - 0.5f64.sqrt()).abs() < 1e-15);
            } else {
                assert_eq!(*x, 0.0);
            }
        }
        assert!(t.row(3).iter().all(|&x| x == 0.0));
        assert_eq!(lift.rank(1e-10), 9);
    }

    #[test]
    fn profile_basics() {
        let s = LayerSpectrum::new(&LayerMatrix::new(7).unwrap()).unwrap();
        let zero = s.profile(&[0.0; 5], 1.3).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        let gamma = [0.3, -0.1, 0.7, 0.2, -0.5];
        let g0 = s.profile(&gamma, 0.0).unwrap();
        let direct = &s.r2plus * DVector::from_column_slice(&gamma);
        for (a, b) in g0.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(s.profile(&gamma, -1.0).is_err());
        assert!(s
            .profile(&gamma, 1e3)
            .unwrap()
            .iter()
            .all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn profile_satisfies_layer_ode() {
        // √2 A g'(x) = −g(x), checked with central differences.
        let a = LayerMatrix::new(6).unwrap();
        let s = LayerSpectrum::new(&a).unwrap();
        let gamma = [0.4, -0.8, 0.25, 1.0];
        let x = 0.6;
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3] {
            let plus = s.profile(&gamma, x + h).unwrap();
            let minus = s.profile(&gamma, x - h).unwrap();
            let d: Vec<f64> = plus
                .iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * h))
                .collect();
            let lhs: Vec<f64> = a
                .mul_vec(&d)
                .iter()
                .map(|v| std::f64::consts::SQRT_2 * v)
                .collect();
            let g = s.profile(&gamma, x).unwrap();
            let num: f64 = lhs
                .iter()
                .zip(&g)
                .map(|(l, r)| (l + r).powi(2))
                .sum::<f64>()
                .sqrt();
            let den: f64 = g.iter().map(|r| r * r).sum::<f64>().sqrt();
            errs.push(num / den);
        }
        assert!(errs[0] < 1e-2);
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn single_mode_decays_monotonically() {
        let s = LayerSpectrum::new(&LayerMatrix::new(9).unwrap()).unwrap();
        let mut gamma = vec![0.0; 7];
        gamma[3] = 1.0;
        let mut last = f64::INFINITY;
        for step in 0..20 {
            let g = s.profile(&gamma, step as f64 * 0.5).unwrap();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm < last);
            last = norm;
        }
    }
}
