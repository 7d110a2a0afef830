use nalgebra::{DMatrix, DVector, SVD};

use super::{Degree, HalfSpaceModel};
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// `M = R S⁻¹ T` for a symmetric node: the N node invariants
/// `(n−1) f(0,v) + f(0,−v)` as functions of `(D, C, B, γ)`.
#[derive(Debug, Clone)]
pub struct InvariantMatrix {
    pub degree: Degree,
    /// Pairing matrix, N × 2N.
    pub pairing: DMatrix<f64>,
    /// N × (N+1).
    pub m: DMatrix<f64>,
}

impl InvariantMatrix {
    pub fn new(model: &HalfSpaceModel, degree: Degree) -> Result<Self> {
        let half = model.half_order();
        let pairing = pairing_matrix(half, degree);
        let m = &pairing * &model.lifted;
        let inv = InvariantMatrix { degree, pairing, m };
        let ratio = inv.rank_ratio();
        if !(ratio > RANK_TOL) {
            return Err(Error::Degenerate {
                what: "invariant matrix rank".into(),
                singular_values: singular_values_sorted(&inv.m),
            });
        }
        Ok(inv)
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    /// Smallest over largest singular value.
    pub fn rank_ratio(&self) -> f64 {
        let sv = singular_values_sorted(&self.m);
        sv.last().copied().unwrap_or(0.0) / sv[0]
    }
}

/// Row k pairs the k-th smallest positive velocity with its mirror:
/// weight n−1 on `f_{N+k}`, weight 1 on `f_{N−1−k}` (0-based). The infinite
/// node keeps only the positive-velocity entry (limit of R/(n−1)).
pub fn pairing_matrix(half: usize, degree: Degree) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(half, 2 * half);
    for k in 0..half {
        match degree {
            Degree::Finite(n) => {
                r[(k, half + k)] = n as f64 - 1.0;
                r[(k, half - 1 - k)] = 1.0;
            }
            Degree::Infinite => r[(k, half + k)] = 1.0,
        }
    }
    r
}

/// Singular values, descending.
pub(crate) fn singular_values_sorted(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Unit vector spanning the one-dimensional left null space of `sub`
/// (rows × cols with cols = rows − 1). Fails if the null space is not
/// exactly one-dimensional.
pub(crate) fn left_null_vector(sub: &DMatrix<f64>, what: &str) -> Result<DVector<f64>> {
    let rows = sub.nrows();
    let mut padded = DMatrix::zeros(rows, rows);
    padded.view_mut((0, 0), (rows, sub.ncols())).copy_from(sub);
    null_direction(padded, sub.ncols(), true, what)
}

/// Unit vector spanning the kernel of a wide matrix (rows = cols − 1).
pub(crate) fn kernel_vector(m: &DMatrix<f64>, what: &str) -> Result<DVector<f64>> {
    let cols = m.ncols();
    let mut padded = DMatrix::zeros(cols, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    null_direction(padded, m.nrows(), false, what)
}

/// `square` is a padded matrix whose true rank should be `expected_rank`
/// = size − 1. Returns the singular vector of the zero singular value.
fn null_direction(
    square: DMatrix<f64>,
    expected_rank: usize,
    left: bool,
    what: &str,
) -> Result<DVector<f64>> {
    let size = square.nrows();
    let svd = SVD::new(square, left, !left);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let largest = sv[order[0]];
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * largest).count();
    if rank != expected_rank || expected_rank + 1 != size {
        let mut sorted: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
        sorted.truncate(size);
        return Err(Error::Degenerate {
            what: what.to_string(),
            singular_values: sorted,
        });
    }
    let null = order[size - 1];
    let v = if left {
        svd.u
            .expect("left vectors requested")
            .column(null)
            .into_owned()
    } else {
        svd.v_t
            .expect("right vectors requested")
            .row(null)
            .transpose()
    };
    Ok(v)
}
