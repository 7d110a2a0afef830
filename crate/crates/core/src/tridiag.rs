//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).
//!
//! Two entry points share one iteration: [`eigen`] accumulates the full
//! orthogonal eigenvector matrix, while [`eigen_first_row`] only carries the
//! first component of every eigenvector. The latter is what Golub-Welsch
//! needs and costs O(n^2) instead of O(n^3).

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Full decomposition: eigenvalues ascending, `vectors[j]` is the unit
/// eigenvector for `values[j]`.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Eigenvalues ascending together with the first component of each
/// normalized eigenvector.
#[derive(Debug, Clone)]
pub struct TridiagFirstRow {
    pub values: Vec<f64>,
    pub first: Vec<f64>,
}

/// Column-major rotation accumulator: column j holds the tracked `rows`
/// components of eigenvector j contiguously.
struct Accum {
    rows: usize,
    z: Vec<f64>,
}

impl Accum {
    fn identity(n: usize, rows: usize) -> Self {
        let mut z = vec![0.0; rows * n];
        for i in 0..rows {
            z[i * rows + i] = 1.0;
        }
        Accum { rows, z }
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.z[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let rows = self.rows;
        let (a, b) = self.z[i * rows..(i + 2) * rows].split_at_mut(rows);
        for (x, y) in a.iter_mut().zip(b.iter_mut()) {
            let f = *y;
            *y = s * *x + c * f;
            *x = c * *x - s * f;
        }
    }
}

/// Implicit QL on (diag, offdiag); offdiag[i] couples i and i+1.
fn ql(diag: &[f64], offdiag: &[f64], acc: &mut Accum) -> Result<Vec<f64>> {
    let n = diag.len();
    if offdiag.len() + 1 != n && !(n == 0 && offdiag.is_empty()) {
        return Err(Error::LengthMismatch {
            expected: n.saturating_sub(1),
            got: offdiag.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::NumericFailure(format!(
                    "tridiagonal QL did not converge for matrix of size {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                acc.rotate(i, c, s);
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Full eigen-decomposition of the symmetric tridiagonal matrix.
pub fn eigen(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    let mut acc = Accum::identity(n, n);
    let d = ql(diag, offdiag, &mut acc)?;
    let order = ascending_order(&d);
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order.iter().map(|&j| acc.column(j).to_vec()).collect();
    Ok(TridiagEigen { values, vectors })
}

/// Eigenvalues plus first eigenvector components only.
pub fn eigen_first_row(diag: &[f64], offdiag: &[f64]) -> Result<TridiagFirstRow> {
    let n = diag.len();
    let mut acc = Accum::identity(n, n.min(1));
    let d = ql(diag, offdiag, &mut acc)?;
    let order = ascending_order(&d);
    Ok(TridiagFirstRow {
        values: order.iter().map(|&j| d[j]).collect(),
        first: order.iter().map(|&j| acc.column(j)[0]).collect(),
    })
}
