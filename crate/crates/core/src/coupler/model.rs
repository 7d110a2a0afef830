use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::hermite::VelocityBasis;
use crate::layer::{LayerMatrix, LayerSpectrum, LiftMatrix};

/// Velocity basis, layer spectrum and lift for one half order N, bundled
/// with `S⁻¹ T` (distribution values at `x = 0` per layer unknown).
#[derive(Debug, Clone)]
pub struct HalfSpaceModel {
    pub basis: VelocityBasis,
    pub layer: LayerMatrix,
    pub spectrum: LayerSpectrum,
    pub lift: LiftMatrix,
    /// `S⁻¹ T`, 2N × (N+1).
    pub lifted: DMatrix<f64>,
}

impl HalfSpaceModel {
    pub fn new(half: usize) -> Result<Self> {
        let basis = VelocityBasis::new(half)?;
        let layer = LayerMatrix::new(half)?;
        let spectrum = LayerSpectrum::new(&layer)?;
        Ok(Self::from_parts(basis, layer, spectrum))
    }

    pub fn from_parts(basis: VelocityBasis, layer: LayerMatrix, spectrum: LayerSpectrum) -> Self {
        let lift = LiftMatrix::new(&spectrum);
        let lifted = solve_columns(&basis, &lift.t);
        HalfSpaceModel {
            basis,
            layer,
            spectrum,
            lift,
            lifted,
        }
    }

    /// `S` as a dense matrix.
    pub fn transform_matrix(&self) -> DMatrix<f64> {
        let n = self.basis.rule.order();
        DMatrix::from_row_slice(n, n, &self.basis.transform.matrix())
    }

    pub fn half_order(&self) -> usize {
        self.basis.half_order()
    }

    /// Unknowns per edge, N+1.
    pub fn unknowns(&self) -> usize {
        self.half_order() + 1
    }
}

/// `S⁻¹ X` for every column of `X`, as `W Sᵀ X` plus one refinement sweep.
fn solve_columns(basis: &VelocityBasis, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.rule.order();
    let s = DMatrix::from_row_slice(n, n, &basis.transform.matrix());
    let w = DVector::from_column_slice(basis.transform.scaled_weights());
    let weighted_adjoint = |rhs: &DMatrix<f64>| {
        let mut out = s.tr_mul(rhs);
        for (mut row, wi) in out.row_iter_mut().zip(w.iter()) {
            row *= *wi;
        }
        out
    };
    let mut f = weighted_adjoint(x);
    let residual = x - &s * &f;
    f += weighted_adjoint(&residual);
    f
}
