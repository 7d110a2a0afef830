use nalgebra::DMatrix;

use super::invariants::{kernel_vector, left_null_vector, InvariantMatrix};
use super::{Degree, HalfSpaceModel, NodeTopology};
use crate::error::{Error, Result};

/// Coefficients of the node invariants `D + δ₁C`, `B + δ₂C` and the chain
/// `B + δ̃₁γ₁`, `γ_{k−1} + δ̃_k γ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCoefficients {
    pub delta1: f64,
    pub delta2: f64,
    /// `δ̃₁ .. δ̃_{N−2}`.
    pub delta_tilde: Vec<f64>,
    pub half: usize,
    pub degree: Degree,
    /// Unit kernel of `M` in column order `(D, C, B, γ)`.
    pub kernel: Vec<f64>,
}

/// `M` for a symmetric topology. General couplings have no pairing matrix.
pub fn invariant_matrix(
    model: &HalfSpaceModel,
    topology: &NodeTopology,
) -> Result<InvariantMatrix> {
    if !topology.is_symmetric() {
        return Err(Error::Unsupported(
            "invariant matrix needs a symmetric node; use the general solve".into(),
        ));
    }
    InvariantMatrix::new(model, topology.degree)
}

/// δ₁ and δ₂ from column-restricted left null vectors of `M`; the chain
/// from the staircase form, whose entries are ratios of kernel components.
pub fn extract_deltas(m: &InvariantMatrix) -> Result<CouplingCoefficients> {
    let cols = m.cols();
    let half = m.rows();
    let gamma: Vec<usize> = (3..cols).collect();

    let pick = |keep: &[usize]| -> DMatrix<f64> {
        DMatrix::from_fn(half, keep.len(), |r, c| m.m[(r, keep[c])])
    };

    let keep1: Vec<usize> = std::iter::once(2).chain(gamma.iter().copied()).collect();
    let y1 = left_null_vector(&pick(&keep1), "delta1 left null space")?;
    let c1 = m.m.tr_mul(&y1);
    let delta1 = c1[1] / c1[0];

    let keep2: Vec<usize> = std::iter::once(0).chain(gamma.iter().copied()).collect();
    let y2 = left_null_vector(&pick(&keep2), "delta2 left null space")?;
    let c2 = m.m.tr_mul(&y2);
    let delta2 = c2[1] / c2[2];

    let k = kernel_vector(&m.m, "invariant matrix kernel")?;
    let delta_tilde = (3..cols).map(|j| -k[j - 1] / k[j]).collect();

    Ok(CouplingCoefficients {
        delta1,
        delta2,
        delta_tilde,
        half,
        degree: m.degree,
        kernel: k.iter().copied().collect(),
    })
}

/// Builds the model for `half` and extracts the coefficients of a
/// symmetric node of the given degree.
pub fn coupling_coefficients(half: usize, degree: Degree) -> Result<CouplingCoefficients> {
    let model = HalfSpaceModel::new(half)?;
    extract_deltas(&InvariantMatrix::new(&model, degree)?)
}

impl CouplingCoefficients {
    /// `δ₁, δ₂` recovered from the kernel of `M` instead of the left null
    /// vectors; agrees with the stored values up to conditioning.
    pub fn kernel_deltas(&self) -> (f64, f64) {
        let k = &self.kernel;
        (-k[0] / k[1], -k[2] / k[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree() {
        let c = coupling_coefficients(16, Degree::Finite(3)).unwrap();
        let (d1, d2) = c.kernel_deltas();
        assert!((c.delta1 - d1).abs() < 1e-10);
        assert!((c.delta2 - d2).abs() < 1e-10);
        assert_eq!(c.delta_tilde.len(), 14);
        assert!(c.delta1 > 0.0 && c.delta2 > 0.0);
    }

    #[test]
    fn general_topology_rejected() {
        let model = HalfSpaceModel::new(6).unwrap();
        let top = NodeTopology::pass_through();
        assert!(matches!(
            invariant_matrix(&model, &top),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn row_scaling_invariance() {
        let model = HalfSpaceModel::new(12).unwrap();
        let mut inv = InvariantMatrix::new(&model, Degree::Finite(4)).unwrap();
        let base = extract_deltas(&inv).unwrap();
        for r in 0..inv.rows() {
            let s = 1.0 + r as f64;
            inv.m.row_mut(r).scale_mut(s);
        }
        let scaled = extract_deltas(&inv).unwrap();
        assert!((base.delta1 - scaled.delta1).abs() < 1e-12);
        assert!((base.delta2 - scaled.delta2).abs() < 1e-12);
    }
}
