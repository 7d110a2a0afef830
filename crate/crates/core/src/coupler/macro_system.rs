use nalgebra::{DMatrix, DVector};

use super::CouplingCoefficients;
use crate::error::{invalid, Error, Result};

/// Acoustic wave speed.
pub const SOUND_SPEED: f64 = 1.732_050_807_568_877_2;

/// Per-edge asymptotic states at the node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLimit {
    /// `S_∞`.
    pub d: f64,
    /// `q_∞`.
    pub c: f64,
    /// `ρ_∞`.
    pub b: f64,
}

/// The 3n × 3n system for `m = (D, C, B)` with right-hand side
/// `(0ⁿ, α, β, 0ⁿ⁻¹)`.
#[derive(Debug, Clone)]
pub struct MacroCouplingSystem {
    pub n: usize,
    pub cal_a: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl MacroCouplingSystem {
    pub fn new(delta1: f64, delta2: f64, incoming: &[f64], zero_balance: f64) -> Result<Self> {
        let n = incoming.len();
        if n < 2 {
            return Err(invalid(format!("node needs at least two edges, got {n}")));
        }
        let a = SOUND_SPEED;
        // A: row 0 zero, row i = e_{i−1} − e_i. B: first row all ones.
        let amat = DMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                0.0
            } else if j + 1 == i {
                1.0
            } else if j == i {
                -1.0
            } else {
                0.0
            }
        });
        let bmat = DMatrix::from_fn(n, n, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let eye = DMatrix::<f64>::identity(n, n);

        let mut cal_a = DMatrix::zeros(3 * n, 3 * n);
        let mut put = |r: usize, c: usize, blk: &DMatrix<f64>| {
            cal_a.view_mut((r * n, c * n), (n, n)).copy_from(blk);
        };
        put(0, 0, &amat);
        put(0, 1, &(&bmat + &amat * delta1));
        put(1, 0, &eye);
        put(1, 1, &(&eye * -a));
        put(2, 0, &bmat);
        put(2, 1, &(&amat * delta2));
        put(2, 2, &(&bmat * -3.0 + &amat));

        let mut rhs = DVector::zeros(3 * n);
        rhs.rows_mut(n, n).copy_from_slice(incoming);
        rhs[2 * n] = zero_balance;
        Ok(MacroCouplingSystem { n, cal_a, rhs })
    }

    pub fn from_coefficients(
        coeffs: &CouplingCoefficients,
        incoming: &[f64],
        zero_balance: f64,
    ) -> Result<Self> {
        Self::new(coeffs.delta1, coeffs.delta2, incoming, zero_balance)
    }

    pub fn determinant(&self) -> f64 {
        self.cal_a.clone().lu().determinant()
    }

    pub fn solve(&self) -> Result<Vec<EdgeLimit>> {
        let m = self
            .cal_a
            .clone()
            .lu()
            .solve(&self.rhs)
            .ok_or_else(|| Error::Singular("macroscopic coupling system is singular".into()))?;
        let n = self.n;
        Ok((0..n)
            .map(|i| EdgeLimit {
                d: m[i],
                c: m[n + i],
                b: m[2 * n + i],
            })
            .collect())
    }
}

/// Closed form `−3 a n² (1 + aδ₁)^{n−1}` as usually quoted for `det 𝒜`.
pub fn stated_determinant(n: usize, delta1: f64) -> f64 {
    let a = SOUND_SPEED;
    let n = n as f64;
    -3.0 * a * n * n * (1.0 + a * delta1).powf(n - 1.0)
}

/// `det 𝒜 = 3 (−1)^{n−1} n² (a + δ₁)^{n−1}`, from block elimination of
/// the identity row block.
pub fn exact_determinant(n: usize, delta1: f64) -> f64 {
    let a = SOUND_SPEED;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * 3.0 * (n * n) as f64 * (a + delta1).powi(n as i32 - 1)
}

/// Solves for the per-edge `(S_∞, q_∞, ρ_∞)`. The system degenerates when
/// `δ₁ = −a`.
pub fn macro_coupling_solve(
    delta1: f64,
    delta2: f64,
    incoming: &[f64],
    zero_balance: f64,
) -> Result<Vec<EdgeLimit>> {
    if (delta1 + SOUND_SPEED).abs() < 1e-12 {
        return Err(Error::Singular(format!(
            "delta1 = {delta1} makes the coupling system singular"
        )));
    }
    MacroCouplingSystem::new(delta1, delta2, incoming, zero_balance)?.solve()
}
