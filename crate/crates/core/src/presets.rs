//! Piecewise-constant initial data on a three-edge star node, including the
//! four standard test cases.

use crate::coupler::{macro_coupling_solve, EdgeLimit, SOUND_SPEED};
use crate::error::{invalid, Result};

/// Constant macroscopic state `(ρ, q, S)` of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeData {
    pub rho: f64,
    pub q: f64,
    pub s: f64,
}

impl EdgeData {
    pub fn new(rho: f64, q: f64, s: f64) -> Self {
        EdgeData { rho, q, s }
    }

    /// `r₋ = S − a q`, carried into the node.
    pub fn incoming(&self) -> f64 {
        self.s - SOUND_SPEED * self.q
    }

    /// `r₀ = S − a² ρ`.
    pub fn zero_characteristic(&self) -> f64 {
        self.s - 3.0 * self.rho
    }
}

/// Deviations `(q̄₀, S̄₀, ρ̄₀)` that parameterize the three-edge pattern
/// `ρ₀ = (1, 1−ρ̄₀, 1+ρ̄₀)`, `q₀ = (0, q̄₀, −q̄₀)`, `S₀ = (1, 1−S̄₀, 1+S̄₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub q: f64,
    pub s: f64,
    pub rho: f64,
}

impl Deviation {
    /// Presets 1–4 for given node coefficients.
    pub fn preset(case: u8, delta1: f64, delta2: f64) -> Result<Self> {
        let a = SOUND_SPEED;
        let growth = (2.0 * delta1 + a) / (delta1 + a);
        let (s, rho) = match case {
            1 => (delta1, delta2),
            2 => (delta1, 2.0 * delta2),
            3 => (
                2.0 * delta1,
                growth * (delta2 - delta1 / 3.0) + 2.0 * delta1 / 3.0,
            ),
            4 => (2.0 * delta1, delta2 * growth),
            other => return Err(invalid(format!("test case must be 1..=4, got {other}"))),
        };
        Ok(Deviation { q: 1.0, s, rho })
    }

    /// Asymptotic deviations `(q̄_∞, S̄_∞, ρ̄_∞)` at the node.
    pub fn limit(&self, delta1: f64, delta2: f64) -> Deviation {
        let q = (self.s + SOUND_SPEED * self.q) / (delta1 + SOUND_SPEED);
        Deviation {
            q,
            s: delta1 * q,
            rho: delta2 * q,
        }
    }
}

/// Initial (and outer boundary) data of every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub edges: Vec<EdgeData>,
}

impl InitialData {
    pub fn new(edges: Vec<EdgeData>) -> Self {
        InitialData { edges }
    }

    pub fn from_deviation(dev: Deviation) -> Self {
        InitialData::new(vec![
            EdgeData::new(1.0, 0.0, 1.0),
            EdgeData::new(1.0 - dev.rho, dev.q, 1.0 - dev.s),
            EdgeData::new(1.0 + dev.rho, -dev.q, 1.0 + dev.s),
        ])
    }

    pub fn preset(case: u8, delta1: f64, delta2: f64) -> Result<Self> {
        Ok(Self::from_deviation(Deviation::preset(
            case, delta1, delta2,
        )?))
    }

    pub fn degree(&self) -> usize {
        self.edges.len()
    }

    pub fn incoming(&self) -> Vec<f64> {
        self.edges.iter().map(EdgeData::incoming).collect()
    }

    /// `Σᵢ (S₀ⁱ − 3ρ₀ⁱ)`.
    pub fn zero_balance(&self) -> f64 {
        self.edges.iter().map(EdgeData::zero_characteristic).sum()
    }

    /// Node states `(S_∞, q_∞, ρ_∞)` from the macroscopic coupling system.
    pub fn node_limits(&self, delta1: f64, delta2: f64) -> Result<Vec<EdgeLimit>> {
        macro_coupling_solve(delta1, delta2, &self.incoming(), self.zero_balance())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D1: f64 = 0.5298;
    const D2: f64 = 0.3458;

    #[test]
    fn preset_patterns() {
        let d = InitialData::preset(1, D1, D2).unwrap();
        assert_eq!(d.edges[0], EdgeData::new(1.0, 0.0, 1.0));
        assert!((d.edges[1].rho - (1.0 - D2)).abs() < 1e-15);
        let d2 = InitialData::preset(2, D1, D2).unwrap();
        assert!((d2.edges[1].rho - (1.0 - 2.0 * D2)).abs() < 1e-15);
        assert!(InitialData::preset(5, D1, D2).is_err());
    }

    #[test]
    fn closed_form_limits_match_system() {
        for case in 1..=4 {
            let dev = Deviation::preset(case, D1, D2).unwrap();
            let lim = dev.limit(D1, D2);
            let m = InitialData::from_deviation(dev)
                .node_limits(D1, D2)
                .unwrap();
            assert!((m[1].c - lim.q).abs() < 1e-12);
            assert!((m[1].d - (1.0 - lim.s)).abs() < 1e-12);
            assert!((m[1].b - (1.0 - lim.rho)).abs() < 1e-12);
            assert!((m[2].c + lim.q).abs() < 1e-12);
            assert!((m[0].b - 1.0).abs() < 1e-12 && m[0].c.abs() < 1e-12);
        }
    }

    #[test]
    fn case_properties() {
        let one = Deviation::preset(1, D1, D2).unwrap();
        let l = one.limit(D1, D2);
        assert!((l.q - 1.0).abs() < 1e-14 && (l.rho - one.rho).abs() < 1e-14);
        // No viscous layer: ρ̄_∞ = ρ̄₀ + (S̄_∞ − S̄₀)/3.
        let three = Deviation::preset(3, D1, D2).unwrap();
        let l3 = three.limit(D1, D2);
        assert!((l3.rho - (three.rho + (l3.s - three.s) / 3.0)).abs() < 1e-14);
        let four = Deviation::preset(4, D1, D2).unwrap();
        assert!((four.limit(D1, D2).rho - four.rho).abs() < 1e-14);
    }
}
