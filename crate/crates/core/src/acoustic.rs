//! Exact acoustic solution for piecewise-constant data on a star node and
//! the composite profile with kinetic and viscous layers.
//!
//! On each edge a single wave leaves the node with speed `a = √3`. Behind
//! it `q` and `S` take their node values, `ρ` takes the left state
//! `ρ_L = ρ₀ + (S_∞ − S₀)/3`. Near the node `ρ` is corrected by
//! `(ρ_∞ − ρ_L) erfc(x / (2√(εt)))` and by the kinetic layer modes.

use crate::coupler::{HalfSpaceModel, NodeSolution, SOUND_SPEED};
use crate::error::{invalid, Error, Result};
use crate::presets::{EdgeData, InitialData};

/// Bulk states of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    /// Left state of the wave.
    pub rho_l: f64,
    pub q_inf: f64,
    pub s_inf: f64,
    /// Node value at the end of the kinetic layer.
    pub rho_inf: f64,
    pub initial: EdgeData,
}

impl MacroState {
    pub fn new(initial: EdgeData, s_inf: f64, q_inf: f64, rho_inf: f64) -> Self {
        MacroState {
            rho_l: initial.rho + (s_inf - initial.s) / 3.0,
            q_inf,
            s_inf,
            rho_inf,
            initial,
        }
    }

    /// `(r₋, r₀, r₊)` of the state behind the wave.
    pub fn characteristics(&self) -> (f64, f64, f64) {
        characteristics(self.rho_l, self.q_inf, self.s_inf)
    }

    /// Viscous amplitude `r̂₀ = 3(ρ_L − ρ_∞)`.
    pub fn viscous_amplitude(&self) -> f64 {
        3.0 * (self.rho_l - self.rho_inf)
    }
}

/// `(S − aq, S − a²ρ, S + aq)`.
pub fn characteristics(rho: f64, q: f64, s: f64) -> (f64, f64, f64) {
    let a = SOUND_SPEED;
    (s - a * q, s - a * a * rho, s + a * q)
}

/// `(ρ, q, S)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub rho: f64,
    pub q: f64,
    pub s: f64,
}

/// Bulk solution without layers.
pub fn exact_macro(
    data: &InitialData,
    solution: &NodeSolution,
    x: f64,
    t: f64,
) -> Result<Vec<Point>> {
    if !(t > 0.0) {
        return Err(invalid(format!(
            "the acoustic solution needs t > 0, got {t}"
        )));
    }
    Ok(macro_states(data, solution)?
        .iter()
        .map(|m| bulk(m, x, t))
        .collect())
}

fn bulk(m: &MacroState, x: f64, t: f64) -> Point {
    if x < SOUND_SPEED * t {
        Point {
            rho: m.rho_l,
            q: m.q_inf,
            s: m.s_inf,
        }
    } else {
        Point {
            rho: m.initial.rho,
            q: m.initial.q,
            s: m.initial.s,
        }
    }
}

pub fn macro_states(data: &InitialData, solution: &NodeSolution) -> Result<Vec<MacroState>> {
    if data.degree() != solution.degree() {
        return Err(Error::LengthMismatch {
            expected: solution.degree(),
            got: data.degree(),
        });
    }
    Ok(data
        .edges
        .iter()
        .zip(&solution.edges)
        .map(|(e, s)| MacroState::new(*e, s.d, s.c, s.b))
        .collect())
}

/// Layer data of one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeEdge {
    pub state: MacroState,
    pub gamma: Vec<f64>,
    /// `√2 λ_i ε`.
    pub decay: Vec<f64>,
    /// `(4/√3) γ_i e₁ᵀ r_i`.
    pub amplitude: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeProfile {
    pub epsilon: f64,
    pub edges: Vec<CompositeEdge>,
}

impl CompositeProfile {
    pub fn new(
        model: &HalfSpaceModel,
        data: &InitialData,
        solution: &NodeSolution,
        epsilon: f64,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if solution.half != model.half_order() {
            return Err(invalid("node solution and model use different N"));
        }
        let lambdas = model.spectrum.positive_eigenvalues();
        let first = model.spectrum.first_row();
        let decay: Vec<f64> = lambdas
            .iter()
            .map(|l| std::f64::consts::SQRT_2 * l * epsilon)
            .collect();
        let edges = macro_states(data, solution)?
            .into_iter()
            .zip(&solution.edges)
            .map(|(state, e)| CompositeEdge {
                state,
                gamma: e.gamma.clone(),
                decay: decay.clone(),
                amplitude: e
                    .gamma
                    .iter()
                    .zip(&first)
                    .map(|(g, r)| 4.0 / SOUND_SPEED * g * r)
                    .collect(),
            })
            .collect();
        Ok(CompositeProfile { epsilon, edges })
    }

    /// `ρ` on every edge at `(x, t)`.
    pub fn rho(&self, x: f64, t: f64) -> Result<Vec<f64>> {
        (0..self.edges.len())
            .map(|i| self.rho_on(i, x, t))
            .collect()
    }

    pub fn rho_on(&self, edge: usize, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) || !(x >= 0.0) {
            return Err(invalid(format!(
                "composite profile needs x >= 0 and t > 0, got x={x}, t={t}"
            )));
        }
        let e = self
            .edges
            .get(edge)
            .ok_or_else(|| invalid(format!("edge {edge} out of range")))?;
        let m = &e.state;
        let viscous = (m.rho_inf - m.rho_l) * libm::erfc(x / (2.0 * (self.epsilon * t).sqrt()));
        let kinetic: f64 = e
            .amplitude
            .iter()
            .zip(&e.decay)
            .map(|(a, d)| a * (-x / d).exp())
            .sum();
        Ok(bulk(m, x, t).rho + viscous + kinetic)
    }

    /// `(ρ, q, S)` on one edge; `q` and `S` carry no layer.
    pub fn point(&self, edge: usize, x: f64, t: f64) -> Result<Point> {
        let rho = self.rho_on(edge, x, t)?;
        let b = bulk(&self.edges[edge].state, x, t);
        Ok(Point {
            rho,
            q: b.q,
            s: b.s,
        })
    }
}

/// `Σᵢ(Dⁱ − 3Bⁱ) − Σᵢ(S₀ⁱ − 3ρ₀ⁱ)`, equal to `Σᵢ r̂₀ⁱ`.
pub fn viscous_layer_check(data: &InitialData, solution: &NodeSolution) -> f64 {
    solution.zero_characteristic_sum() - data.zero_balance()
}

/// Per-edge viscous amplitudes `r̂₀ⁱ`.
pub fn viscous_amplitudes(data: &InitialData, solution: &NodeSolution) -> Result<Vec<f64>> {
    Ok(macro_states(data, solution)?
        .iter()
        .map(MacroState::viscous_amplitude)
        .collect())
}
