//! Closed-form coefficients from matching the first two half moments of an
//! equilibrium at the node, plus reference values of the half-moment method.

use std::f64::consts::PI;

use super::Degree;

/// Reference half-moment coefficients `(δ₁, δ₂)` for n = 3.
pub const HALF_MOMENT_N3: (f64, f64) = (0.5301, 0.3402);
/// Reference half-moment coefficients `(δ₁, δ₂)` for n → ∞.
pub const HALF_MOMENT_INFINITE: (f64, f64) = (1.5833, 0.9975);

/// `δ₁ = 4(n−2)/(n√(2π))`, `δ₂ = ((n−2)/n)·2(π−2)/√(2π)`.
pub fn maxwell_delta(degree: Degree) -> (f64, f64) {
    let factor = match degree {
        Degree::Finite(n) => (n as f64 - 2.0) / n as f64,
        Degree::Infinite => 1.0,
    };
    let root = (2.0 * PI).sqrt();
    (factor * 4.0 / root, factor * 2.0 * (PI - 2.0) / root)
}
