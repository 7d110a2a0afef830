use nalgebra::{DMatrix, DVector, SVD};

use super::invariants::RANK_TOL;
use super::macro_system::SOUND_SPEED;
use super::{Coupling, CouplingCoefficients, Degree, HalfSpaceModel, NodeTopology};
use crate::error::{invalid, Error, Result};
use crate::hermite::weighted_series;

/// Data of the coupled half-space problem at one node.
#[derive(Debug, Clone)]
pub struct NodeProblem {
    pub topology: NodeTopology,
    pub coefficients: CouplingCoefficients,
    /// `r₋ⁱ = S₀ⁱ − a q₀ⁱ` per edge.
    pub incoming: Vec<f64>,
    /// `Σᵢ (S₀ⁱ − 3ρ₀ⁱ)`.
    pub zero_balance: f64,
}

impl NodeProblem {
    pub fn new(
        topology: NodeTopology,
        coefficients: CouplingCoefficients,
        incoming: Vec<f64>,
        zero_balance: f64,
    ) -> Result<Self> {
        if let Degree::Finite(n) = topology.degree {
            if incoming.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: incoming.len(),
                });
            }
        }
        Ok(NodeProblem {
            topology,
            coefficients,
            incoming,
            zero_balance,
        })
    }
}

/// Solution on one edge at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEdge {
    /// `S_∞`.
    pub d: f64,
    /// `q_∞`.
    pub c: f64,
    /// `ρ_∞`.
    pub b: f64,
    pub gamma: Vec<f64>,
    pub rho_at_0: f64,
    /// `g_0 .. g_{2N−1}` at `x = 0`.
    pub moments: Vec<f64>,
    /// Discrete distribution at `x = 0` on the velocity nodes.
    pub distribution: Vec<f64>,
}

impl NodeEdge {
    /// `(D, C, B, γ)`.
    pub fn unknowns(&self) -> Vec<f64> {
        let mut x = vec![self.d, self.c, self.b];
        x.extend_from_slice(&self.gamma);
        x
    }
}

#[derive(Debug, Clone)]
pub struct NodeSolution {
    pub half: usize,
    pub edges: Vec<NodeEdge>,
}

impl NodeSolution {
    fn from_unknowns(model: &HalfSpaceModel, x: &DVector<f64>, n: usize) -> Self {
        let width = model.unknowns();
        let first = model.spectrum.first_row();
        let edges = (0..n)
            .map(|i| {
                let xi = x.rows(i * width, width).into_owned();
                let gamma: Vec<f64> = xi.iter().skip(3).copied().collect();
                let layer: f64 = first.iter().zip(&gamma).map(|(r, g)| r * g).sum();
                NodeEdge {
                    d: xi[0],
                    c: xi[1],
                    b: xi[2],
                    rho_at_0: xi[2] + 4.0 / SOUND_SPEED * layer,
                    moments: (&model.lift.t * &xi).iter().copied().collect(),
                    distribution: (&model.lifted * &xi).iter().copied().collect(),
                    gamma,
                }
            })
            .collect();
        NodeSolution {
            half: model.half_order(),
            edges,
        }
    }

    pub fn degree(&self) -> usize {
        self.edges.len()
    }

    /// All unknowns, edge after edge.
    pub fn unknowns(&self) -> Vec<f64> {
        self.edges.iter().flat_map(|e| e.unknowns()).collect()
    }

    /// `Σᵢ Cⁱ`.
    pub fn flux_sum(&self) -> f64 {
        self.edges.iter().map(|e| e.c).sum()
    }

    /// Largest spread across edges of `D + δ₁C` and of `B + δ₂C`.
    pub fn invariant_spread(&self, delta1: f64, delta2: f64) -> (f64, f64) {
        let spread = |vals: Vec<f64>| {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        };
        (
            spread(self.edges.iter().map(|e| e.d + delta1 * e.c).collect()),
            spread(self.edges.iter().map(|e| e.b + delta2 * e.c).collect()),
        )
    }

    /// `max |fⁱ(0,v_k) − Σ_j β_ij f^j(0,−v_k)|` over edges and `v_k > 0`.
    pub fn coupling_residual(&self, topology: &NodeTopology) -> Result<f64> {
        let beta = topology.beta()?;
        if beta.nrows() != self.edges.len() {
            return Err(Error::LengthMismatch {
                expected: self.edges.len(),
                got: beta.nrows(),
            });
        }
        let half = self.half;
        let mut worst = 0.0f64;
        for (i, e) in self.edges.iter().enumerate() {
            for k in half..2 * half {
                let mirror = 2 * half - 1 - k;
                let fed: f64 = self
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(j, ej)| beta[(i, j)] * ej.distribution[mirror])
                    .sum();
                worst = worst.max((e.distribution[k] - fed).abs());
            }
        }
        Ok(worst)
    }

    /// Largest `|Σᵢ gⁱ_k|` over odd k, with the moments recomputed from the
    /// node distributions.
    pub fn odd_moment_sums(&self, model: &HalfSpaceModel) -> Result<f64> {
        let mut sums = vec![0.0; 2 * self.half];
        for e in &self.edges {
            let g = model.basis.transform.apply(&e.distribution)?;
            for (s, x) in sums.iter_mut().zip(g) {
                *s += x;
            }
        }
        Ok(sums
            .iter()
            .skip(1)
            .step_by(2)
            .fold(0.0, |m, x| m.max(x.abs())))
    }

    /// `Σᵢ (Dⁱ − 3Bⁱ)`.
    pub fn zero_characteristic_sum(&self) -> f64 {
        self.edges.iter().map(|e| e.d - 3.0 * e.b).sum()
    }
}

/// Rows of `R₂⁺` that hold the odd moments `g_5, g_7, …, g_{2N−1}`.
fn odd_layer_rows(half: usize) -> impl Iterator<Item = usize> {
    (1..2 * (half - 2)).step_by(2)
}

/// Orthonormal basis (as rows) of the complement of `span{k, r1, r2}`.
fn chain_invariants(coeffs: &CouplingCoefficients) -> DMatrix<f64> {
    let dim = coeffs.kernel.len();
    let mut w = DMatrix::zeros(dim, dim);
    w.set_column(0, &DVector::from_column_slice(&coeffs.kernel));
    w[(0, 1)] = 1.0;
    w[(1, 1)] = coeffs.delta1;
    w[(1, 2)] = coeffs.delta2;
    w[(2, 2)] = 1.0;
    let svd = SVD::new(w, true, false);
    let u = svd.u.expect("left vectors requested");
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    DMatrix::from_fn(dim - 3, dim, |r, c| u[(c, order[3 + r])])
}

/// Solves the symmetric node through the invariant form: outgoing
/// characteristics, equal invariants across edges, flux and zero
/// characteristic balance, and vanishing odd-moment sums.
pub fn solve_node(model: &HalfSpaceModel, problem: &NodeProblem) -> Result<NodeSolution> {
    let n = match (problem.topology.degree, problem.topology.is_symmetric()) {
        (Degree::Finite(n), true) => n,
        (Degree::Infinite, _) => {
            return Err(Error::Unsupported(
                "the infinite node has no finite set of edges to solve".into(),
            ))
        }
        _ => {
            return Err(Error::Unsupported(
                "solve_node needs a symmetric node; use solve_node_general".into(),
            ))
        }
    };
    let coeffs = &problem.coefficients;
    let half = model.half_order();
    if coeffs.half != half || coeffs.degree != problem.topology.degree {
        return Err(invalid(format!(
            "coefficients computed for N={}, n={} but node has N={half}, n={n}",
            coeffs.half, coeffs.degree
        )));
    }
    let width = half + 1;
    let dim = n * width;
    let a = SOUND_SPEED;

    let mut invariants = DMatrix::zeros(half, width);
    invariants[(0, 0)] = 1.0;
    invariants[(0, 1)] = coeffs.delta1;
    invariants[(1, 1)] = coeffs.delta2;
    invariants[(1, 2)] = 1.0;
    invariants
        .view_mut((2, 0), (half - 2, width))
        .copy_from(&chain_invariants(coeffs));

    let mut sys = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    let mut row = 0;
    for i in 0..n {
        sys[(row, i * width)] = 1.0;
        sys[(row, i * width + 1)] = -a;
        rhs[row] = problem.incoming[i];
        row += 1;
    }
    for p in 0..half {
        for i in 1..n {
            for c in 0..width {
                let v = invariants[(p, c)];
                sys[(row, (i - 1) * width + c)] = v;
                sys[(row, i * width + c)] = -v;
            }
            row += 1;
        }
    }
    for i in 0..n {
        sys[(row, i * width + 1)] = 1.0;
    }
    row += 1;
    for i in 0..n {
        sys[(row, i * width)] = 1.0;
        sys[(row, i * width + 2)] = -3.0;
    }
    rhs[row] = problem.zero_balance;
    row += 1;
    let r2 = &model.spectrum.r2plus;
    for lr in odd_layer_rows(half) {
        for i in 0..n {
            for c in 0..half - 2 {
                sys[(row, i * width + 3 + c)] = r2[(lr, c)];
            }
        }
        row += 1;
    }
    debug_assert_eq!(row, dim);

    let x = sys.clone().lu().solve(&rhs);
    let x = match x {
        Some(x) if x.iter().all(|v| v.is_finite()) => x,
        _ => return Err(degenerate("node system", &sys)),
    };
    let res = (&sys * &x - &rhs).norm();
    let scale = rhs.norm().max(f64::MIN_POSITIVE);
    if res > 1e-8 * scale.max(1.0) {
        return Err(Error::NumericFailure(format!(
            "node system residual {res:e} exceeds tolerance"
        )));
    }
    Ok(NodeSolution::from_unknowns(model, &x, n))
}

/// Solves a node with arbitrary β from the raw kinetic coupling equations
/// in velocity space, the outgoing characteristics and the zero
/// characteristic balance, in the least-squares sense.
pub fn solve_node_general(
    model: &HalfSpaceModel,
    topology: &NodeTopology,
    incoming: &[f64],
    zero_balance: f64,
) -> Result<NodeSolution> {
    let beta = topology.beta()?;
    let n = beta.nrows();
    if incoming.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: incoming.len(),
        });
    }
    if let Coupling::General(_) = topology.coupling {
        let defect = topology.conservation_defect()?;
        if defect > 1e-12 {
            return Err(invalid(format!(
                "coupling weights must have unit column sums (defect {defect:e})"
            )));
        }
    }
    let half = model.half_order();
    let width = half + 1;
    let f = &model.lifted;
    let rows = n * half + n + 1;
    let mut sys = DMatrix::zeros(rows, n * width);
    let mut rhs = DVector::zeros(rows);
    let mut row = 0;
    for i in 0..n {
        for k in half..2 * half {
            let mirror = 2 * half - 1 - k;
            for c in 0..width {
                sys[(row, i * width + c)] += f[(k, c)];
                for j in 0..n {
                    sys[(row, j * width + c)] -= beta[(i, j)] * f[(mirror, c)];
                }
            }
            row += 1;
        }
    }
    for i in 0..n {
        sys[(row, i * width)] = 1.0;
        sys[(row, i * width + 1)] = -SOUND_SPEED;
        rhs[row] = incoming[i];
        row += 1;
    }
    for i in 0..n {
        sys[(row, i * width)] = 1.0;
        sys[(row, i * width + 2)] = -3.0;
    }
    rhs[row] = zero_balance;

    let svd = SVD::new(sys.clone(), true, true);
    let largest = svd.singular_values.max();
    let cutoff = RANK_TOL * largest;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    if rank < n * width {
        return Err(degenerate("general coupling system", &sys));
    }
    let x = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::NumericFailure(e.to_string()))?;
    Ok(NodeSolution::from_unknowns(model, &x, n))
}

fn degenerate(what: &str, m: &DMatrix<f64>) -> Error {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.total_cmp(b));
    sv.truncate(4);
    Error::Degenerate {
        what: what.to_string(),
        singular_values: sv,
    }
}

/// `f(0, v) = H₀(v/√2) Σ g_k H_k(v/√2)` on edge `edge`.
pub fn node_distribution(solution: &NodeSolution, edge: usize, v: &[f64]) -> Result<Vec<f64>> {
    let e = solution.edges.get(edge).ok_or_else(|| {
        invalid(format!(
            "edge {edge} out of range for a node with {} edges",
            solution.edges.len()
        ))
    })?;
    Ok(v.iter()
        .map(|&x| weighted_series(x / std::f64::consts::SQRT_2, &e.moments))
        .collect())
}
