//! Node coupling for the symmetric and general star node: invariant
//! coefficients, the coupled half-space problem and the macroscopic
//! coupling system.

mod deltas;
mod invariants;
mod macro_system;
mod maxwell;
mod model;
mod node;
mod topology;

pub use deltas::{coupling_coefficients, extract_deltas, invariant_matrix, CouplingCoefficients};
pub use invariants::{pairing_matrix, InvariantMatrix, RANK_TOL};
pub use macro_system::{
    exact_determinant, macro_coupling_solve, stated_determinant, EdgeLimit, MacroCouplingSystem,
    SOUND_SPEED,
};
pub use maxwell::{maxwell_delta, HALF_MOMENT_INFINITE, HALF_MOMENT_N3};
pub use model::HalfSpaceModel;
pub use node::{
    node_distribution, solve_node, solve_node_general, NodeEdge, NodeProblem, NodeSolution,
};
pub use topology::{Coupling, Degree, NodeTopology};
