//! Discrete-velocity BGK solver on a star network.
//!
//! Every edge is parameterized by `x ∈ [0, b_i]` with the node at `x = 0`.
//! One step is first-order upwind transport with speeds `√2 v_k` followed by
//! the implicit relaxation `f ← (f* + τ M(f*)) / (1 + τ)`, `τ = dt/ε`.

use rayon::prelude::*;

use crate::coupler::{Degree, NodeTopology};
use crate::error::{invalid, Error, Result};
use crate::hermite::VelocityBasis;
use crate::presets::InitialData;

/// Cell layout of one edge.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Uniform {
        cells: usize,
    },
    /// Widths grow geometrically from `finest` at the node by `ratio`, are
    /// capped at `plateau` until `plateau_end`, then grow up to `coarsest`.
    Graded {
        finest: f64,
        ratio: f64,
        plateau: f64,
        plateau_end: f64,
        coarsest: f64,
    },
}

impl MeshSpec {
    /// Geometric growth from `finest` straight to `coarsest`.
    pub fn graded(finest: f64, ratio: f64, coarsest: f64) -> Self {
        MeshSpec::Graded {
            finest,
            ratio,
            plateau: coarsest,
            plateau_end: 0.0,
            coarsest,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub widths: Vec<f64>,
    pub centers: Vec<f64>,
}

impl Mesh {
    pub fn new(spec: &MeshSpec, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(invalid(format!(
                "edge length must be positive, got {length}"
            )));
        }
        let widths = match *spec {
            MeshSpec::Uniform { cells } => vec![length / cells as f64; cells],
            MeshSpec::Graded {
                finest,
                ratio,
                plateau,
                plateau_end,
                coarsest,
            } => {
                if !(finest > 0.0 && ratio >= 1.0 && plateau >= finest && coarsest >= plateau) {
                    return Err(invalid(
                        "graded mesh needs 0 < finest <= plateau <= coarsest and ratio >= 1",
                    ));
                }
                let mut w = Vec::new();
                let mut covered = 0.0;
                let mut h = finest;
                while covered < length {
                    let h_eff = h.min(length - covered);
                    w.push(h_eff);
                    covered += h_eff;
                    let cap = if covered < plateau_end {
                        plateau
                    } else {
                        coarsest
                    };
                    h = (h * ratio).min(cap);
                }
                // Merge a sliver at the far end into its neighbour.
                if w.len() > 1 && *w.last().unwrap() < 0.5 * w[w.len() - 2] {
                    let tail = w.pop().unwrap();
                    *w.last_mut().unwrap() += tail;
                }
                w
            }
        };
        if widths.len() < 10 {
            return Err(invalid(format!(
                "an edge needs at least 10 cells, got {}",
                widths.len()
            )));
        }
        let mut centers = Vec::with_capacity(widths.len());
        let mut left = 0.0;
        for &h in &widths {
            centers.push(left + 0.5 * h);
            left += h;
        }
        Ok(Mesh { widths, centers })
    }

    pub fn cells(&self) -> usize {
        self.widths.len()
    }

    pub fn min_width(&self) -> f64 {
        self.widths.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Parameters of a network run.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Half velocity count N.
    pub half: usize,
    pub epsilon: f64,
    pub cfl: f64,
    pub t_end: f64,
    /// `b_i`; its length is the number of edges.
    pub edge_length: Vec<f64>,
    pub mesh: MeshSpec,
    pub topology: NodeTopology,
    /// Times at which profiles are recorded in addition to `t_end`.
    pub output_times: Vec<f64>,
}

impl NetworkConfig {
    /// Symmetric star with uniform cells of width `dx`.
    pub fn symmetric(
        n: usize,
        half: usize,
        epsilon: f64,
        t_end: f64,
        length: f64,
        dx: f64,
    ) -> Self {
        NetworkConfig {
            half,
            epsilon,
            cfl: 0.9,
            t_end,
            edge_length: vec![length; n],
            mesh: MeshSpec::Uniform {
                cells: (length / dx).round() as usize,
            },
            topology: NodeTopology::symmetric(Degree::Finite(n)),
            output_times: Vec::new(),
        }
    }

    pub fn edges(&self) -> usize {
        self.edge_length.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(invalid(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0) {
            return Err(invalid(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        match self.topology.degree {
            Degree::Finite(n) if n == self.edges() => Ok(()),
            Degree::Finite(n) => Err(Error::LengthMismatch {
                expected: n,
                got: self.edges(),
            }),
            Degree::Infinite => Err(invalid("a network needs a finite node degree")),
        }
    }
}

/// Distribution on one edge, velocity-major: `f[k * cells + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeState {
    pub mesh: Mesh,
    pub f: Vec<f64>,
}

impl EdgeState {
    pub fn cells(&self) -> usize {
        self.mesh.cells()
    }

    /// Values of velocity `k` over the cells.
    pub fn velocity(&self, k: usize) -> &[f64] {
        let n = self.cells();
        &self.f[k * n..(k + 1) * n]
    }

    /// Distribution in cell `c`.
    pub fn cell(&self, c: usize) -> Vec<f64> {
        let n = self.cells();
        (0..self.f.len() / n).map(|k| self.f[k * n + c]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub time: f64,
    pub edges: Vec<EdgeState>,
    /// Mass that left through the outer ends, accumulated.
    pub outer_outflow: f64,
    /// Mass that entered the edges through the node, accumulated over edges.
    pub node_inflow: f64,
}

/// Macroscopic fields on one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProfile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rho,
    Q,
    S,
}

impl EdgeProfile {
    pub fn field(&self, field: Field) -> &[f64] {
        match field {
            Field::Rho => &self.rho,
            Field::Q => &self.q,
            Field::S => &self.s,
        }
    }

    /// Linear interpolation between cell centres, clamped at the ends.
    pub fn sample(&self, field: Field, x: f64) -> f64 {
        let vals = self.field(field);
        let xs = &self.x;
        if x <= xs[0] {
            return vals[0];
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return vals[last];
        }
        let j = xs.partition_point(|&c| c <= x);
        let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        vals[j - 1] + t * (vals[j] - vals[j - 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub profiles: Vec<EdgeProfile>,
    /// Interface distribution at `x = 0` per edge on the velocity nodes:
    /// coupled values for `v > 0`, first-cell values for `v < 0`.
    pub node_distribution: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub dt: f64,
    pub steps: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub outer_outflow: f64,
    pub node_inflow: f64,
}

impl RunOutput {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("run records the final time")
    }

    /// `|m(t) + outflow − m(0)|` relative to `m(0)`.
    pub fn mass_defect(&self) -> f64 {
        (self.final_mass + self.outer_outflow - self.initial_mass).abs()
            / self.initial_mass.abs().max(f64::MIN_POSITIVE)
    }
}

/// Discrete-velocity network simulator.
#[derive(Debug, Clone)]
pub struct KineticSimulator {
    pub config: NetworkConfig,
    pub data: InitialData,
    pub basis: VelocityBasis,
    speeds: Vec<f64>,
    /// `√2 H_0(v_k)`: density weights.
    mass_weights: Vec<f64>,
    h: [Vec<f64>; 3],
    beta: nalgebra::DMatrix<f64>,
    boundary: Vec<Vec<f64>>,
    meshes: Vec<Mesh>,
}

impl KineticSimulator {
    pub fn new(config: NetworkConfig, data: InitialData) -> Result<Self> {
        config.validate()?;
        if data.degree() != config.edges() {
            return Err(Error::LengthMismatch {
                expected: config.edges(),
                got: data.degree(),
            });
        }
        let basis = VelocityBasis::new(config.half)?;
        let speeds = basis.rule.speeds();
        let table = basis.table();
        let h = [0, 1, 2].map(|m| table.row(m).to_vec());
        let mass_weights = h[0].iter().map(|x| std::f64::consts::SQRT_2 * x).collect();
        let beta = config.topology.beta()?;
        let boundary = data
            .edges
            .iter()
            .map(|e| basis.transform.maxwellian_from_state(e.rho, e.q, e.s))
            .collect();
        let meshes = config
            .edge_length
            .iter()
            .map(|&b| Mesh::new(&config.mesh, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(KineticSimulator {
            config,
            data,
            basis,
            speeds,
            mass_weights,
            h,
            beta,
            boundary,
            meshes,
        })
    }

    pub fn order(&self) -> usize {
        self.speeds.len()
    }

    pub fn max_speed(&self) -> f64 {
        self.speeds.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Largest stable step for the configured CFL number.
    pub fn max_dt(&self) -> f64 {
        let dx = self
            .meshes
            .iter()
            .map(Mesh::min_width)
            .fold(f64::INFINITY, f64::min);
        self.config.cfl * dx / self.max_speed()
    }

    /// Every cell holds the Maxwellian of its edge's initial state.
    pub fn initialize(&self) -> NetworkState {
        let edges = self
            .meshes
            .iter()
            .zip(&self.boundary)
            .map(|(mesh, m)| {
                let cells = mesh.cells();
                let mut f = vec![0.0; cells * m.len()];
                for (k, &mk) in m.iter().enumerate() {
                    f[k * cells..(k + 1) * cells].fill(mk);
                }
                EdgeState {
                    mesh: mesh.clone(),
                    f,
                }
            })
            .collect();
        NetworkState {
            time: 0.0,
            edges,
            outer_outflow: 0.0,
            node_inflow: 0.0,
        }
    }

    /// Incoming values at `x = 0`: entry k of edge i is
    /// `Σ_j β_ij f^j(cell 0, mirror k)` for `v_k > 0`, zero otherwise.
    pub fn apply_node_coupling(&self, state: &NetworkState) -> Vec<Vec<f64>> {
        let order = self.order();
        let half = order / 2;
        let n = state.edges.len();
        (0..n)
            .map(|i| {
                let mut ghost = vec![0.0; order];
                for k in half..order {
                    let mirror = order - 1 - k;
                    ghost[k] = (0..n)
                        .map(|j| self.beta[(i, j)] * state.edges[j].velocity(mirror)[0])
                        .sum();
                }
                ghost
            })
            .collect()
    }

    /// Incoming values at `x = b_i`: the initial Maxwellian for `v_k < 0`,
    /// zero otherwise.
    pub fn apply_outer_boundary(&self, state: &NetworkState) -> Vec<Vec<f64>> {
        let half = self.order() / 2;
        state
            .edges
            .iter()
            .zip(&self.boundary)
            .map(|(_, m)| {
                let mut ghost = m.clone();
                ghost[half..].fill(0.0);
                ghost
            })
            .collect()
    }

    /// Interface distributions at `x = 0`.
    pub fn node_distribution(&self, state: &NetworkState) -> Vec<Vec<f64>> {
        let half = self.order() / 2;
        let ghosts = self.apply_node_coupling(state);
        state
            .edges
            .iter()
            .zip(ghosts)
            .map(|(e, mut g)| {
                for k in 0..half {
                    g[k] = e.velocity(k)[0];
                }
                g
            })
            .collect()
    }

    /// `Σ_edges Σ_cells Δx ρ`.
    pub fn mass(&self, state: &NetworkState) -> f64 {
        state
            .edges
            .iter()
            .map(|e| {
                (0..self.order())
                    .map(|k| {
                        let col = e.velocity(k);
                        self.mass_weights[k]
                            * col
                                .iter()
                                .zip(&e.mesh.widths)
                                .map(|(f, h)| f * h)
                                .sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn profiles(&self, state: &NetworkState) -> Vec<EdgeProfile> {
        let s2 = std::f64::consts::SQRT_2;
        state
            .edges
            .iter()
            .map(|e| {
                let cells = e.cells();
                let mut g = [vec![0.0; cells], vec![0.0; cells], vec![0.0; cells]];
                for k in 0..self.order() {
                    let col = e.velocity(k);
                    for m in 0..3 {
                        let hk = self.h[m][k];
                        for (gm, f) in g[m].iter_mut().zip(col) {
                            *gm += hk * f;
                        }
                    }
                }
                let rho: Vec<f64> = g[0].iter().map(|x| s2 * x).collect();
                let q = g[1].iter().map(|x| s2 * x).collect();
                let s = g[2].iter().zip(&rho).map(|(g2, r)| 2.0 * g2 + r).collect();
                EdgeProfile {
                    x: e.mesh.centers.clone(),
                    rho,
                    q,
                    s,
                }
            })
            .collect()
    }

    /// One transport plus relaxation step.
    pub fn step(&self, state: &mut NetworkState, dt: f64) -> Result<()> {
        let limit = self.max_dt();
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "time step {dt:e} violates the CFL bound {limit:e}"
            )));
        }
        let order = self.order();
        let half = order / 2;
        let node = self.apply_node_coupling(state);
        let outer = self.apply_outer_boundary(state);
        let tau = dt / self.config.epsilon;
        let speeds = &self.speeds;
        let mu = &self.mass_weights;
        let h = &self.h;
        let w = self.basis.transform.scaled_weights();

        let fluxes: Vec<(f64, f64)> = state
            .edges
            .par_iter_mut()
            .zip(node.par_iter())
            .zip(outer.par_iter())
            .map(|((edge, left), right)| {
                let cells = edge.cells();
                let inv_dx: Vec<f64> = edge.mesh.widths.iter().map(|x| 1.0 / x).collect();
                let mut inflow = 0.0;
                let mut outflow = 0.0;
                for k in 0..order {
                    let c = speeds[k];
                    let col = &mut edge.f[k * cells..(k + 1) * cells];
                    if k >= half {
                        inflow += dt * c * mu[k] * left[k];
                        outflow += dt * c * mu[k] * col[cells - 1];
                        for j in (1..cells).rev() {
                            col[j] -= dt * c * inv_dx[j] * (col[j] - col[j - 1]);
                        }
                        col[0] -= dt * c * inv_dx[0] * (col[0] - left[k]);
                    } else {
                        inflow += dt * c * mu[k] * col[0];
                        outflow += dt * c * mu[k] * right[k];
                        for j in 0..cells - 1 {
                            col[j] -= dt * c * inv_dx[j] * (col[j + 1] - col[j]);
                        }
                        col[cells - 1] -= dt * c * inv_dx[cells - 1] * (right[k] - col[cells - 1]);
                    }
                }
                relax(&mut edge.f, cells, order, tau, h, w);
                (inflow, outflow)
            })
            .collect();
        for (inflow, outflow) in fluxes {
            state.node_inflow += inflow;
            state.outer_outflow += outflow;
        }
        state.time += dt;
        Ok(())
    }

    fn snapshot(&self, state: &NetworkState) -> Snapshot {
        Snapshot {
            time: state.time,
            profiles: self.profiles(state),
            node_distribution: self.node_distribution(state),
        }
    }

    /// Advances to `t_end` with a fixed step, recording the requested
    /// output times and the final state.
    pub fn run(&self) -> Result<RunOutput> {
        let mut state = self.initialize();
        let initial_mass = self.mass(&state);
        let t_end = self.config.t_end;
        let steps = (t_end / self.max_dt()).ceil() as usize;
        let dt = if steps == 0 {
            0.0
        } else {
            t_end / steps as f64
        };
        let mut marks: Vec<usize> = self
            .config
            .output_times
            .iter()
            .filter(|&&t| t >= 0.0 && t < t_end)
            .map(|&t| {
                if dt > 0.0 {
                    (t / dt).round() as usize
                } else {
                    0
                }
            })
            .collect();
        marks.sort_unstable();
        marks.dedup();
        let mut snapshots = Vec::new();
        let mut next = marks.iter().peekable();
        for s in 0..steps {
            while next.peek().is_some_and(|&&m| m == s) {
                snapshots.push(self.snapshot(&state));
                next.next();
            }
            self.step(&mut state, dt)?;
        }
        snapshots.push(self.snapshot(&state));
        Ok(RunOutput {
            snapshots,
            dt,
            steps,
            initial_mass,
            final_mass: self.mass(&state),
            outer_outflow: state.outer_outflow,
            node_inflow: state.node_inflow,
        })
    }
}

/// `f ← (f + τ M(f)) / (1 + τ)` cell by cell.
fn relax(f: &mut [f64], cells: usize, order: usize, tau: f64, h: &[Vec<f64>; 3], w: &[f64]) {
    let mut g = [vec![0.0; cells], vec![0.0; cells], vec![0.0; cells]];
    for k in 0..order {
        let col = &f[k * cells..(k + 1) * cells];
        for m in 0..3 {
            let hk = h[m][k];
            for (gm, x) in g[m].iter_mut().zip(col) {
                *gm += hk * x;
            }
        }
    }
    let scale = 1.0 / (1.0 + tau);
    for k in 0..order {
        let (a0, a1, a2) = (w[k] * h[0][k], w[k] * h[1][k], w[k] * h[2][k]);
        let col = &mut f[k * cells..(k + 1) * cells];
        for c in 0..cells {
            let m = a0 * g[0][c] + a1 * g[1][c] + a2 * g[2][c];
            col[c] = (col[c] + tau * m) * scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::EdgeData;

    fn uniform_data(n: usize) -> InitialData {
        InitialData::new(vec![EdgeData::new(1.0, 0.0, 1.0); n])
    }

    #[test]
    fn graded_mesh() {
        let m = Mesh::new(&MeshSpec::graded(1e-4, 1.1, 1e-2), 0.5).unwrap();
        assert!((m.widths.iter().sum::<f64>() - 0.5).abs() < 1e-12);
        assert_eq!(m.widths[0], 1e-4);
        assert!((m.widths[1] / m.widths[0] - 1.1).abs() < 1e-12);
        assert!(m.widths.iter().all(|&h| h <= 1e-2 * 1.5));
        let p = Mesh::new(
            &MeshSpec::Graded {
                finest: 1e-4,
                ratio: 1.1,
                plateau: 2e-4,
                plateau_end: 0.01,
                coarsest: 1e-2,
            },
            0.5,
        )
        .unwrap();
        let mut left = 0.0;
        for &h in &p.widths {
            if left < 0.01 {
                assert!(h <= 2e-4 + 1e-18);
            }
            left += h;
        }
        assert!((left - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mesh_needs_ten_cells() {
        assert!(Mesh::new(&MeshSpec::Uniform { cells: 9 }, 1.0).is_err());
    }

    #[test]
    fn uniform_maxwellian_is_steady() {
        let cfg = NetworkConfig::symmetric(3, 6, 1e-3, 0.01, 0.1, 5e-3);
        let sim = KineticSimulator::new(cfg, uniform_data(3)).unwrap();
        let mut st = sim.initialize();
        let before = st.clone();
        let dt = sim.max_dt();
        for _ in 0..5 {
            sim.step(&mut st, dt).unwrap();
        }
        for (a, b) in st.edges.iter().zip(&before.edges) {
            for (x, y) in a.f.iter().zip(&b.f) {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cfl_violation() {
        let cfg = NetworkConfig::symmetric(3, 6, 1e-3, 0.01, 0.1, 5e-3);
        let sim = KineticSimulator::new(cfg, uniform_data(3)).unwrap();
        let mut st = sim.initialize();
        assert!(sim.step(&mut st, 2.0 * sim.max_dt()).is_err());
    }

    #[test]
    fn stiff_relaxation_reaches_equilibrium() {
        let basis = VelocityBasis::new(5).unwrap();
        let order = 10;
        let mut f: Vec<f64> = (0..order).map(|k| 0.1 + 0.03 * k as f64).collect();
        let g = basis.transform.apply(&f).unwrap();
        let h = [0, 1, 2].map(|m| basis.table().row(m).to_vec());
        relax(&mut f, 1, order, 1e14, &h, basis.transform.scaled_weights());
        let m = basis.transform.discrete_maxwellian(g[0], g[1], g[2]);
        for (x, y) in f.iter().zip(m) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_edges_mirror() {
        let cfg = NetworkConfig::symmetric(3, 4, 1e-3, 0.01, 0.1, 5e-3);
        let data = InitialData::new(vec![EdgeData::new(1.2, 0.3, 0.9); 3]);
        let sim = KineticSimulator::new(cfg, data).unwrap();
        let st = sim.initialize();
        let ghosts = sim.apply_node_coupling(&st);
        for (e, g) in st.edges.iter().zip(ghosts) {
            for k in 4..8 {
                assert!((g[k] - e.velocity(7 - k)[0]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pass_through_ghost() {
        let mut cfg = NetworkConfig::symmetric(2, 4, 1e-3, 0.01, 0.1, 5e-3);
        cfg.topology = NodeTopology::pass_through();
        let data = InitialData::new(vec![
            EdgeData::new(1.0, 0.2, 1.0),
            EdgeData::new(0.7, -0.1, 1.3),
        ]);
        let sim = KineticSimulator::new(cfg, data).unwrap();
        let st = sim.initialize();
        let ghosts = sim.apply_node_coupling(&st);
        for k in 4..8 {
            assert_eq!(ghosts[0][k], st.edges[1].velocity(7 - k)[0]);
            assert_eq!(ghosts[1][k], st.edges[0].velocity(7 - k)[0]);
        }
    }
}
