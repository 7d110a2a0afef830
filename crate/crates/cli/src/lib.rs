//! Experiment driver: coefficient sweeps, node solutions, kinetic runs and
//! composite comparisons, all written as CSV.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use netbgk::acoustic::{macro_states, CompositeProfile};
use netbgk::coupler::{
    coupling_coefficients, extract_deltas, invariant_matrix, node_distribution, solve_node,
    CouplingCoefficients, Degree, HalfSpaceModel, NodeProblem, NodeSolution, NodeTopology,
    SOUND_SPEED,
};
use netbgk::kinetic::{Field, KineticSimulator, MeshSpec, NetworkConfig, RunOutput};
use netbgk::presets::{Deviation, InitialData};

use config::{FileConfig, RunSection};
use output::{ensure_dir, write_csv, write_pairs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] netbgk::Error),
    #[error("N={half}: {source}")]
    AtHalfOrder { half: usize, source: netbgk::Error },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "netbgk",
    version,
    about = "Kinetic coupling conditions on networks"
)]
pub struct Cli {
    /// TOML file with one section per command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep δ₁(N), δ₂(N) and their increments.
    Deltas(DeltasArgs),
    /// Solve the node problem of a test case.
    Node(NodeArgs),
    /// Run the kinetic network simulator.
    Kinetic(RunArgs),
    /// Evaluate the composite asymptotic solution.
    Composite(RunArgs),
    /// Kinetic run plus composite solution and their distances.
    Compare(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct DeltasArgs {
    /// Node degree, an integer >= 2 or "inf".
    #[arg(long = "n")]
    pub degree: Option<String>,
    /// First N of the sweep.
    #[arg(long)]
    pub from: Option<usize>,
    /// Last N of the sweep.
    #[arg(long = "N")]
    pub to: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct NodeArgs {
    /// Test case 1-4.
    #[arg(long)]
    pub case: Option<u8>,
    /// Half number of velocities.
    #[arg(long = "N")]
    pub half: Option<usize>,
    /// Number of velocity samples of the node distribution.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Test case 1-4.
    #[arg(long)]
    pub case: Option<u8>,
    /// Half number of velocities.
    #[arg(long = "N")]
    pub half: Option<usize>,
    /// Knudsen number ε.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Uniform cells per edge.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Edge length.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let out = ensure_dir(&cli.out)?;
    match &cli.command {
        Command::Deltas(a) => {
            let spec = DeltasSpec::resolve(a, &file)?;
            cmd_deltas(&spec, &out)
        }
        Command::Node(a) => {
            let spec = NodeSpec::resolve(a, &file)?;
            cmd_node(&spec, &out).map(|r| r.files)
        }
        Command::Kinetic(a) => cmd_kinetic(&RunSpec::resolve(a, &file.kinetic)?, &out).map(|r| r.1),
        Command::Composite(a) => cmd_composite(&RunSpec::resolve(a, &file.composite)?, &out),
        Command::Compare(a) => {
            cmd_compare(&RunSpec::resolve(a, &file.compare)?, &out).map(|r| r.files)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltasSpec {
    pub degree: Degree,
    pub from: usize,
    pub to: usize,
}

impl DeltasSpec {
    pub fn resolve(a: &DeltasArgs, file: &FileConfig) -> Result<Self, CliError> {
        let text = a
            .degree
            .clone()
            .or_else(|| file.deltas.n.as_ref().map(|d| d.as_text()))
            .unwrap_or_else(|| "3".into());
        let degree: Degree = text.parse()?;
        let from = a.from.or(file.deltas.from).unwrap_or(5);
        let to = a.to.or(file.deltas.to).unwrap_or(99);
        if from < 5 || to > 1000 || from > to {
            return Err(CliError::Config(format!(
                "N range must satisfy 5 <= from <= N <= 1000, got {from}..={to}"
            )));
        }
        Ok(DeltasSpec { degree, from, to })
    }
}

/// One row of the coefficient sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRow {
    pub half: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub log_step1: f64,
    pub log_step2: f64,
}

pub fn delta_table(spec: &DeltasSpec) -> Result<Vec<DeltaRow>, CliError> {
    let coeffs: Vec<(usize, f64, f64)> = (spec.from - 1..=spec.to)
        .into_par_iter()
        .map(|half| {
            coupling_coefficients(half, spec.degree)
                .map(|c| (half, c.delta1, c.delta2))
                .map_err(|source| CliError::AtHalfOrder { half, source })
        })
        .collect::<Result<_, _>>()?;
    Ok(coeffs
        .windows(2)
        .map(|w| DeltaRow {
            half: w[1].0,
            delta1: w[1].1,
            delta2: w[1].2,
            log_step1: (w[1].1 - w[0].1).abs().log10(),
            log_step2: (w[1].2 - w[0].2).abs().log10(),
        })
        .collect())
}

pub fn cmd_deltas(spec: &DeltasSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rows = delta_table(spec)?;
    let path = out.join(format!("deltas_n{}.csv", spec.degree));
    write_csv(
        &path,
        &["N", "delta1", "delta2", "log10_step1", "log10_step2"],
        rows.iter().map(|r| {
            vec![
                r.half.into(),
                r.delta1.into(),
                r.delta2.into(),
                r.log_step1.into(),
                r.log_step2.into(),
            ]
        }),
    )?;
    Ok(vec![path])
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub case: u8,
    pub half: usize,
    pub samples: usize,
    pub vmax: f64,
}

impl NodeSpec {
    pub fn resolve(a: &NodeArgs, file: &FileConfig) -> Result<Self, CliError> {
        let spec = NodeSpec {
            case: a.case.or(file.node.case).unwrap_or(1),
            half: a.half.or(file.node.half).unwrap_or(100),
            samples: a.samples.or(file.node.samples).unwrap_or(801),
            vmax: file.node.vmax.unwrap_or(6.0),
        };
        check_case(spec.case)?;
        if spec.samples < 2 {
            return Err(CliError::Config(
                "need at least two velocity samples".into(),
            ));
        }
        Ok(spec)
    }
}

fn check_case(case: u8) -> Result<(), CliError> {
    if (1..=4).contains(&case) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "test case must be 1..=4, got {case}"
        )))
    }
}

/// Everything needed about the three-edge node of one test case.
#[derive(Debug, Clone)]
pub struct CaseSetup {
    pub model: HalfSpaceModel,
    pub topology: NodeTopology,
    pub coefficients: CouplingCoefficients,
    pub data: InitialData,
    pub solution: NodeSolution,
}

impl CaseSetup {
    pub fn new(case: u8, half: usize) -> Result<Self, CliError> {
        check_case(case)?;
        let model = HalfSpaceModel::new(half)?;
        let topology = NodeTopology::symmetric(Degree::Finite(3));
        let coefficients = extract_deltas(&invariant_matrix(&model, &topology)?)?;
        let data = InitialData::preset(case, coefficients.delta1, coefficients.delta2)?;
        let problem = NodeProblem::new(
            topology.clone(),
            coefficients.clone(),
            data.incoming(),
            data.zero_balance(),
        )?;
        let solution = solve_node(&model, &problem)?;
        Ok(CaseSetup {
            model,
            topology,
            coefficients,
            data,
            solution,
        })
    }
}

pub struct NodeReport {
    pub setup: CaseSetup,
    pub files: Vec<PathBuf>,
}

pub fn cmd_node(spec: &NodeSpec, out: &Path) -> Result<NodeReport, CliError> {
    let setup = CaseSetup::new(spec.case, spec.half)?;
    let c = &setup.coefficients;
    let states = macro_states(&setup.data, &setup.solution)?;
    let stem = format!("node_case{}", spec.case);
    let summary = out.join(format!("{stem}.csv"));
    write_csv(
        &summary,
        &["edge", "S_inf", "q_inf", "rho_inf", "rho_at_0", "rho_left"],
        setup
            .solution
            .edges
            .iter()
            .zip(&states)
            .enumerate()
            .map(|(i, (e, m))| {
                vec![
                    (i + 1).into(),
                    e.d.into(),
                    e.c.into(),
                    e.b.into(),
                    e.rho_at_0.into(),
                    m.rho_l.into(),
                ]
            }),
    )?;
    let mut files = vec![summary];
    let v: Vec<f64> = (0..spec.samples)
        .map(|j| -spec.vmax + 2.0 * spec.vmax * j as f64 / (spec.samples - 1) as f64)
        .collect();
    for i in 0..setup.solution.degree() {
        let f = node_distribution(&setup.solution, i, &v)?;
        let pairs: Vec<(f64, f64)> = v.iter().copied().zip(f).collect();
        let path = out.join(format!("{stem}_distribution_edge{}.csv", i + 1));
        write_pairs(&path, ["v", "f"], &pairs)?;
        files.push(path);
    }
    let dev = Deviation::preset(spec.case, c.delta1, c.delta2)?;
    let lim = dev.limit(c.delta1, c.delta2);
    println!(
        "case {} N={}: delta1={:.6} delta2={:.6} qbar_inf={:.6} Sbar_inf={:.6} rhobar_inf={:.6}",
        spec.case, spec.half, c.delta1, c.delta2, lim.q, lim.s, lim.rho
    );
    for (i, (e, m)) in setup.solution.edges.iter().zip(&states).enumerate() {
        println!(
            "edge {}: S_inf={:.6} q_inf={:.6} rho_inf={:.6} rho(0)={:.6} rho_L={:.6}",
            i + 1,
            e.d,
            e.c,
            e.b,
            e.rho_at_0,
            m.rho_l
        );
    }
    Ok(NodeReport { setup, files })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub case: u8,
    pub half: usize,
    pub epsilon: f64,
    pub t_end: f64,
    pub cells: usize,
    pub length: f64,
    pub cfl: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            case: 1,
            half: 16,
            epsilon: 5e-4,
            t_end: 0.1,
            cells: 1000,
            length: 0.5,
            cfl: 0.9,
        }
    }
}

impl RunSpec {
    pub fn resolve(a: &RunArgs, file: &RunSection) -> Result<Self, CliError> {
        let d = RunSpec::default();
        let spec = RunSpec {
            case: a.case.or(file.case).unwrap_or(d.case),
            half: a.half.or(file.half).unwrap_or(d.half),
            epsilon: a.eps.or(file.epsilon).unwrap_or(d.epsilon),
            t_end: a.t_end.or(file.t_end).unwrap_or(d.t_end),
            cells: a.cells.or(file.cells).unwrap_or(d.cells),
            length: a.length.or(file.length).unwrap_or(d.length),
            cfl: a.cfl.or(file.cfl).unwrap_or(d.cfl),
        };
        check_case(spec.case)?;
        Ok(spec)
    }

    pub fn network(&self, topology: &NodeTopology) -> NetworkConfig {
        NetworkConfig {
            half: self.half,
            epsilon: self.epsilon,
            cfl: self.cfl,
            t_end: self.t_end,
            edge_length: vec![self.length; 3],
            mesh: MeshSpec::Uniform { cells: self.cells },
            topology: topology.clone(),
            output_times: Vec::new(),
        }
    }

    fn stem(&self, kind: &str) -> String {
        format!("{kind}_case{}", self.case)
    }
}

const FIELDS: [(Field, &str); 3] = [(Field::Rho, "rho"), (Field::Q, "q"), (Field::S, "S")];

pub fn cmd_kinetic(
    spec: &RunSpec,
    out: &Path,
) -> Result<(RunOutput, Vec<PathBuf>, CaseSetup), CliError> {
    let setup = CaseSetup::new(spec.case, spec.half)?;
    let sim = KineticSimulator::new(spec.network(&setup.topology), setup.data.clone())?;
    let run = sim.run()?;
    let stem = spec.stem("kinetic");
    let mut files = Vec::new();
    let snap = run.last();
    for (i, p) in snap.profiles.iter().enumerate() {
        for (field, name) in FIELDS {
            let pairs: Vec<(f64, f64)> =
                p.x.iter()
                    .copied()
                    .zip(p.field(field).iter().copied())
                    .collect();
            let path = out.join(format!("{stem}_{name}_edge{}.csv", i + 1));
            write_pairs(&path, ["x", name], &pairs)?;
            files.push(path);
        }
    }
    for (i, f) in snap.node_distribution.iter().enumerate() {
        let pairs = sim.basis.pointwise(f)?;
        let path = out.join(format!("{stem}_node_distribution_edge{}.csv", i + 1));
        write_pairs(&path, ["v", "f"], &pairs)?;
        files.push(path);
    }
    let summary = out.join(format!("{stem}_summary.csv"));
    write_csv(
        &summary,
        &[
            "steps",
            "dt",
            "initial_mass",
            "final_mass",
            "outer_outflow",
            "mass_defect",
        ],
        [vec![
            run.steps.into(),
            run.dt.into(),
            run.initial_mass.into(),
            run.final_mass.into(),
            run.outer_outflow.into(),
            run.mass_defect().into(),
        ]],
    )?;
    files.push(summary);
    println!(
        "kinetic case {}: {} steps, dt={:.3e}, relative mass defect {:.2e}",
        spec.case,
        run.steps,
        run.dt,
        run.mass_defect()
    );
    Ok((run, files, setup))
}

/// Cell centres of the uniform grid of `spec`.
fn grid(spec: &RunSpec) -> Vec<f64> {
    let h = spec.length / spec.cells as f64;
    (0..spec.cells).map(|j| (j as f64 + 0.5) * h).collect()
}

fn composite_fields(
    profile: &CompositeProfile,
    edge: usize,
    xs: &[f64],
    t: f64,
) -> Result<[Vec<f64>; 3], CliError> {
    let mut rho = Vec::with_capacity(xs.len());
    let mut q = Vec::with_capacity(xs.len());
    let mut s = Vec::with_capacity(xs.len());
    for &x in xs {
        let p = profile.point(edge, x, t)?;
        rho.push(p.rho);
        q.push(p.q);
        s.push(p.s);
    }
    Ok([rho, q, s])
}

fn write_composite(
    spec: &RunSpec,
    setup: &CaseSetup,
    out: &Path,
) -> Result<(CompositeProfile, Vec<PathBuf>), CliError> {
    let profile = CompositeProfile::new(&setup.model, &setup.data, &setup.solution, spec.epsilon)?;
    let xs = grid(spec);
    let stem = spec.stem("composite");
    let mut files = Vec::new();
    for i in 0..setup.solution.degree() {
        let fields = composite_fields(&profile, i, &xs, spec.t_end)?;
        for ((_, name), vals) in FIELDS.iter().zip(&fields) {
            let pairs: Vec<(f64, f64)> = xs.iter().copied().zip(vals.iter().copied()).collect();
            let path = out.join(format!("{stem}_{name}_edge{}.csv", i + 1));
            write_pairs(&path, ["x", name], &pairs)?;
            files.push(path);
        }
    }
    Ok((profile, files))
}

pub fn cmd_composite(spec: &RunSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let setup = CaseSetup::new(spec.case, spec.half)?;
    write_composite(spec, &setup, out).map(|r| r.1)
}

/// Distance between kinetic and composite fields on one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Distance {
    pub edge: usize,
    pub field: &'static str,
    pub sup: f64,
    pub l1: f64,
}

pub struct CompareReport {
    pub distances: Vec<Distance>,
    pub run: RunOutput,
    pub files: Vec<PathBuf>,
}

/// Half width of the window around the wave front left out of the
/// distances.
pub const FRONT_WINDOW: f64 = 0.01;

pub fn cmd_compare(spec: &RunSpec, out: &Path) -> Result<CompareReport, CliError> {
    let (run, mut files, setup) = cmd_kinetic(spec, out)?;
    let (profile, cfiles) = write_composite(spec, &setup, out)?;
    files.extend(cfiles);
    let front = SOUND_SPEED * spec.t_end;
    let mut distances = Vec::new();
    for (i, p) in run.last().profiles.iter().enumerate() {
        let fields = composite_fields(&profile, i, &p.x, spec.t_end)?;
        for ((field, name), comp) in FIELDS.iter().zip(&fields) {
            let kin = p.field(*field);
            let mut sup = 0.0f64;
            let mut l1 = 0.0;
            for (j, &x) in p.x.iter().enumerate() {
                if (x - front).abs() < FRONT_WINDOW {
                    continue;
                }
                let d = (kin[j] - comp[j]).abs();
                sup = sup.max(d);
                l1 += d * spec.length / spec.cells as f64;
            }
            distances.push(Distance {
                edge: i + 1,
                field: name,
                sup,
                l1,
            });
        }
    }
    let path = out.join(format!("{}.csv", spec.stem("compare")));
    write_csv(
        &path,
        &["edge", "field", "sup", "l1"],
        distances
            .iter()
            .map(|d| vec![d.edge.into(), d.field.into(), d.sup.into(), d.l1.into()]),
    )?;
    files.push(path);
    for d in &distances {
        println!(
            "edge {} {}: sup={:.3e} l1={:.3e}",
            d.edge, d.field, d.sup, d.l1
        );
    }
    Ok(CompareReport {
        distances,
        run,
        files,
    })
}
