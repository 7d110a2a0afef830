use netbgk::acoustic::{exact_macro, viscous_amplitudes, viscous_layer_check, CompositeProfile};
use netbgk::coupler::{
    extract_deltas, invariant_matrix, solve_node, Degree, HalfSpaceModel, NodeProblem,
    NodeSolution, NodeTopology, SOUND_SPEED,
};
use netbgk::kinetic::{Field, KineticSimulator, NetworkConfig};
use netbgk::presets::InitialData;

struct Case {
    model: HalfSpaceModel,
    data: InitialData,
    solution: NodeSolution,
}

fn case(number: u8, half: usize) -> Case {
    let model = HalfSpaceModel::new(half).unwrap();
    let topology = NodeTopology::symmetric(Degree::Finite(3));
    let c = extract_deltas(&invariant_matrix(&model, &topology).unwrap()).unwrap();
    let data = InitialData::preset(number, c.delta1, c.delta2).unwrap();
    let p = NodeProblem::new(topology, c, data.incoming(), data.zero_balance()).unwrap();
    let solution = solve_node(&model, &p).unwrap();
    Case {
        model,
        data,
        solution,
    }
}

fn simulate(
    data: &InitialData,
    half: usize,
    eps: f64,
    t: f64,
    length: f64,
    dx: f64,
) -> netbgk::kinetic::RunOutput {
    let config = NetworkConfig::symmetric(3, half, eps, t, length, dx);
    KineticSimulator::new(config, data.clone())
        .unwrap()
        .run()
        .unwrap()
}

#[test]
fn mass_is_conserved_with_fluxes() {
    let c = case(3, 8);
    let out = simulate(&c.data, 8, 1e-3, 0.03, 0.2, 2e-3);
    assert!(out.mass_defect() < 1e-12, "{}", out.mass_defect());
    assert!(out.node_inflow.abs() < 1e-12, "{}", out.node_inflow);
}

#[test]
fn node_distribution_matches_half_space_solution() {
    let half = 16;
    let c = case(2, half);
    let out = simulate(&c.data, half, 5e-4, 0.1, 0.5, 5e-4);
    let kinetic = &out.last().node_distribution;
    let speeds = c.model.basis.rule.speeds();
    let mut slow: Vec<usize> = (0..speeds.len()).collect();
    slow.sort_by(|&a, &b| speeds[a].abs().total_cmp(&speeds[b].abs()));
    let skip = &slow[..2];
    for (e, (k, s)) in kinetic.iter().zip(&c.solution.edges).enumerate() {
        let kin = c.model.basis.pointwise(k).unwrap();
        let half_space = c.model.basis.pointwise(&s.distribution).unwrap();
        let scale = half_space.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        for i in (0..speeds.len()).filter(|i| !skip.contains(i)) {
            let rel = (kin[i].1 - half_space[i].1).abs() / scale;
            assert!(rel < 0.05, "edge {e}, node {i}: {rel}");
        }
    }
}

#[test]
fn grid_refinement_converges() {
    let c = case(1, 8);
    let eps = 5e-3;
    let xs: Vec<f64> = (1..40).map(|i| i as f64 * 2.5e-3).collect();
    let sample = |dx: f64| -> Vec<f64> {
        let out = simulate(&c.data, 8, eps, 0.02, 0.1, dx);
        let p = &out.last().profiles[1];
        xs.iter().map(|&x| p.sample(Field::Rho, x)).collect()
    };
    let u: Vec<Vec<f64>> = [1e-3, 5e-4, 2.5e-4, 1.25e-4]
        .iter()
        .map(|&dx| sample(dx))
        .collect();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let d1 = dist(&u[0], &u[1]);
    let d2 = dist(&u[1], &u[2]);
    let d3 = dist(&u[2], &u[3]);
    let order = ((d1 / d2).log2() + (d2 / d3).log2()) / 2.0;
    assert!(order >= 0.8, "observed order {order}");
}

#[test]
fn outer_boundary_is_transparent() {
    let c = case(4, 8);
    let t = 0.05;
    let short = simulate(&c.data, 8, 1e-3, t, 0.5, 2.5e-3);
    let long = simulate(&c.data, 8, 1e-3, t, 1.0, 2.5e-3);
    for (a, b) in short.last().profiles.iter().zip(&long.last().profiles) {
        for i in 0..a.x.len() {
            assert!((a.rho[i] - b.rho[i]).abs() < 1e-12);
            assert!((a.q[i] - b.q[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn bulk_values_match_macro_prediction() {
    let half = 16;
    for n in [1u8, 4] {
        let c = case(n, half);
        let out = simulate(&c.data, half, 5e-4, 0.1, 0.5, 5e-4);
        let predicted = exact_macro(&c.data, &c.solution, 0.05, 0.1).unwrap();
        for (p, m) in out.last().profiles.iter().zip(&predicted) {
            assert!((p.sample(Field::Q, 0.05) - m.q).abs() < 1e-2);
            assert!((p.sample(Field::S, 0.05) - m.s).abs() < 1e-2);
            assert!((p.sample(Field::Rho, 0.05) - m.rho).abs() < 1e-2);
        }
    }
}

#[test]
fn composite_limits() {
    let c = case(2, 16);
    let eps = 1e-3;
    let comp = CompositeProfile::new(&c.model, &c.data, &c.solution, eps).unwrap();
    let t = 0.1;
    for (i, e) in c.solution.edges.iter().enumerate() {
        assert!((comp.rho_on(i, 0.0, t).unwrap() - e.rho_at_0).abs() < 1e-12);
        let bulk = exact_macro(&c.data, &c.solution, 0.1, t).unwrap()[i].rho;
        assert!((comp.rho_on(i, 0.1, t).unwrap() - bulk).abs() < 1e-10);
        let past = comp.rho_on(i, SOUND_SPEED * t + 0.05, t).unwrap();
        assert!((past - c.data.edges[i].rho).abs() < 1e-10);
    }
}

#[test]
fn viscous_layer_balance() {
    let c2 = case(2, 16);
    assert!(viscous_layer_check(&c2.data, &c2.solution).abs() < 1e-10);
    let amps = viscous_amplitudes(&c2.data, &c2.solution).unwrap();
    assert!(amps.iter().sum::<f64>().abs() < 1e-10);
    assert!(amps.iter().any(|a| a.abs() > 1e-2));
    for n in [1u8, 3] {
        let c = case(n, 16);
        let amps = viscous_amplitudes(&c.data, &c.solution).unwrap();
        assert!(amps.iter().all(|a| a.abs() < 1e-10), "case {n}: {amps:?}");
    }
}
