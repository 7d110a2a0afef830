use netbgk::coupler::{
    coupling_coefficients, exact_determinant, macro_coupling_solve, Degree, MacroCouplingSystem,
    SOUND_SPEED,
};
use netbgk::hermite::{state_to_moments, VelocityBasis};
use netbgk::presets::{Deviation, InitialData};
use proptest::prelude::*;

fn basis(half: usize) -> VelocityBasis {
    VelocityBasis::new(half).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maxwellian_closure(half in 3usize..40, rho in -2.0..2.0f64, q in -2.0..2.0f64, s in -2.0..2.0f64) {
        let b = basis(half);
        let f = b.transform.maxwellian_from_state(rho, q, s);
        let m = b.transform.moments(&f).unwrap();
        prop_assert!((m.rho - rho).abs() < 1e-12);
        prop_assert!((m.q - q).abs() < 1e-12);
        prop_assert!((m.energy - s).abs() < 1e-12);
        let (g0, g1, g2) = state_to_moments(rho, q, s);
        prop_assert!((m.g[0] - g0).abs() < 1e-12);
        prop_assert!((m.g[1] - g1).abs() < 1e-12);
        prop_assert!((m.g[2] - g2).abs() < 1e-12);
        prop_assert!(m.g[3..].iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn transform_round_trip(half in 2usize..60, seed in prop::collection::vec(-1.0..1.0f64, 120)) {
        let b = basis(half);
        let f: Vec<f64> = seed[..2 * half].to_vec();
        let g = b.transform.apply(&f).unwrap();
        let back = b.transform.solve(&g).unwrap();
        for (x, y) in f.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn macro_system_satisfies_invariants(
        n in 2usize..7,
        d1 in 0.0..2.5f64,
        d2 in 0.0..2.0f64,
        inc in prop::collection::vec(-1.0..1.0f64, 6),
        zb in -1.0..1.0f64,
    ) {
        let incoming = &inc[..n];
        let l = macro_coupling_solve(d1, d2, incoming, zb).unwrap();
        let flux: f64 = l.iter().map(|e| e.c).sum();
        prop_assert!(flux.abs() < 1e-10);
        let zero: f64 = l.iter().map(|e| e.d - 3.0 * e.b).sum();
        prop_assert!((zero - zb).abs() < 1e-10);
        for (e, r) in l.iter().zip(incoming) {
            prop_assert!((e.d - SOUND_SPEED * e.c - r).abs() < 1e-10);
            prop_assert!((e.d + d1 * e.c - l[0].d - d1 * l[0].c).abs() < 1e-10);
            prop_assert!((e.b + d2 * e.c - l[0].b - d2 * l[0].c).abs() < 1e-10);
        }
    }

    #[test]
    fn macro_determinant(n in 2usize..7, d1 in -0.9..3.0f64) {
        let sys = MacroCouplingSystem::new(d1, 0.3, &vec![0.0; n], 0.0).unwrap();
        let exact = exact_determinant(n, d1);
        prop_assert!((sys.determinant() - exact).abs() <= 1e-9 * exact.abs().max(1e-300));
    }

    #[test]
    fn limits_scale_with_data(case in 1u8..5, scale in 0.1..5.0f64) {
        let d1 = 0.53;
        let d2 = 0.35;
        let dev = Deviation::preset(case, d1, d2).unwrap();
        let scaled = Deviation { q: dev.q * scale, s: dev.s * scale, rho: dev.rho * scale };
        let a = dev.limit(d1, d2);
        let b = scaled.limit(d1, d2);
        prop_assert!((b.q - scale * a.q).abs() < 1e-12 * scale);
        prop_assert!((b.s - scale * a.s).abs() < 1e-12 * scale);
        prop_assert!((b.rho - scale * a.rho).abs() < 1e-12 * scale);
        let data = InitialData::from_deviation(dev);
        let node = data.node_limits(d1, d2).unwrap();
        prop_assert!((node[1].c - a.q).abs() < 1e-10);
    }
}

#[test]
fn deltas_positive_and_ordered() {
    for half in [8, 16, 32] {
        let c3 = coupling_coefficients(half, Degree::Finite(3)).unwrap();
        let c6 = coupling_coefficients(half, Degree::Finite(6)).unwrap();
        let ci = coupling_coefficients(half, Degree::Infinite).unwrap();
        assert!(0.0 < c3.delta1 && c3.delta1 < c6.delta1 && c6.delta1 < ci.delta1);
        assert!(0.0 < c3.delta2 && c3.delta2 < c6.delta2 && c6.delta2 < ci.delta2);
    }
}
