use netbgk::coupler::{coupling_coefficients, maxwell_delta, Degree};
use netbgk::layer::{LayerMatrix, LayerSpectrum};

#[test]
fn layer_spectrum_properties() {
    for half in [4, 8, 16, 50, 100, 200] {
        let a = LayerMatrix::new(half).unwrap();
        let s = LayerSpectrum::new(&a).unwrap();
        assert_eq!(s.eigenvalues.len(), 2 * (half - 2));
        assert!(s.eigenvalues.iter().all(|l| l.is_finite()));
        assert!(s.min_relative_gap() > 0.0, "N={half}");
        assert!(s.symmetry_defect() < 1e-10, "N={half}");
        assert_eq!(s.positive_eigenvalues().len(), half - 2);
        assert!(
            s.max_residual(&a) < 1e-10,
            "N={half}: {}",
            s.max_residual(&a)
        );
    }
}

#[test]
fn ql_matches_dense_solver() {
    for half in [6, 20, 60] {
        let a = LayerMatrix::new(half).unwrap();
        let ql = LayerSpectrum::new(&a).unwrap();
        let dense = LayerSpectrum::dense(&a).unwrap();
        for (x, y) in ql.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((x - y).abs() < 1e-12 * (1.0 + y.abs()));
        }
        for (x, y) in ql.first_row().iter().zip(dense.first_row()) {
            assert!((x.abs() - y.abs()).abs() < 1e-10);
        }
    }
}

#[test]
fn eigenvectors_orthonormal() {
    let a = LayerMatrix::new(80).unwrap();
    let s = LayerSpectrum::new(&a).unwrap();
    let g = s.eigenvectors.transpose() * &s.eigenvectors;
    let dim = g.nrows();
    for i in 0..dim {
        for j in 0..dim {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g[(i, j)] - want).abs() < 1e-11);
        }
    }
}

#[test]
fn deltas_settle_as_n_grows() {
    let d = |half| coupling_coefficients(half, Degree::Finite(3)).unwrap();
    let (a, b, c) = (d(25), d(50), d(99));
    assert!((b.delta1 - c.delta1).abs() < (a.delta1 - c.delta1).abs());
    assert!((b.delta1 - c.delta1).abs() < 1e-3);
    assert!((b.delta2 - c.delta2).abs() < 2e-3);
}

#[test]
fn large_degree_approaches_infinite_node() {
    let half = 30;
    let inf = coupling_coefficients(half, Degree::Infinite).unwrap();
    let gap = |n| {
        let c = coupling_coefficients(half, Degree::Finite(n)).unwrap();
        (inf.delta1 - c.delta1, inf.delta2 - c.delta2)
    };
    let (g50, h50) = gap(50);
    let (g200, h200) = gap(200);
    assert!(g50 > 0.0 && g200 > 0.0 && h50 > 0.0 && h200 > 0.0);
    // The gap shrinks like 1/n.
    assert!((g50 / g200 - 4.0).abs() < 0.5, "{}", g50 / g200);
    assert!((h50 / h200 - 4.0).abs() < 0.5, "{}", h50 / h200);
}

#[test]
fn maxwell_estimate_is_close() {
    for (n, deg) in [(3, Degree::Finite(3)), (5, Degree::Finite(5))] {
        let (m1, m2) = maxwell_delta(deg);
        let c = coupling_coefficients(40, Degree::Finite(n)).unwrap();
        assert!((m1 - c.delta1).abs() / c.delta1 < 0.05);
        assert!((m2 - c.delta2).abs() / c.delta2 < 0.2);
    }
}
