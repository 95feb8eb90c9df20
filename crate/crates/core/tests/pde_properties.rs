use holonomy_core::pde::{dirac_index, initial_data, residual, solve_graph, GraphKind, Jet1, PdeError, SolverOptions, TopologyInvariants};
use proptest::prelude::*;

#[test]
fn large_initial_data_diverges_cleanly() {
    let init = initial_data(GraphKind::Associative, 8, 10.0, 3);
    match solve_graph(&init, GraphKind::Associative, &SolverOptions::default(), 3) {
        Err(PdeError::Diverged { residual, .. }) | Err(PdeError::NotConverged { residual, .. }) => assert!(residual > 1e-8),
        other => panic!("expected divergence, got {:?}", other.map(|o| o.residual)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_is_integral_exactly_on_even_sums(tau in -50i64..50, chi in -50i64..50, q in -50i64..50) {
        let r = dirac_index(TopologyInvariants { signature: tau, euler: chi, self_intersection: q });
        if (chi + q) % 2 == 0 {
            prop_assert_eq!(r.unwrap() * 2, 2 * tau - chi - q);
        } else {
            prop_assert!(matches!(r, Err(PdeError::Parity(_))));
        }
    }

    #[test]
    fn residual_is_odd_in_the_jet(v in proptest::collection::vec(-1.0f64..1.0, 16)) {
        // D is linear and C cubic, so the residual is an odd function of the jet
        for kind in [GraphKind::Associative, GraphKind::Cayley] {
            let (b, t) = (kind.base_dim(), kind.target_dim());
            let partials: Vec<Vec<f64>> = (0..b).map(|a| v[a * t..(a + 1) * t].to_vec()).collect();
            let jet = Jet1::new(kind, partials).unwrap();
            let r1 = residual(&jet).unwrap();
            let r2 = residual(&jet.scaled(-1.0)).unwrap();
            prop_assert!((r1 + r2).max_abs() < 1e-12);
        }
    }
}
