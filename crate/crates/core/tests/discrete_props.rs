use proptest::prelude::*;

use wg_schwarz::discrete::{build_oras, solve_oras, BoundaryCase, DiscreteProblem, SCAN_MAX_ITER, SCAN_TOLERANCE};

fn case() -> impl Strategy<Value = BoundaryCase> {
    prop_oneof![Just(BoundaryCase::WaveGuide), Just(BoundaryCase::FreeSpace)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weights_form_a_partition_of_unity(
        n_per_unit in 9usize..30,
        n_sub in 1usize..10,
        overlap in 1usize..4,
        case in case(),
    ) {
        let p = DiscreteProblem::new(5.0, 1.0, n_per_unit, n_sub, case).unwrap();
        let Ok(p) = p.with_overlap(overlap) else { return Ok(()) };
        let Ok(m) = build_oras(&p) else { return Ok(()) };
        prop_assert_eq!(m.subdomain_count(), n_sub);
        prop_assert!(m.partition_of_unity_error() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn preconditioned_solution_matches_direct(
        k in 2.0..12.0f64,
        sigma in 1.0..4.0f64,
        n_sub in 2usize..7,
        case in case(),
    ) {
        let p = DiscreteProblem::desk_scale(k, sigma, n_sub, case).unwrap();
        let s = solve_oras(&p, SCAN_TOLERANCE, SCAN_MAX_ITER, true).unwrap();
        prop_assert!(s.report.converged());
        let err = s.error_vs_direct.unwrap();
        prop_assert!(err <= 1e-5, "relative error {err}");
    }
}
