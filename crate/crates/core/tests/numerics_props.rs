use num_complex::Complex64;
use proptest::prelude::*;

use wg_schwarz::iteration::{build_iteration_matrix, params_coefficients, spectral_radius_curve};
use wg_schwarz::numerics::{gmres, poly_roots, power_radius, DenseMatrixC, IdentityOperator, PolynomialC};
use wg_schwarz::schwarz1d::{AlphaMode, SchwarzParams};

fn disc_point() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn roots_rebuild_the_polynomial(
        lower in prop::collection::vec(disc_point(), 1..=12),
        lead_mod in 0.25..1.0f64,
        lead_arg in -3.0..3.0f64,
    ) {
        let mut coeffs = lower;
        coeffs.push(Complex64::from_polar(lead_mod, lead_arg));
        let p = PolynomialC::new(coeffs);
        let roots = poly_roots(&p, 1e-14, 2000).unwrap();
        prop_assert_eq!(roots.len(), p.degree());
        let rebuilt = PolynomialC::from_roots(&roots);
        let monic = p.monic();
        for (x, y) in rebuilt.coeffs().iter().zip(monic.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-8, "{} vs {}", x, y);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gmres_matches_lu_on_hpd_systems(entries in prop::collection::vec(disc_point(), 400), rhs in prop::collection::vec(disc_point(), 20)) {
        let n = 20;
        let b = DenseMatrixC::from_row_major(n, n, entries).unwrap();
        // BᴴB + I
        let mut a = DenseMatrixC::identity(n);
        for i in 0..n {
            for j in 0..n {
                let s: Complex64 = (0..n).map(|r| b[(r, i)].conj() * b[(r, j)]).sum();
                a[(i, j)] += s;
            }
        }
        prop_assume!(rhs.iter().any(|v| v.norm() > 0.0));
        let direct = a.solve(&rhs).unwrap();
        let report = gmres(&a, &IdentityOperator(n), &rhs, 1e-13, 20).unwrap();
        prop_assert!(report.iterations <= 20);
        let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = report.solution.iter().zip(&direct).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8 * scale.max(1.0), "error {err}");
    }

    #[test]
    fn power_radius_does_not_exceed_root_radius(
        k in 1.0..40.0f64,
        sigma in 0.5..10.0f64,
        delta in 0.02..0.5f64,
        l in 0.2..2.0f64,
        n in 3usize..24,
    ) {
        let params = SchwarzParams::new(k, sigma, delta, l, AlphaMode::Impedance, n).unwrap();
        let (a, b) = params_coefficients(&params, None).unwrap();
        let t = build_iteration_matrix(a, b, n).unwrap();
        let rho = spectral_radius_curve(&params, &[n], None).unwrap()[0].rho;
        let est = power_radius(&t, 3, 4000);
        prop_assert!(est.radius <= rho + 1e-6, "power {} root {}", est.radius, rho);
    }
}

#[test]
fn power_radius_matches_roots_for_strong_absorption() {
    let params = SchwarzParams::new(30.0, 5.0, 0.1, 1.0, AlphaMode::Impedance, 40).unwrap();
    let (a, b) = params_coefficients(&params, None).unwrap();
    let t = build_iteration_matrix(a, b, 40).unwrap();
    let rho = spectral_radius_curve(&params, &[40], None).unwrap()[0].rho;
    let est = power_radius(&t, 3, 20000);
    assert!((est.radius - rho).abs() <= 1e-4, "power {} root {}", est.radius, rho);
}
