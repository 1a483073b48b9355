//! Complex-arithmetic kernels shared by the analysis and solver modules.

pub mod dense;
pub mod gmres;
pub mod operator;
pub mod poly;
pub mod power;
pub mod sparse;

pub use dense::{lu_det, DenseMatrixC, LuFactors};
pub use gmres::{gmres, SolveReport, SolveStatus};
pub use operator::{FnOperator, IdentityOperator, LinearOperator};
pub use poly::{aberth, poly_roots, PolyEval, PolynomialC, RootOptions, RootTarget};
pub use power::{power_radius, power_radius_with, PowerEstimate, PowerOptions};
pub use sparse::{BandedLu, CsrMatrix};

use num_complex::Complex64;

/// Hausdorff distance between two finite point sets in the complex plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let directed = |p: &[Complex64], q: &[Complex64]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
