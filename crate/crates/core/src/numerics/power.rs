//! Power-iteration estimate of the spectral radius.
//!
//! The iteration matrices of interest have spectra symmetric under `λ ↦ −λ`,
//! so the dominant eigenvalues of `T` come in pairs of equal modulus and the
//! plain Rayleigh quotient of `T` need not converge. The estimator therefore
//! tracks the Rayleigh quotient of `T²` on the normalised iterate and reports
//! `sqrt(|x* T² x| / x* x)`. For non-normal operators this is a lower-bound
//! style estimate and is meant only as a cross-check against root-based
//! spectra.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::{dotc, norm2, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub radius: f64,
    /// Whether the last restart settled to relative change `1e-10`.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub settle_tol: f64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { restarts: 3, iters: 5000, seed: 7, settle_tol: 1e-10 }
    }
}

pub fn power_radius<A: LinearOperator>(op: &A, restarts: usize, iters: usize) -> PowerEstimate {
    power_radius_with(op, &PowerOptions { restarts, iters, ..PowerOptions::default() })
}

pub fn power_radius_with<A: LinearOperator>(op: &A, opts: &PowerOptions) -> PowerEstimate {
    let n = op.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = PowerEstimate { radius: 0.0, converged: true };
    let mut y = vec![zero; n];
    let mut z = vec![zero; n];
    for r in 0..opts.restarts.max(1) {
        let mut x: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let mut est = 0.0;
        let mut settled = false;
        for _ in 0..opts.iters {
            op.apply(&x, &mut y);
            let ny = norm2(&y);
            if ny == 0.0 || !ny.is_finite() {
                est = 0.0;
                settled = true;
                break;
            }
            op.apply(&y, &mut z);
            let next = dotc(&x, &z).norm().sqrt();
            settled = (next - est).abs() <= opts.settle_tol * next.max(f64::MIN_POSITIVE);
            est = next;
            x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / ny);
        }
        if r == 0 || est > best.radius {
            best = PowerEstimate { radius: est, converged: settled };
        }
    }
    best
}
