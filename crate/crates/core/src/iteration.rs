//! The interface iteration `Rⁿ = T Rⁿ⁻¹` of the 1D Schwarz method.
//!
//! State ordering is `[R₊(b₁), R₋(a₂), R₊(b₂), …, R₊(b_{N−1}), R₋(a_N)]`;
//! the end values `R₋(a₁)` and `R₊(b_N)` vanish and are not stored. One sweep
//! maps
//!
//! ```text
//!   R₋(a_j) ← a R₋(a_{j−1}) + b R₊(b_{j−1})
//!   R₊(b_j) ← b R₋(a_{j+1}) + a R₊(b_{j+1})
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrixC, LinearOperator};
use crate::schwarz1d::{coefficients_from, r1d_bound, zeta_1d, zeta_mode, SchwarzParams};
use crate::toeplitz::{spectrum, EvenCharPoly, ToeplitzBlocks};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceVector {
    entries: Vec<Complex64>,
}

impl InterfaceVector {
    /// `entries.len()` must equal `2(N−1)` for `N ≥ 2`.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() < 2 || !entries.len().is_multiple_of(2) {
            return Err(Error::Domain(format!("interface vector length must be 2(N−1), got {}", entries.len())));
        }
        Ok(Self { entries })
    }

    pub fn zeros(n_subdomains: usize) -> Self {
        Self { entries: vec![ZERO; 2 * n_subdomains.saturating_sub(1)] }
    }

    pub fn subdomains(&self) -> usize {
        self.entries.len() / 2 + 1
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Index of `R₊(b_j)`, `1 ≤ j ≤ N−1`.
    pub fn plus_index(j: usize) -> usize {
        2 * (j - 1)
    }

    /// Index of `R₋(a_j)`, `2 ≤ j ≤ N`.
    pub fn minus_index(j: usize) -> usize {
        2 * j - 3
    }

    pub fn plus(&self, j: usize) -> Complex64 {
        if j == 0 || j >= self.subdomains() {
            ZERO
        } else {
            self.entries[Self::plus_index(j)]
        }
    }

    pub fn minus(&self, j: usize) -> Complex64 {
        if j <= 1 || j > self.subdomains() {
            ZERO
        } else {
            self.entries[Self::minus_index(j)]
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct IterationMatrix {
    pub blocks: ToeplitzBlocks,
    pub dense: DenseMatrixC,
}

impl LinearOperator for IterationMatrix {
    fn dim(&self) -> usize {
        self.dense.rows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.dense.matvec_into(x, y)
    }
}

/// Assemble the `2(N−1)` square iteration matrix interface by interface.
pub fn build_iteration_matrix(a: Complex64, b: Complex64, n: usize) -> Result<IterationMatrix> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 subdomains, got {n}")));
    }
    let blocks = ToeplitzBlocks::new_degenerate(a, b, n - 1)?;
    let dim = 2 * (n - 1);
    let mut t = DenseMatrixC::zeros(dim, dim);
    for j in 2..=n {
        let row = InterfaceVector::minus_index(j);
        if j > 2 {
            t[(row, InterfaceVector::minus_index(j - 1))] = a;
        }
        t[(row, InterfaceVector::plus_index(j - 1))] = b;
    }
    for j in 1..n {
        let row = InterfaceVector::plus_index(j);
        t[(row, InterfaceVector::minus_index(j + 1))] = b;
        if j + 1 < n {
            t[(row, InterfaceVector::plus_index(j + 1))] = a;
        }
    }
    Ok(IterationMatrix { blocks, dense: t })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationHistory {
    /// `‖Rⁿ‖₂` for `n = 0 … steps`.
    pub norms: Vec<f64>,
    pub estimated_rate: f64,
    pub steps: usize,
}

pub fn iterate(matrix: &IterationMatrix, r0: &InterfaceVector, steps: usize) -> Result<IterationHistory> {
    if steps == 0 {
        return Err(Error::Domain("need at least one step".into()));
    }
    if r0.entries.len() != matrix.dim() {
        return Err(Error::Domain(format!("initial vector has length {}, matrix {}", r0.entries.len(), matrix.dim())));
    }
    if r0.norm() == 0.0 {
        return Err(Error::Domain("initial interface data must be nonzero".into()));
    }
    let mut x = r0.entries.clone();
    let mut y = vec![ZERO; x.len()];
    let mut norms = vec![r0.norm()];
    for _ in 0..steps {
        matrix.apply(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
        norms.push(x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt());
    }
    Ok(IterationHistory { estimated_rate: tail_rate(&norms), norms, steps })
}

/// `exp` of the least-squares slope of `ln ‖Rⁿ‖` over the final third.
fn tail_rate(norms: &[f64]) -> f64 {
    let steps = norms.len() - 1;
    let start = (steps - steps / 3).min(steps.saturating_sub(1));
    let tail = &norms[start..];
    if tail.contains(&0.0) {
        return 0.0;
    }
    let n = tail.len() as f64;
    let xs: Vec<f64> = (0..tail.len()).map(|i| i as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxy / sxx).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusPoint {
    pub n: usize,
    pub rho: f64,
    pub r1d_bound: f64,
}

/// `(a, b)` for the 1D problem or, with `k_tilde`, for one transverse mode.
pub fn params_coefficients(params: &SchwarzParams, k_tilde: Option<f64>) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    let zeta = match k_tilde {
        Some(kt) => zeta_mode(params.k, params.sigma, kt),
        None => zeta_1d(params.k, params.sigma),
    };
    coefficients_from(zeta, params.alpha(), params.delta, params.l)
}

/// Root-based spectral radius of the iteration matrix for each `N`.
pub fn spectral_radius_curve(params: &SchwarzParams, n_list: &[usize], k_tilde: Option<f64>) -> Result<Vec<RadiusPoint>> {
    let (a, b) = params_coefficients(params, k_tilde)?;
    let bound = r1d_bound(a, b);
    n_list
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::Domain(format!("need at least 2 subdomains, got {n}")));
            }
            let blocks = ToeplitzBlocks::new_degenerate(a, b, n - 1)?;
            let rho = if blocks.is_degenerate() { degenerate_radius(&blocks) } else { spectrum(&blocks)?.spectral_radius };
            Ok(RadiusPoint { n, rho, r1d_bound: bound })
        })
        .collect()
}

/// With `a = 0` the blocks decouple (eigenvalues `±b`); with `b = 0` the
/// matrix is nilpotent.
fn degenerate_radius(blocks: &ToeplitzBlocks) -> f64 {
    if blocks.b() == ZERO {
        0.0
    } else {
        blocks.b().norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NilpotencyReport {
    /// `‖T^{N−1}‖_F`
    pub norm: f64,
    /// `‖T^{N−1}‖_F / ‖T‖_F^{N−1}`
    pub relative: f64,
    /// Upper bound on `max |λ|` from the characteristic polynomial coefficients.
    pub eigenvalue_bound: f64,
}

/// Powers of the `σ = 0`, `α = ik` iteration matrix (`b = 0`, `a = e^{−ikL}`).
pub fn nilpotency_check(k: f64, delta: f64, l: f64, n: usize) -> Result<NilpotencyReport> {
    let params = SchwarzParams::new(k, 0.0, delta, l, crate::schwarz1d::AlphaMode::Impedance, n)?;
    let (a, b) = params_coefficients(&params, None)?;
    let t = build_iteration_matrix(a, b, n)?;
    let mut power = t.dense.clone();
    for _ in 1..(n - 1) {
        power = power.matmul(&t.dense);
    }
    let norm = power.frobenius_norm();
    let scale = t.dense.frobenius_norm().powi(n as i32 - 1);
    let coeffs = EvenCharPoly::from_blocks(&t.blocks).coefficients();
    let w_bound = coeffs.fujiwara_bound();
    Ok(NilpotencyReport {
        norm,
        relative: if scale > 0.0 { norm / scale } else { norm },
        eigenvalue_bound: w_bound.sqrt(),
    })
}
