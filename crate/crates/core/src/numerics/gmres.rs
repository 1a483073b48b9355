//! Full-memory right-preconditioned GMRES.
//!
//! Solves `A M⁻¹ y = b` by Arnoldi with modified Gram–Schmidt and Givens
//! rotations, then returns `x = M⁻¹ y`. The recorded residual history is the
//! Arnoldi estimate of `‖b − A x_j‖ / ‖b‖`, which for right preconditioning
//! is the true (unpreconditioned) relative residual up to round-off.

use num_complex::Complex64;

use super::operator::{dotc, norm2, LinearOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The Krylov space became invariant before the tolerance was met.
    Breakdown,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    pub relative_residual_history: Vec<f64>,
    pub status: SolveStatus,
    /// `‖b − A x‖ / ‖b‖` recomputed from the returned solution.
    pub true_relative_residual: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

pub fn gmres<A: LinearOperator, M: LinearOperator>(
    a: &A,
    m_inv: &M,
    rhs: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    let n = rhs.len();
    if a.dim() != n || m_inv.dim() != n {
        return Err(Error::Domain(format!(
            "operator dimensions ({}, {}) do not match rhs length {n}",
            a.dim(),
            m_inv.dim()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("gmres tolerance must be positive, got {tol}")));
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("rhs contains non-finite entries".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let beta = norm2(rhs);
    if beta == 0.0 {
        return Ok(SolveReport {
            solution: vec![zero; n],
            iterations: 0,
            relative_residual_history: vec![0.0],
            status: SolveStatus::Converged,
            true_relative_residual: 0.0,
        });
    }

    let mut basis: Vec<Vec<Complex64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    // Columns of the Hessenberg matrix, already rotated.
    let mut hess: Vec<Vec<Complex64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<Complex64> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut status = SolveStatus::MaxIterations;
    let mut z = vec![zero; n];
    let mut w = vec![zero; n];

    for j in 0..max_iter {
        m_inv.apply(&basis[j], &mut z);
        a.apply(&z, &mut w);
        let wnorm = norm2(&w);
        let mut h = vec![zero; j + 2];
        for (i, vi) in basis.iter().enumerate() {
            let hij = dotc(vi, &w);
            for (wk, vk) in w.iter_mut().zip(vi) {
                *wk -= hij * vk;
            }
            h[i] = hij;
        }
        let hnext = norm2(&w);
        h[j + 1] = Complex64::new(hnext, 0.0);

        for i in 0..j {
            let (c, s) = (cs[i], sn[i]);
            let t = c * h[i] + s * h[i + 1];
            h[i + 1] = -s.conj() * h[i] + c * h[i + 1];
            h[i] = t;
        }
        let (c, s, r) = givens(h[j], h[j + 1]);
        h[j] = r;
        h[j + 1] = zero;
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s.conj() * gj);
        hess.push(h);

        let rel = g[j + 1].norm() / beta;
        history.push(rel);
        if rel <= tol {
            status = SolveStatus::Converged;
            break;
        }
        if hnext <= 1e-14 * wnorm || r.norm() == 0.0 {
            status = SolveStatus::Breakdown;
            break;
        }
        basis.push(w.iter().map(|v| v / hnext).collect());
    }

    let k = hess.len();
    let mut y = vec![zero; k];
    for i in (0..k).rev() {
        let s: Complex64 = (i + 1..k).map(|l| hess[l][i] * y[l]).sum();
        y[i] = if hess[i][i].norm() > 0.0 { (g[i] - s) / hess[i][i] } else { zero };
    }
    let mut combo = vec![zero; n];
    for (yi, vi) in y.iter().zip(&basis) {
        for (ck, vk) in combo.iter_mut().zip(vi) {
            *ck += yi * vk;
        }
    }
    let mut solution = vec![zero; n];
    m_inv.apply(&combo, &mut solution);
    a.apply(&solution, &mut w);
    let true_rel = rhs.iter().zip(&w).map(|(b, ax)| (b - ax).norm_sqr()).sum::<f64>().sqrt() / beta;
    if status == SolveStatus::Breakdown && true_rel <= tol {
        status = SolveStatus::Converged;
    }

    Ok(SolveReport {
        solution,
        iterations: k,
        relative_residual_history: history,
        status,
        true_relative_residual: true_rel,
    })
}

/// Complex Givens rotation zeroing `b` in `(a, b)`; returns `(c, s, r)` with
/// `c` real and `[c s; -s̄ c] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0), a);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb, Complex64::new(nb, 0.0));
    }
    let norm = na.hypot(nb);
    let phase = a / na;
    let c = na / norm;
    let s = phase * b.conj() / norm;
    (c, s, phase * norm)
}
