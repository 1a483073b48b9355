//! Row-major dense complex matrices with partial-pivot LU.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrixC {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrixC {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Domain(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matmul(&self, rhs: &DenseMatrixC) -> DenseMatrixC {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = DenseMatrixC::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// `z I - A`.
    pub fn shifted_negation(&self, z: Complex64) -> DenseMatrixC {
        assert!(self.is_square());
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = -*v;
        }
        for i in 0..self.rows {
            out[(i, i)] += z;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &DenseMatrixC) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<LuFactors> {
        if !self.is_square() {
            return Err(Error::Domain(format!("LU needs a square matrix, got {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }
        Ok(LuFactors { n, lu, perm, sign, singular })
    }

    /// Determinant via partial-pivot LU.
    pub fn det(&self) -> Result<Complex64> {
        Ok(self.lu()?.det())
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.lu()?.solve(b)
    }
}

impl Index<(usize, usize)> for DenseMatrixC {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrixC {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed `P A = L U` factors (unit lower triangle stored below the diagonal).
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl LuFactors {
    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        (0..self.n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[i * self.n + i])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Domain(format!("rhs length {} does not match dimension {n}", b.len())));
        }
        if self.singular {
            return Err(Error::SingularConfiguration("matrix is singular".into()));
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: Complex64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }
}

/// Determinant of a square matrix.
pub fn lu_det(a: &DenseMatrixC) -> Result<Complex64> {
    a.det()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_det() {
        assert_eq!(lu_det(&DenseMatrixC::identity(4)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn diagonal_det() {
        let d = DenseMatrixC::from_diagonal(&[c(0.0, 2.0), c(3.0, 0.0)]);
        assert!((lu_det(&d).unwrap() - c(0.0, 6.0)).norm() < 1e-15);
    }

    #[test]
    fn single_block_characteristic_determinant() {
        // [[-z, b], [b, -z]] at z = 1, b = 2
        let m = DenseMatrixC::from_row_major(2, 2, vec![c(-1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((lu_det(&m).unwrap() - c(-3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_det_is_zero() {
        let m = DenseMatrixC::from_row_major(2, 2, vec![c(1.0, 1.0), c(2.0, 2.0), c(1.0, 1.0), c(2.0, 2.0)]).unwrap();
        assert!(lu_det(&m).unwrap().norm() < 1e-14);
    }

    #[test]
    fn pivoting_swaps_sign() {
        let m = DenseMatrixC::from_row_major(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(lu_det(&m).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn solve_roundtrip() {
        let m = DenseMatrixC::from_row_major(
            3,
            3,
            vec![c(2.0, 1.0), c(0.5, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(3.0, 0.0), c(0.2, 0.2), c(0.0, 0.0), c(1.0, 1.0), c(4.0, 0.0)],
        )
        .unwrap();
        let x = vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.3, 0.3)];
        let b = m.matvec(&x);
        let got = m.solve(&b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-13);
        }
    }

    #[test]
    fn non_square_rejected() {
        assert!(DenseMatrixC::zeros(2, 3).lu().is_err());
        assert!(DenseMatrixC::from_row_major(2, 2, vec![c(1.0, 0.0)]).is_err());
    }
}
