//! Compressed sparse rows and banded LU with partial pivoting.

use num_complex::Complex64;

use super::operator::LinearOperator;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix in CSR form. Duplicate entries within a row are
/// summed when the row is pushed.
#[derive(Debug, Clone, Default)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Empty matrix to be filled with [`push_row`](Self::push_row), in order.
    pub fn with_dim(n: usize) -> Self {
        Self { n, row_ptr: vec![0], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn push_row(&mut self, entries: &[(usize, Complex64)]) {
        assert!(self.row_ptr.len() <= self.n, "more rows than the declared dimension");
        let mut row: Vec<(usize, Complex64)> = entries.to_vec();
        row.sort_by_key(|e| e.0);
        let start = self.cols.len();
        for (c, v) in row {
            assert!(c < self.n, "column {c} out of range");
            if self.cols.len() > start && *self.cols.last().unwrap() == c {
                *self.vals.last_mut().unwrap() += v;
            } else {
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_complete(&self) -> bool {
        self.row_ptr.len() == self.n + 1
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i).find(|e| e.0 == j).map_or(ZERO, |e| e.1)
    }

    /// `(lower, upper)` bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        self.apply(x, &mut y);
        y
    }

    pub fn banded_lu(&self) -> Result<BandedLu> {
        if !self.is_complete() {
            return Err(Error::Configuration(format!(
                "matrix has {} of {} rows",
                self.row_ptr.len() - 1,
                self.n
            )));
        }
        let (kl, ku) = self.bandwidths();
        let mut lu = BandedLu::zeros(self.n, kl, ku);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                *lu.at_mut(i, j) += v;
            }
        }
        lu.factor()?;
        Ok(lu)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }
}

/// LU factors of a banded matrix in the column layout used by LAPACK's
/// `gbtrf`: entry `(i, j)` lives at `ab[j * ldab + kl + ku + i − j]`, with
/// `kl` extra rows for the fill-in caused by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self { n, kl, ku, ab: vec![ZERO; ldab * n], ipiv: (0..n).collect() }
    }

    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        let idx = j * self.ldab() + self.kl + self.ku + i - j;
        &mut self.ab[idx]
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.ab[j * self.ldab() + self.kl + self.ku + i - j]
    }

    fn factor(&mut self) -> Result<()> {
        let n = self.n;
        let kv = self.kl + self.ku;
        let mut ju = 0;
        for j in 0..n {
            let km = self.kl.min(n - 1 - j);
            let mut p = 0;
            let mut best = self.at(j, j).norm();
            for r in 1..=km {
                let v = self.at(j + r, j).norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularConfiguration(format!("zero pivot in column {j}")));
            }
            self.ipiv[j] = j + p;
            ju = ju.max((j + self.ku + p).min(n - 1));
            if p != 0 {
                for c in j..=ju {
                    let (a, b) = (self.at(j, c), self.at(j + p, c));
                    *self.at_mut(j, c) = b;
                    *self.at_mut(j + p, c) = a;
                }
            }
            let pivot = self.at(j, j);
            for i in j + 1..=j + km {
                *self.at_mut(i, j) /= pivot;
            }
            for c in j + 1..=ju {
                let ujc = self.at(j, c);
                if ujc == ZERO {
                    continue;
                }
                for i in j + 1..=j + km {
                    let lij = self.at(i, j);
                    *self.at_mut(i, c) -= lij * ujc;
                }
            }
            debug_assert!(ju <= j + kv);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in 0..n {
            b.swap(j, self.ipiv[j]);
            let bj = b[j];
            for i in j + 1..=(j + self.kl).min(n - 1) {
                b[i] -= self.at(i, j) * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.at(j, j);
            let bj = b[j];
            for i in j.saturating_sub(kv)..j {
                b[i] -= self.at(i, j) * bj;
            }
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DenseMatrixC;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tridiag(n: usize, lo: Complex64, d: Complex64, up: Complex64) -> CsrMatrix {
        let mut m = CsrMatrix::with_dim(n);
        for i in 0..n {
            let mut row = vec![(i, d)];
            if i > 0 {
                row.push((i - 1, lo));
            }
            if i + 1 < n {
                row.push((i + 1, up));
            }
            m.push_row(&row);
        }
        m
    }

    #[test]
    fn duplicates_are_summed() {
        let mut m = CsrMatrix::with_dim(2);
        m.push_row(&[(1, c(1.0, 0.0)), (0, c(2.0, 0.0)), (1, c(0.0, 3.0))]);
        m.push_row(&[(1, c(1.0, 0.0))]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), c(1.0, 3.0));
        assert_eq!(m.bandwidths(), (0, 1));
    }

    #[test]
    fn banded_solve_matches_dense() {
        // Small diagonal forces pivoting.
        let m = tridiag(9, c(1.0, 0.5), c(0.01, 0.0), c(-2.0, 1.0));
        let b: Vec<Complex64> = (0..9).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let x = m.banded_lu().unwrap().solve(&b);
        let mut data = vec![ZERO; 81];
        for i in 0..9 {
            for (j, v) in m.row(i) {
                data[i * 9 + j] = v;
            }
        }
        let dense = DenseMatrixC::from_row_major(9, 9, data).unwrap();
        let xd = dense.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&xd) {
            assert!((u - v).norm() < 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn wide_band_with_pivoting() {
        let n = 30;
        let mut m = CsrMatrix::with_dim(n);
        for i in 0..n {
            let mut row = vec![(i, c(0.1 * (i % 3) as f64, 0.0))];
            for off in 1..=4usize {
                if i >= off {
                    row.push((i - off, c(1.0 / off as f64, 0.3)));
                }
                if i + off < n {
                    row.push((i + off, c(-0.5, 1.0 / off as f64)));
                }
            }
            m.push_row(&row);
        }
        let b: Vec<Complex64> = (0..n).map(|i| c((i as f64).sin(), 1.0)).collect();
        let x = m.banded_lu().unwrap().solve(&b);
        let r: f64 = m.matvec(&x).iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn singular_is_reported() {
        let mut m = CsrMatrix::with_dim(2);
        m.push_row(&[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        m.push_row(&[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        assert!(matches!(m.banded_lu(), Err(Error::SingularConfiguration(_))));
    }
}
