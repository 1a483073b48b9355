//! Dense complex polynomials and a simultaneous (Aberth–Ehrlich) root finder.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial with complex coefficients, lowest degree first.
///
/// Trailing exact zeros are trimmed on construction so the leading
/// coefficient is nonzero unless the polynomial is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialC {
    coeffs: Vec<Complex64>,
}

impl PolynomialC {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c · z^power`.
    pub fn monomial(c: Complex64, power: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    /// Monic polynomial with the given roots (repeated roots allowed).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        self.scale(self.leading().inv())
    }

    /// Substitute `z ↦ z²`.
    pub fn compose_square(&self) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * self.degree() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c;
        }
        Self::new(coeffs)
    }

    /// Fujiwara bound on the modulus of every root.
    pub fn fujiwara_bound(&self) -> f64 {
        let n = self.degree();
        if n == 0 {
            return 0.0;
        }
        let lead = self.leading().norm();
        let mut bound: f64 = 0.0;
        for j in 1..=n {
            let c = self.coeffs[n - j].norm() / lead;
            let c = if j == n { c / 2.0 } else { c };
            bound = bound.max(c.powf(1.0 / j as f64));
        }
        2.0 * bound
    }
}

impl Add for &PolynomialC {
    type Output = PolynomialC;
    fn add(self, rhs: &PolynomialC) -> PolynomialC {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        PolynomialC::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero) + rhs.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Sub for &PolynomialC {
    type Output = PolynomialC;
    fn sub(self, rhs: &PolynomialC) -> PolynomialC {
        self + &(-rhs)
    }
}

impl Neg for &PolynomialC {
    type Output = PolynomialC;
    fn neg(self) -> PolynomialC {
        PolynomialC::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &PolynomialC {
    type Output = PolynomialC;
    fn mul(self, rhs: &PolynomialC) -> PolynomialC {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PolynomialC::new(coeffs)
    }
}

/// Value, derivative and a rounding-error scale of a polynomial at a point.
#[derive(Debug, Clone, Copy)]
pub struct PolyEval {
    pub value: Complex64,
    pub derivative: Complex64,
    /// Magnitude against which `|value|` is judged, e.g. `Σ |c_i| |z|^i`.
    pub scale: f64,
}

/// Anything the simultaneous root finder can iterate on.
///
/// Implementations are free to evaluate by other means than the monomial
/// coefficients (e.g. a recurrence), which matters for high degree.
pub trait RootTarget {
    fn degree(&self) -> usize;
    fn evaluate(&self, z: Complex64) -> PolyEval;
    /// Radius of the circle holding the initial guesses.
    fn initial_radius(&self) -> f64;
    /// Problem-specific starting points, one per root. The circle is used
    /// when this returns `None`.
    fn initial_guesses(&self) -> Option<Vec<Complex64>> {
        None
    }
}

impl RootTarget for PolynomialC {
    fn degree(&self) -> usize {
        PolynomialC::degree(self)
    }

    fn evaluate(&self, z: Complex64) -> PolyEval {
        let zero = Complex64::new(0.0, 0.0);
        let r = z.norm();
        let (mut p, mut dp, mut s) = (zero, zero, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            s = s * r + c.norm();
        }
        PolyEval { value: p, derivative: dp, scale: s }
    }

    fn initial_radius(&self) -> f64 {
        self.fujiwara_bound()
    }
}

/// Tunables of [`poly_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Bound on `|p(r)| / scale(r)` for every returned root.
    pub tol: f64,
    pub max_iter: usize,
    /// Angular offset of the initial guesses, in radians.
    pub seed_angle: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 1000, seed_angle: 0.4 }
    }
}

/// Roots of `p` (with multiplicity) by Aberth–Ehrlich iteration.
pub fn poly_roots(p: &PolynomialC, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    aberth(p, &RootOptions { tol, max_iter, ..RootOptions::default() })
}

/// Aberth–Ehrlich iteration on any [`RootTarget`].
///
/// Initial guesses sit on a circle whose radius comes from the target
/// (Fujiwara's bound for coefficient polynomials), rotated by
/// `opts.seed_angle` plus an irrational per-index offset so no guess lies on
/// a symmetry axis. Updates are applied in place (Gauss–Seidel order), so
/// the result is deterministic.
pub fn aberth<T: RootTarget + ?Sized>(target: &T, opts: &RootOptions) -> Result<Vec<Complex64>> {
    let n = target.degree();
    if n == 0 {
        return Err(Error::Domain("polynomial of degree 0 has no roots".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("root tolerance must be positive, got {}", opts.tol)));
    }
    let radius = target.initial_radius().max(f64::MIN_POSITIVE.sqrt());
    let mut roots: Vec<Complex64> = match target.initial_guesses() {
        Some(g) if g.len() == n && g.iter().all(|z| z.is_finite()) => g,
        _ => (0..n)
            .map(|k| {
                let theta = opts.seed_angle + 2.0 * PI * k as f64 / n as f64 + 0.25 / n as f64;
                Complex64::from_polar(radius, theta)
            })
            .collect(),
    };
    let mut done = vec![false; n];
    let mut worst = f64::INFINITY;
    let mut reseeds = 0usize;
    for _iter in 0..opts.max_iter {
        worst = 0.0;
        for i in 0..n {
            let e = target.evaluate(roots[i]);
            let resid = scaled_residual(&e);
            if resid <= opts.tol {
                done[i] = true;
                worst = worst.max(resid);
                continue;
            }
            done[i] = false;
            worst = worst.max(resid);
            let newton = e.value / e.derivative;
            if !newton.is_finite() {
                // Stationary point of p; nudge off it.
                roots[i] += Complex64::from_polar(radius * 1e-3, opts.seed_angle + i as f64);
                continue;
            }
            let zi = roots[i];
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| {
                    let d = zi - zj;
                    if d.norm() > 0.0 {
                        d.inv()
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 0.0 && (newton / denom).is_finite() {
                newton / denom
            } else {
                newton
            };
            roots[i] = zi - step;
            if roots[i].norm() > ESCAPE_FACTOR * radius {
                // Escaped approximations rarely find their way back once
                // the others have settled; restart them on the initial circle.
                reseeds += 1;
                let theta = opts.seed_angle + GOLDEN_ANGLE * reseeds as f64;
                roots[i] = Complex64::from_polar(radius, theta);
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(roots);
        }
    }
    // Final sweep: the last update may already satisfy the tolerance.
    let worst_final = roots
        .iter()
        .map(|&r| scaled_residual(&target.evaluate(r)))
        .fold(0.0, f64::max);
    if worst_final <= opts.tol {
        return Ok(roots);
    }
    Err(Error::RootsNotConverged { iterations: opts.max_iter, worst_residual: worst_final.min(worst) })
}

const ESCAPE_FACTOR: f64 = 4.0;
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

fn scaled_residual(e: &PolyEval) -> f64 {
    if !e.value.is_finite() || e.scale.is_nan() {
        return f64::INFINITY;
    }
    if e.scale > 0.0 {
        e.value.norm() / e.scale
    } else {
        e.value.norm()
    }
}
