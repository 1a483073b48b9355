//! Block tridiagonal Toeplitz matrices with 2×2 blocks
//!
//! ```text
//!        | A0  A1           |          A0 = [0 b]   A1 = [a 0]   A-1 = [0 0]
//!    T = | A-1 A0  A1       |               [b 0]        [0 0]         [0 a]
//!        |     ... ... ...  |
//!        |         A-1  A0  |
//! ```
//!
//! The characteristic polynomials `p_m(z) = det(zI − T)` of the `2m × 2m`
//! members obey
//!
//! ```text
//!    p_m = (z² − b² + a²) p_{m−1} − a² z² p_{m−2},   p_0 = 1,  p_1 = z² − b²,
//! ```
//!
//! with generating function `N(t,z) / D(t,z)`, `N = 1 − a² t`,
//! `D = 1 − (z² − b² + a²) t + a² z² t²`. As `m → ∞` the eigenvalues gather
//! on the curve `λ±(θ) = a cos θ ± sqrt(b² − a² sin² θ)`, apart from at most
//! two simple eigenvalues `±sqrt(b²/2 − a²)` that can only survive when
//! `|a²| > |b²/2 − a²|`.
//!
//! Every `p_m` is even in `z`, so roots are computed for `P_m(w) = p_m(√w)`
//! and evaluated by the recurrence itself rather than from monomial
//! coefficients, which keeps high block counts well conditioned.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{aberth, lu_det, DenseMatrixC, PolyEval, PolynomialC, RootOptions, RootTarget};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The pair `(a, b)` and block count `m` of a `2m × 2m` block Toeplitz matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzBlocks {
    a: Complex64,
    b: Complex64,
    m: usize,
    degenerate: bool,
}

impl ToeplitzBlocks {
    /// Requires nonzero, finite `a` and `b` and `m ≥ 1`.
    pub fn new(a: Complex64, b: Complex64, m: usize) -> Result<Self> {
        Self::check_common(a, b, m)?;
        if a == ZERO || b == ZERO {
            return Err(Error::Domain(format!("coefficients must be nonzero (a = {a}, b = {b})")));
        }
        Ok(Self { a, b, m, degenerate: false })
    }

    /// Like [`ToeplitzBlocks::new`] but admits `a = 0` or `b = 0`.
    ///
    /// Only [`assemble_dense`] and [`limiting_spectrum`] accept such blocks;
    /// theorem-level operations reject them.
    pub fn new_degenerate(a: Complex64, b: Complex64, m: usize) -> Result<Self> {
        Self::check_common(a, b, m)?;
        Ok(Self { a, b, m, degenerate: a == ZERO || b == ZERO })
    }

    fn check_common(a: Complex64, b: Complex64, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::Domain("block count m must be at least 1".into()));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn with_m(&self, m: usize) -> Result<Self> {
        if self.degenerate {
            Self::new_degenerate(self.a, self.b, m)
        } else {
            Self::new(self.a, self.b, m)
        }
    }

    fn require_regular(&self, op: &str) -> Result<()> {
        if self.degenerate {
            return Err(Error::Domain(format!("{op} requires nonzero a and b")));
        }
        Ok(())
    }
}

/// Dense `2m × 2m` matrix with `A0` on the block diagonal, `A1` above and
/// `A−1` below.
pub fn assemble_dense(blocks: &ToeplitzBlocks) -> DenseMatrixC {
    let (a, b, m) = (blocks.a, blocks.b, blocks.m);
    let mut t = DenseMatrixC::zeros(2 * m, 2 * m);
    for j in 0..m {
        let r = 2 * j;
        t[(r, r + 1)] = b;
        t[(r + 1, r)] = b;
        if j + 1 < m {
            // A1 in block (j, j+1), A−1 in block (j+1, j)
            t[(r, r + 2)] = a;
            t[(r + 3, r + 1)] = a;
        }
    }
    t
}

/// The characteristic polynomials `p_0 … p_m`, built from the recurrence only.
#[derive(Debug, Clone)]
pub struct CharPolySequence {
    pub blocks: ToeplitzBlocks,
    pub polys: Vec<PolynomialC>,
    /// `A(z) = a² z²`
    pub a_of_z: PolynomialC,
    /// `B(z) = −z² + b² − a²`
    pub b_of_z: PolynomialC,
}

impl CharPolySequence {
    pub fn p(&self, m: usize) -> &PolynomialC {
        &self.polys[m]
    }

    pub fn last(&self) -> &PolynomialC {
        &self.polys[self.blocks.m]
    }

    /// `p_m(z)` by running the scalar recurrence.
    pub fn eval_recurrence(&self, z: Complex64) -> Complex64 {
        EvenCharPoly::from_blocks(&self.blocks).evaluate(z * z).value
    }
}

pub fn charpoly(blocks: &ToeplitzBlocks) -> CharPolySequence {
    let (a2, b2) = (blocks.a * blocks.a, blocks.b * blocks.b);
    let a_of_z = PolynomialC::monomial(a2, 2);
    let b_of_z = PolynomialC::new(vec![b2 - a2, ZERO, -ONE]);
    let mut polys = vec![PolynomialC::constant(ONE), PolynomialC::new(vec![-b2, ZERO, ONE])];
    for _ in 2..=blocks.m {
        let n = polys.len();
        // p_m = −B p_{m−1} − A p_{m−2}
        let next = &(&(-&b_of_z) * &polys[n - 1]) - &(&a_of_z * &polys[n - 2]);
        polys.push(next);
    }
    polys.truncate(blocks.m + 1);
    CharPolySequence { blocks: *blocks, polys, a_of_z, b_of_z }
}

/// `P_m(w) = p_m(√w)` evaluated by the three-term recurrence.
#[derive(Debug, Clone, Copy)]
pub struct EvenCharPoly {
    a2: Complex64,
    b2: Complex64,
    m: usize,
}

impl EvenCharPoly {
    pub fn from_blocks(blocks: &ToeplitzBlocks) -> Self {
        Self { a2: blocks.a * blocks.a, b2: blocks.b * blocks.b, m: blocks.m }
    }

    /// Monomial coefficients of `P_m` in `w`.
    pub fn coefficients(&self) -> PolynomialC {
        let shift = PolynomialC::new(vec![self.a2 - self.b2, ONE]);
        let aw = PolynomialC::monomial(self.a2, 1);
        let mut prev = PolynomialC::constant(ONE);
        let mut cur = PolynomialC::new(vec![-self.b2, ONE]);
        if self.m == 0 {
            return prev;
        }
        for _ in 2..=self.m {
            let next = &(&shift * &cur) - &(&aw * &prev);
            prev = cur;
            cur = next;
        }
        cur
    }
}

impl RootTarget for EvenCharPoly {
    fn degree(&self) -> usize {
        self.m
    }

    fn evaluate(&self, w: Complex64) -> PolyEval {
        let (a2, b2) = (self.a2, self.b2);
        let (na2, nb2, nw) = (a2.norm(), b2.norm(), w.norm());
        let (mut p0, mut p1) = (ONE, w - b2);
        let (mut d0, mut d1) = (ZERO, ONE);
        let (mut s0, mut s1) = (1.0, nw + nb2);
        if self.m == 0 {
            return PolyEval { value: p0, derivative: d0, scale: s0 };
        }
        let shift = w - b2 + a2;
        for _ in 2..=self.m {
            let p2 = shift * p1 - a2 * w * p0;
            let d2 = p1 + shift * d1 - a2 * p0 - a2 * w * d0;
            let s2 = (nw + nb2 + na2) * s1 + na2 * nw * s0;
            (p0, p1, d0, d1, s0, s1) = (p1, p2, d1, d2, s1, s2);
        }
        PolyEval { value: p1, derivative: d1, scale: s1 }
    }

    fn initial_radius(&self) -> f64 {
        // |λ| ≤ ‖T‖ ≤ |a| + |b|, so |w| ≤ (|a| + |b|)²; Fujiwara is used when
        // it is tighter.
        let norm_bound = (self.a2.norm().sqrt() + self.b2.norm().sqrt()).powi(2);
        let coeff = self.coefficients();
        let fuji = coeff.fujiwara_bound();
        if fuji.is_finite() {
            fuji.min(2.0 * norm_bound)
        } else {
            norm_bound
        }
    }
}

/// `|Σ_{m ≤ terms} p_m(z) t^m − N(t,z)/D(t,z)|`.
///
/// The truncation is only meaningful inside the disc of convergence, so
/// `|t|` must be below half the smallest modulus of the roots of `D(·, z)`.
pub fn generating_check(blocks: &ToeplitzBlocks, t: Complex64, z: Complex64, terms: usize) -> Result<f64> {
    blocks.require_regular("generating_check")?;
    let (a2, b2) = (blocks.a * blocks.a, blocks.b * blocks.b);
    let big_a = a2 * z * z;
    let big_b = -z * z + b2 - a2;
    let d = ONE + big_b * t + big_a * t * t;
    let n = ONE - a2 * t;
    if d.norm() == 0.0 {
        return Err(Error::Domain(format!("D(t, z) vanishes at t = {t}, z = {z}")));
    }
    // Reciprocal roots u of D: u² + B u + A = 0.
    let disc = (big_b * big_b - 4.0 * big_a).sqrt();
    let u_max = ((-big_b + disc) / 2.0).norm().max(((-big_b - disc) / 2.0).norm());
    if t.norm() * u_max >= 0.5 {
        return Err(Error::Domain(format!(
            "|t| = {} too large for series convergence (need |t| < {})",
            t.norm(),
            0.5 / u_max
        )));
    }
    let shift = z * z - b2 + a2;
    let (mut p0, mut p1) = (ONE, z * z - b2);
    let mut sum = p0;
    let mut tp = ONE;
    for k in 1..=terms {
        tp *= t;
        if k >= 2 {
            let p2 = shift * p1 - big_a * p0;
            p0 = p1;
            p1 = p2;
        }
        sum += p1 * tp;
    }
    Ok((sum - n / d).norm())
}

/// Coefficients and roots of `f(q) = q^{2m+2} − c q^{2m+1} + 2(c−1) q^{m+1} − c q + 1`.
#[derive(Debug, Clone)]
pub struct QPolyDiagnostics {
    pub c: Complex64,
    pub f: PolynomialC,
    pub roots: Vec<Complex64>,
    /// Max over roots of the distance from `1/q` to the root set.
    pub reciprocal_pairing_error: f64,
}

impl QPolyDiagnostics {
    /// Smallest-modulus root.
    pub fn smallest_root(&self) -> Complex64 {
        self.roots
            .iter()
            .copied()
            .min_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("degree ≥ 4")
    }
}

pub fn q_polynomial(c: Complex64, m: usize) -> PolynomialC {
    let mut coeffs = vec![ZERO; 2 * m + 3];
    coeffs[0] = ONE;
    coeffs[1] -= c;
    coeffs[m + 1] += 2.0 * (c - ONE);
    coeffs[2 * m + 1] -= c;
    coeffs[2 * m + 2] = ONE;
    PolynomialC::new(coeffs)
}

pub fn q_poly_from_c(c: Complex64, m: usize, opts: &RootOptions) -> Result<QPolyDiagnostics> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let f = q_polynomial(c, m);
    // f(1) = f'(1) = 0 for every c; the double root is split off exactly so
    // that the remaining roots are resolved to full accuracy.
    let quotient = deflate_unit_root(&deflate_unit_root(&f));
    let mut roots = aberth(&quotient, opts)?;
    roots.extend([ONE, ONE]);
    let reciprocal_pairing_error = roots
        .iter()
        .map(|r| {
            let inv = r.inv();
            roots.iter().map(|s| (inv - s).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(QPolyDiagnostics { c, f, roots, reciprocal_pairing_error })
}

/// Quotient of `p` by `(q − 1)`, dropping the remainder.
fn deflate_unit_root(p: &PolynomialC) -> PolynomialC {
    let c = p.coeffs();
    let n = c.len() - 1;
    let mut out = vec![ZERO; n];
    let mut acc = ZERO;
    for k in (1..=n).rev() {
        acc = c[k] + acc;
        out[k - 1] = acc;
    }
    PolynomialC::new(out)
}

/// `f_m(q)` with `c_m = a² / z²`.
pub fn q_poly(blocks: &ToeplitzBlocks, z: Complex64) -> Result<QPolyDiagnostics> {
    blocks.require_regular("q_poly")?;
    if z == ZERO {
        return Err(Error::Domain("q polynomial needs z ≠ 0".into()));
    }
    let c = blocks.a * blocks.a / (z * z);
    q_poly_from_c(c, blocks.m, &RootOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub theta: f64,
    pub plus: Complex64,
    pub minus: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierCandidate {
    pub value: Complex64,
    pub admissible: bool,
}

#[derive(Debug, Clone)]
pub struct LimitSpectrum {
    pub a: Complex64,
    pub b: Complex64,
    pub curve_samples: Vec<CurveSample>,
    /// `±sqrt(b²/2 − a²)`, flagged by whether they can belong to the limit.
    pub outliers: [OutlierCandidate; 2],
    pub sup_modulus: f64,
}

impl LimitSpectrum {
    pub fn admissible_outliers(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.outliers.iter().filter(|o| o.admissible).map(|o| o.value)
    }

    /// All sampled curve points (both branches).
    pub fn curve_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.curve_samples.iter().flat_map(|s| [s.plus, s.minus])
    }

    /// Distance from `z` to the sampled curve together with admissible outliers.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.curve_points()
            .chain(self.admissible_outliers())
            .map(|p| (z - p).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Whether the outlier candidates `±sqrt(b²/2 − a²)` can occur.
pub fn outliers_admissible(a: Complex64, b: Complex64) -> bool {
    let a2 = a * a;
    a2.norm() > (b * b / 2.0 - a2).norm()
}

/// Sample the limiting curve on a uniform grid over `[−π, π]`.
///
/// Pass `allow_degenerate = true` to accept `a = 0` or `b = 0`.
pub fn limiting_spectrum(a: Complex64, b: Complex64, samples: usize, allow_degenerate: bool) -> Result<LimitSpectrum> {
    if samples < 2 {
        return Err(Error::Domain("limiting_spectrum needs at least 2 samples".into()));
    }
    if !allow_degenerate && (a == ZERO || b == ZERO) {
        return Err(Error::Domain("limiting_spectrum with a = 0 or b = 0 requires the degenerate flag".into()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("coefficients must be finite".into()));
    }
    let (a2, b2) = (a * a, b * b);
    let curve_samples: Vec<CurveSample> = (0..samples)
        .map(|j| {
            let theta = -PI + 2.0 * PI * j as f64 / (samples - 1) as f64;
            let (s, c) = theta.sin_cos();
            let root = (b2 - a2 * s * s).sqrt();
            CurveSample { theta, plus: a * c + root, minus: a * c - root }
        })
        .collect();
    let outlier = (b2 / 2.0 - a2).sqrt();
    let admissible = outliers_admissible(a, b);
    let outliers = [
        OutlierCandidate { value: outlier, admissible },
        OutlierCandidate { value: -outlier, admissible },
    ];
    let mut sup_modulus = curve_samples
        .iter()
        .map(|s| s.plus.norm().max(s.minus.norm()))
        .fold(0.0, f64::max);
    if admissible {
        sup_modulus = sup_modulus.max(outlier.norm());
    }
    Ok(LimitSpectrum { a, b, curve_samples, outliers, sup_modulus })
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    pub roots: RootOptions,
    pub curve_samples: usize,
    /// Largest `m` for which the recurrence is cross-checked against LU determinants.
    pub det_check_max_m: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { roots: RootOptions::default(), curve_samples: 4096, det_check_max_m: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub blocks: ToeplitzBlocks,
    pub eigenvalues: Vec<Complex64>,
    pub limit: LimitSpectrum,
    /// Distance of each eigenvalue to the curve ∪ admissible outliers.
    pub distances: Vec<f64>,
    pub spectral_radius: f64,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// Relative mismatch between the recurrence and `det(zI − T)` at sample
    /// points, when `m` is small enough to check.
    pub determinant_check: Option<f64>,
    /// For each outlier candidate, the closest computed eigenvalue and its distance.
    pub nearest_to_outliers: [(Complex64, f64); 2],
}

pub fn spectrum(blocks: &ToeplitzBlocks) -> Result<SpectrumReport> {
    spectrum_with(blocks, &SpectrumOptions::default())
}

pub fn spectrum_with(blocks: &ToeplitzBlocks, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    blocks.require_regular("spectrum")?;
    let w_roots = eigen_w(blocks, &opts.roots)?;
    let eigenvalues: Vec<Complex64> = w_roots
        .iter()
        .flat_map(|w| {
            let z = w.sqrt();
            [z, -z]
        })
        .collect();

    let determinant_check = (blocks.m <= opts.det_check_max_m)
        .then(|| determinant_mismatch(blocks))
        .transpose()?;

    let limit = limiting_spectrum(blocks.a, blocks.b, opts.curve_samples, false)?;
    let distances: Vec<f64> = eigenvalues.iter().map(|&z| limit.distance(z)).collect();
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let mean_distance = distances.iter().sum::<f64>() / distances.len() as f64;
    let nearest = |target: Complex64| {
        eigenvalues
            .iter()
            .map(|&z| (z, (z - target).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("at least two eigenvalues")
    };
    let nearest_to_outliers = [nearest(limit.outliers[0].value), nearest(limit.outliers[1].value)];
    Ok(SpectrumReport {
        blocks: *blocks,
        eigenvalues,
        limit,
        distances,
        spectral_radius,
        max_distance,
        mean_distance,
        determinant_check,
        nearest_to_outliers,
    })
}

/// `U_m(x) − t` by the Chebyshev recurrence `U_{j+1} = 2x U_j − U_{j−1}`.
///
/// The residual scale `Σ_j |U_j(x)| |U_{m−j}(x)| + |t|` bounds how rounding
/// errors made at step `j` of the recurrence propagate into `U_m`.
#[derive(Debug, Clone, Copy)]
pub struct ChebyshevShift {
    pub m: usize,
    pub t: Complex64,
}

impl ChebyshevShift {
    /// `(U_0(x), …, U_m(x))`
    pub fn sequence(m: usize, x: Complex64) -> Vec<Complex64> {
        let mut u = Vec::with_capacity(m + 1);
        u.push(ONE);
        if m >= 1 {
            u.push(2.0 * x);
        }
        for j in 2..=m {
            let next = 2.0 * x * u[j - 1] - u[j - 2];
            u.push(next);
        }
        u
    }
}

impl RootTarget for ChebyshevShift {
    fn degree(&self) -> usize {
        self.m
    }

    fn evaluate(&self, x: Complex64) -> PolyEval {
        let u = Self::sequence(self.m, x);
        // U'_{j+1} = 2 U_j + 2x U'_j − U'_{j−1}
        let (mut d0, mut d1) = (ZERO, if self.m >= 1 { Complex64::new(2.0, 0.0) } else { ZERO });
        for j in 1..self.m {
            let d2 = 2.0 * u[j] + 2.0 * x * d1 - d0;
            d0 = d1;
            d1 = d2;
        }
        let derivative = if self.m == 0 { ZERO } else { d1 };
        let spread: f64 = (0..=self.m).map(|j| u[j].norm() * u[self.m - j].norm()).sum();
        PolyEval { value: u[self.m] - self.t, derivative, scale: spread + self.t.norm() }
    }

    fn initial_radius(&self) -> f64 {
        // On the Bernstein ellipse of parameter ρ,
        // |U_m| ≥ (ρ^{m+1} − ρ^{−m−1}) / (ρ + 1/ρ), so every root lies inside
        // the ellipse where ρ^{m+1} = |t|(ρ + 1/ρ) + 1. Its semi-major axis
        // bounds |x|.
        let p = 1.0 / (self.m as f64 + 1.0);
        let t = self.t.norm();
        let mut rho: f64 = 1.0;
        for _ in 0..500 {
            let next = (t * (rho + 1.0 / rho) + 1.0).powf(p);
            if (next - rho).abs() <= 1e-15 * rho {
                rho = next;
                break;
            }
            rho = next;
        }
        (rho + 1.0 / rho) / 2.0
    }

    fn initial_guesses(&self) -> Option<Vec<Complex64>> {
        // x = cos φ turns U_m(x) = t into sin((m+1)φ) = t sin φ; near the
        // k-th zero of U_m, φ = (kπ + asin((−1)^k t sin φ)) / (m+1).
        let n = self.m as f64 + 1.0;
        let guesses = (1..=self.m)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let mut phi = Complex64::new(k as f64 * PI / n, 0.0);
                for _ in 0..FIXED_POINT_SWEEPS {
                    let psi = (sign * self.t * phi.sin()).asin();
                    phi = (k as f64 * PI + psi) / n;
                }
                phi.cos()
            })
            .collect();
        Some(guesses)
    }
}

const FIXED_POINT_SWEEPS: usize = 30;

/// The `m` roots of `P_m(w)`.
///
/// With `r₁, r₂` the roots of `r² − (w − b² + a²) r + a² w` and
/// `r₁/r₂ = e^{iθ}`, `x = cos(θ/2)`, the condition `P_m(w) = 0` becomes
/// `U_m(x)² = a²/b²` and then `w = b² U_{m−1}(x)²`. Roots `x` and `−x` give
/// the same `w`, so the `2m` roots of `U_m = ±a/b` yield each eigenvalue
/// twice. Working in `x` sidesteps the extreme conditioning of `P_m` in `w`
/// for strongly non-normal `T`.
pub fn eigen_w(blocks: &ToeplitzBlocks, opts: &RootOptions) -> Result<Vec<Complex64>> {
    blocks.require_regular("eigen_w")?;
    let m = blocks.m;
    let t = blocks.a / blocks.b;
    let mut xs = aberth(&ChebyshevShift { m, t }, opts)?;
    xs.extend(aberth(&ChebyshevShift { m, t: -t }, opts)?);
    let b2 = blocks.b * blocks.b;
    let w_of = |x: Complex64| {
        let u = ChebyshevShift::sequence(m - 1, x);
        b2 * u[m - 1] * u[m - 1]
    };
    let mut used = vec![false; xs.len()];
    let mut out = Vec::with_capacity(m);
    for i in 0..xs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = (0..xs.len())
            .filter(|&j| !used[j])
            .min_by(|&p, &q| (xs[i] + xs[p]).norm().total_cmp(&(xs[i] + xs[q]).norm()));
        if let Some(j) = partner {
            used[j] = true;
        }
        out.push(w_of(xs[i]));
    }
    Ok(out)
}

/// Max relative difference between the recurrence and `det(zI − T)` over a
/// fixed set of points around the spectrum.
fn determinant_mismatch(blocks: &ToeplitzBlocks) -> Result<f64> {
    let t = assemble_dense(blocks);
    let target = EvenCharPoly::from_blocks(blocks);
    let radius = blocks.a.norm() + blocks.b.norm();
    let mut worst: f64 = 0.0;
    for j in 0..(2 * blocks.m + 1) {
        let z = Complex64::from_polar(radius * (0.3 + 0.9 * j as f64 / (2 * blocks.m + 1) as f64), 0.7 + 2.3 * j as f64);
        let e = target.evaluate(z * z);
        let det = lu_det(&t.shifted_negation(z))?;
        worst = worst.max((e.value - det).norm() / e.scale.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
