//! Parallel Schwarz for the 1D absorptive Helmholtz model problem.
//!
//! Subdomain `j` is `(a_j, b_j)` with `b_j − a_j = L + 2δ`, neighbours
//! overlapping by `2δ`, and Robin transmission `(∓∂ₓ + α)` on the interfaces.
//! The interface iteration matrix is block Toeplitz with
//!
//! ```text
//!   a =  [(ζ+α)² e^{2ζδ} − (ζ−α)² e^{−2ζδ}] / D
//!   b = −(ζ² − α²)(e^{ζL} − e^{−ζL}) / D
//!   D =  (ζ+α)² e^{ζ(2δ+L)} − (ζ−α)² e^{−ζ(2δ+L)},    ζ = sqrt(ikσ − k²).
//! ```
//!
//! Everything here is evaluated after dividing through by the largest
//! exponential so that strongly damped configurations do not overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which Robin parameter `α` is used on the interfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// `α = ik`
    Impedance,
    /// `α = ik + σ`
    ImpedanceShifted,
    General(Complex64),
}

impl AlphaMode {
    pub fn resolve(&self, k: f64, sigma: f64) -> Complex64 {
        match *self {
            AlphaMode::Impedance => Complex64::new(0.0, k),
            AlphaMode::ImpedanceShifted => Complex64::new(sigma, k),
            AlphaMode::General(alpha) => alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchwarzParams {
    pub k: f64,
    pub sigma: f64,
    /// Half-overlap.
    pub delta: f64,
    /// Subdomain pitch.
    pub l: f64,
    pub alpha_mode: AlphaMode,
    /// Number of subdomains.
    pub n: usize,
}

impl SchwarzParams {
    pub fn new(k: f64, sigma: f64, delta: f64, l: f64, alpha_mode: AlphaMode, n: usize) -> Result<Self> {
        let p = Self { k, sigma, delta, l, alpha_mode, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.k, self.sigma, self.delta, self.l].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("parameters must be finite".into()));
        }
        if !(self.k > 0.0) {
            return Err(Error::Domain(format!("wave number must be positive, got {}", self.k)));
        }
        if self.sigma < 0.0 {
            return Err(Error::Domain(format!("sigma must be non-negative, got {}", self.sigma)));
        }
        if !(self.delta > 0.0) || !(self.l > 0.0) {
            return Err(Error::Domain(format!(
                "overlap and pitch must be positive (delta = {}, L = {})",
                self.delta, self.l
            )));
        }
        if self.n < 2 {
            return Err(Error::Domain(format!("need at least 2 subdomains, got {}", self.n)));
        }
        if let AlphaMode::General(alpha) = self.alpha_mode {
            if !alpha.is_finite() {
                return Err(Error::Domain("alpha must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha_mode.resolve(self.k, self.sigma)
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..*self }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..*self }
    }
}

/// Principal `sqrt(ikσ − k²)`. At `σ = 0` this is exactly `ik`.
pub fn zeta_1d(k: f64, sigma: f64) -> Complex64 {
    if sigma == 0.0 {
        return Complex64::new(0.0, k.abs());
    }
    Complex64::new(-k * k, k * sigma).sqrt()
}

/// Principal `sqrt(ikσ + k̃² − k²)` for transverse wave number `k̃`.
pub fn zeta_mode(k: f64, sigma: f64, k_tilde: f64) -> Complex64 {
    let re = k_tilde * k_tilde - k * k;
    if sigma == 0.0 && re < 0.0 {
        return Complex64::new(0.0, (-re).sqrt());
    }
    Complex64::new(re, k * sigma).sqrt()
}

pub fn coefficients_1d(params: &SchwarzParams) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    coefficients_from(zeta_1d(params.k, params.sigma), params.alpha(), params.delta, params.l)
}

/// `(a, b)` for arbitrary `ζ` (with `Re ζ ≥ 0`) and `α`.
pub fn coefficients_from(zeta: Complex64, alpha: Complex64, delta: f64, l: f64) -> Result<(Complex64, Complex64)> {
    let plus = zeta + alpha;
    let minus = zeta - alpha;
    let (p2, m2) = (plus * plus, minus * minus);
    let den = p2 - m2 * (-2.0 * zeta * (2.0 * delta + l)).exp();
    let scale = p2.norm().max(m2.norm());
    if !den.is_finite() || den.norm() <= 1e-300 * scale || scale == 0.0 {
        return Err(Error::SingularConfiguration(format!(
            "local problem singular: zeta = {zeta}, alpha = {alpha}, delta = {delta}, L = {l}"
        )));
    }
    let a = (p2 * (-zeta * l).exp() - m2 * (-zeta * (4.0 * delta + l)).exp()) / den;
    let b = -(minus * plus) * ((-2.0 * zeta * delta).exp() - (-zeta * (2.0 * delta + 2.0 * l)).exp()) / den;
    Ok((a, b))
}

/// Change of variables `z = 2δζ`, `l = L/2δ`, `γ = 2δα`, `v = (z−γ)/(z+γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledVars {
    pub zeta: Complex64,
    pub z: Complex64,
    pub l: f64,
    pub gamma: Complex64,
    pub v: Complex64,
    /// `|v|`
    pub w: f64,
    /// `arg v`
    pub phi: f64,
    pub kappa: f64,
    pub s: f64,
    pub kappa_tilde: Option<f64>,
}

impl ScaledVars {
    pub fn x(&self) -> f64 {
        self.z.re
    }

    pub fn y(&self) -> f64 {
        self.z.im
    }

    /// `y² − κ² − x²`; zero for the 1D problem.
    pub fn identity_residual_1d(&self) -> f64 {
        self.y() * self.y() - self.kappa * self.kappa - self.x() * self.x()
    }

    /// `x² − y² − (κ̃² − κ²)`; zero when a transverse mode is present.
    pub fn identity_residual_2d(&self) -> Option<f64> {
        self.kappa_tilde.map(|kt| self.x() * self.x() - self.y() * self.y() - (kt * kt - self.kappa * self.kappa))
    }
}

pub fn scaled_vars(params: &SchwarzParams, k_tilde: Option<f64>) -> Result<ScaledVars> {
    params.validate()?;
    let zeta = match k_tilde {
        Some(kt) => {
            if !(kt >= 0.0) || !kt.is_finite() {
                return Err(Error::Domain(format!("transverse wave number must be non-negative, got {kt}")));
            }
            zeta_mode(params.k, params.sigma, kt)
        }
        None => zeta_1d(params.k, params.sigma),
    };
    scaled_vars_from(params, zeta, k_tilde)
}

fn scaled_vars_from(params: &SchwarzParams, zeta: Complex64, k_tilde: Option<f64>) -> Result<ScaledVars> {
    let two_delta = 2.0 * params.delta;
    let z = two_delta * zeta;
    let gamma = two_delta * params.alpha();
    if z + gamma == ZERO {
        return Err(Error::SingularConfiguration("v undefined: z = −γ".into()));
    }
    let v = (z - gamma) / (z + gamma);
    Ok(ScaledVars {
        zeta,
        z,
        l: params.l / two_delta,
        gamma,
        v,
        w: v.norm(),
        phi: v.arg(),
        kappa: two_delta * params.k,
        s: two_delta * params.sigma,
        kappa_tilde: k_tilde.map(|kt| two_delta * kt),
    })
}

/// `x = Re(2δζ(k̃)) = 2δ sqrt(½(sqrt((k² − k̃²)² + σ²k²) + k̃² − k²))`.
pub fn x_closed_form(k: f64, sigma: f64, delta: f64, k_tilde: f64) -> f64 {
    let d = k * k - k_tilde * k_tilde;
    2.0 * delta * (0.5 * ((d * d + sigma * sigma * k * k).sqrt() - d)).sqrt()
}

/// The criteria divided by their dominant exponential, so they stay finite:
/// `g± / e^{2x(l+1)}` and `g / e^{4x(l+1)}`. Signs agree with the raw values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedG {
    pub plus: f64,
    pub minus: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionValues {
    pub a: Complex64,
    pub b: Complex64,
    /// Overflows to `±∞` for very large `x(l+1)`; use `normalized` for
    /// magnitudes.
    pub g_plus: f64,
    pub g_minus: f64,
    pub g: f64,
    pub normalized: NormalizedG,
    /// `|F₊(z)| = |a − b|`
    pub f_plus_abs: f64,
    /// `|F₋(z)| = |a + b|`
    pub f_minus_abs: f64,
    /// `|G(z)| = |a|`
    pub g_abs: f64,
    pub r1d_bound: f64,
}

impl CriterionValues {
    pub fn all_positive(&self) -> bool {
        self.normalized.plus > 0.0 && self.normalized.minus > 0.0 && self.normalized.g > 0.0
    }
}

/// Bound on the limiting spectral radius from `(a, b)`.
///
/// `max{|a+b|, |a−b|}`, joined by `|a|` exactly when `|a² − b²/2|^{1/2} < |a|`.
pub fn r1d_bound(a: Complex64, b: Complex64) -> f64 {
    let base = (a + b).norm().max((a - b).norm());
    if (a * a - b * b / 2.0).norm().sqrt() < a.norm() {
        base.max(a.norm())
    } else {
        base
    }
}

/// `F±(z)` and `G(z)` evaluated from the scaled variables, in the form
/// divided through by `e^{(l+1)z}`.
pub fn f_and_g(sv: &ScaledVars) -> Result<(Complex64, Complex64, Complex64)> {
    let (z, g, l) = (sv.z, sv.gamma, sv.l);
    let (p2, m2) = ((z + g) * (z + g), (z - g) * (z - g));
    let den = p2 - m2 * (-2.0 * (l + 1.0) * z).exp();
    if !den.is_finite() || den == ZERO {
        return Err(Error::SingularConfiguration("vanishing denominator in F(z)".into()));
    }
    let big_g = (p2 * (-l * z).exp() - m2 * (-(l + 2.0) * z).exp()) / den;
    let second = (z * z - g * g) * ((-z).exp() - (-(2.0 * l + 1.0) * z).exp()) / den;
    Ok((big_g + second, big_g - second, big_g))
}

/// `g±`, `g` divided by their dominant exponentials (see [`NormalizedG`]).
pub fn normalized_g(sv: &ScaledVars) -> NormalizedG {
    let (x, y, l) = (sv.x(), sv.y(), sv.l);
    let (re, im) = (sv.v.re, sv.v.im);
    let w2 = sv.v.norm_sqr();
    let lead = -(-2.0 * l * x).exp_m1();
    let cross = 4.0 * (l * y).sin() * (im * y.cos() - re * y.sin()) * (-x * (l + 1.0)).exp();
    let first = lead * (1.0 - w2 * (-2.0 * x).exp());
    let ang = y * (l + 2.0);
    let bracket = (re * re - im * im) * ang.sin() - 2.0 * re * im * ang.cos();
    let g = lead * (1.0 - w2 * w2 * (-2.0 * x * (l + 2.0)).exp())
        + 4.0 * (l * y).sin() * bracket * (-2.0 * x * (l + 1.0)).exp();
    NormalizedG { plus: first + cross, minus: first - cross, g }
}

/// `|F±|²` through the decomposition `1 − (positive fraction)·g±`.
pub fn f_abs_sq_decomposed(sv: &ScaledVars) -> (f64, f64) {
    let (x, y, l, w, phi) = (sv.x(), sv.y(), sv.l, sv.w, sv.phi);
    let e = (-x * (l + 1.0)).exp();
    let ang = (l + 1.0) * y - phi;
    let den = (1.0 - w * w * e * e).powi(2) + 4.0 * w * w * ang.sin().powi(2) * e * e;
    let ng = normalized_g(sv);
    let frac = |sign: f64| ((1.0 - w * e).powi(2) + 2.0 * w * (1.0 - sign * ang.cos()) * e) / den;
    (1.0 - frac(1.0) * ng.plus, 1.0 - frac(-1.0) * ng.minus)
}

/// All convergence criteria for the 1D problem (`k_tilde = None`) or for a
/// transverse mode `k̃`. Requires `σ > 0`.
pub fn criteria(params: &SchwarzParams, k_tilde: Option<f64>) -> Result<CriterionValues> {
    if !(params.sigma > 0.0) {
        return Err(Error::Domain("convergence criteria require sigma > 0".into()));
    }
    let sv = scaled_vars(params, k_tilde)?;
    let (a, b) = coefficients_from(sv.zeta, params.alpha(), params.delta, params.l)?;
    let (f_plus, f_minus, big_g) = f_and_g(&sv)?;
    let normalized = normalized_g(&sv);
    let (x, l) = (sv.x(), sv.l);
    let e1 = (2.0 * x * (l + 1.0)).exp();
    let scale_up = |v: f64, e: f64| if v == 0.0 { 0.0 } else { v * e };
    Ok(CriterionValues {
        a,
        b,
        g_plus: scale_up(normalized.plus, e1),
        g_minus: scale_up(normalized.minus, e1),
        g: scale_up(normalized.g, e1 * e1),
        normalized,
        f_plus_abs: f_plus.norm(),
        f_minus_abs: f_minus.norm(),
        g_abs: big_g.norm(),
        r1d_bound: r1d_bound(a, b),
    })
}

/// `σ = σ₀k`, `L = L₀/k`, `δ = δ₀/k`, `α = ik`.
pub fn k_scaled_params(sigma0: f64, l0: f64, delta0: f64, k: f64, n: usize) -> Result<SchwarzParams> {
    if !(sigma0 > 0.0 && l0 > 0.0 && delta0 > 0.0 && k > 0.0) {
        return Err(Error::Domain("scaled parameters must all be positive".into()));
    }
    SchwarzParams::new(k, sigma0 * k, delta0 / k, l0 / k, AlphaMode::Impedance, n)
}
