//! Fourier-mode reduction of the 2D wave-guide problems.
//!
//! On a strip of width `L̂` with homogeneous Dirichlet (Helmholtz) or PEC
//! (TE Maxwell) conditions on top and bottom, each sine mode
//! `k̃ = mπ/L̂` evolves independently under the 1D iteration with
//! `ζ(k̃) = sqrt(ikσ + k̃² − k²)` and `α = ik` (Helmholtz) or `α = ik + σ`
//! (Maxwell). The 2D convergence factor is the supremum of the per-mode
//! 1D bounds.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schwarz1d::{
    coefficients_from, criteria, k_scaled_params, r1d_bound, scaled_vars, zeta_mode, AlphaMode, CriterionValues,
    SchwarzParams, ScaledVars,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    Helmholtz,
    Maxwell,
}

impl Equation {
    pub fn alpha_mode(&self) -> AlphaMode {
        match self {
            Equation::Helmholtz => AlphaMode::Impedance,
            Equation::Maxwell => AlphaMode::ImpedanceShifted,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Equation::Helmholtz => "helmholtz",
            Equation::Maxwell => "maxwell",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeContext {
    pub mode_index: usize,
    pub k_tilde: f64,
    pub l_hat: f64,
    pub equation: Equation,
    pub zeta: Complex64,
}

impl ModeContext {
    pub fn new(params: &SchwarzParams, mode_index: usize, l_hat: f64, equation: Equation) -> Result<Self> {
        if mode_index == 0 {
            return Err(Error::Domain("mode index starts at 1".into()));
        }
        if !(l_hat > 0.0) || !l_hat.is_finite() {
            return Err(Error::Domain(format!("strip width must be positive, got {l_hat}")));
        }
        let k_tilde = mode_index as f64 * PI / l_hat;
        Ok(Self { mode_index, k_tilde, l_hat, equation, zeta: zeta_mode(params.k, params.sigma, k_tilde) })
    }

    pub fn is_evanescent(&self, k: f64) -> bool {
        self.k_tilde > k
    }
}

/// The 1D parameters with `α` fixed by the equation family.
pub fn mode_params(params: &SchwarzParams, equation: Equation) -> SchwarzParams {
    SchwarzParams { alpha_mode: equation.alpha_mode(), ..*params }
}

pub fn mode_coefficients(params: &SchwarzParams, mode: &ModeContext) -> Result<(Complex64, Complex64)> {
    let p = mode_params(params, mode.equation);
    p.validate()?;
    coefficients_from(mode.zeta, p.alpha(), p.delta, p.l)
}

/// `g̃₊`, `g̃₋`, `g̃` with the positive rational/exponential prefactors removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTilde {
    pub plus: f64,
    pub minus: f64,
    pub g: f64,
    /// `g̃± e^{−x(l+1)}` and `g̃ e^{−2x(l+1)}`, finite for any mode.
    pub normalized: [f64; 3],
    /// `g± / g̃±`
    pub prefactor_pm: f64,
    /// `g / g̃`
    pub prefactor_g: f64,
}

impl GTilde {
    pub fn all_positive(&self) -> bool {
        self.normalized.iter().all(|&v| v > 0.0)
    }
}

/// Explicit hyperbolic/trigonometric forms of the criteria.
pub fn g_tilde(params: &SchwarzParams, mode: &ModeContext) -> Result<GTilde> {
    if !(params.sigma > 0.0) {
        return Err(Error::Domain("g-tilde criteria require sigma > 0".into()));
    }
    let p = mode_params(params, mode.equation);
    let sv = scaled_vars(&p, Some(mode.k_tilde))?;
    let s = match mode.equation {
        Equation::Helmholtz => 0.0,
        Equation::Maxwell => sv.s,
    };
    Ok(g_tilde_from(&sv, s))
}

fn g_tilde_from(sv: &ScaledVars, s: f64) -> GTilde {
    let (x, y, l, kappa) = (sv.x(), sv.y(), sv.l, sv.kappa);
    // sinh(t) e^{−t} and cosh(t) e^{−t}
    let sh = |t: f64| -(-2.0 * t).exp_m1() / 2.0;
    let ch = |t: f64| (1.0 + (-2.0 * t).exp()) / 2.0;
    let r2 = kappa * kappa + s * s + x * x + y * y;
    let q2 = kappa * kappa + s * s - x * x - y * y;
    let p = kappa * y + s * x;
    let t = kappa * x - s * y;

    let e1 = (-x * (l + 1.0)).exp();
    let hyper = (r2 * sh(x) + 2.0 * p * ch(x)) * sh(l * x);
    let trig = (q2 * y.sin() - 2.0 * t * y.cos()) * (l * y).sin() * e1;
    let (np, nm) = (hyper + trig, hyper - trig);

    let x2 = x * (l + 2.0);
    let y2 = y * (l + 2.0);
    let hyper_g = ((r2 * r2 + 4.0 * p * p) * sh(x2) + 4.0 * p * r2 * ch(x2)) * sh(l * x);
    let trig_g = ((q2 * q2 - 4.0 * t * t) * y2.sin() - 4.0 * t * q2 * y2.cos()) * (l * y).sin() * e1 * e1;
    let ng = hyper_g + trig_g;

    let den = (kappa + y).powi(2) + (s + x).powi(2);
    let grow = (x * (l + 1.0)).exp();
    let up = |v: f64, e: f64| if v == 0.0 { 0.0 } else { v * e };
    GTilde {
        plus: up(np, grow),
        minus: up(nm, grow),
        g: up(ng, grow * grow),
        normalized: [np, nm, ng],
        prefactor_pm: 4.0 * grow / den,
        prefactor_g: 4.0 * grow * grow / (den * den),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTruncationPolicy {
    /// Modes beyond `ceil(4kL̂/π)` that are always admitted.
    pub extra_modes: usize,
    /// Length of the evanescent, monotonically decaying tail that ends the sweep.
    pub tail_window: usize,
    /// Hard cap replacing the default when set.
    pub max_modes: Option<usize>,
}

impl Default for ModeTruncationPolicy {
    fn default() -> Self {
        Self { extra_modes: 64, tail_window: 16, max_modes: None }
    }
}

impl ModeTruncationPolicy {
    pub fn cap(&self, k: f64, l_hat: f64) -> usize {
        self.max_modes.unwrap_or_else(|| (4.0 * k * l_hat / PI).ceil() as usize + self.extra_modes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeEntry {
    pub mode: ModeContext,
    pub a: Complex64,
    pub b: Complex64,
    pub r1d_mode: f64,
    /// Absent when `σ = 0`.
    pub g_values: Option<CriterionValues>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSweepReport {
    pub per_mode: Vec<ModeEntry>,
    pub sup_factor: f64,
    pub argmax_mode: ModeContext,
    pub truncation: usize,
    pub rationale: String,
    /// Whether the sweep ended on a decaying evanescent tail.
    pub complete: bool,
}

pub fn sup_convergence_factor(
    params: &SchwarzParams,
    equation: Equation,
    l_hat: f64,
    policy: &ModeTruncationPolicy,
) -> Result<ModeSweepReport> {
    params.validate()?;
    let p = mode_params(params, equation);
    let cap = policy.cap(p.k, l_hat).max(1);
    let mut per_mode: Vec<ModeEntry> = Vec::new();
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    let mut complete = false;
    for m in 1..=cap {
        let mode = ModeContext::new(&p, m, l_hat, equation)?;
        let (a, b) = coefficients_from(mode.zeta, p.alpha(), p.delta, p.l)?;
        let r = r1d_bound(a, b);
        let g_values = if p.sigma > 0.0 { Some(criteria(&p, Some(mode.k_tilde))?) } else { None };
        per_mode.push(ModeEntry { mode, a, b, r1d_mode: r, g_values });
        // strict comparison keeps the smaller index on ties
        if r > sup {
            sup = r;
            argmax = per_mode.len() - 1;
        }
        if tail_settled(&per_mode, policy.tail_window, p.k, sup) {
            complete = true;
            break;
        }
    }
    let truncation = per_mode.len();
    let rationale = if complete {
        format!(
            "stopped after {truncation} modes: last {} modes evanescent with monotonically decreasing factor below the running sup",
            policy.tail_window
        )
    } else {
        format!("mode cap {cap} reached before the tail settled")
    };
    Ok(ModeSweepReport { argmax_mode: per_mode[argmax].mode, per_mode, sup_factor: sup, truncation, rationale, complete })
}

fn tail_settled(entries: &[ModeEntry], window: usize, k: f64, sup: f64) -> bool {
    if window == 0 || entries.len() < window + 1 {
        return false;
    }
    let tail = &entries[entries.len() - window..];
    tail.iter().all(|e| e.mode.is_evanescent(k) && e.r1d_mode < sup)
        && tail.windows(2).all(|w| w[1].r1d_mode < w[0].r1d_mode)
}

/// Coefficients of the reduced local solution
/// `v = (k̃/ζ)(−α e^{−ζx} + β e^{ζx})`, `w = α e^{−ζx} + β e^{ζx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellReductionSample {
    pub alpha_j: Complex64,
    pub beta_j: Complex64,
    pub k: f64,
    pub sigma: f64,
    pub k_tilde: f64,
    pub zeta: Complex64,
}

impl MaxwellReductionSample {
    pub fn new(alpha_j: Complex64, beta_j: Complex64, k: f64, sigma: f64, k_tilde: f64) -> Result<Self> {
        if !(k_tilde > 0.0) {
            return Err(Error::Domain("reduction needs k̃ > 0".into()));
        }
        let zeta = zeta_mode(k, sigma, k_tilde);
        if zeta == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("reduction undefined at ζ = 0".into()));
        }
        Ok(Self { alpha_j, beta_j, k, sigma, k_tilde, zeta })
    }
}

/// `|(∂ₓ + ik) w − k̃ v − (ik/k̃)(∂ₓ + ik + σ) v|` at `x`, with the derivatives
/// taken in closed form.
pub fn maxwell_reduction_residual(sample: &MaxwellReductionSample, x: f64) -> f64 {
    let MaxwellReductionSample { alpha_j, beta_j, k, sigma, k_tilde, zeta } = *sample;
    let ik = Complex64::new(0.0, k);
    let (em, ep) = ((-zeta * x).exp(), (zeta * x).exp());
    let ratio = k_tilde / zeta;
    let v = ratio * (-alpha_j * em + beta_j * ep);
    let dv = k_tilde * (alpha_j * em + beta_j * ep);
    let w = alpha_j * em + beta_j * ep;
    let dw = zeta * (-alpha_j * em + beta_j * ep);
    let lhs = dw + ik * w - k_tilde * v;
    let rhs = ik / k_tilde * (dv + (ik + sigma) * v);
    (lhs - rhs).norm()
}

/// Options for the `β`-parametrized bound, where `k̃² = βk²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGrid {
    /// The grid is uniform in `sqrt(β)` on `[0, sqrt(beta_max)]`.
    pub beta_max: f64,
    pub points: usize,
    /// Number of best cells refined by golden-section search.
    pub refine_cells: usize,
}

impl Default for BetaGrid {
    fn default() -> Self {
        Self { beta_max: 64.0, points: 4097, refine_cells: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KScaledEntry {
    pub k: f64,
    pub report: ModeSweepReport,
    pub beta_sup: f64,
    pub beta_argmax: f64,
}

/// Per-mode bound as a function of `β = (k̃/k)²` for the `k`-scaled family.
pub fn beta_factor(params: &SchwarzParams, equation: Equation, beta: f64) -> Result<f64> {
    let p = mode_params(params, equation);
    let k_tilde = beta.max(0.0).sqrt() * p.k;
    let (a, b) = coefficients_from(zeta_mode(p.k, p.sigma, k_tilde), p.alpha(), p.delta, p.l)?;
    Ok(r1d_bound(a, b))
}

/// Supremum over `β ∈ [0, beta_max]` of [`beta_factor`], with its location.
pub fn beta_sup(params: &SchwarzParams, equation: Equation, grid: &BetaGrid) -> Result<(f64, f64)> {
    let n = grid.points.max(3);
    let root_max = grid.beta_max.sqrt();
    let ts: Vec<f64> = (0..n).map(|i| root_max * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|t| beta_factor(params, equation, t * t)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
    let (mut best, mut best_t) = (vals[order[0]], ts[order[0]]);
    for &i in order.iter().take(grid.refine_cells) {
        let lo = ts[i.saturating_sub(1)];
        let hi = ts[(i + 1).min(n - 1)];
        let (t, v) = golden_max(|t| beta_factor(params, equation, t * t), lo, hi)?;
        if v > best {
            best = v;
            best_t = t;
        }
    }
    Ok((best, best_t * best_t))
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..80 {
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Mode sweeps and `β` bounds for the family `σ = σ₀k`, `L = L₀/k`, `δ = δ₀/k`.
pub fn k_scaled_sweep(
    sigma0: f64,
    l0: f64,
    delta0: f64,
    l_hat: f64,
    k_list: &[f64],
    equation: Equation,
    policy: &ModeTruncationPolicy,
    grid: &BetaGrid,
) -> Result<Vec<KScaledEntry>> {
    if !(l_hat > 0.0) {
        return Err(Error::Domain("strip width must be positive".into()));
    }
    k_list
        .iter()
        .map(|&k| {
            let params = k_scaled_params(sigma0, l0, delta0, k, 2)?;
            let report = sup_convergence_factor(&params, equation, l_hat, policy)?;
            let (beta_sup, beta_argmax) = beta_sup(&params, equation, grid)?;
            Ok(KScaledEntry { k, report, beta_sup, beta_argmax })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: f64, sigma: f64) -> SchwarzParams {
        SchwarzParams::new(k, sigma, 0.1, 1.0, AlphaMode::Impedance, 10).unwrap()
    }

    #[test]
    fn mode_wave_number() {
        let p = params(30.0, 1.0);
        let m = ModeContext::new(&p, 3, 2.0, Equation::Helmholtz).unwrap();
        assert_eq!(m.k_tilde, 3.0 * PI / 2.0);
        assert!(!m.is_evanescent(30.0));
        assert!(ModeContext::new(&p, 0, 1.0, Equation::Helmholtz).is_err());
    }

    #[test]
    fn cutoff_mode_zeta() {
        let p = params(30.0, 2.0);
        let mut m = ModeContext::new(&p, 1, 1.0, Equation::Helmholtz).unwrap();
        m.k_tilde = 30.0;
        m.zeta = zeta_mode(30.0, 2.0, 30.0);
        assert!((m.zeta - Complex64::new(0.0, 60.0).sqrt()).norm() < 1e-12);
        assert!(mode_coefficients(&p, &m).is_ok());
    }

    #[test]
    fn evanescent_modes_decouple() {
        let p = params(10.0, 1.0);
        let mut prev = f64::INFINITY;
        for factor in [10.0, 100.0] {
            let kt = factor * 10.0;
            let m = ModeContext { mode_index: 1, k_tilde: kt, l_hat: 1.0, equation: Equation::Helmholtz, zeta: zeta_mode(10.0, 1.0, kt) };
            let (a, b) = mode_coefficients(&p, &m).unwrap();
            let size = a.norm().max(b.norm());
            assert!(size < 1e-3 && size < prev);
            prev = size;
        }
    }

    #[test]
    fn maxwell_without_absorption_is_helmholtz() {
        let p = SchwarzParams::new(5.0, 0.0, 0.1, 1.0, AlphaMode::Impedance, 4).unwrap();
        let mh = ModeContext::new(&p, 2, 1.0, Equation::Helmholtz).unwrap();
        let mm = ModeContext::new(&p, 2, 1.0, Equation::Maxwell).unwrap();
        assert_eq!(mode_coefficients(&p, &mh).unwrap(), mode_coefficients(&p, &mm).unwrap());
    }

    #[test]
    fn g_tilde_times_prefactor_is_g() {
        for eq in [Equation::Helmholtz, Equation::Maxwell] {
            for (k, sigma, m) in [(10.0, 1.0, 2), (30.0, 0.5, 9), (5.0, 4.0, 1)] {
                let p = params(k, sigma);
                let mode = ModeContext::new(&p, m, 1.0, eq).unwrap();
                let gt = g_tilde(&p, &mode).unwrap();
                let c = criteria(&mode_params(&p, eq), Some(mode.k_tilde)).unwrap();
                assert!(gt.prefactor_pm > 0.0 && gt.prefactor_g > 0.0);
                for (lhs, rhs) in [(gt.plus * gt.prefactor_pm, c.g_plus), (gt.minus * gt.prefactor_pm, c.g_minus), (gt.g * gt.prefactor_g, c.g)] {
                    assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "{eq:?} k={k}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn evanescent_mode_criteria_positive() {
        let p = params(10.0, 0.3);
        let mode = ModeContext { mode_index: 1, k_tilde: 20.0, l_hat: 1.0, equation: Equation::Helmholtz, zeta: zeta_mode(10.0, 0.3, 20.0) };
        assert!(g_tilde(&p, &mode).unwrap().all_positive());
    }

    #[test]
    fn strong_absorption_converges() {
        let rep = sup_convergence_factor(&params(30.0, 1.0), Equation::Helmholtz, 1.0, &ModeTruncationPolicy::default()).unwrap();
        assert!(rep.sup_factor < 1.0, "{}", rep.sup_factor);
        assert!(rep.complete);
        let max = rep.per_mode.iter().map(|e| e.r1d_mode).fold(0.0, f64::max);
        assert_eq!(max, rep.sup_factor);
    }

    #[test]
    fn weak_absorption_fails_below_cutoff() {
        let rep = sup_convergence_factor(&params(30.0, 0.1), Equation::Helmholtz, 1.0, &ModeTruncationPolicy::default()).unwrap();
        assert!(rep.sup_factor >= 1.0, "{}", rep.sup_factor);
        assert!(rep.argmax_mode.k_tilde <= 30.0);
    }

    #[test]
    fn reduction_residual_vanishes() {
        let s = MaxwellReductionSample::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 5.0, 1.0, 3.0).unwrap();
        assert!(maxwell_reduction_residual(&s, 0.4) < 1e-12);
        let s = MaxwellReductionSample::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 5.0, 1.0, 3.0).unwrap();
        assert_eq!(maxwell_reduction_residual(&s, 0.4), 0.0);
    }

    #[test]
    fn beta_bound_is_k_independent() {
        let grid = BetaGrid { points: 257, ..BetaGrid::default() };
        let policy = ModeTruncationPolicy::default();
        let out = k_scaled_sweep(1.0, 1.0, 0.1, 1.0, &[20.0, 200.0], Equation::Helmholtz, &policy, &grid).unwrap();
        assert!((out[0].beta_sup - out[1].beta_sup).abs() < 1e-12);
        for e in &out {
            assert!(e.report.sup_factor <= e.beta_sup + 1e-10);
        }
    }
}
