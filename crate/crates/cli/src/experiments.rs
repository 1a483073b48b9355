//! One runner per experiment. Each writes its files and returns the
//! summary and tolerance sections of the manifest.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use wg_schwarz::discrete::{points_per_unit, scan_counts_with, CountTable, ScanOptions};
use wg_schwarz::iteration::{build_iteration_matrix, iterate, nilpotency_check, InterfaceVector};
use wg_schwarz::numerics::RootOptions;
use wg_schwarz::schwarz1d::{coefficients_1d, k_scaled_params, r1d_bound, SchwarzParams};
use wg_schwarz::schwarz2d::{k_scaled_sweep, sup_convergence_factor, BetaGrid, ModeTruncationPolicy};
use wg_schwarz::toeplitz::{limiting_spectrum, spectrum_with, LimitSpectrum, SpectrumOptions, ToeplitzBlocks};

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{num, ComplexPlot, Csv, OutputDir};

/// Relative bound for `‖T^{N−1}‖` without absorption.
pub const NILPOTENCY_TOL: f64 = 1e-8;

/// Calibrated bound on the eigenvalue distance to the limit set at large `N`.
pub const LIMIT_DISTANCE_TOL: f64 = 5e-2;

pub struct Outcome {
    pub summary: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub seeds: Map<String, Value>,
}

impl Outcome {
    fn new() -> Self {
        Self { summary: Map::new(), tolerances: Map::new(), seeds: Map::new() }
    }
}

type Run = Result<Outcome, String>;

pub fn run(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    match cfg.experiment {
        Experiment::Spectrum => spectrum_experiment(cfg, out),
        Experiment::LimitCurve => limit_curve(cfg, out),
        Experiment::FactorVsN => factor_vs_n(cfg, out),
        Experiment::ModeSweep => mode_sweep(cfg, out),
        Experiment::KRobust => k_robust(cfg, out),
        Experiment::Nilpotency => nilpotency(cfg, out),
        Experiment::DiscreteScan => discrete_scan(cfg, out),
    }
}

fn io(e: std::io::Error) -> String {
    format!("writing results: {e}")
}

fn lib(e: wg_schwarz::Error) -> String {
    e.to_string()
}

fn params(cfg: &ExperimentConfig, n: usize) -> Result<SchwarzParams, String> {
    SchwarzParams::new(cfg.real("k"), cfg.real("sigma"), cfg.real("delta"), cfg.real("L"), cfg.alpha(), n).map_err(lib)
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn root_options(cfg: &ExperimentConfig) -> RootOptions {
    RootOptions {
        tol: cfg.real("root_tol"),
        max_iter: cfg.int("root_max_iter").unwrap_or(1000),
        ..RootOptions::default()
    }
}

fn curve_csv(limit: &LimitSpectrum) -> String {
    let mut csv = Csv::new(&["branch", "theta", "re", "im"]);
    for (name, pick) in [("plus", true), ("minus", false)] {
        for s in &limit.curve_samples {
            let z = if pick { s.plus } else { s.minus };
            csv.row(&[name.into(), num(s.theta), num(z.re), num(z.im)]);
        }
    }
    csv.into_string()
}

fn outliers_csv(limit: &LimitSpectrum) -> String {
    let mut csv = Csv::new(&["re", "im", "admissible"]);
    for o in &limit.outliers {
        csv.row(&[num(o.value.re), num(o.value.im), o.admissible.to_string()]);
    }
    csv.into_string()
}

fn branches(limit: &LimitSpectrum) -> Vec<Vec<(f64, f64)>> {
    vec![
        limit.curve_samples.iter().map(|s| (s.plus.re, s.plus.im)).collect(),
        limit.curve_samples.iter().map(|s| (s.minus.re, s.minus.im)).collect(),
    ]
}

fn spectrum_experiment(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let n = cfg.int("N").expect("validated");
    let p = params(cfg, n)?;
    let (a, b) = coefficients_1d(&p).map_err(lib)?;
    let blocks = ToeplitzBlocks::new(a, b, n - 1).map_err(lib)?;
    let opts = SpectrumOptions {
        roots: root_options(cfg),
        curve_samples: cfg.int("curve_samples").unwrap_or(4096),
        ..SpectrumOptions::default()
    };
    let rep = spectrum_with(&blocks, &opts).map_err(lib)?;

    let mut order: Vec<usize> = (0..rep.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        let (x, y) = (rep.eigenvalues[i], rep.eigenvalues[j]);
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    let mut csv = Csv::new(&["re", "im", "distance_to_limit"]);
    for &i in &order {
        let z = rep.eigenvalues[i];
        csv.row(&[num(z.re), num(z.im), num(rep.distances[i])]);
    }
    out.write("eigenvalues.csv", &csv.into_string()).map_err(io)?;
    out.write("curve.csv", &curve_csv(&rep.limit)).map_err(io)?;
    out.write("outliers.csv", &outliers_csv(&rep.limit)).map_err(io)?;
    let plot = ComplexPlot {
        title: format!("spectrum, k={}, sigma={}, N={n}", p.k, p.sigma),
        points: rep.eigenvalues.iter().map(|z| (z.re, z.im)).collect(),
        curves: branches(&rep.limit),
        markers: rep.limit.admissible_outliers().map(|z| (z.re, z.im)).collect(),
    };
    out.write("spectrum.svg", &plot.to_svg()).map_err(io)?;

    let mut o = Outcome::new();
    o.summary.insert("a".into(), complex(a));
    o.summary.insert("b".into(), complex(b));
    o.summary.insert("spectral_radius".into(), json!(rep.spectral_radius));
    o.summary.insert("r1d_bound".into(), json!(r1d_bound(a, b)));
    o.summary.insert("max_distance".into(), json!(rep.max_distance));
    o.summary.insert("mean_distance".into(), json!(rep.mean_distance));
    o.summary.insert("limit_sup_modulus".into(), json!(rep.limit.sup_modulus));
    o.summary.insert("determinant_check".into(), json!(rep.determinant_check));
    o.summary.insert("within_limit_tol".into(), json!(rep.max_distance < LIMIT_DISTANCE_TOL));
    o.tolerances.insert("limit_distance".into(), json!(LIMIT_DISTANCE_TOL));
    o.tolerances.insert("root_tol".into(), json!(opts.roots.tol));
    o.tolerances.insert("root_max_iter".into(), json!(opts.roots.max_iter));
    o.tolerances.insert("root_seed_angle".into(), json!(opts.roots.seed_angle));
    o.tolerances.insert("curve_samples".into(), json!(opts.curve_samples));
    Ok(o)
}

fn limit_curve(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let p = params(cfg, 2)?;
    let (a, b) = coefficients_1d(&p).map_err(lib)?;
    let samples = cfg.int("curve_samples").unwrap_or(4096);
    let limit = limiting_spectrum(a, b, samples, false).map_err(lib)?;
    out.write("curve.csv", &curve_csv(&limit)).map_err(io)?;
    out.write("outliers.csv", &outliers_csv(&limit)).map_err(io)?;
    let plot = ComplexPlot {
        title: format!("limiting curve, k={}, sigma={}", p.k, p.sigma),
        points: Vec::new(),
        curves: branches(&limit),
        markers: limit.admissible_outliers().map(|z| (z.re, z.im)).collect(),
    };
    out.write("limit_curve.svg", &plot.to_svg()).map_err(io)?;
    let mut o = Outcome::new();
    o.summary.insert("a".into(), complex(a));
    o.summary.insert("b".into(), complex(b));
    o.summary.insert("sup_modulus".into(), json!(limit.sup_modulus));
    o.summary.insert("r1d_bound".into(), json!(r1d_bound(a, b)));
    o.summary.insert("outliers_admissible".into(), json!(limit.outliers[0].admissible));
    o.tolerances.insert("curve_samples".into(), json!(samples));
    Ok(o)
}

fn factor_vs_n(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let n_list = cfg.int_list("N_list").expect("validated").to_vec();
    let p = params(cfg, 2)?;
    let (a, b) = coefficients_1d(&p).map_err(lib)?;
    let bound = r1d_bound(a, b);
    let seed = cfg.seed().unwrap_or(1);
    let steps = cfg.int("iteration_steps").unwrap_or(600);
    let opts = SpectrumOptions { roots: root_options(cfg), ..SpectrumOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = Csv::new(&["N", "rho", "iteration_rate"]);
    let mut rhos = Vec::new();
    for &n in &n_list {
        let blocks = ToeplitzBlocks::new(a, b, n - 1).map_err(lib)?;
        let rho = spectrum_with(&blocks, &opts).map_err(lib)?.spectral_radius;
        let matrix = build_iteration_matrix(a, b, n).map_err(lib)?;
        let r0: Vec<Complex64> =
            (0..2 * (n - 1)).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let r0 = InterfaceVector::new(r0).map_err(lib)?;
        let rate = iterate(&matrix, &r0, steps).map_err(lib)?.estimated_rate;
        csv.row(&[n.to_string(), num(rho), num(rate)]);
        rhos.push(rho);
    }
    csv.row(&["limit".into(), num(bound), String::new()]);
    out.write("rho_vs_N.csv", &csv.into_string()).map_err(io)?;
    let mut o = Outcome::new();
    o.summary.insert("a".into(), complex(a));
    o.summary.insert("b".into(), complex(b));
    o.summary.insert("r1d_bound".into(), json!(bound));
    o.summary.insert("rho".into(), json!(rhos));
    o.summary.insert("non_decreasing".into(), json!(rhos.windows(2).all(|w| w[1] >= w[0] - 1e-9)));
    o.summary.insert("below_bound".into(), json!(rhos.iter().all(|&r| r <= bound + 1e-6)));
    o.tolerances.insert("root_tol".into(), json!(opts.roots.tol));
    o.tolerances.insert("root_max_iter".into(), json!(opts.roots.max_iter));
    o.tolerances.insert("iteration_steps".into(), json!(steps));
    o.seeds.insert("initial_interface_data".into(), json!(seed));
    Ok(o)
}

fn policy(cfg: &ExperimentConfig) -> ModeTruncationPolicy {
    ModeTruncationPolicy {
        extra_modes: cfg.int("extra_modes").unwrap_or(64),
        tail_window: cfg.int("tail_window").unwrap_or(16),
        max_modes: cfg.int("max_modes"),
    }
}

fn mode_sweep(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let p = params(cfg, 2)?;
    let eq = cfg.equation();
    let l_hat = cfg.real("L_hat");
    let pol = policy(cfg);
    let rep = sup_convergence_factor(&p, eq, l_hat, &pol).map_err(lib)?;
    let mut csv = Csv::new(&["m", "k_tilde", "evanescent", "factor", "a_re", "a_im", "b_re", "b_im", "g_plus_normalized", "g_minus_normalized", "g_normalized"]);
    let mut evanescent_max: f64 = 0.0;
    for e in &rep.per_mode {
        let ev = e.mode.is_evanescent(p.k);
        if ev {
            evanescent_max = evanescent_max.max(e.r1d_mode);
        }
        let g = e.g_values.map(|g| g.normalized);
        let gfield = |v: Option<f64>| v.map(num).unwrap_or_default();
        csv.row(&[
            e.mode.mode_index.to_string(),
            num(e.mode.k_tilde),
            ev.to_string(),
            num(e.r1d_mode),
            num(e.a.re),
            num(e.a.im),
            num(e.b.re),
            num(e.b.im),
            gfield(g.map(|g| g.plus)),
            gfield(g.map(|g| g.minus)),
            gfield(g.map(|g| g.g)),
        ]);
    }
    out.write("modes.csv", &csv.into_string()).map_err(io)?;
    let mut o = Outcome::new();
    o.summary.insert("equation".into(), json!(eq.name()));
    o.summary.insert("sup_factor".into(), json!(rep.sup_factor));
    o.summary.insert("argmax_mode".into(), json!(rep.argmax_mode.mode_index));
    o.summary.insert("argmax_k_tilde".into(), json!(rep.argmax_mode.k_tilde));
    o.summary.insert("evanescent_max".into(), json!(evanescent_max));
    o.summary.insert("modes".into(), json!(rep.per_mode.len()));
    o.summary.insert("complete".into(), json!(rep.complete));
    o.summary.insert("truncation".into(), json!(rep.rationale));
    o.tolerances.insert("extra_modes".into(), json!(pol.extra_modes));
    o.tolerances.insert("tail_window".into(), json!(pol.tail_window));
    o.tolerances.insert("max_modes".into(), json!(pol.max_modes));
    Ok(o)
}

fn k_robust(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let k_list = cfg.real_list("k_list").to_vec();
    let (sigma0, delta0, l0) = (cfg.real("sigma"), cfg.real("delta"), cfg.real("L"));
    let eq = cfg.equation();
    let l_hat = cfg.real("L_hat");
    let grid = BetaGrid {
        beta_max: cfg.real("beta_max"),
        points: cfg.int("beta_points").unwrap_or(4097),
        ..BetaGrid::default()
    };
    let pol = ModeTruncationPolicy::default();
    let entries = k_scaled_sweep(sigma0, l0, delta0, l_hat, &k_list, eq, &pol, &grid).map_err(lib)?;
    let mut csv = Csv::new(&["k", "sigma", "delta", "L", "a_re", "a_im", "b_re", "b_im", "r1d_bound", "mode_sup", "beta_sup", "beta_argmax"]);
    let mut rows = Vec::new();
    for e in &entries {
        let p = k_scaled_params(sigma0, l0, delta0, e.k, 2).map_err(lib)?;
        let (a, b) = coefficients_1d(&p).map_err(lib)?;
        csv.row(&[
            num(e.k),
            num(p.sigma),
            num(p.delta),
            num(p.l),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            num(r1d_bound(a, b)),
            num(e.report.sup_factor),
            num(e.beta_sup),
            num(e.beta_argmax),
        ]);
        rows.push(json!({"k": e.k, "mode_sup": e.report.sup_factor, "beta_sup": e.beta_sup}));
    }
    out.write("k_robust.csv", &csv.into_string()).map_err(io)?;
    let mut o = Outcome::new();
    o.summary.insert("equation".into(), json!(eq.name()));
    o.summary.insert("entries".into(), Value::Array(rows));
    o.tolerances.insert("beta_max".into(), json!(grid.beta_max));
    o.tolerances.insert("beta_points".into(), json!(grid.points));
    o.tolerances.insert("beta_refine_cells".into(), json!(grid.refine_cells));
    o.tolerances.insert("extra_modes".into(), json!(pol.extra_modes));
    o.tolerances.insert("tail_window".into(), json!(pol.tail_window));
    Ok(o)
}

fn nilpotency(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let n_list: Vec<usize> = match cfg.int("N") {
        Some(n) => vec![n],
        None => cfg.int_list("N_list").expect("validated").to_vec(),
    };
    let (k, delta, l) = (cfg.real("k"), cfg.real("delta"), cfg.real("L"));
    let mut csv = Csv::new(&["N", "norm", "relative", "eigenvalue_bound"]);
    let mut worst: f64 = 0.0;
    let mut norms = Vec::new();
    for &n in &n_list {
        let rep = nilpotency_check(k, delta, l, n).map_err(lib)?;
        worst = worst.max(rep.relative);
        norms.push(json!({"N": n, "norm": rep.norm, "relative": rep.relative}));
        csv.row(&[n.to_string(), num(rep.norm), num(rep.relative), num(rep.eigenvalue_bound)]);
    }
    out.write("nilpotency.csv", &csv.into_string()).map_err(io)?;
    let mut o = Outcome::new();
    o.summary.insert("powers".into(), Value::Array(norms));
    o.summary.insert("max_relative".into(), json!(worst));
    o.summary.insert("nilpotent".into(), json!(worst <= NILPOTENCY_TOL));
    o.tolerances.insert("nilpotency_relative".into(), json!(NILPOTENCY_TOL));
    if worst > NILPOTENCY_TOL {
        return Err(format!("relative norm of T^(N-1) is {worst:e}, above {NILPOTENCY_TOL:e}"));
    }
    Ok(o)
}

fn discrete_scan(cfg: &ExperimentConfig, out: &mut OutputDir) -> Run {
    let k_list = cfg.real_list("k_list").to_vec();
    let n_list = cfg.int_list("N_list").expect("validated").to_vec();
    let sigma = cfg.real("sigma");
    let opts = ScanOptions {
        tol: cfg.real("gmres_tol"),
        max_iter: cfg.int("gmres_max_iter").unwrap_or(400),
        overlap_cells: cfg.int("overlap_cells").unwrap_or(2),
    };
    let mut table = CountTable::default();
    for &case in cfg.cases() {
        table.merge(scan_counts_with(&k_list, &n_list, sigma, case, &opts).map_err(lib)?);
    }
    out.write("counts.csv", &table.to_csv()).map_err(io)?;
    let mut o = Outcome::new();
    let grid: Vec<Value> = k_list.iter().map(|&k| json!({"k": k, "n_per_unit": points_per_unit(k)})).collect();
    o.summary.insert("grid".into(), Value::Array(grid));
    o.summary.insert("all_converged".into(), json!(table.rows.iter().all(|r| r.converged)));
    o.summary.insert("cells".into(), json!(table.rows.len()));
    o.tolerances.insert("gmres_tol".into(), json!(opts.tol));
    o.tolerances.insert("gmres_max_iter".into(), json!(opts.max_iter));
    o.tolerances.insert("overlap_cells".into(), json!(opts.overlap_cells));
    Ok(o)
}
