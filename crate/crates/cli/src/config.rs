//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use wg_schwarz::discrete::BoundaryCase;
use wg_schwarz::schwarz1d::AlphaMode;
use wg_schwarz::schwarz2d::Equation;

pub const OUTPUT_DIR_ENV: &str = "WG_SCHWARZ_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    LimitCurve,
    FactorVsN,
    ModeSweep,
    KRobust,
    Nilpotency,
    DiscreteScan,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Spectrum,
        Experiment::LimitCurve,
        Experiment::FactorVsN,
        Experiment::ModeSweep,
        Experiment::KRobust,
        Experiment::Nilpotency,
        Experiment::DiscreteScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::LimitCurve => "limit-curve",
            Experiment::FactorVsN => "factor-vs-N",
            Experiment::ModeSweep => "mode-sweep",
            Experiment::KRobust => "k-robust",
            Experiment::Nilpotency => "nilpotency",
            Experiment::DiscreteScan => "discrete-scan",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::Spectrum => "eigenvalues of the 1D iteration matrix against the limiting curve",
            Experiment::LimitCurve => "limiting curve and outlier candidates for the 1D coefficients",
            Experiment::FactorVsN => "spectral radius for a list of subdomain counts, with the limiting bound",
            Experiment::ModeSweep => "per-mode convergence factors of the 2D Helmholtz or Maxwell wave-guide",
            Experiment::KRobust => "coefficients and mode suprema for the k-scaled parameter family",
            Experiment::Nilpotency => "powers of the iteration matrix without absorption",
            Experiment::DiscreteScan => "ORAS-GMRES iteration counts of the finite-difference wave-guide",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name().eq_ignore_ascii_case(s.trim()))
    }

    pub fn keys(self) -> &'static [KeySpec] {
        use Kind::*;
        const K: KeySpec = KeySpec::req("k", Positive);
        const SIGMA: KeySpec = KeySpec::req("sigma", NonNegative);
        const DELTA: KeySpec = KeySpec::req("delta", Positive);
        const L: KeySpec = KeySpec::req("L", Positive);
        const L_HAT: KeySpec = KeySpec::req("L_hat", Positive);
        const ALPHA: KeySpec = KeySpec::opt("alpha_mode", Alpha, "impedance");
        const SAMPLES: KeySpec = KeySpec::opt("curve_samples", Int(2), "4096");
        const ROOT_TOL: KeySpec = KeySpec::opt("root_tol", Positive, "1e-12");
        const ROOT_ITER: KeySpec = KeySpec::opt("root_max_iter", Int(1), "1000");
        const EQUATION: KeySpec = KeySpec::req("equation", Eq);
        const SPECTRUM: &[KeySpec] = &[K, SIGMA, DELTA, L, KeySpec::req("N", Int(2)), ALPHA, SAMPLES, ROOT_TOL, ROOT_ITER];
        const LIMIT_CURVE: &[KeySpec] = &[K, SIGMA, DELTA, L, ALPHA, SAMPLES];
        const FACTOR_VS_N: &[KeySpec] = &[
            K,
            SIGMA,
            DELTA,
            L,
            KeySpec::req("N_list", IntList(2)),
            ALPHA,
            ROOT_TOL,
            ROOT_ITER,
            KeySpec::opt("seed", Seed, "1"),
            KeySpec::opt("iteration_steps", Int(3), "600"),
        ];
        const MODE_SWEEP: &[KeySpec] = &[
            K,
            SIGMA,
            DELTA,
            L,
            L_HAT,
            EQUATION,
            KeySpec::opt("extra_modes", Int(0), "64"),
            KeySpec::opt("tail_window", Int(1), "16"),
            KeySpec::opt("max_modes", Int(1), ""),
        ];
        const K_ROBUST: &[KeySpec] = &[
            KeySpec::req("k_list", PositiveList),
            SIGMA,
            DELTA,
            L,
            L_HAT,
            EQUATION,
            KeySpec::opt("beta_max", Positive, "64"),
            KeySpec::opt("beta_points", Int(3), "4097"),
        ];
        const NILPOTENCY: &[KeySpec] = &[
            K,
            DELTA,
            L,
            KeySpec::opt("N", Int(3), ""),
            KeySpec::opt("N_list", IntList(3), ""),
            KeySpec::opt("sigma", NonNegative, "0"),
        ];
        const DISCRETE_SCAN: &[KeySpec] = &[
            KeySpec::req("k_list", PositiveList),
            SIGMA,
            KeySpec::req("N_list", IntList(1)),
            KeySpec::req("case", Case),
            KeySpec::opt("gmres_tol", Positive, "1e-6"),
            KeySpec::opt("gmres_max_iter", Int(1), "400"),
            KeySpec::opt("overlap_cells", Int(1), "2"),
        ];
        match self {
            Experiment::Spectrum => SPECTRUM,
            Experiment::LimitCurve => LIMIT_CURVE,
            Experiment::FactorVsN => FACTOR_VS_N,
            Experiment::ModeSweep => MODE_SWEEP,
            Experiment::KRobust => K_ROBUST,
            Experiment::Nilpotency => NILPOTENCY,
            Experiment::DiscreteScan => DISCRETE_SCAN,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Positive,
    NonNegative,
    /// Integer with a lower bound.
    Int(usize),
    IntList(usize),
    PositiveList,
    Alpha,
    Eq,
    Case,
    Seed,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub required: bool,
    /// Empty when the key has no default.
    pub default: &'static str,
}

impl KeySpec {
    const fn req(name: &'static str, kind: Kind) -> Self {
        Self { name, kind, required: true, default: "" }
    }

    const fn opt(name: &'static str, kind: Kind, default: &'static str) -> Self {
        Self { name, kind, required: false, default }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(usize),
    IntList(Vec<usize>),
    RealList(Vec<f64>),
    Alpha(AlphaMode),
    Equation(Equation),
    Cases(Vec<BoundaryCase>),
    Seed(u64),
}

/// Parsed file contents before any per-experiment checks.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
    pub syntax_errors: Vec<String>,
}

pub fn parse_text(text: &str) -> RawConfig {
    let mut raw = RawConfig::default();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            raw.syntax_errors.push(format!("line {}: expected 'key = value'", no + 1));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            raw.syntax_errors.push(format!("line {}: empty key", no + 1));
        } else if raw.entries.insert(key.to_string(), value.to_string()).is_some() {
            raw.syntax_errors.push(format!("line {}: duplicate key '{key}'", no + 1));
        }
    }
    raw
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Resolved values, defaults included.
    pub values: BTreeMap<&'static str, Value>,
    /// The keys as written in the file.
    pub raw: BTreeMap<String, String>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn real(&self, key: &str) -> f64 {
        match self.values.get(key) {
            Some(Value::Real(v)) => *v,
            other => panic!("key {key} is not a real: {other:?}"),
        }
    }

    pub fn int(&self, key: &str) -> Option<usize> {
        match self.values.get(key) {
            Some(Value::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn int_list(&self, key: &str) -> Option<&[usize]> {
        match self.values.get(key) {
            Some(Value::IntList(v)) => Some(v),
            _ => None,
        }
    }

    pub fn real_list(&self, key: &str) -> &[f64] {
        match self.values.get(key) {
            Some(Value::RealList(v)) => v,
            other => panic!("key {key} is not a list: {other:?}"),
        }
    }

    pub fn alpha(&self) -> AlphaMode {
        match self.values.get("alpha_mode") {
            Some(Value::Alpha(a)) => *a,
            _ => AlphaMode::Impedance,
        }
    }

    pub fn equation(&self) -> Equation {
        match self.values.get("equation") {
            Some(Value::Equation(e)) => *e,
            other => panic!("equation missing: {other:?}"),
        }
    }

    pub fn cases(&self) -> &[BoundaryCase] {
        match self.values.get("case") {
            Some(Value::Cases(c)) => c,
            other => panic!("case missing: {other:?}"),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.values.get("seed") {
            Some(Value::Seed(s)) => Some(*s),
            _ => None,
        }
    }
}

/// All violations in `raw`, or the resolved configuration. `env_output_dir`
/// overrides the `output_dir` key when set.
pub fn validate(raw: &RawConfig, env_output_dir: Option<&str>) -> Result<ExperimentConfig, Vec<String>> {
    let mut errors = raw.syntax_errors.clone();
    let experiment = match raw.entries.get("experiment") {
        None => {
            errors.push(format!("missing key 'experiment' (one of {})", experiment_names()));
            return Err(errors);
        }
        Some(name) => match Experiment::from_name(name) {
            Some(e) => e,
            None => {
                errors.push(format!("experiment: unknown experiment '{name}' (one of {})", experiment_names()));
                return Err(errors);
            }
        },
    };
    let specs = experiment.keys();
    for key in raw.entries.keys() {
        if key != "experiment" && key != "output_dir" && !specs.iter().any(|s| s.name == key) {
            errors.push(format!("{key}: unknown key for experiment {experiment}"));
        }
    }
    let missing: Vec<&str> =
        specs.iter().filter(|s| s.required && !raw.entries.contains_key(s.name)).map(|s| s.name).collect();
    if !missing.is_empty() {
        let required: Vec<&str> = specs.iter().filter(|s| s.required).map(|s| s.name).collect();
        errors.push(format!(
            "missing {} for experiment {experiment} (required keys: {})",
            missing.join(", "),
            required.join(", ")
        ));
    }
    let mut values = BTreeMap::new();
    for spec in specs {
        let text = match raw.entries.get(spec.name) {
            Some(t) => t.as_str(),
            None if !spec.default.is_empty() => spec.default,
            None => continue,
        };
        match parse_value(spec, text) {
            Ok(v) => {
                values.insert(spec.name, v);
            }
            Err(e) => errors.push(format!("{}: {e}", spec.name)),
        }
    }
    check_cross(experiment, &values, &mut errors);
    let output_dir = env_output_dir
        .filter(|s| !s.is_empty())
        .map(PathBuf::from)
        .or_else(|| raw.entries.get("output_dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    if errors.is_empty() {
        Ok(ExperimentConfig { experiment, values, raw: raw.entries.clone(), output_dir })
    } else {
        Err(errors)
    }
}

fn experiment_names() -> String {
    Experiment::ALL.iter().map(|e| e.name()).collect::<Vec<_>>().join(", ")
}

fn check_cross(experiment: Experiment, values: &BTreeMap<&'static str, Value>, errors: &mut Vec<String>) {
    let sigma = match values.get("sigma") {
        Some(Value::Real(s)) => Some(*s),
        _ => None,
    };
    match experiment {
        Experiment::Nilpotency => {
            if sigma.is_some_and(|s| s != 0.0) {
                errors.push("sigma: the nilpotency experiment requires sigma = 0".into());
            }
            let has_n = values.contains_key("N");
            let has_list = values.contains_key("N_list");
            if has_n == has_list {
                errors.push("N, N_list: exactly one of N or N_list is required for experiment nilpotency".into());
            }
        }
        _ => {
            if sigma == Some(0.0) {
                errors.push(format!("sigma: sigma = 0 is only allowed in the nilpotency experiment, not {experiment}"));
            }
        }
    }
}

fn parse_value(spec: &KeySpec, text: &str) -> Result<Value, String> {
    let real = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let int = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a nonnegative integer"));
    let list = |t: &str| -> Vec<String> { t.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect() };
    match spec.kind {
        Kind::Positive => {
            let v = real(text)?;
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{} must be > 0, got {v}", spec.name));
            }
            Ok(Value::Real(v))
        }
        Kind::NonNegative => {
            let v = real(text)?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{} must be ≥ 0, got {v}", spec.name));
            }
            Ok(Value::Real(v))
        }
        Kind::Int(min) => {
            let v = int(text)?;
            if v < min {
                return Err(format!("{} must be ≥ {min}, got {v}", spec.name));
            }
            Ok(Value::Int(v))
        }
        Kind::IntList(min) => {
            let items = list(text);
            if items.is_empty() {
                return Err("list is empty".into());
            }
            let vs = items.iter().map(|t| int(t)).collect::<Result<Vec<_>, _>>()?;
            if let Some(v) = vs.iter().find(|&&v| v < min) {
                return Err(format!("every entry must be ≥ {min}, got {v}"));
            }
            Ok(Value::IntList(vs))
        }
        Kind::PositiveList => {
            let items = list(text);
            if items.is_empty() {
                return Err("list is empty".into());
            }
            let vs = items.iter().map(|t| real(t)).collect::<Result<Vec<_>, _>>()?;
            if let Some(v) = vs.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(format!("every entry must be > 0, got {v}"));
            }
            Ok(Value::RealList(vs))
        }
        Kind::Alpha => match text.to_ascii_lowercase().as_str() {
            "impedance" | "ik" => Ok(Value::Alpha(AlphaMode::Impedance)),
            "shifted" | "ik+sigma" => Ok(Value::Alpha(AlphaMode::ImpedanceShifted)),
            other => Err(format!("unknown alpha_mode '{other}' (expected impedance or shifted)")),
        },
        Kind::Eq => match text.to_ascii_lowercase().as_str() {
            "helmholtz" => Ok(Value::Equation(Equation::Helmholtz)),
            "maxwell" => Ok(Value::Equation(Equation::Maxwell)),
            other => Err(format!("unknown equation '{other}' (expected helmholtz or maxwell)")),
        },
        Kind::Case => {
            if text.eq_ignore_ascii_case("both") {
                return Ok(Value::Cases(vec![BoundaryCase::WaveGuide, BoundaryCase::FreeSpace]));
            }
            let cases = list(text)
                .iter()
                .map(|t| t.parse::<BoundaryCase>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            if cases.is_empty() {
                return Err("list is empty".into());
            }
            Ok(Value::Cases(cases))
        }
        Kind::Seed => text.trim().parse::<u64>().map(Value::Seed).map_err(|_| format!("'{text}' is not a seed")),
    }
}
