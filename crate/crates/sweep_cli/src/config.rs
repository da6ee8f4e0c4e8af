use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use rf_lab::{Activation, Model};
use rf_theory::ActivationMoments;
use serde::Deserialize;
use toml::Spanned;

/// What a sweep computes at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Asymptotic traces, decomposition and ensemble errors.
    Theory,
    /// Finite-size trace estimates.
    Simulate,
    /// Nested-resampling error decomposition.
    Decompose,
    /// Simulated ensemble or divide-and-conquer test error.
    Ensemble,
    /// Theory and simulation side by side with z-scores.
    Compare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Theory => "theory",
            Mode::Simulate => "simulate",
            Mode::Decompose => "decompose",
            Mode::Ensemble => "ensemble",
            Mode::Compare => "compare",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [Mode::Theory, Mode::Simulate, Mode::Decompose, Mode::Ensemble, Mode::Compare]
            .into_iter()
            .find(|m| m.name() == s)
    }

    pub fn is_simulation(self) -> bool {
        self != Mode::Theory
    }
}

/// Numeric parameters, in canonical column and sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Psi1,
    /// `P/N`; an alternative to `psi1`.
    Ratio,
    Psi2,
    Lambda,
    K,
    Snr,
    D,
    NX,
    NTheta,
    NEps,
    NTest,
    NRuns,
}

impl Param {
    pub const ALL: [Param; 12] = [
        Param::Psi1,
        Param::Ratio,
        Param::Psi2,
        Param::Lambda,
        Param::K,
        Param::Snr,
        Param::D,
        Param::NX,
        Param::NTheta,
        Param::NEps,
        Param::NTest,
        Param::NRuns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Psi1 => "psi1",
            Param::Ratio => "ratio",
            Param::Psi2 => "psi2",
            Param::Lambda => "lambda",
            Param::K => "K",
            Param::Snr => "snr",
            Param::D => "D",
            Param::NX => "n_X",
            Param::NTheta => "n_Theta",
            Param::NEps => "n_eps",
            Param::NTest => "n_test",
            Param::NRuns => "n_runs",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    fn default_value(self) -> Option<f64> {
        match self {
            Param::Psi1 | Param::Ratio => None,
            Param::Psi2 => Some(1.0),
            Param::Lambda => Some(1e-5),
            Param::K => Some(1.0),
            Param::Snr => Some(1.0),
            Param::D => Some(200.0),
            Param::NX | Param::NTheta | Param::NEps => Some(10.0),
            Param::NTest => Some(10_000.0),
            Param::NRuns => Some(20.0),
        }
    }

    pub fn is_integer(self) -> bool {
        !matches!(
            self,
            Param::Psi1 | Param::Ratio | Param::Psi2 | Param::Lambda | Param::Snr
        )
    }

    fn check(self, v: f64) -> Result<(), String> {
        let name = self.name();
        let integer = v.fract() == 0.0;
        let ok = match self {
            Param::Psi1 | Param::Ratio | Param::Psi2 | Param::Lambda => v > 0.0 && v.is_finite(),
            Param::Snr => v > 0.0,
            Param::K => v >= 1.0 && (integer || v == f64::INFINITY),
            Param::D | Param::NX | Param::NTheta | Param::NEps => v >= 2.0 && v.is_finite() && integer,
            Param::NTest | Param::NRuns => v >= 1.0 && v.is_finite() && integer,
        };
        if ok {
            return Ok(());
        }
        Err(match self {
            Param::Psi1 | Param::Ratio | Param::Psi2 | Param::Lambda => format!("{name} must be > 0"),
            Param::Snr => "snr must be > 0 (inf for noiseless labels)".into(),
            Param::K => "K must be an integer >= 1 or inf".into(),
            Param::D | Param::NX | Param::NTheta | Param::NEps => format!("{name} must be an integer >= 2"),
            Param::NTest | Param::NRuns => format!("{name} must be an integer >= 1"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ensemble,
    Divide,
}

/// Which simulation a compare sweep runs against the theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Psi,
    Error,
    Decomposition,
}

/// Optional theory columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Extras {
    /// Divide-and-conquer error next to the ensemble error.
    pub divide: bool,
    /// Single-learner error and single-learner error with twice the features.
    pub double_p: bool,
    /// Single-learner error at the best regularization on a fixed grid.
    pub optimal_lambda: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub activation: Activation,
    pub model: Model,
    pub method: Method,
    pub target: Target,
    pub extras: Extras,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            activation: Activation::Relu,
            model: Model::GaussianCovariate,
            method: Method::Ensemble,
            target: Target::Psi,
            extras: Extras::default(),
        }
    }
}

/// A validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    /// Swept parameters and their values.
    pub grid: BTreeMap<Param, Vec<f64>>,
    /// Every other numeric parameter, defaults included.
    pub fixed: BTreeMap<Param, f64>,
    pub options: Options,
    pub seeds: Vec<u64>,
    pub output_path: Option<PathBuf>,
}

/// One fully specified parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub values: BTreeMap<Param, f64>,
}

impl Point {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Psi1 => self.psi1(),
            _ => self.values.get(&p).copied().unwrap_or(f64::NAN),
        }
    }

    pub fn psi1(&self) -> f64 {
        match self.values.get(&Param::Psi1) {
            Some(v) => *v,
            None => self.values[&Param::Ratio] * self.values[&Param::Psi2],
        }
    }

    pub fn count(&self, p: Param) -> usize {
        self.get(p) as usize
    }

    /// `K` as an integer, with `inf` mapped to `u64::MAX`.
    pub fn k(&self) -> u64 {
        let k = self.get(Param::K);
        if k.is_finite() {
            k as u64
        } else {
            u64::MAX
        }
    }
}

impl SweepSpec {
    /// Grid product in canonical order: the first parameter varies slowest.
    pub fn points(&self) -> Vec<Point> {
        let mut points = vec![Point {
            values: self.fixed.clone(),
        }];
        for (param, values) in &self.grid {
            points = points
                .into_iter()
                .flat_map(|pt| {
                    values.iter().map(move |v| {
                        let mut next = pt.clone();
                        next.values.insert(*param, *v);
                        next
                    })
                })
                .collect();
        }
        points
    }

    pub fn n_rows(&self) -> usize {
        let per_seed = if self.mode.is_simulation() { self.seeds.len() } else { 1 };
        self.grid.values().map(Vec::len).product::<usize>() * per_seed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if !self.field.is_empty() {
            write!(f, "{}: ", self.field)?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    mode: Option<Spanned<String>>,
    grid: Option<BTreeMap<String, Spanned<RawAxis>>>,
    fixed: Option<BTreeMap<String, Spanned<toml::Value>>>,
    seeds: Option<Vec<u64>>,
    output: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAxis {
    List(Vec<f64>),
    Log { logspace: (f64, f64, usize) },
    Lin { linspace: (f64, f64, usize) },
}

impl RawAxis {
    fn values(&self) -> Result<Vec<f64>, String> {
        let spaced = |a: f64, b: f64, n: usize, log: bool| -> Result<Vec<f64>, String> {
            if n == 0 {
                return Err("spacing needs at least one point".into());
            }
            if log && !(a > 0.0 && b > 0.0) {
                return Err("logspace bounds must be > 0".into());
            }
            let (lo, hi) = if log { (a.ln(), b.ln()) } else { (a, b) };
            Ok((0..n)
                .map(|i| {
                    let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    let v = lo + t * (hi - lo);
                    if log {
                        // pin the endpoints so that round numbers stay round
                        if i == 0 {
                            a
                        } else if i == n - 1 {
                            b
                        } else {
                            v.exp()
                        }
                    } else {
                        v
                    }
                })
                .collect())
        };
        match self {
            RawAxis::List(v) => Ok(v.clone()),
            RawAxis::Log { logspace: (a, b, n) } => spaced(*a, *b, *n, true),
            RawAxis::Lin { linspace: (a, b, n) } => spaced(*a, *b, *n, false),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn choice_error(line: usize, field: &str, allowed: &str) -> ConfigError {
    ConfigError {
        line: Some(line),
        field: format!("fixed.{field}"),
        message: format!("expected one of {allowed}"),
    }
}

fn parse_activation(value: &toml::Value, line: usize) -> Result<Activation, ConfigError> {
    match value {
        toml::Value::String(s) if s == "relu" => Ok(Activation::Relu),
        toml::Value::String(s) if s == "linear" => Ok(Activation::Linear),
        toml::Value::Table(t) => {
            let get = |k: &str| t.get(k).and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)));
            let err = |message: String| ConfigError {
                line: Some(line),
                field: "fixed.activation".into(),
                message,
            };
            if let Some(extra) = t.keys().find(|k| !["mu0", "mu1", "mu_star_sq"].contains(&k.as_str())) {
                return Err(err(format!("unknown moment `{extra}`")));
            }
            match (get("mu0"), get("mu1"), get("mu_star_sq")) {
                (Some(a), Some(b), Some(c)) => ActivationMoments::new(a, b, c)
                    .map(Activation::Moments)
                    .map_err(|e| err(e.to_string())),
                _ => Err(err("moments need numeric mu0, mu1 and mu_star_sq".into())),
            }
        }
        _ => Err(choice_error(line, "activation", "\"relu\", \"linear\" or a moment table")),
    }
}

fn parse_extras(value: &toml::Value, line: usize) -> Result<Extras, ConfigError> {
    let bad = || choice_error(line, "extras", "\"divide\", \"double_p\", \"optimal_lambda\"");
    let items = value.as_array().ok_or_else(bad)?;
    let mut extras = Extras::default();
    for item in items {
        match item.as_str() {
            Some("divide") => extras.divide = true,
            Some("double_p") => extras.double_p = true,
            Some("optimal_lambda") => extras.optimal_lambda = true,
            _ => return Err(bad()),
        }
    }
    Ok(extras)
}

fn numeric(value: &toml::Value) -> Option<f64> {
    value.as_float().or_else(|| value.as_integer().map(|i| i as f64))
}

/// Parses a TOML sweep description; see [`parse_config_with`].
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    parse_config_with(text, None)
}

/// Parses a TOML sweep description. A `mode` passed here replaces the one in
/// the document, which may then be omitted.
pub fn parse_config_with(text: &str, mode_override: Option<Mode>) -> Result<SweepSpec, ConfigError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of(text, s.start)),
        field: String::new(),
        message: e.message().trim().to_string(),
    })?;

    let mode = match (mode_override, &raw.mode) {
        (Some(m), _) => m,
        (None, Some(m)) => Mode::from_name(m.get_ref()).ok_or_else(|| ConfigError {
            line: Some(line_of(text, m.span().start)),
            field: "mode".into(),
            message: "expected theory, simulate, decompose, ensemble or compare".into(),
        })?,
        (None, None) => {
            return Err(ConfigError {
                line: None,
                field: "mode".into(),
                message: "mode is required".into(),
            })
        }
    };

    let mut grid = BTreeMap::new();
    let mut grid_lines = BTreeMap::new();
    for (key, axis) in raw.grid.iter().flatten() {
        let line = line_of(text, axis.span().start);
        let field = format!("grid.{key}");
        let param = Param::from_name(key).ok_or_else(|| ConfigError {
            line: Some(line),
            field: field.clone(),
            message: format!("`{key}` is not a numeric sweep parameter"),
        })?;
        let values = axis.get_ref().values().map_err(|message| ConfigError {
            line: Some(line),
            field: field.clone(),
            message,
        })?;
        if values.is_empty() {
            return Err(ConfigError {
                line: Some(line),
                field,
                message: "needs at least one value".into(),
            });
        }
        for v in &values {
            param.check(*v).map_err(|message| ConfigError {
                line: Some(line),
                field: field.clone(),
                message,
            })?;
        }
        grid.insert(param, values);
        grid_lines.insert(param, line);
    }
    if grid.is_empty() {
        return Err(ConfigError {
            line: None,
            field: "grid".into(),
            message: "grid must contain at least one parameter".into(),
        });
    }

    let mut fixed = BTreeMap::new();
    let mut options = Options::default();
    let mut target_given = false;
    for (key, value) in raw.fixed.iter().flatten() {
        let line = line_of(text, value.span().start);
        let field = format!("fixed.{key}");
        let v = value.get_ref();
        match key.as_str() {
            "activation" => options.activation = parse_activation(v, line)?,
            "model" => {
                options.model = match v.as_str() {
                    Some("gaussian_covariate") => Model::GaussianCovariate,
                    Some("true_rf") => Model::TrueRf,
                    _ => return Err(choice_error(line, key, "\"gaussian_covariate\", \"true_rf\"")),
                }
            }
            "method" => {
                options.method = match v.as_str() {
                    Some("ensemble") => Method::Ensemble,
                    Some("divide") => Method::Divide,
                    _ => return Err(choice_error(line, key, "\"ensemble\", \"divide\"")),
                }
            }
            "target" => {
                target_given = true;
                options.target = match v.as_str() {
                    Some("psi") => Target::Psi,
                    Some("error") => Target::Error,
                    Some("decomposition") => Target::Decomposition,
                    _ => return Err(choice_error(line, key, "\"psi\", \"error\", \"decomposition\"")),
                }
            }
            "extras" => options.extras = parse_extras(v, line)?,
            _ => {
                let param = Param::from_name(key).ok_or_else(|| ConfigError {
                    line: Some(line),
                    field: field.clone(),
                    message: format!("unknown key `{key}`"),
                })?;
                if grid.contains_key(&param) {
                    return Err(ConfigError {
                        line: Some(line),
                        field,
                        message: format!("`{key}` is also swept in the grid (line {})", grid_lines[&param]),
                    });
                }
                let x = numeric(v).ok_or_else(|| ConfigError {
                    line: Some(line),
                    field: field.clone(),
                    message: "expected a number".into(),
                })?;
                param.check(x).map_err(|message| ConfigError {
                    line: Some(line),
                    field,
                    message,
                })?;
                fixed.insert(param, x);
            }
        }
    }
    for param in Param::ALL {
        if !grid.contains_key(&param) && !fixed.contains_key(&param) {
            if let Some(v) = param.default_value() {
                fixed.insert(param, v);
            }
        }
    }

    let spec = SweepSpec {
        mode,
        grid,
        fixed,
        options,
        seeds: raw.seeds.unwrap_or_else(|| vec![0]),
        output_path: raw.output.map(PathBuf::from),
    };
    validate(&spec, target_given)?;
    Ok(spec)
}

fn rule(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        field: field.into(),
        message: message.into(),
    }
}

fn validate(spec: &SweepSpec, target_given: bool) -> Result<(), ConfigError> {
    let has = |p: Param| spec.grid.contains_key(&p) || spec.fixed.contains_key(&p);
    match (has(Param::Psi1), has(Param::Ratio)) {
        (false, false) => return Err(rule("psi1", "give psi1 or ratio in grid or fixed")),
        (true, true) => return Err(rule("ratio", "psi1 and ratio are alternatives; give only one")),
        _ => {}
    }
    if spec.seeds.is_empty() {
        return Err(rule("seeds", "needs at least one seed"));
    }
    if target_given && spec.mode != Mode::Compare {
        return Err(rule("fixed.target", "only compare sweeps take a target"));
    }
    let points = spec.points();
    let sim = spec.mode.is_simulation();
    for pt in &points {
        let k = pt.get(Param::K);
        if sim && !k.is_finite() {
            return Err(rule("K", "K = inf is only available in theory mode"));
        }
        if !sim {
            continue;
        }
        let d = pt.count(Param::D);
        let p = (pt.psi1() * d as f64).round();
        let n = (pt.get(Param::Psi2) * d as f64).round();
        if p < 1.0 || n < 1.0 {
            return Err(rule("D", format!("D = {d} gives no features or no samples")));
        }
        let needs_single = spec.mode == Mode::Decompose
            || (spec.mode == Mode::Compare && spec.options.target == Target::Decomposition);
        if needs_single && k != 1.0 {
            return Err(rule("K", "the empirical decomposition is defined for K = 1"));
        }
        let runs_ensembles = spec.mode == Mode::Ensemble
            || (spec.mode == Mode::Compare && spec.options.target == Target::Error);
        if runs_ensembles && spec.options.method == Method::Divide && (n as u64) % (k as u64) != 0 {
            return Err(rule("K", format!("K = {k} does not divide N = {n}")));
        }
        let traces = spec.mode == Mode::Simulate || (spec.mode == Mode::Compare && spec.options.target == Target::Psi);
        if traces && spec.options.model != Model::GaussianCovariate {
            return Err(rule("fixed.model", "trace estimates need model = \"gaussian_covariate\""));
        }
        if traces && pt.count(Param::NRuns) < 2 {
            return Err(rule("n_runs", "trace estimates need n_runs >= 2"));
        }
    }
    if spec.options.model == Model::TrueRf && matches!(spec.options.activation, Activation::Moments(_)) {
        return Err(rule("fixed.activation", "true_rf needs an explicit activation"));
    }
    Ok(())
}
