use std::cmp::Ordering;
use std::fs::OpenOptions;
use std::path::PathBuf;

use rf_lab::exec::map_indices;
use rf_lab::{
    empirical_decomposition, ensemble_run, estimate_psi_traces, Activation, EnsembleMode, Execution, Model,
    SimConfig, TraceMode,
};
use rf_theory::{
    decompose_error, divide_conquer_error, ensemble_error, optimal_lambda, psi_terms, psi_terms_at, solve_saddle,
    ErrorDecomposition, ModelParams, PsiKind, PsiSet,
};
use thiserror::Error;

use crate::config::{Method, Mode, Param, Point, SweepSpec, Target};

/// Regularization grid for the optimal single-learner comparison.
pub const LAMBDA_GRID: (f64, f64, usize) = (1e-5, 1e2, 50);

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

/// One output line: the full parameter point followed by the results.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultRow {
    pub columns: Vec<(String, Value)>,
}

impl ResultRow {
    fn push(&mut self, name: impl Into<String>, value: Value) {
        self.columns.push((name.into(), value));
    }

    fn real(&mut self, name: impl Into<String>, v: f64) {
        self.push(name, Value::Real(v));
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Numeric view of a column; integers widen, text and flags give `None`.
    pub fn number(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            Value::Real(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self.get("converged"), Some(Value::Bool(true)))
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

const PSI_NAMES: [&str; 6] = ["psi1_term", "psi2_v", "psi3_v", "psi2_e", "psi3_e", "psi2_d"];
const PARTS: [&str; 5] = ["noise", "init", "samp", "bias", "total"];

fn parts(d: &ErrorDecomposition) -> [f64; 5] {
    [d.noise, d.init, d.samp, d.bias, d.total]
}

fn nan_decomposition() -> ErrorDecomposition {
    ErrorDecomposition {
        noise: f64::NAN,
        init: f64::NAN,
        samp: f64::NAN,
        bias: f64::NAN,
        total: f64::NAN,
    }
}

fn nan_psis() -> PsiSet {
    PsiSet::from_fn(|_| f64::NAN)
}

/// Deterministic targets are exact, so only the simulation error enters.
fn z_score(sim: f64, theory: f64, se: f64) -> f64 {
    if se > 0.0 {
        (sim - theory) / se
    } else {
        f64::NAN
    }
}

struct Theory {
    q: f64,
    r: f64,
    psis: PsiSet,
    parts: ErrorDecomposition,
    total_divide: f64,
    total_k1: f64,
    total_double_p: f64,
    lambda_opt: f64,
    total_opt: f64,
    converged: bool,
}

fn model_params(spec: &SweepSpec, pt: &Point) -> ModelParams {
    ModelParams::new(pt.psi1(), pt.get(Param::Psi2), pt.get(Param::Lambda))
        .with_moments(spec.options.activation.moments())
        .with_snr(pt.get(Param::Snr))
}

fn lambda_grid() -> Vec<f64> {
    let (lo, hi, n) = LAMBDA_GRID;
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

fn theory(spec: &SweepSpec, pt: &Point) -> Theory {
    let mut out = Theory {
        q: f64::NAN,
        r: f64::NAN,
        psis: nan_psis(),
        parts: nan_decomposition(),
        total_divide: f64::NAN,
        total_k1: f64::NAN,
        total_double_p: f64::NAN,
        lambda_opt: f64::NAN,
        total_opt: f64::NAN,
        converged: false,
    };
    let p = model_params(spec, pt);
    let k = pt.k();
    let Ok(saddle) = solve_saddle(&p) else {
        return out;
    };
    out.q = saddle.q;
    out.r = saddle.r;
    let Ok(psis) = psi_terms_at(&p, &saddle) else {
        return out;
    };
    out.psis = psis;
    let mut ok = true;
    match spec.options.method {
        Method::Ensemble => match decompose_error(&psis, &p, k) {
            Ok(d) => out.parts = d,
            Err(_) => ok = false,
        },
        Method::Divide => match divide_conquer_error(&p, k) {
            Ok(t) => out.parts.total = t,
            Err(_) => ok = false,
        },
    }
    let extras = spec.options.extras;
    if extras.divide {
        out.total_divide = divide_conquer_error(&p, k).unwrap_or(f64::NAN);
        ok &= out.total_divide.is_finite();
    }
    if extras.double_p {
        out.total_k1 = ensemble_error(&psis, &p, 1).unwrap_or(f64::NAN);
        let doubled = p.with_psi1(2.0 * p.psi1);
        out.total_double_p = psi_terms(&doubled)
            .and_then(|s| ensemble_error(&s, &doubled, 1))
            .unwrap_or(f64::NAN);
        ok &= out.total_k1.is_finite() && out.total_double_p.is_finite();
    }
    if extras.optimal_lambda {
        match optimal_lambda(&p, 1, &lambda_grid()) {
            Ok((l, e)) => {
                out.lambda_opt = l;
                out.total_opt = e;
            }
            Err(_) => ok = false,
        }
    }
    out.converged = ok;
    out
}

fn push_theory(row: &mut ResultRow, spec: &SweepSpec, t: &Theory) {
    row.real("q_star", t.q);
    row.real("r_star", t.r);
    for (kind, name) in PsiKind::ALL.iter().zip(PSI_NAMES) {
        row.real(name, t.psis.get(*kind));
    }
    for (name, v) in PARTS.iter().zip(parts(&t.parts)) {
        row.real(*name, v);
    }
    let extras = spec.options.extras;
    if extras.divide {
        row.real("total_divide", t.total_divide);
    }
    if extras.double_p {
        row.real("total_k1", t.total_k1);
        row.real("total_double_p", t.total_double_p);
    }
    if extras.optimal_lambda {
        row.real("lambda_opt", t.lambda_opt);
        row.real("total_opt", t.total_opt);
    }
}

fn sim_config(spec: &SweepSpec, pt: &Point, seed: u64) -> SimConfig {
    let snr = pt.get(Param::Snr);
    let mut c = SimConfig::from_ratios(pt.count(Param::D), pt.psi1(), pt.get(Param::Psi2), pt.get(Param::Lambda))
        .with_teacher(1.0, 1.0 / snr)
        .with_activation(spec.options.activation)
        .with_model(spec.options.model)
        .with_seed(seed);
    c.n_test = pt.count(Param::NTest);
    c
}

fn ensemble_mode(m: Method) -> EnsembleMode {
    match m {
        Method::Ensemble => EnsembleMode::Ensemble,
        Method::Divide => EnsembleMode::DivideConquer,
    }
}

/// Parameter columns shown for this sweep, in canonical order.
fn param_columns(spec: &SweepSpec) -> Vec<Param> {
    let mut cols = vec![Param::Psi1];
    if spec.grid.contains_key(&Param::Ratio) || spec.fixed.contains_key(&Param::Ratio) {
        cols.push(Param::Ratio);
    }
    cols.extend([Param::Psi2, Param::Lambda, Param::K, Param::Snr]);
    let target = spec.options.target;
    let true_rf = spec.options.model == Model::TrueRf;
    let extra: &[Param] = match spec.mode {
        Mode::Theory => &[],
        Mode::Simulate => &[Param::D, Param::NRuns],
        Mode::Ensemble => &[Param::D, Param::NRuns, Param::NTest],
        Mode::Decompose => &[Param::D, Param::NX, Param::NTheta, Param::NEps, Param::NTest],
        Mode::Compare => match target {
            Target::Psi => &[Param::D, Param::NRuns],
            Target::Error => &[Param::D, Param::NRuns, Param::NTest],
            Target::Decomposition => &[Param::D, Param::NX, Param::NTheta, Param::NEps, Param::NTest],
        },
    };
    cols.extend(extra.iter().filter(|p| **p != Param::NTest || true_rf));
    for p in spec.grid.keys() {
        if !cols.contains(p) {
            cols.push(*p);
        }
    }
    cols.sort();
    cols
}

fn param_value(p: Param, v: f64) -> Value {
    if p.is_integer() && v.is_finite() {
        Value::Int(v as u64)
    } else {
        Value::Real(v)
    }
}

fn activation_name(a: &Activation) -> &'static str {
    match a {
        Activation::Relu => "relu",
        Activation::Linear => "linear",
        Activation::Moments(_) => "moments",
    }
}

fn evaluate(spec: &SweepSpec, pt: &Point, seed: u64, exec: Execution) -> ResultRow {
    let mut row = ResultRow::default();
    for p in param_columns(spec) {
        row.push(p.name(), param_value(p, pt.get(p)));
    }
    row.push("activation", Value::Text(activation_name(&spec.options.activation).into()));
    let shows_method = matches!(spec.mode, Mode::Theory | Mode::Ensemble)
        || (spec.mode == Mode::Compare && spec.options.target == Target::Error);
    if shows_method {
        let m = match spec.options.method {
            Method::Ensemble => "ensemble",
            Method::Divide => "divide",
        };
        row.push("method", Value::Text(m.into()));
    }
    if spec.mode.is_simulation() {
        let model = match spec.options.model {
            Model::GaussianCovariate => "gaussian_covariate",
            Model::TrueRf => "true_rf",
        };
        row.push("model", Value::Text(model.into()));
        row.push("seed", Value::Int(seed));
    }
    let config = sim_config(spec, pt, seed);
    let runs = pt.count(Param::NRuns);
    let converged = match spec.mode {
        Mode::Theory => {
            let t = theory(spec, pt);
            push_theory(&mut row, spec, &t);
            t.converged
        }
        Mode::Simulate => push_traces(&mut row, "", &config, runs, exec, None),
        Mode::Decompose => push_decomposition(&mut row, "", &config, pt, exec, None),
        Mode::Ensemble => push_ensemble(&mut row, "", spec, &config, pt, exec, None),
        Mode::Compare => {
            let t = theory(spec, pt);
            push_theory(&mut row, spec, &t);
            let sim_ok = match spec.options.target {
                Target::Psi => push_traces(&mut row, "sim_", &config, runs, exec, Some(&t.psis)),
                Target::Error => push_ensemble(&mut row, "sim_", spec, &config, pt, exec, Some(t.parts.total)),
                Target::Decomposition => push_decomposition(&mut row, "sim_", &config, pt, exec, Some(&t.parts)),
            };
            t.converged && sim_ok
        }
    };
    row.push("converged", Value::Bool(converged));
    row
}

fn push_traces(
    row: &mut ResultRow,
    prefix: &str,
    config: &SimConfig,
    runs: usize,
    exec: Execution,
    theory: Option<&PsiSet>,
) -> bool {
    let est = estimate_psi_traces(config, runs, TraceMode::Independent, exec).ok();
    for (kind, name) in PsiKind::ALL.iter().zip(PSI_NAMES) {
        let (m, se) = est
            .as_ref()
            .map_or((f64::NAN, f64::NAN), |e| (e.mean.get(*kind), e.std_error.get(*kind)));
        row.real(format!("{prefix}{name}"), m);
        row.real(format!("{prefix}{name}_se"), se);
        if let Some(t) = theory {
            row.real(format!("z_{name}"), z_score(m, t.get(*kind), se));
        }
    }
    est.is_some()
}

fn push_decomposition(
    row: &mut ResultRow,
    prefix: &str,
    config: &SimConfig,
    pt: &Point,
    exec: Execution,
    theory: Option<&ErrorDecomposition>,
) -> bool {
    let est = empirical_decomposition(
        config,
        pt.count(Param::NX),
        pt.count(Param::NTheta),
        pt.count(Param::NEps),
        exec,
    )
    .ok();
    let (m, se) = est
        .as_ref()
        .map_or((nan_decomposition(), nan_decomposition()), |e| (e.estimate, e.std_error));
    let theory = theory.map(parts);
    for (i, name) in PARTS.iter().enumerate() {
        let (v, s) = (parts(&m)[i], parts(&se)[i]);
        row.real(format!("{prefix}{name}"), v);
        row.real(format!("{prefix}{name}_se"), s);
        if let Some(t) = theory {
            row.real(format!("z_{name}"), z_score(v, t[i], s));
        }
    }
    est.is_some()
}

fn push_ensemble(
    row: &mut ResultRow,
    prefix: &str,
    spec: &SweepSpec,
    config: &SimConfig,
    pt: &Point,
    exec: Execution,
    theory: Option<f64>,
) -> bool {
    let est = ensemble_run(
        config,
        pt.k() as usize,
        ensemble_mode(spec.options.method),
        pt.count(Param::NRuns),
        exec,
    )
    .ok();
    let (m, se, sd) = est
        .as_ref()
        .map_or((f64::NAN, f64::NAN, f64::NAN), |e| (e.mean, e.std_error, e.std_dev));
    row.real(format!("{prefix}mean"), m);
    row.real(format!("{prefix}std_error"), se);
    row.real(format!("{prefix}std_dev"), sd);
    if let Some(t) = theory {
        row.real("z_total", z_score(m, t, se));
    }
    est.is_some()
}

fn sort_key(spec: &SweepSpec, pt: &Point, seed: u64) -> Vec<f64> {
    let mut key: Vec<f64> = spec.grid.keys().map(|p| pt.get(*p)).collect();
    key.push(seed as f64);
    key
}

/// Evaluates every grid point (times every seed in simulation modes).
///
/// Failures at a point yield a row with `converged = false` and NaN
/// outputs. Rows come back sorted lexicographically by grid coordinates,
/// then seed, whatever the execution order.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<ResultRow>, SweepError> {
    if let Some(path) = &spec.output_path {
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| SweepError::Io {
                path: path.clone(),
                source,
            })?;
    }
    let points = spec.points();
    let seeds: Vec<u64> = if spec.mode.is_simulation() {
        spec.seeds.clone()
    } else {
        vec![spec.seeds[0]]
    };
    let ns = seeds.len();
    let mut rows = map_indices(exec, points.len() * ns, |i| {
        let (pt, seed) = (&points[i / ns], seeds[i % ns]);
        (sort_key(spec, pt, seed), evaluate(spec, pt, seed, exec))
    });
    rows.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_config;

    #[test]
    fn one_point_theory_sums() {
        let spec = parse_config("mode = \"theory\"\n[grid]\npsi1 = [2]\n").unwrap();
        let rows = run_sweep(&spec, Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!(r.converged());
        let sum: f64 = ["noise", "init", "samp", "bias"].iter().map(|c| r.number(c).unwrap()).sum();
        assert!((sum - r.number("total").unwrap()).abs() <= 1e-12 * sum);
    }

    #[test]
    fn lambda_grid_spans_the_range() {
        let g = lambda_grid();
        assert_eq!(g.len(), 50);
        assert!((g[0] - 1e-5).abs() < 1e-18 && (g[49] - 1e2).abs() < 1e-10);
    }
}
