use std::process::Command;

use lazy_descent::{parse_config, parse_csv, parse_json, render, run_sweep, Format, ResultRow, Value};
use proptest::prelude::*;
use rf_lab::Execution;

const SMALL_SIM: &str = r#"
mode = "ensemble"
seeds = [1, 2]
[grid]
psi1 = [0.5, 2.0]
K = [1, 2]
[fixed]
D = 20
n_runs = 3
snr = 2.0
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lazy-descent"))
}

fn cell_f64(s: &str) -> f64 {
    match s {
        "true" => 1.0,
        "false" => 0.0,
        _ => s.parse().unwrap_or(f64::NAN),
    }
}

fn same_value(v: &Value, text: &str) -> bool {
    match v {
        Value::Real(x) => {
            let y = cell_f64(text);
            x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan())
        }
        Value::Int(i) => text.parse::<u64>().ok() == Some(*i),
        Value::Text(s) => s == text,
        Value::Bool(b) => text == b.to_string(),
    }
}

fn roundtrips(rows: &[ResultRow]) {
    for format in [Format::Csv, Format::Json] {
        let text = render(rows, format).unwrap();
        let back = match format {
            Format::Csv => parse_csv(&text).unwrap(),
            Format::Json => parse_json(&text).unwrap(),
        };
        assert_eq!(back.len(), rows.len());
        for (row, parsed) in rows.iter().zip(&back) {
            assert_eq!(row.columns.len(), parsed.len());
            for ((name, v), (pname, ptext)) in row.columns.iter().zip(parsed) {
                assert_eq!(name, pname);
                assert!(same_value(v, ptext), "{format:?} {name}: {v:?} vs {ptext}");
            }
        }
    }
}

#[test]
fn row_count_is_grid_times_seeds() {
    let spec = parse_config(SMALL_SIM).unwrap();
    let rows = run_sweep(&spec, Execution::Parallel).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert_eq!(rows.len(), spec.n_rows());
    let theory = parse_config("mode = \"theory\"\nseeds = [1, 2, 3]\n[grid]\npsi1 = [0.5, 2]\nlambda = [1e-3, 1e-1]\n")
        .unwrap();
    assert_eq!(run_sweep(&theory, Execution::Parallel).unwrap().len(), 4);
}

#[test]
fn parallel_and_serial_sweeps_agree() {
    let spec = parse_config(SMALL_SIM).unwrap();
    let a = run_sweep(&spec, Execution::Parallel).unwrap();
    let b = run_sweep(&spec, Execution::Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rows_are_sorted_by_grid_then_seed() {
    let spec = parse_config(SMALL_SIM).unwrap();
    let rows = run_sweep(&spec, Execution::Parallel).unwrap();
    let keys: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| (r.number("psi1").unwrap(), r.number("K").unwrap(), r.number("seed").unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn outputs_round_trip() {
    let spec = parse_config(SMALL_SIM).unwrap();
    roundtrips(&run_sweep(&spec, Execution::Parallel).unwrap());
    let theory = parse_config("mode = \"theory\"\n[grid]\npsi1 = [0.5, 1, 3]\n[fixed]\nK = inf\n").unwrap();
    roundtrips(&run_sweep(&theory, Execution::Parallel).unwrap());
}

#[test]
fn compare_rows_carry_z_scores() {
    let text = r#"
mode = "compare"
[grid]
psi1 = [2.0]
[fixed]
lambda = 1e-2
D = 40
n_runs = 4
target = "psi"
"#;
    let rows = run_sweep(&parse_config(text).unwrap(), Execution::Parallel).unwrap();
    let r = &rows[0];
    assert!(r.converged());
    for name in ["psi1_term", "psi2_v", "psi3_v", "psi2_e", "psi3_e", "psi2_d"] {
        assert!(r.number(&format!("z_{name}")).unwrap().is_finite());
        assert!(r.number(&format!("sim_{name}_se")).unwrap() > 0.0);
    }
    let theory = run_sweep(&parse_config("mode = \"theory\"\n[grid]\npsi1 = [2]\n").unwrap(), Execution::Parallel)
        .unwrap();
    assert!(theory[0].columns.iter().all(|(n, _)| !n.starts_with("z_")));
}

#[test]
fn cli_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, SMALL_SIM).unwrap();
    let mut outs = Vec::new();
    for (i, jobs) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}.csv"));
        let status = bin()
            .args(["ensemble", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert!(status.success());
        outs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs.pop().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(!text.contains('\r'));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "mode = \"theory\"\n[grid]\npsi1 = [1]\nlambda = [0]\n").unwrap();
    let out = bin().arg("theory").arg("--config").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda must be > 0"));

    let out = bin()
        .args(["theory", "--preset", "fig3_low_reg", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    let out = bin().args(["theory", "--preset", "fig3_high_reg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 51);

    let json = dir.path().join("seed.json");
    let status = bin()
        .args(["ensemble", "--config"])
        .arg(dir.path().join("missing.toml"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4));
    std::fs::write(dir.path().join("s.toml"), SMALL_SIM).unwrap();
    let status = bin()
        .args(["ensemble", "--seed", "77", "--config"])
        .arg(dir.path().join("s.toml"))
        .arg("--out")
        .arg(&json)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = parse_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.iter().any(|(k, v)| k == "seed" && v == "77")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn theory_rows_round_trip(psi1 in 0.1..10.0f64, psi2 in 0.2..5.0f64, log_lambda in -6.0..1.0f64, k in 1u64..50) {
        let text = format!(
            "mode = \"theory\"\n[grid]\npsi1 = [{psi1:e}]\n[fixed]\npsi2 = {psi2:e}\nlambda = {:e}\nK = {k}\n",
            10f64.powf(log_lambda)
        );
        let rows = run_sweep(&parse_config(&text).unwrap(), Execution::Sequential).unwrap();
        roundtrips(&rows);
    }
}
