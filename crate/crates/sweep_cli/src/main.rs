use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lazy_descent::{emit, parse_config_with, preset, run_sweep, Format, Mode, PRESET_NAMES};
use rf_lab::Execution;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "lazy-descent", version, about = "Random-features ensemble sweeps: theory and simulation")]
struct Cli {
    mode: Mode,
    /// TOML sweep description.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in sweep, one of: fig2, fig3_low_reg, fig3_high_reg, fig5,
    /// fig_ens_vs_over, fig_ens_vs_reg, figA_scalings, figA_divide, figA_under_over.
    #[arg(long)]
    preset: Option<String>,
    /// Output file; stdout when neither this nor the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the output file's extension, then CSV.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Replaces the config's seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("lazy-descent: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let text = match (&cli.config, &cli.preset) {
        (Some(path), None) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(EXIT_IO, format!("{}: {e}", path.display())),
        },
        (None, Some(name)) => match preset(name) {
            Some(t) => t.to_string(),
            None => {
                return fail(
                    EXIT_CONFIG,
                    format!("unknown preset `{name}` (known: {})", PRESET_NAMES.join(", ")),
                )
            }
        },
        _ => return fail(EXIT_CONFIG, "give exactly one of --config or --preset"),
    };
    let mut spec = match parse_config_with(&text, Some(cli.mode)) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(s) = cli.seed {
        spec.seeds = vec![s];
    }
    if let Some(out) = cli.out {
        spec.output_path = Some(out);
    }
    let format = cli
        .format
        .unwrap_or_else(|| spec.output_path.as_deref().map_or(Format::Csv, Format::from_path));
    let exec = if cli.jobs == 1 { Execution::Sequential } else { Execution::Parallel };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let rows = match pool.install(|| run_sweep(&spec, exec)) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_IO, e),
    };
    if let Err(e) = emit(&rows, format, spec.output_path.as_deref()) {
        return fail(EXIT_IO, e);
    }
    if rows.iter().all(|r| !r.converged()) {
        return fail(EXIT_NUMERICAL, "no grid point converged");
    }
    ExitCode::SUCCESS
}
