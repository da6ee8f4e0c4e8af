use crate::exec::{map_indices, Execution};
use crate::{
    make_dataset, seed, test_error_closed_form, test_error_mc, LabError, Learner, Model, SimConfig,
    SimEstimate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    /// `K` learners on the full dataset.
    Ensemble,
    /// `K` learners, each on its own contiguous block of `N/K` samples.
    DivideConquer,
}

fn one_run(config: &SimConfig, k: usize, mode: EnsembleMode) -> Result<f64, LabError> {
    let ds = make_dataset(config)?;
    let block = config.n / k;
    let learners = (0..k)
        .map(|j| {
            let mut rng = seed::stream(config.seed, &[seed::FEATURES, j as u64]);
            match mode {
                EnsembleMode::Ensemble => Learner::train(config, &ds.x, &ds.y, &mut rng),
                EnsembleMode::DivideConquer => {
                    let x = ds.x.rows(j * block, block).into_owned();
                    let y = ds.y.rows(j * block, block).into_owned();
                    Learner::train(config, &x, &y, &mut rng)
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    match config.model {
        Model::GaussianCovariate => test_error_closed_form(&learners, &ds, config),
        Model::TrueRf => Ok(test_error_mc(&learners, &ds, config, config.n_test)?.mean),
    }
}

/// Test error of the averaged predictor of `k` learners over `n_runs`
/// independent experiments.
///
/// Run `r` uses the seed derived from the root seed and `r`, so every run
/// draws a fresh teacher, dataset and set of learners.
pub fn ensemble_run(
    config: &SimConfig,
    k: usize,
    mode: EnsembleMode,
    n_runs: usize,
    exec: Execution,
) -> Result<SimEstimate, LabError> {
    config.validate()?;
    if k == 0 || n_runs == 0 {
        return Err(LabError::Config("K and n_runs must be >= 1".into()));
    }
    if mode == EnsembleMode::DivideConquer && config.n % k != 0 {
        return Err(LabError::Config(format!("K={k} does not divide N={}", config.n)));
    }
    let errors = map_indices(exec, n_runs, |r| {
        let run = SimConfig {
            seed: seed::derive(config.seed, &[seed::RUN, r as u64]),
            ..*config
        };
        one_run(&run, k, mode)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SimEstimate::from_samples(&errors, k, 1, config.seed))
}
