use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rf_lab::{
    draw_noise, empirical_decomposition, ensemble_run, estimate_psi_traces, featurize, make_dataset, ridge_loss,
    seed, test_error_closed_form, test_error_mc, Activation, EnsembleMode, Execution, Learner, Model, SimConfig,
    TraceMode,
};
use rf_theory::{divide_conquer_error, ActivationMoments, ModelParams};

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn identical_configs_are_bitwise_identical() {
    let c = SimConfig::from_ratios(30, 1.5, 1.0, 1e-3).with_teacher(1.0, 0.5).with_seed(11);
    let (a, b) = (make_dataset(&c).unwrap(), make_dataset(&c).unwrap());
    assert_eq!(a, b);
    let la = Learner::train(&c, &a.x, &a.y, &mut seed::stream(c.seed, &[seed::FEATURES])).unwrap();
    let lb = Learner::train(&c, &b.x, &b.y, &mut seed::stream(c.seed, &[seed::FEATURES])).unwrap();
    assert_eq!(la, lb);
}

#[test]
fn execution_order_does_not_change_results() {
    let c = SimConfig::from_ratios(40, 2.0, 1.0, 1e-3).with_teacher(1.0, 0.7).with_seed(3);
    let t = |e| estimate_psi_traces(&c, 6, TraceMode::Independent, e).unwrap();
    assert_eq!(t(Execution::Parallel), t(Execution::Sequential));
    let r = |e| ensemble_run(&c, 3, EnsembleMode::Ensemble, 5, e).unwrap();
    assert_eq!(r(Execution::Parallel), r(Execution::Sequential));
    let d = |e| empirical_decomposition(&c, 3, 3, 3, e).unwrap();
    assert_eq!(d(Execution::Parallel), d(Execution::Sequential));
}

#[test]
fn disjoint_seed_ranges_are_uncorrelated() {
    let c = SimConfig::from_ratios(40, 1.5, 1.0, 1e-2).with_teacher(1.0, 0.5);
    let n = 200;
    let err = |s: u64| ensemble_run(&c.with_seed(s), 1, EnsembleMode::Ensemble, 1, Execution::Sequential)
        .unwrap()
        .mean;
    let a: Vec<f64> = (0..n).map(err).collect();
    let b: Vec<f64> = (10_000..10_000 + n).map(err).collect();
    let (ma, _) = mean_se(&a);
    let (mb, _) = mean_se(&b);
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>();
    let sa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>().sqrt();
    let sb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>().sqrt();
    let corr = cov / (sa * sb);
    // under independence sqrt(n) * corr is approximately standard normal
    assert!(corr.abs() * (n as f64).sqrt() < 3.0, "corr {corr}");
}

#[test]
fn label_noise_variance() {
    let tau = 0.7;
    let eps = draw_noise(10_000, tau, &mut ChaCha8Rng::seed_from_u64(9));
    let sq: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let (m, se) = mean_se(&sq);
    assert!((m - tau * tau).abs() < 5.0 * se);
}

#[test]
fn relu_feature_variance_matches_moments() {
    let mut c = SimConfig::from_ratios(200, 1.0, 10.0, 1e-2).with_model(Model::TrueRf);
    c.seed = 17;
    let ds = make_dataset(&c).unwrap();
    let l = Learner::draw(&c, c.n, &mut seed::stream(c.seed, &[seed::FEATURES]));
    let z = featurize(&l, &ds.x, &c).unwrap();
    let rows: Vec<f64> = z.row_iter().map(|r| r.norm_squared() * c.d as f64 / c.p as f64).collect();
    let (m, se) = mean_se(&rows);
    let mom = ActivationMoments::relu();
    let want = mom.mu1 * mom.mu1 + mom.mu_star_sq;
    assert!((m - want).abs() < 5.0 * se, "{m} vs {want} (se {se})");
}

#[test]
fn covariate_features_without_residual_part() {
    let moments = ActivationMoments::new(0.0, 0.8, 0.0).unwrap();
    let c = SimConfig::from_ratios(25, 1.2, 1.0, 1e-2).with_activation(Activation::Moments(moments));
    let ds = make_dataset(&c).unwrap();
    let l = Learner::draw(&c, c.n, &mut seed::stream(1, &[]));
    let z = featurize(&l, &ds.x, &c).unwrap();
    let want = &ds.x * l.theta.transpose() * (0.8 / c.d as f64);
    assert!((z - want).amax() < 1e-14);
}

#[test]
fn closed_form_agrees_with_monte_carlo() {
    let c = SimConfig::from_ratios(100, 1.5, 1.0, 1e-3).with_teacher(1.0, 0.5).with_seed(21);
    let ds = make_dataset(&c).unwrap();
    let learners: Vec<Learner> = (0..2)
        .map(|k| Learner::train(&c, &ds.x, &ds.y, &mut seed::stream(c.seed, &[seed::FEATURES, k])).unwrap())
        .collect();
    let exact = test_error_closed_form(&learners, &ds, &c).unwrap();
    let single = test_error_closed_form(&learners[..1], &ds, &c).unwrap();
    assert!(exact < single);
    let mc = test_error_mc(&learners, &ds, &c, 100_000).unwrap();
    assert!((mc.mean - exact).abs() < 3.0 * mc.std_error, "{} vs {exact} ({})", mc.mean, mc.std_error);
}

#[test]
fn heavy_ridge_returns_teacher_norm() {
    let c = SimConfig::from_ratios(40, 1.0, 1.0, 1e10).with_teacher(1.3, 0.2).with_seed(2);
    let ds = make_dataset(&c).unwrap();
    let l = Learner::train(&c, &ds.x, &ds.y, &mut seed::stream(2, &[])).unwrap();
    assert!(l.a_hat.norm() < 1e-8);
    let e = test_error_closed_form(&[l], &ds, &c).unwrap();
    assert!((e - 1.69).abs() < 1e-6);
}

#[test]
fn linear_student_recovers_linear_teacher() {
    let mut c = SimConfig::from_ratios(20, 2.0, 20.0, 1e-8)
        .with_model(Model::TrueRf)
        .with_activation(Activation::Linear)
        .with_seed(8);
    c.n_test = 5_000;
    let ds = make_dataset(&c).unwrap();
    let l = Learner::train(&c, &ds.x, &ds.y, &mut seed::stream(8, &[])).unwrap();
    let e = test_error_mc(&[l], &ds, &c, c.n_test).unwrap();
    assert!(e.mean < 1e-8, "{}", e.mean);
}

#[test]
fn covariate_and_true_features_agree_at_scale() {
    let base = SimConfig::from_ratios(400, 1.0, 1.0, 1e-2).with_seed(40);
    let mut rf = base.with_model(Model::TrueRf);
    rf.n_test = 10_000;
    let gc = ensemble_run(&base, 1, EnsembleMode::Ensemble, 12, Execution::Parallel).unwrap();
    let tr = ensemble_run(&rf, 1, EnsembleMode::Ensemble, 12, Execution::Parallel).unwrap();
    let se = (gc.std_error.powi(2) + tr.std_error.powi(2)).sqrt();
    assert!((gc.mean - tr.mean).abs() < 3.0 * se, "{} vs {} (se {se})", gc.mean, tr.mean);
}

#[test]
fn divide_and_conquer_matches_halved_theory() {
    let c = SimConfig::from_ratios(200, 2.0, 1.0, 1e-2).with_teacher(1.0, 0.5).with_seed(31);
    let sim = ensemble_run(&c, 2, EnsembleMode::DivideConquer, 20, Execution::Parallel).unwrap();
    let theory = divide_conquer_error(&ModelParams::new(2.0, 1.0, 1e-2).with_teacher(1.0, 0.5), 2).unwrap();
    assert!((sim.mean - theory).abs() < 3.0 * sim.std_error, "{} vs {theory} ({})", sim.mean, sim.std_error);
}

#[test]
fn noiseless_decomposition_has_zero_noise() {
    let c = SimConfig::from_ratios(30, 2.0, 1.0, 1e-3).with_seed(6);
    let d = empirical_decomposition(&c, 3, 3, 4, Execution::Parallel).unwrap();
    assert!(d.estimate.noise.abs() < 1e-15);
    assert!(d.std_error.noise.abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fit_minimizes_the_loss(
        d in 10usize..30,
        psi1 in 0.3..3.0f64,
        psi2 in 0.3..3.0f64,
        log_lambda in -6.0..1.0f64,
        root in any::<u64>(),
        dir in prop::collection::vec(-1.0..1.0f64, 90),
    ) {
        let c = SimConfig::from_ratios(d, psi1, psi2, 10f64.powf(log_lambda)).with_teacher(1.0, 0.3).with_seed(root);
        let ds = make_dataset(&c).unwrap();
        let l = Learner::train(&c, &ds.x, &ds.y, &mut seed::stream(root, &[seed::FEATURES])).unwrap();
        let z = featurize(&l, &ds.x, &c).unwrap();
        let delta = DVector::from_iterator(c.p, dir.iter().cycle().copied().take(c.p));
        prop_assume!(delta.norm() > 0.0);
        let delta = delta.normalize() * 1e-3;
        let base = ridge_loss(&z, &ds.y, &l.a_hat, &c);
        let moved = ridge_loss(&z, &ds.y, &(&l.a_hat + delta), &c);
        prop_assert!(moved >= base);
    }

    #[test]
    fn decomposition_telescopes(
        d in 10usize..24,
        psi1 in 0.3..3.0f64,
        log_lambda in -5.0..0.0f64,
        tau in 0.0..1.5f64,
        true_rf in any::<bool>(),
        root in any::<u64>(),
    ) {
        let mut c = SimConfig::from_ratios(d, psi1, 1.0, 10f64.powf(log_lambda)).with_teacher(1.0, tau).with_seed(root);
        if true_rf {
            c.model = Model::TrueRf;
            c.n_test = 300;
        }
        let e = empirical_decomposition(&c, 3, 2, 2, Execution::Sequential).unwrap().estimate;
        let sum = e.noise + e.init + e.samp + e.bias;
        prop_assert!((sum - e.total).abs() <= 1e-10 * e.total.abs().max(1e-300));
        prop_assert!(e.noise >= 0.0);
    }

    #[test]
    fn seeds_fully_determine_estimates(root in any::<u64>()) {
        let c = SimConfig::from_ratios(16, 1.5, 1.0, 1e-2).with_teacher(1.0, 0.4).with_seed(root);
        let a = ensemble_run(&c, 2, EnsembleMode::DivideConquer, 2, Execution::Parallel).unwrap();
        let b = ensemble_run(&c, 2, EnsembleMode::DivideConquer, 2, Execution::Sequential).unwrap();
        prop_assert_eq!(a, b);
    }
}
