use qtradeoff::experiment::{
    analytic_tradeoff, estimate_tradeoff, simulate_dataset, ExperimentConfig, InterferometerSetting, Shots,
};

#[test]
fn finite_shots_bias_disturbance_upward() {
    for gamma in [0.3, 0.7] {
        let setting = InterferometerSetting::for_gamma(gamma).unwrap();
        let analytic = analytic_tradeoff(&setting).unwrap().disturbance;
        let estimates: Vec<f64> = (0..120)
            .map(|seed| {
                let cfg = ExperimentConfig::new(setting, Shots::Count(20_000), seed);
                estimate_tradeoff(&simulate_dataset(&cfg).unwrap()).unwrap().disturbance_hat
            })
            .collect();
        let n = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / n;
        let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let stderr = (var / n).sqrt();
        assert!(mean >= analytic - 2.0 * stderr, "γ={gamma}: mean {mean} vs {analytic} ± {stderr}");
    }
}

#[test]
fn outputs_are_reproducible() {
    let setting = InterferometerSetting::new(0.9, 1.2).unwrap();
    let mut cfg = ExperimentConfig::new(setting, Shots::Count(50_000), 17);
    cfg.intensity_noise = 0.01;
    let a = serde_json::to_string(&simulate_dataset(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&simulate_dataset(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    cfg.seed = 18;
    assert_ne!(a, serde_json::to_string(&simulate_dataset(&cfg).unwrap()).unwrap());
}
