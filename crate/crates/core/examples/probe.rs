// dev scratch — delete before release
use std::time::Instant;

use cslr_core::*;

fn run_one(train_s: &Dataset, test_s: &Dataset, mask: &[bool], config: &CslrConfig, tag: &str) {
    let t0 = Instant::now();
    let (m, rep) = train_cslr(train_s, config).unwrap();
    let (_, pred) = predict_dataset(&m, test_s).unwrap();
    println!(
        "{tag}: n_sel {} acc {:.3} f1 {:.3} iters {} {:?} [{:.1?}]",
        m.n_selected(),
        accuracy(&pred, test_s.labels()).unwrap(),
        selection_score(&m.selected_mask(), mask).unwrap().f1,
        rep.iterations(),
        rep.termination,
        t0.elapsed()
    );
}

fn main() {
    let spec = SyntheticSpec::new(300, 300, 500, 5, 3).unwrap();
    let (train, test, w, mask) = generate_synthetic(&spec);
    let stats = fit_standardize(&train);
    let train_s = apply_standardize(&stats, &train).unwrap();
    let test_s = apply_standardize(&stats, &test).unwrap();
    let relevant: Vec<f64> = w.iter().take(5).copied().collect();
    println!("true relevant weights: {relevant:?}");

    for sigma in [0.4, 0.5, 0.6] {
        let config = CslrConfig::new(sigma);
        run_one(&train_s, &test_s, &mask, &config, &format!("fast s{sigma} default"));

        let mut big = CslrConfig::new(sigma);
        big.inner_max_iter = 2000;
        big.max_hq_iter = 100;
        run_one(&train_s, &test_s, &mask, &big, &format!("fast s{sigma} bigbudget"));

        let mut exp = CslrConfig::new(sigma);
        exp.alpha_rule = AlphaRule::Expectation;
        run_one(&train_s, &test_s, &mask, &exp, &format!("expc s{sigma} default"));
    }
}
