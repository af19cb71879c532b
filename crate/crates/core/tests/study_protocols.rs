use mmdnov::rng::derive_seed;
use mmdnov::{
    generate_synthetic, mmd_matrix, power_curves, LabeledCorpus, SynthSpec, TestConfig, Workers,
};

fn gaussian(n: usize, mean: [f64; 2], seed: u64) -> mmdnov::EmbeddingsF64 {
    generate_synthetic(&SynthSpec::gaussian(mean.to_vec(), 1.0, seed).unwrap(), n).unwrap()
}

/// Central interval holding at least 99% of Binomial(n, p) mass, as counts.
fn binomial_99(n: u64, p: f64) -> (u64, u64) {
    let pmf: Vec<f64> = (0..=n)
        .map(|k| {
            let ln_choose: f64 = (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum();
            (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
        })
        .collect();
    let mut cdf = 0.0;
    let mut lo = 0;
    for (k, q) in pmf.iter().enumerate() {
        if cdf + q > 0.005 {
            lo = k as u64;
            break;
        }
        cdf += q;
    }
    let mut tail = 0.0;
    let mut hi = n;
    for k in (0..=n as usize).rev() {
        if tail + pmf[k] > 0.005 {
            hi = k as u64;
            break;
        }
        tail += pmf[k];
    }
    (lo, hi)
}

#[test]
fn negative_controls_are_calibrated() {
    // 200 diagonal cells: each label is a fresh gaussian set of 400 rows, split 200/200.
    let labels = 200;
    let entries = (0..labels)
        .map(|i| {
            (
                format!("g{i}"),
                gaussian(400, [0.0, 0.0], derive_seed(5, &[i])),
            )
        })
        .collect();
    let corpus = LabeledCorpus::new(entries).unwrap();
    let cfg = TestConfig {
        permutations: 100,
        alpha: 0.01,
        seed: 2024,
        workers: Workers::Auto,
        ..TestConfig::default()
    };
    let mut significant = 0;
    // Diagonal cells only: run one-label corpora so off-diagonal work is skipped.
    for (label, rows) in corpus.entries() {
        let single = LabeledCorpus::new(vec![(label.clone(), rows.clone())]).unwrap();
        let r = mmd_matrix(&single, &cfg, 200).unwrap();
        if r.p_values[0][0].unwrap() < cfg.alpha {
            significant += 1;
        }
    }
    let (lo, hi) = binomial_99(labels, 0.01);
    assert!(
        (lo..=hi).contains(&significant),
        "{significant} of {labels} significant, expected within [{lo}, {hi}]"
    );
}

#[test]
fn power_grows_with_sample_size() {
    let corpus = LabeledCorpus::new(vec![
        ("p".into(), gaussian(500, [0.0, 0.0], 1)),
        ("q".into(), gaussian(500, [2.0, 0.0], 2)),
    ])
    .unwrap();
    let cfg = TestConfig {
        permutations: 200,
        alpha: 0.05,
        seed: 8,
        workers: Workers::Auto,
        ..TestConfig::default()
    };
    let r = power_curves(
        &corpus,
        &[("p".into(), "q".into())],
        &[4, 24],
        50,
        &cfg,
        400,
    )
    .unwrap();
    let (low, high) = (r.rates[0][0].unwrap(), r.rates[0][1].unwrap());
    assert!(high >= low, "rate(24)={high} < rate(4)={low}");
    assert!(high > 0.9);
}

#[test]
fn matrix_on_identical_labels_is_non_significant() {
    let rows = gaussian(300, [0.0, 0.0], 3);
    let corpus = LabeledCorpus::new(vec![("a".into(), rows.clone()), ("b".into(), rows)]).unwrap();
    let cfg = TestConfig {
        permutations: 200,
        seed: 17,
        ..TestConfig::default()
    };
    let r = mmd_matrix(&corpus, &cfg, 400).unwrap();
    // Both labels hold the same rows, so the off-diagonal cell compares a set with itself.
    assert!(r.p_values[0][1].unwrap() >= 0.01);
    assert!(r.mmd[0][1].unwrap() <= 0.0);
}

#[test]
fn binomial_interval_reference_values() {
    // Exact 99% central intervals checked against scipy.stats.binom.ppf.
    assert_eq!(binomial_99(500, 0.05), (13, 38));
    assert_eq!(binomial_99(200, 0.01), (0, 6));
}
