use rayon::prelude::*;
use serde::Serialize;

use super::matrix::negative_control_split;
use super::{POWER_PERM_STREAM, POWER_SAMPLE_STREAM};
use crate::error::{Error, Result};
use crate::matrix::LabeledCorpus;
use crate::perm_test::{run_test, TestConfig};
use crate::rng::{derive_seed, PinnedRng};
use crate::scalar::Scalar;

/// Rejection rates per pair (outer) and sample size (inner).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCurveResult {
    pub pairs: Vec<(String, String)>,
    pub sample_sizes: Vec<usize>,
    /// `rejections / valid_trials`; `None` when no trial could be run.
    pub rates: Vec<Vec<Option<f64>>>,
    pub valid_trials: Vec<Vec<usize>>,
    pub trials: usize,
    pub sample_cap: usize,
    /// Echoed at the top level of output documents instead.
    #[serde(skip)]
    pub config: TestConfig,
}

/// Estimates the rejection rate of the permutation test for each pair and
/// sample size over `trials` independent draws.
///
/// Each trial draws `min(n, rows, sample_cap)` rows per label without
/// replacement; a pair naming the same label twice draws two disjoint halves
/// instead. Trial randomness is derived from `(cfg.seed, pair, n, trial)`, so
/// every trial can be reproduced on its own and the result does not depend on
/// scheduling. Trials run in parallel; each permutation test inside is serial.
pub fn power_curves<T: Scalar>(
    corpus: &LabeledCorpus<T>,
    pairs: &[(String, String)],
    sample_sizes: &[usize],
    trials: usize,
    cfg: &TestConfig,
    sample_cap: usize,
) -> Result<PowerCurveResult> {
    cfg.validate()?;
    if sample_sizes.is_empty() {
        return Err(Error::Config("no sample sizes given".into()));
    }
    if trials < 1 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let mut resolved = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let ia = corpus
            .index_of(a)
            .ok_or_else(|| Error::UnknownLabel(a.clone()))?;
        let ib = corpus
            .index_of(b)
            .ok_or_else(|| Error::UnknownLabel(b.clone()))?;
        resolved.push((ia, ib));
    }

    let jobs: Vec<(usize, usize, usize)> = (0..resolved.len())
        .flat_map(|p| {
            (0..sample_sizes.len()).flat_map(move |s| (0..trials).map(move |t| (p, s, t)))
        })
        .collect();
    let run_job = |&(p, s, t): &(usize, usize, usize)| -> Result<Option<bool>> {
        trial(corpus, resolved[p], p, sample_sizes[s], t, cfg, sample_cap)
    };
    let outcomes: Vec<Result<Option<bool>>> = cfg
        .workers
        .pool()?
        .install(|| jobs.par_iter().map(run_job).collect());

    let mut rates = vec![Vec::with_capacity(sample_sizes.len()); resolved.len()];
    let mut valid_trials = vec![Vec::with_capacity(sample_sizes.len()); resolved.len()];
    let mut outcomes = outcomes.into_iter();
    for p in 0..resolved.len() {
        for _ in sample_sizes {
            let (mut valid, mut rejected) = (0usize, 0usize);
            for outcome in outcomes.by_ref().take(trials) {
                if let Some(reject) = outcome? {
                    valid += 1;
                    rejected += usize::from(reject);
                }
            }
            rates[p].push((valid > 0).then(|| rejected as f64 / valid as f64));
            valid_trials[p].push(valid);
        }
    }

    Ok(PowerCurveResult {
        pairs: pairs.to_vec(),
        sample_sizes: sample_sizes.to_vec(),
        rates,
        valid_trials,
        trials,
        sample_cap,
        config: *cfg,
    })
}

/// One trial: `Some(rejected)`, or `None` when the draw is too small to test.
fn trial<T: Scalar>(
    corpus: &LabeledCorpus<T>,
    (ia, ib): (usize, usize),
    pair_index: usize,
    n: usize,
    trial_index: usize,
    cfg: &TestConfig,
    cap: usize,
) -> Result<Option<bool>> {
    let path = [pair_index as u64, n as u64, trial_index as u64];
    let mut rng = PinnedRng::new(derive_seed(
        cfg.seed,
        &[POWER_SAMPLE_STREAM, path[0], path[1], path[2]],
    ));
    let entries = corpus.entries();
    let (a, b) = (&entries[ia].1, &entries[ib].1);
    let (x, y) = if ia == ib {
        match negative_control_split(a, n.min(cap), &mut rng) {
            Some(halves) => halves,
            None => return Ok(None),
        }
    } else {
        let na = n.min(a.n_items()).min(cap);
        let nb = n.min(b.n_items()).min(cap);
        let xi = rng.sample_without_replacement(a.n_items(), na);
        let yi = rng.sample_without_replacement(b.n_items(), nb);
        (a.select_rows(&xi), b.select_rows(&yi))
    };
    let trial_cfg = TestConfig {
        seed: derive_seed(cfg.seed, &[POWER_PERM_STREAM, path[0], path[1], path[2]]),
        ..*cfg
    };
    match run_test(&x, &y, &trial_cfg, false) {
        Ok(r) => Ok(Some(r.reject_null)),
        Err(Error::InsufficientSamples { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}
