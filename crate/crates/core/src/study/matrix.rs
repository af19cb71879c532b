use serde::Serialize;

use super::{MATRIX_PERM_STREAM, MATRIX_SAMPLE_STREAM};
use crate::error::{Error, Result};
use crate::matrix::{EmbeddingMatrix, LabeledCorpus};
use crate::perm_test::{run_test, TestConfig, TestResult};
use crate::rng::{derive_seed, PinnedRng};
use crate::scalar::Scalar;

/// Pairwise MMD² and p-values between labels. `None` marks cells whose label
/// sets were too small to test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmdMatrixResult {
    pub labels: Vec<String>,
    pub mmd: Vec<Vec<Option<f64>>>,
    pub p_values: Vec<Vec<Option<f64>>>,
    pub sample_cap: usize,
    /// Echoed at the top level of output documents instead.
    #[serde(skip)]
    pub config: TestConfig,
}

/// Off-diagonal cells compare up to `sample_cap` rows of each label. Diagonal
/// cells are negative controls: `2k` distinct rows of one label, split into two
/// disjoint halves of `k = min(sample_cap, rows / 2)`; they need at least 4 rows.
pub fn mmd_matrix<T: Scalar>(
    corpus: &LabeledCorpus<T>,
    cfg: &TestConfig,
    sample_cap: usize,
) -> Result<MmdMatrixResult> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::Config("corpus has no labels".into()));
    }
    let labels: Vec<String> = corpus.labels().map(str::to_string).collect();
    let size = labels.len();
    let mut mmd = vec![vec![None; size]; size];
    let mut p_values = vec![vec![None; size]; size];

    let pool = cfg.workers.pool()?;
    for i in 0..size {
        for j in i..size {
            let Some(result) = pool.install(|| cell(corpus, cfg, sample_cap, i, j))? else {
                continue;
            };
            mmd[i][j] = Some(result.mmd2_observed);
            mmd[j][i] = Some(result.mmd2_observed);
            p_values[i][j] = Some(result.p_value);
            p_values[j][i] = Some(result.p_value);
        }
    }
    Ok(MmdMatrixResult {
        labels,
        mmd,
        p_values,
        sample_cap,
        config: *cfg,
    })
}

fn cell<T: Scalar>(
    corpus: &LabeledCorpus<T>,
    cfg: &TestConfig,
    cap: usize,
    i: usize,
    j: usize,
) -> Result<Option<TestResult>> {
    let entries = corpus.entries();
    let (a, b) = (&entries[i].1, &entries[j].1);
    let mut rng = PinnedRng::new(derive_seed(
        cfg.seed,
        &[MATRIX_SAMPLE_STREAM, i as u64, j as u64],
    ));
    let (x, y) = if i == j {
        match negative_control_split(a, cap, &mut rng) {
            Some(halves) => halves,
            None => return Ok(None),
        }
    } else {
        let (na, nb) = (cap.min(a.n_items()), cap.min(b.n_items()));
        if na < 2 || nb < 2 {
            return Ok(None);
        }
        let xi = rng.sample_without_replacement(a.n_items(), na);
        let yi = rng.sample_without_replacement(b.n_items(), nb);
        (a.select_rows(&xi), b.select_rows(&yi))
    };
    let cell_cfg = TestConfig {
        seed: derive_seed(cfg.seed, &[MATRIX_PERM_STREAM, i as u64, j as u64]),
        ..*cfg
    };
    run_test(&x, &y, &cell_cfg, true).map(Some)
}

/// Two disjoint halves of `k = min(cap, rows / 2)` rows; `None` below 4 rows.
pub(crate) fn negative_control_split<T: Scalar>(
    m: &EmbeddingMatrix<T>,
    cap: usize,
    rng: &mut PinnedRng,
) -> Option<(EmbeddingMatrix<T>, EmbeddingMatrix<T>)> {
    if m.n_items() < 4 {
        return None;
    }
    let k = cap.min(m.n_items() / 2);
    if k < 2 {
        return None;
    }
    let idx = rng.sample_without_replacement(m.n_items(), 2 * k);
    Some((m.select_rows(&idx[..k]), m.select_rows(&idx[k..])))
}
