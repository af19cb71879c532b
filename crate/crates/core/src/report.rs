//! Output documents shared by every command: one JSON object per run, plus
//! CSV renderings of matrix and power-curve results.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RNG_NAME;
use crate::study::{MmdMatrixResult, PowerCurveResult};

pub const SCHEMA_VERSION: &str = "mmdnov/1";

/// Everything except `volatile` is a pure function of the inputs and the
/// configuration; `volatile` holds run-specific facts such as timing and the
/// worker count.
#[derive(Debug, Clone, Serialize)]
pub struct Document<'a, C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub rng: &'static str,
    pub config: C,
    pub result: R,
    pub volatile: Volatile,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Volatile {
    pub workers: usize,
    pub elapsed_ms: u128,
}

impl<'a, C: Serialize, R: Serialize> Document<'a, C, R> {
    pub fn new(command: &'a str, config: C, result: R, volatile: Volatile) -> Self {
        Document {
            schema: SCHEMA_VERSION,
            command,
            rng: RNG_NAME,
            config,
            result,
            volatile,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numerical(format!("cannot serialize result: {e}")))?;
        s.push('\n');
        Ok(s)
    }
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("csv rendering failed: {e}"))
}

fn render(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Square table with labels as header row and first column; absent cells are empty.
pub fn matrix_csv(values: &[Vec<Option<f64>>], labels: &[String]) -> Result<String> {
    let mut rows = Vec::with_capacity(labels.len() + 1);
    rows.push(
        std::iter::once(String::new())
            .chain(labels.iter().cloned())
            .collect(),
    );
    for (label, row) in labels.iter().zip(values) {
        rows.push(
            std::iter::once(label.clone())
                .chain(row.iter().map(|&v| cell(v)))
                .collect(),
        );
    }
    render(rows)
}

pub fn mmd_matrix_csv(r: &MmdMatrixResult) -> Result<String> {
    matrix_csv(&r.mmd, &r.labels)
}

pub fn p_value_matrix_csv(r: &MmdMatrixResult) -> Result<String> {
    matrix_csv(&r.p_values, &r.labels)
}

/// Long form `pair,label_a,label_b,n,rate,trials`; `trials` counts the valid trials
/// behind each rate and `pair` is `label_a:label_b`.
pub fn power_csv(r: &PowerCurveResult) -> Result<String> {
    let mut rows = vec![["pair", "label_a", "label_b", "n", "rate", "trials"]
        .map(String::from)
        .to_vec()];
    for (p, (a, b)) in r.pairs.iter().enumerate() {
        for (s, n) in r.sample_sizes.iter().enumerate() {
            rows.push(vec![
                format!("{a}:{b}"),
                a.clone(),
                b.clone(),
                n.to_string(),
                cell(r.rates[p][s]),
                r.valid_trials[p][s].to_string(),
            ]);
        }
    }
    render(rows)
}
