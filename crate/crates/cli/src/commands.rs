use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mmdnov::report::{self, Document, Volatile};
use mmdnov::study::presets;
use mmdnov::{
    generate_synthetic, load_corpus, mmd_matrix, permutation_test, power_curves, read_matrix,
    write_matrix, Error, MatrixFormat, Result, SynthFamily, SynthSpec,
};
use serde::Serialize;

use crate::args::{Command, FamilyArg, MatrixArgs, PowerArgs, SynthArgs, TestArgs};

/// Set when `--fail-on-reject` is given and the test rejects.
pub const EXIT_REJECTED: u8 = 3;

pub fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Test(a) => run_test(a),
        Command::Matrix(a) => run_matrix(a),
        Command::Power(a) => run_power(a),
        Command::Synth(a) => run_synth(a),
    }
}

fn emit<C: Serialize, R: Serialize>(doc: &Document<'_, C, R>, out: Option<&Path>) -> Result<()> {
    let json = doc.to_json()?;
    match out {
        Some(p) => fs::write(p, json).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn input_format(path: &Path, explicit: Option<MatrixFormat>) -> Result<MatrixFormat> {
    explicit
        .or_else(|| MatrixFormat::from_path(path))
        .ok_or_else(|| {
            Error::Config(format!(
                "cannot tell the format of {}; pass --format",
                path.display()
            ))
        })
}

#[derive(Serialize)]
struct TestEcho<'a> {
    x: &'a Path,
    y: &'a Path,
    #[serde(flatten)]
    test: mmdnov::TestConfig,
}

fn run_test(a: TestArgs) -> Result<u8> {
    let started = Instant::now();
    let cfg = a.test.config()?;
    let explicit = a.format.map(MatrixFormat::from);
    let x = read_matrix(&a.x, input_format(&a.x, explicit)?)?;
    let y = read_matrix(&a.y, input_format(&a.y, explicit)?)?;
    let result = permutation_test(&x, &y, &cfg)?;
    let rejected = result.reject_null;
    let echo = TestEcho {
        x: &a.x,
        y: &a.y,
        test: cfg,
    };
    let doc = Document::new("test", echo, result, volatile(&cfg, started));
    emit(&doc, a.test.out.as_deref())?;
    Ok(if a.fail_on_reject && rejected {
        EXIT_REJECTED
    } else {
        0
    })
}

fn volatile(cfg: &mmdnov::TestConfig, started: Instant) -> Volatile {
    Volatile {
        workers: cfg.workers.count(),
        elapsed_ms: started.elapsed().as_millis(),
    }
}

#[derive(Serialize)]
struct CorpusEcho<'a, E: Serialize> {
    manifest: &'a Path,
    #[serde(flatten)]
    study: E,
    #[serde(flatten)]
    test: mmdnov::TestConfig,
}

#[derive(Serialize)]
struct MatrixEcho {
    sample_cap: usize,
}

fn run_matrix(a: MatrixArgs) -> Result<u8> {
    let started = Instant::now();
    let cfg = a.test.config()?;
    let corpus = load_corpus(&a.manifest, None)?;
    let result = mmd_matrix(&corpus, &cfg, a.cap)?;
    if let Some(path) = &a.csv {
        write_text(path, &report::mmd_matrix_csv(&result)?)?;
        write_text(&pvalue_path(path), &report::p_value_matrix_csv(&result)?)?;
    }
    let echo = CorpusEcho {
        manifest: &a.manifest,
        study: MatrixEcho { sample_cap: a.cap },
        test: cfg,
    };
    emit(
        &Document::new("matrix", echo, result, volatile(&cfg, started)),
        a.test.out.as_deref(),
    )?;
    Ok(0)
}

fn pvalue_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
    csv.with_file_name(format!("{stem}.pvalues.csv"))
}

#[derive(Serialize)]
struct PowerEcho<'a> {
    pairs: &'a [(String, String)],
    sample_sizes: &'a [usize],
    trials: usize,
    sample_cap: usize,
}

fn run_power(a: PowerArgs) -> Result<u8> {
    let started = Instant::now();
    let cfg = a.test.config()?;
    let corpus = load_corpus(&a.manifest, None)?;
    let pairs = match &a.pairs {
        Some(spec) => parse_pairs(spec)?,
        None => {
            let labels: Vec<&str> = corpus.labels().collect();
            let mut all = Vec::new();
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    all.push((labels[i].to_string(), labels[j].to_string()));
                }
            }
            all
        }
    };
    let result = power_curves(&corpus, &pairs, &a.sizes, a.trials, &cfg, a.cap)?;
    if let Some(path) = &a.csv {
        write_text(path, &report::power_csv(&result)?)?;
    }
    let echo = CorpusEcho {
        manifest: &a.manifest,
        study: PowerEcho {
            pairs: &pairs,
            sample_sizes: &a.sizes,
            trials: a.trials,
            sample_cap: a.cap,
        },
        test: cfg,
    };
    emit(
        &Document::new("power", echo, result, volatile(&cfg, started)),
        a.test.out.as_deref(),
    )?;
    Ok(0)
}

pub fn parse_pairs(spec: &str) -> Result<Vec<(String, String)>> {
    if let Some(preset) = presets::pair_preset(spec) {
        return Ok(preset);
    }
    spec.split(',')
        .map(|item| {
            item.split_once(':')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .ok_or_else(|| Error::Config(format!("bad pair {item:?}, expected label:label")))
        })
        .collect()
}

fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {t:?} in --mean")))
        })
        .collect()
}

#[derive(Serialize)]
struct SynthResult<'a> {
    path: &'a Path,
    n_items: usize,
    dim: usize,
}

fn run_synth(a: SynthArgs) -> Result<u8> {
    let started = Instant::now();
    let family = match a.family {
        FamilyArg::Gaussian => SynthFamily::Gaussian {
            mean: parse_vector(&a.mean)?,
            scale: a.scale,
        },
        FamilyArg::Moons => SynthFamily::Moons {
            offset: parse_vector(&a.mean)?,
            noise: a.scale,
        },
        FamilyArg::Mixture => SynthFamily::Mixture {
            means: a.mean.split(';').map(parse_vector).collect::<Result<_>>()?,
            scale: a.scale,
        },
    };
    let inferred = match &family {
        SynthFamily::Gaussian { mean, .. } => mean.len(),
        SynthFamily::Moons { offset, .. } => offset.len(),
        SynthFamily::Mixture { means, .. } => means[0].len(),
    };
    let spec = SynthSpec {
        family,
        dim: a.dim.unwrap_or(inferred),
        seed: a.seed,
    };
    let m = generate_synthetic(&spec, a.n)?;
    let format = a
        .format
        .map(MatrixFormat::from)
        .or_else(|| MatrixFormat::from_path(&a.out))
        .unwrap_or(MatrixFormat::Npy);
    write_matrix(&m, &a.out, format)?;
    #[derive(Serialize)]
    struct Echo<'a> {
        #[serde(flatten)]
        spec: &'a SynthSpec,
        n: usize,
    }
    let doc = Document::new(
        "synth",
        Echo {
            spec: &spec,
            n: a.n,
        },
        SynthResult {
            path: &a.out,
            n_items: m.n_items(),
            dim: m.dim(),
        },
        Volatile {
            workers: 1,
            elapsed_ms: started.elapsed().as_millis(),
        },
    );
    emit(&doc, None)?;
    Ok(0)
}
