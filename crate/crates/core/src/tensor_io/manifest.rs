use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{read_matrix, MatrixFormat};
use crate::error::{Error, Result};
use crate::matrix::{EmbeddingMatrix, LabeledCorpus};
use crate::rng::{derive_seed, PinnedRng};

const SUBSAMPLE_STREAM: u64 = 0x4d41_4e49; // "MANI"

/// Per-label row cap applied while loading, drawn without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsample {
    pub cap: usize,
    pub seed: u64,
}

/// Parses `<label>\t<path>` lines. Relative paths are resolved against `base`.
/// Blank lines are skipped.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out: Vec<(String, PathBuf)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (label, path) = line
            .split_once('\t')
            .ok_or_else(|| Error::at_line(i + 1, "expected <label><TAB><path>"))?;
        if label.is_empty() {
            return Err(Error::at_line(i + 1, "empty label"));
        }
        if out.iter().any(|(l, _)| l == label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        let path = Path::new(path.trim_end());
        let path = if path.is_absolute() {
            path.to_path_buf()
        } else {
            base.join(path)
        };
        out.push((label.to_string(), path));
    }
    Ok(out)
}

pub fn load_corpus(
    manifest: impl AsRef<Path>,
    subsample: Option<Subsample>,
) -> Result<LabeledCorpus<f64>> {
    let manifest = manifest.as_ref();
    let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (index, (label, path)) in parse_manifest(&text, base)?.into_iter().enumerate() {
        let format = MatrixFormat::from_path(&path).ok_or_else(|| {
            Error::Config(format!(
                "cannot tell the format of {} (expected .npy or .csv)",
                path.display()
            ))
        })?;
        let mut m = read_matrix(&path, format)?;
        if let Some(s) = subsample {
            m = cap_rows(
                &m,
                s.cap,
                derive_seed(s.seed, &[SUBSAMPLE_STREAM, index as u64]),
            );
        }
        entries.push((label, m));
    }
    LabeledCorpus::new(entries)
}

fn cap_rows(m: &EmbeddingMatrix<f64>, cap: usize, seed: u64) -> EmbeddingMatrix<f64> {
    if m.n_items() <= cap {
        return m.clone();
    }
    let rows = PinnedRng::new(seed).sample_without_replacement(m.n_items(), cap);
    m.select_rows(&rows)
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[(&str, &Path)]) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for (label, p) in entries {
        writeln!(text, "{label}\t{}", p.display()).expect("writing to a String cannot fail");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_io::write_matrix;
    use std::collections::HashSet;

    fn matrix(rows: usize, dim: usize) -> EmbeddingMatrix<f64> {
        let values = (0..rows * dim).map(|v| v as f64).collect();
        EmbeddingMatrix::new(rows, dim, values).unwrap()
    }

    #[test]
    fn parse_rejects_malformed_lines() {
        let base = Path::new("/data");
        assert!(matches!(
            parse_manifest("a\tx.npy\nb y.npy\n", base),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            parse_manifest("\tx.npy\n", base),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            parse_manifest("a\tx.npy\na\ty.npy\n", base),
            Err(Error::DuplicateLabel(_))
        ));
        let ok = parse_manifest("a\tx.npy\n\nb\t/abs/y.csv\n", base).unwrap();
        assert_eq!(ok[0].1, PathBuf::from("/data/x.npy"));
        assert_eq!(ok[1].1, PathBuf::from("/abs/y.csv"));
    }

    #[test]
    fn loads_three_labels() {
        let dir = tempfile::tempdir().unwrap();
        for l in ["a", "b", "c"] {
            write_matrix(
                &matrix(5, 8),
                dir.path().join(format!("{l}.npy")),
                MatrixFormat::Npy,
            )
            .unwrap();
        }
        let man = dir.path().join("corpus.tsv");
        fs::write(&man, "a\ta.npy\nb\tb.npy\nc\tc.npy\n").unwrap();
        let corpus = load_corpus(&man, None).unwrap();
        assert_eq!(corpus.labels().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(corpus.dim(), Some(8));
    }

    #[test]
    fn dim_mismatch_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        write_matrix(&matrix(3, 84), dir.path().join("a.npy"), MatrixFormat::Npy).unwrap();
        write_matrix(
            &matrix(3, 1024),
            dir.path().join("b.npy"),
            MatrixFormat::Npy,
        )
        .unwrap();
        let man = dir.path().join("m.tsv");
        fs::write(&man, "a\ta.npy\nb\tb.npy\n").unwrap();
        assert!(matches!(
            load_corpus(&man, None),
            Err(Error::DimMismatch {
                left: 84,
                right: 1024
            })
        ));
        fs::write(&man, "a\ta.npy\nz\tmissing.npy\n").unwrap();
        assert!(matches!(load_corpus(&man, None), Err(Error::Io { .. })));
    }

    #[test]
    fn cap_keeps_distinct_rows_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        // Column 0 holds the row index, so retained rows are identifiable.
        let big = matrix(3000, 1);
        write_matrix(&big, dir.path().join("big.npy"), MatrixFormat::Npy).unwrap();
        let man = dir.path().join("m.tsv");
        fs::write(&man, "big\tbig.npy\n").unwrap();
        let sub = Some(Subsample { cap: 400, seed: 7 });
        let a = load_corpus(&man, sub).unwrap();
        let rows = a.get("big").unwrap();
        assert_eq!(rows.n_items(), 400);
        let distinct: HashSet<u64> = rows.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(distinct.len(), 400);
        assert_eq!(load_corpus(&man, sub).unwrap(), a);
    }
}
