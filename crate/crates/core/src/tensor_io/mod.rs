//! Reading and writing embedding matrices and label manifests.

pub mod csv;
mod manifest;
pub mod npy;

use std::fs;
use std::path::Path;
use std::str::FromStr;

pub use manifest::{load_corpus, parse_manifest, write_manifest, Subsample};
pub use npy::NpyDtype;

use crate::error::{Error, Result};
use crate::matrix::EmbeddingMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Npy,
    Csv,
}

impl MatrixFormat {
    /// Guesses the format from the file extension (`.npy` or `.csv`, case-insensitive).
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        ext.parse().ok()
    }
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "npy" => Ok(MatrixFormat::Npy),
            "csv" => Ok(MatrixFormat::Csv),
            other => Err(Error::Config(format!("unknown matrix format {other:?}"))),
        }
    }
}

pub fn read_matrix(path: impl AsRef<Path>, format: MatrixFormat) -> Result<EmbeddingMatrix<f64>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        MatrixFormat::Npy => npy::decode(&bytes),
        MatrixFormat::Csv => {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| Error::at_byte(e.valid_up_to(), "csv is not valid UTF-8"))?;
            csv::decode(text)
        }
    }
}

/// Writes `m`; npy output is always `<f8`, so a read-back is bit-identical.
pub fn write_matrix(
    m: &EmbeddingMatrix<f64>,
    path: impl AsRef<Path>,
    format: MatrixFormat,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        MatrixFormat::Npy => npy::encode(m, NpyDtype::F8),
        MatrixFormat::Csv => csv::encode(m)?.into_bytes(),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
