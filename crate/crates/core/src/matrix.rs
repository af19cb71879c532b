use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major `n_items × dim` table of finite embedding coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    n_items: usize,
    dim: usize,
    values: Vec<T>,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    /// Validates the shape and that every value is finite.
    pub fn new(n_items: usize, dim: usize, values: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dim must be at least 1".into()));
        }
        let expected = n_items
            .checked_mul(dim)
            .ok_or_else(|| Error::Shape(format!("{n_items} x {dim} overflows")))?;
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "{} values do not fill a {n_items} x {dim} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(EmbeddingMatrix {
            n_items,
            dim,
            values,
        })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {dim}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), dim, values)
    }

    /// A zero-row matrix of the given width.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(0, dim, Vec::new())
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.n_items == 0
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// New matrix holding the given rows in the given order. Panics on out-of-range indices.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        EmbeddingMatrix {
            n_items: indices.len(),
            dim: self.dim,
            values,
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        ensure_same_dim(self, other)?;
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        Ok(EmbeddingMatrix {
            n_items: self.n_items + other.n_items,
            dim: self.dim,
            values,
        })
    }

    /// Converts every element to another scalar type. Narrowing that overflows is rejected.
    pub fn cast<U: Scalar>(&self) -> Result<EmbeddingMatrix<U>> {
        let values = self
            .values
            .iter()
            .map(|v| U::from_f64_lossy(v.widen()))
            .collect();
        EmbeddingMatrix::new(self.n_items, self.dim, values)
    }
}

pub(crate) fn ensure_same_dim<T>(a: &EmbeddingMatrix<T>, b: &EmbeddingMatrix<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// Ordered `label → matrix` collection with unique labels and a common width.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus<T> {
    entries: Vec<(String, EmbeddingMatrix<T>)>,
}

impl<T: Scalar> LabeledCorpus<T> {
    pub fn new(entries: Vec<(String, EmbeddingMatrix<T>)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (label, _) in &entries {
            if label.is_empty() {
                return Err(Error::Config("empty label".into()));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        if let Some((_, first)) = entries.first() {
            for (_, m) in &entries[1..] {
                ensure_same_dim(first, m)?;
            }
        }
        Ok(LabeledCorpus { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.first().map(|(_, m)| m.dim())
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn entries(&self) -> &[(String, EmbeddingMatrix<T>)] {
        &self.entries
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|(l, _)| l == label)
    }

    pub fn get(&self, label: &str) -> Option<&EmbeddingMatrix<T>> {
        self.index_of(label).map(|i| &self.entries[i].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_with_position() {
        let err = EmbeddingMatrix::new(2, 2, vec![1.0, 2.0, 3.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 1 }));
        let err = EmbeddingMatrix::new(1, 2, vec![f64::INFINITY, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 0 }));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            EmbeddingMatrix::<f64>::new(2, 2, vec![1.0; 3]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            EmbeddingMatrix::<f64>::new(0, 0, vec![]),
            Err(Error::Shape(_))
        ));
        assert!(EmbeddingMatrix::<f64>::empty(4).unwrap().is_empty());
    }

    #[test]
    fn select_and_concat() {
        let m = EmbeddingMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let s = m.select_rows(&[2, 0]);
        assert_eq!(s.values(), &[5.0, 6.0, 1.0, 2.0]);
        let c = s.concat(&m).unwrap();
        assert_eq!(c.n_items(), 5);
        assert_eq!(c.row(4), &[5.0, 6.0]);
    }

    #[test]
    fn corpus_invariants() {
        let a = EmbeddingMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let b = EmbeddingMatrix::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(
            LabeledCorpus::new(vec![("a".into(), a.clone()), ("b".into(), b)]),
            Err(Error::DimMismatch { left: 2, right: 3 })
        ));
        assert!(matches!(
            LabeledCorpus::new(vec![("a".into(), a.clone()), ("a".into(), a.clone())]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(LabeledCorpus::new(vec![("".into(), a)]).is_err());
    }
}
