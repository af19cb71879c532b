//! Kernel functions, Gram matrices and the median-heuristic bandwidth.
//!
//! The RBF kernel is `exp(-|a-b|^2 / (2 sigma^2))`. Inside Gram matrices the
//! squared distance is expanded as `|a|^2 + |b|^2 - 2<a,b>` and clamped at zero,
//! which makes each matrix exactly symmetric with an exact unit diagonal.

use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ensure_same_dim, EmbeddingMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Rbf,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Median of the positive pairwise distances of the pooled sample.
    Auto,
    Fixed(f64),
}

/// Kernel family plus bandwidth policy. The bandwidth is ignored by the linear kernel.
///
/// Only the RBF kernel is characteristic; the linear kernel compares means
/// alone and cannot separate distributions that agree in their first moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub bandwidth: Bandwidth,
}

impl KernelSpec {
    pub fn rbf_auto() -> Self {
        KernelSpec {
            family: KernelFamily::Rbf,
            bandwidth: Bandwidth::Auto,
        }
    }

    pub fn rbf_fixed(sigma: f64) -> Result<Self> {
        let spec = KernelSpec {
            family: KernelFamily::Rbf,
            bandwidth: Bandwidth::Fixed(sigma),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear() -> Self {
        KernelSpec {
            family: KernelFamily::Linear,
            bandwidth: Bandwidth::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(s) = self.bandwidth {
            check_sigma(s)?;
        }
        Ok(())
    }

    /// Bandwidth to use for `(x, y)`: `sigma_override`, else the fixed value,
    /// else the median heuristic on the pooled sample. `None` for the linear kernel.
    pub fn resolve_sigma<T: Scalar>(
        &self,
        x: &EmbeddingMatrix<T>,
        y: &EmbeddingMatrix<T>,
        sigma_override: Option<T>,
    ) -> Result<Option<T>> {
        ensure_same_dim(x, y)?;
        if self.family == KernelFamily::Linear {
            return Ok(None);
        }
        let sigma = match (sigma_override, self.bandwidth) {
            (Some(s), _) => s,
            (None, Bandwidth::Fixed(s)) => T::from_f64_lossy(s),
            (None, Bandwidth::Auto) => median_heuristic_sigma(x, y)?,
        };
        check_sigma(sigma.widen())?;
        Ok(Some(sigma))
    }
}

fn check_sigma(s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::Numerical(format!("non-finite bandwidth {s}")));
    }
    if s <= 0.0 {
        return Err(Error::Config(format!(
            "bandwidth must be positive, got {s}"
        )));
    }
    Ok(())
}

impl Serialize for KernelSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("KernelSpec", 2)?;
        match (self.family, self.bandwidth) {
            (KernelFamily::Linear, _) => {
                s.serialize_field("family", "linear")?;
                s.serialize_field("sigma", &Option::<f64>::None)?;
            }
            (KernelFamily::Rbf, Bandwidth::Auto) => {
                s.serialize_field("family", "rbf")?;
                s.serialize_field("sigma", "auto")?;
            }
            (KernelFamily::Rbf, Bandwidth::Fixed(v)) => {
                s.serialize_field("family", "rbf")?;
                s.serialize_field("sigma", &v)?;
            }
        }
        s.end()
    }
}

/// Median of the strictly positive pairwise Euclidean distances over the rows of
/// `x` and `y` pooled together; 1.0 when there is no positive distance or the
/// median is not finite. For an even count the two central values are averaged.
pub fn median_heuristic_sigma<T: Scalar>(
    x: &EmbeddingMatrix<T>,
    y: &EmbeddingMatrix<T>,
) -> Result<T> {
    ensure_same_dim(x, y)?;
    let rows: Vec<&[T]> = x.rows().chain(y.rows()).collect();
    // Each unordered pair once: the full matrix lists every distance twice,
    // which leaves the median unchanged.
    let mut distances = Vec::with_capacity(rows.len() * rows.len().saturating_sub(1) / 2);
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let d = euclidean(a, b);
            if d > T::zero() {
                distances.push(d);
            }
        }
    }
    let median = median_in_place(&mut distances);
    Ok(match median {
        Some(m) if m.is_finite() && m > T::zero() => m,
        _ => T::one(),
    })
}

fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&p, &q)| acc + (p - q) * (p - q))
        .sqrt()
}

fn median_in_place<T: Scalar>(v: &mut [T]) -> Option<T> {
    let n = v.len();
    if n == 0 {
        return None;
    }
    let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
    let (lower_half, &mut upper, _) = v.select_nth_unstable_by(n / 2, cmp);
    if n % 2 == 1 {
        return Some(upper);
    }
    let lower = lower_half.iter().copied().fold(T::neg_infinity(), T::max);
    Some((lower + upper) / T::from_f64_lossy(2.0))
}

/// Dense row-major kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Gram<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

/// The three kernel blocks entering the two-sample statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct GramBlocks<T> {
    pub kxx: Gram<T>,
    pub kyy: Gram<T>,
    pub kxy: Gram<T>,
    pub sigma_used: Option<T>,
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&p, &q)| acc + p * q)
}

/// Evaluates one kernel family with a resolved bandwidth.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Evaluator<T> {
    family: KernelFamily,
    gamma: T,
}

impl<T: Scalar> Evaluator<T> {
    pub(crate) fn new(family: KernelFamily, sigma: Option<T>) -> Self {
        let gamma = match (family, sigma) {
            (KernelFamily::Rbf, Some(s)) => T::one() / (T::from_f64_lossy(2.0) * s * s),
            _ => T::zero(),
        };
        Evaluator { family, gamma }
    }

    /// Kernel value from precomputed squared norms.
    #[inline]
    fn eval(&self, a: &[T], b: &[T], sq_a: T, sq_b: T) -> T {
        let ab = dot(a, b);
        match self.family {
            KernelFamily::Linear => ab,
            KernelFamily::Rbf => {
                let two = T::from_f64_lossy(2.0);
                let d2 = (sq_a + sq_b - two * ab).max(T::zero());
                (-(self.gamma * d2)).exp()
            }
        }
    }

    pub(crate) fn gram(
        &self,
        a: &EmbeddingMatrix<T>,
        b: &EmbeddingMatrix<T>,
        parallel: bool,
    ) -> Gram<T> {
        let norms_a: Vec<T> = a.rows().map(|r| dot(r, r)).collect();
        let norms_b: Vec<T> = b.rows().map(|r| dot(r, r)).collect();
        let cols = b.n_items();
        let mut data = vec![T::zero(); a.n_items() * cols];
        let fill = |(i, out): (usize, &mut [T])| {
            let ra = a.row(i);
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = self.eval(ra, b.row(j), norms_a[i], norms_b[j]);
            }
        };
        if cols > 0 {
            if parallel {
                data.par_chunks_mut(cols).enumerate().for_each(fill);
            } else {
                data.chunks_mut(cols).enumerate().for_each(fill);
            }
        }
        Gram {
            rows: a.n_items(),
            cols,
            data,
        }
    }
}

/// Kernel blocks for `(x, y)` with the bandwidth resolved from `spec`.
pub fn gram_blocks<T: Scalar>(
    x: &EmbeddingMatrix<T>,
    y: &EmbeddingMatrix<T>,
    spec: &KernelSpec,
) -> Result<GramBlocks<T>> {
    gram_blocks_with(x, y, spec, None)
}

pub(crate) fn gram_blocks_with<T: Scalar>(
    x: &EmbeddingMatrix<T>,
    y: &EmbeddingMatrix<T>,
    spec: &KernelSpec,
    sigma_override: Option<T>,
) -> Result<GramBlocks<T>> {
    spec.validate()?;
    let sigma = spec.resolve_sigma(x, y, sigma_override)?;
    let ev = Evaluator::new(spec.family, sigma);
    Ok(GramBlocks {
        kxx: ev.gram(x, x, false),
        kyy: ev.gram(y, y, false),
        kxy: ev.gram(x, y, false),
        sigma_used: sigma,
    })
}
