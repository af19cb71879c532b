//! Unbiased estimate of the squared maximum mean discrepancy.
//!
//! With kernel `k`, samples `x` (m rows) and `y` (n rows):
//!
//! ```text
//! MMD²_u = Σ_{i≠j} k(x_i,x_j) / (m(m-1)) + Σ_{i≠j} k(y_i,y_j) / (n(n-1)) - 2 Σ_{i,j} k(x_i,y_j) / (mn)
//! ```
//!
//! The estimate is signed; values below zero are expected when the two samples
//! come from the same distribution and are never clamped.

use crate::error::{Error, Result};
use crate::kernels::{gram_blocks_with, Bandwidth, Gram, GramBlocks, KernelFamily, KernelSpec};
use crate::matrix::{ensure_same_dim, EmbeddingMatrix};
use crate::scalar::Scalar;
use crate::sum::{pairwise_sum, PairwiseSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmdValue<T> {
    pub value: T,
    pub m: usize,
    pub n: usize,
    pub sigma_used: Option<T>,
}

fn check_sizes(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InsufficientSamples { m, n });
    }
    Ok(())
}

#[inline]
fn combine<T: Scalar>(sum_xx: T, sum_yy: T, sum_xy: T, m: usize, n: usize) -> T {
    let (mf, nf) = (T::from_usize(m).unwrap(), T::from_usize(n).unwrap());
    let term1 = sum_xx / (mf * (mf - T::one()));
    let term2 = sum_yy / (nf * (nf - T::one()));
    let term3 = sum_xy / (mf * nf);
    term1 + term2 - T::from_f64_lossy(2.0) * term3
}

/// Statistic from precomputed blocks; self-pairs on the diagonals are excluded.
pub fn mmd2_from_blocks<T: Scalar>(blocks: &GramBlocks<T>) -> Result<T> {
    let (m, n) = (blocks.kxx.rows(), blocks.kyy.rows());
    check_sizes(m, n)?;
    Ok(combine(
        off_diagonal_sum(&blocks.kxx),
        off_diagonal_sum(&blocks.kyy),
        full_sum(&blocks.kxy),
        m,
        n,
    ))
}

fn off_diagonal_sum<T: Scalar>(g: &Gram<T>) -> T {
    let mut acc = PairwiseSum::new();
    for i in 0..g.rows() {
        for (j, &v) in g.row(i).iter().enumerate() {
            if i != j {
                acc.push(v);
            }
        }
    }
    acc.total()
}

fn full_sum<T: Scalar>(g: &Gram<T>) -> T {
    pairwise_sum(g.data().iter().copied())
}

/// Statistic for a split of a pooled sample, read off the pooled Gram matrix.
///
/// `xs` and `ys` must be ascending, so the value depends only on the split and
/// the identity split reproduces [`mmd2_from_blocks`] bit for bit.
pub(crate) fn mmd2_from_pooled<T: Scalar>(k: &Gram<T>, xs: &[u32], ys: &[u32]) -> T {
    let within = |idx: &[u32]| {
        let mut acc = PairwiseSum::new();
        for &i in idx {
            let row = k.row(i as usize);
            for &j in idx {
                if i != j {
                    acc.push(row[j as usize]);
                }
            }
        }
        acc.total()
    };
    let mut cross = PairwiseSum::new();
    for &i in xs {
        let row = k.row(i as usize);
        for &j in ys {
            cross.push(row[j as usize]);
        }
    }
    combine(within(xs), within(ys), cross.total(), xs.len(), ys.len())
}

/// Unbiased MMD² of `x` against `y`. A `sigma_override` takes precedence over the
/// bandwidth policy in `spec`.
pub fn mmd2_unbiased<T: Scalar>(
    x: &EmbeddingMatrix<T>,
    y: &EmbeddingMatrix<T>,
    spec: &KernelSpec,
    sigma_override: Option<T>,
) -> Result<MmdValue<T>> {
    ensure_same_dim(x, y)?;
    check_sizes(x.n_items(), y.n_items())?;
    let blocks = gram_blocks_with(x, y, spec, sigma_override)?;
    Ok(MmdValue {
        value: mmd2_from_blocks(&blocks)?,
        m: x.n_items(),
        n: y.n_items(),
        sigma_used: blocks.sigma_used,
    })
}

/// Brute-force reference for [`mmd2_unbiased`]: pointwise kernel evaluation in
/// nested loops with plain running sums, and its own median over the full
/// distance matrix. Quadratic in memory for the auto bandwidth; keep inputs small.
pub fn mmd2_oracle<T: Scalar>(
    x: &EmbeddingMatrix<T>,
    y: &EmbeddingMatrix<T>,
    spec: &KernelSpec,
    sigma_override: Option<T>,
) -> Result<MmdValue<T>> {
    ensure_same_dim(x, y)?;
    let (m, n) = (x.n_items(), y.n_items());
    check_sizes(m, n)?;
    spec.validate()?;

    let sigma = match spec.family {
        KernelFamily::Linear => None,
        KernelFamily::Rbf => Some(match (sigma_override, spec.bandwidth) {
            (Some(s), _) => s,
            (None, Bandwidth::Fixed(s)) => T::from_f64_lossy(s),
            (None, Bandwidth::Auto) => oracle_median(x, y),
        }),
    };
    if let Some(s) = sigma {
        if !(s.is_finite() && s > T::zero()) {
            return Err(Error::Numerical(format!("bad bandwidth {s}")));
        }
    }

    let k = |a: &[T], b: &[T]| -> T {
        match sigma {
            None => {
                let mut s = T::zero();
                for d in 0..a.len() {
                    s = s + a[d] * b[d];
                }
                s
            }
            Some(sigma) => {
                let mut d2 = T::zero();
                for d in 0..a.len() {
                    d2 = d2 + (a[d] - b[d]) * (a[d] - b[d]);
                }
                (-d2 / (T::from_f64_lossy(2.0) * sigma * sigma)).exp()
            }
        }
    };

    let mut sxx = T::zero();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                sxx = sxx + k(x.row(i), x.row(j));
            }
        }
    }
    let mut syy = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                syy = syy + k(y.row(i), y.row(j));
            }
        }
    }
    let mut sxy = T::zero();
    for i in 0..m {
        for j in 0..n {
            sxy = sxy + k(x.row(i), y.row(j));
        }
    }
    let (mf, nf) = (T::from_usize(m).unwrap(), T::from_usize(n).unwrap());
    let value = sxx / (mf * (mf - T::one())) + syy / (nf * (nf - T::one()))
        - T::from_f64_lossy(2.0) * sxy / (mf * nf);
    Ok(MmdValue {
        value,
        m,
        n,
        sigma_used: sigma,
    })
}

fn oracle_median<T: Scalar>(x: &EmbeddingMatrix<T>, y: &EmbeddingMatrix<T>) -> T {
    let pooled: Vec<&[T]> = x.rows().chain(y.rows()).collect();
    let mut all = Vec::new();
    for a in &pooled {
        for b in &pooled {
            let mut d2 = T::zero();
            for d in 0..a.len() {
                d2 = d2 + (a[d] - b[d]) * (a[d] - b[d]);
            }
            let d = d2.sqrt();
            if d > T::zero() {
                all.push(d);
            }
        }
    }
    if all.is_empty() {
        return T::one();
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let c = all.len();
    let med = if c % 2 == 1 {
        all[c / 2]
    } else {
        (all[c / 2 - 1] + all[c / 2]) / T::from_f64_lossy(2.0)
    };
    if med.is_finite() && med > T::zero() {
        med
    } else {
        T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gram_blocks;

    fn col(v: &[f64]) -> EmbeddingMatrix<f64> {
        EmbeddingMatrix::new(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn hand_evaluated_linear_cases() {
        // term1 = 0, term2 = 3, term3 = (0+0+2+6)/4 = 2 -> 0 + 3 - 4.
        let v = mmd2_unbiased(
            &col(&[0.0, 2.0]),
            &col(&[1.0, 3.0]),
            &KernelSpec::linear(),
            None,
        )
        .unwrap();
        assert_eq!(v.value, -1.0);
        let v = mmd2_oracle(
            &col(&[0.0, 2.0]),
            &col(&[1.0, 3.0]),
            &KernelSpec::linear(),
            None,
        )
        .unwrap();
        assert_eq!(v.value, -1.0);
        // Identical sets: term3 = 1/4.
        let v = mmd2_unbiased(
            &col(&[0.0, 1.0]),
            &col(&[0.0, 1.0]),
            &KernelSpec::linear(),
            None,
        )
        .unwrap();
        assert_eq!(v.value, -0.5);
    }

    #[test]
    fn constant_rbf_gram_gives_zero() {
        let x = EmbeddingMatrix::from_rows(&[[1.0, 2.0]; 3]).unwrap();
        let y = EmbeddingMatrix::from_rows(&[[1.0, 2.0]; 4]).unwrap();
        let v = mmd2_unbiased(&x, &y, &KernelSpec::rbf_auto(), None).unwrap();
        assert_eq!(v.value, 0.0);
        assert_eq!(v.sigma_used, Some(1.0));
    }

    #[test]
    fn too_few_samples() {
        let one = col(&[1.0]);
        let two = col(&[1.0, 2.0]);
        for f in [mmd2_unbiased::<f64>, mmd2_oracle::<f64>] {
            assert!(matches!(
                f(&one, &two, &KernelSpec::linear(), None),
                Err(Error::InsufficientSamples { m: 1, n: 2 })
            ));
            assert!(matches!(
                f(&two, &one, &KernelSpec::rbf_auto(), None),
                Err(Error::InsufficientSamples { m: 2, n: 1 })
            ));
        }
    }

    #[test]
    fn override_beats_fixed_bandwidth() {
        let (x, y) = (col(&[0.0, 1.0]), col(&[2.0, 5.0]));
        let fixed = KernelSpec::rbf_fixed(0.3).unwrap();
        let a = mmd2_unbiased(&x, &y, &fixed, Some(2.0)).unwrap();
        let b = mmd2_unbiased(&x, &y, &KernelSpec::rbf_fixed(2.0).unwrap(), None).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.sigma_used, Some(2.0));
    }

    #[test]
    fn pooled_identity_split_matches_blocks_bitwise() {
        let x =
            EmbeddingMatrix::new(7, 3, (0..21).map(|v| (v as f64 * 1.3).cos()).collect()).unwrap();
        let y =
            EmbeddingMatrix::new(5, 3, (0..15).map(|v| (v as f64 * 0.7).sin()).collect()).unwrap();
        for spec in [KernelSpec::rbf_auto(), KernelSpec::linear()] {
            let blocks = gram_blocks(&x, &y, &spec).unwrap();
            let z = x.concat(&y).unwrap();
            let pooled =
                crate::kernels::Evaluator::new(spec.family, blocks.sigma_used).gram(&z, &z, false);
            let xs: Vec<u32> = (0..7).collect();
            let ys: Vec<u32> = (7..12).collect();
            assert_eq!(
                mmd2_from_pooled(&pooled, &xs, &ys).to_bits(),
                mmd2_from_blocks(&blocks).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn works_in_single_precision() {
        let x: EmbeddingMatrix<f32> = col(&[0.0, 2.0]).cast().unwrap();
        let y: EmbeddingMatrix<f32> = col(&[1.0, 3.0]).cast().unwrap();
        assert_eq!(
            mmd2_unbiased(&x, &y, &KernelSpec::linear(), None)
                .unwrap()
                .value,
            -1.0f32
        );
    }
}
