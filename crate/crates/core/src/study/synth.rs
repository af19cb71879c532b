use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::EmbeddingMatrix;
use crate::rng::PinnedRng;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SynthFamily {
    /// Isotropic normal: `mean + scale * N(0, I)`.
    Gaussian { mean: Vec<f64>, scale: f64 },
    /// Two interleaved half circles in the first two coordinates, translated by
    /// `offset`, with isotropic noise of standard deviation `noise` on every coordinate.
    Moons { offset: Vec<f64>, noise: f64 },
    /// Equal-weight mixture of isotropic normals sharing one `scale`.
    Mixture { means: Vec<Vec<f64>>, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub family: SynthFamily,
    pub dim: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn gaussian(mean: Vec<f64>, scale: f64, seed: u64) -> Result<Self> {
        let spec = SynthSpec {
            dim: mean.len(),
            family: SynthFamily::Gaussian { mean, scale },
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        let check_vec = |v: &[f64], what: &str| {
            if v.len() != self.dim {
                return Err(Error::Config(format!(
                    "{what} has {} entries, dim is {}",
                    v.len(),
                    self.dim
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config(format!("{what} must be finite")));
            }
            Ok(())
        };
        let check_scale = |s: f64, what: &str| {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("{what} must be positive, got {s}")));
            }
            Ok(())
        };
        match &self.family {
            SynthFamily::Gaussian { mean, scale } => {
                check_vec(mean, "mean")?;
                check_scale(*scale, "scale")
            }
            SynthFamily::Moons { offset, noise } => {
                if self.dim < 2 {
                    return Err(Error::Config("moons need dim >= 2".into()));
                }
                check_vec(offset, "offset")?;
                check_scale(*noise, "noise")
            }
            SynthFamily::Mixture { means, scale } => {
                if means.is_empty() {
                    return Err(Error::Config("mixture needs at least one mean".into()));
                }
                means
                    .iter()
                    .try_for_each(|m| check_vec(m, "component mean"))?;
                check_scale(*scale, "scale")
            }
        }
    }
}

/// `n` i.i.d. rows from `spec`, deterministic in `(spec.seed, n)`. Rows are drawn
/// one after another, so a larger `n` extends a smaller one.
pub fn generate_synthetic(spec: &SynthSpec, n: usize) -> Result<EmbeddingMatrix<f64>> {
    spec.validate()?;
    let mut rng = PinnedRng::new(spec.seed);
    let mut values = Vec::with_capacity(n * spec.dim);
    for _ in 0..n {
        match &spec.family {
            SynthFamily::Gaussian { mean, scale } => {
                values.extend(mean.iter().map(|&mu| mu + scale * rng.standard_normal()));
            }
            SynthFamily::Moons { offset, noise } => {
                let upper = rng.below(2) == 0;
                let theta = std::f64::consts::PI * rng.open01();
                let (bx, by) = if upper {
                    (theta.cos(), theta.sin())
                } else {
                    (1.0 - theta.cos(), 0.5 - theta.sin())
                };
                for (k, &o) in offset.iter().enumerate() {
                    let base = match k {
                        0 => bx,
                        1 => by,
                        _ => 0.0,
                    };
                    values.push(o + base + noise * rng.standard_normal());
                }
            }
            SynthFamily::Mixture { means, scale } => {
                let component = &means[rng.below(means.len() as u64) as usize];
                values.extend(
                    component
                        .iter()
                        .map(|&mu| mu + scale * rng.standard_normal()),
                );
            }
        }
    }
    EmbeddingMatrix::new(n, spec.dim, values)
}
