use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Categorical distribution backed by a cumulative table; `O(log n)` per draw.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    cdf: Vec<f64>,
}

impl CumulativeTable {
    /// Weights need not be normalized but must be finite, nonnegative, and not all zero.
    pub fn new(weights: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidDistribution(format!("weight {i} is {w}")));
            }
            acc += w;
            cdf.push(acc);
        }
        if acc.is_nan() || acc <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(CumulativeTable { cdf })
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    pub fn total(&self) -> f64 {
        *self.cdf.last().expect("nonempty by construction")
    }

    /// Zero-weight entries are never returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

/// Draws from `Dir(shape)` by normalizing unit-scale Gamma variates.
///
/// Components with zero shape stay exactly zero. If every Gamma draw underflows
/// (tiny concentrations) the draw degenerates to a single component picked with
/// probability proportional to its shape, which is the small-concentration limit.
pub fn sample_dirichlet<R: Rng + ?Sized>(shape: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(shape.len());
    for (i, &a) in shape.iter().enumerate() {
        if a == 0.0 {
            out.push(0.0);
            continue;
        }
        let gamma = Gamma::new(a, 1.0)
            .map_err(|e| Error::InvalidDistribution(format!("Dirichlet shape {i} = {a}: {e}")))?;
        out.push(gamma.sample(rng));
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 && total.is_finite() {
        out.iter_mut().for_each(|x| *x /= total);
    } else {
        let pick = CumulativeTable::new(shape)?.sample(rng);
        out.iter_mut().for_each(|x| *x = 0.0);
        out[pick] = 1.0;
    }
    Ok(out)
}
