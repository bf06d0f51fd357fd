//! Overlap between two labelings: token-level confusion matrix, mutual
//! information, normalized mutual information and variation of information.
//!
//! All information quantities are in bits. The confusion matrix keeps exact
//! integer counts; probabilities are formed once, at scoring time.

use rayon::prelude::*;

use crate::corpus::{SyntheticCorpus, TokenLabeling, TopicModelResult};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

/// Joint counts of (planted, inferred) labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    total: u64,
}

impl ConfusionMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ConfusionMatrix {
            rows,
            cols,
            counts: vec![0; rows * cols],
            total: 0,
        }
    }

    /// Builds directly from integer counts (row-major).
    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} counts for a {rows}x{cols} confusion matrix",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(ConfusionMatrix {
            rows,
            cols,
            counts,
            total,
        })
    }

    pub fn record(&mut self, planted: u32, inferred: u32) {
        self.counts[planted as usize * self.cols + inferred as usize] += 1;
        self.total += 1;
    }

    /// Adds another partial tally over the same label spaces.
    pub fn merge(mut self, other: &ConfusionMatrix) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "merging mismatched tallies"
        );
        self.counts
            .iter_mut()
            .zip(&other.counts)
            .for_each(|(a, b)| *a += b);
        self.total += other.total;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, planted: usize, inferred: usize) -> u64 {
        self.counts[planted * self.cols + inferred]
    }

    pub fn row_counts(&self) -> Vec<u64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.count(i, j)).sum())
            .collect()
    }

    pub fn col_counts(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.count(i, j)).sum())
            .collect()
    }

    /// `p_{t,t'}`.
    pub fn joint<S: Real>(&self, planted: usize, inferred: usize) -> S {
        S::from_u64(self.count(planted, inferred)).unwrap() / S::from_u64(self.total).unwrap()
    }

    pub fn row_marginal<S: Real>(&self) -> Vec<S> {
        let n = S::from_u64(self.total).unwrap();
        self.row_counts()
            .into_iter()
            .map(|c| S::from_u64(c).unwrap() / n)
            .collect()
    }

    pub fn col_marginal<S: Real>(&self) -> Vec<S> {
        let n = S::from_u64(self.total).unwrap();
        self.col_counts()
            .into_iter()
            .map(|c| S::from_u64(c).unwrap() / n)
            .collect()
    }
}

const SHARD: usize = 1 << 16;

fn tally(
    planted: &[u32],
    inferred: &[u32],
    mask: Option<&[bool]>,
    rows: usize,
    cols: usize,
) -> ConfusionMatrix {
    let shard = |start: usize| {
        let end = (start + SHARD).min(planted.len());
        let mut cm = ConfusionMatrix::zeros(rows, cols);
        for i in start..end {
            if mask.is_none_or(|m| m[i]) {
                cm.record(planted[i], inferred[i]);
            }
        }
        cm
    };
    if planted.len() <= SHARD {
        return shard(0);
    }
    (0..planted.len())
        .into_par_iter()
        .step_by(SHARD)
        .map(shard)
        .reduce(|| ConfusionMatrix::zeros(rows, cols), |a, b| a.merge(&b))
}

fn check_lengths(a: &TokenLabeling, b: &TokenLabeling) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyLabeling);
    }
    Ok(())
}

/// Confusion matrix of two token labelings of the same corpus. The two label
/// spaces are sized independently.
pub fn confusion(planted: &TokenLabeling, inferred: &TokenLabeling) -> Result<ConfusionMatrix> {
    check_lengths(planted, inferred)?;
    Ok(tally(
        planted.labels(),
        inferred.labels(),
        None,
        planted.num_labels(),
        inferred.num_labels(),
    ))
}

/// Confusion restricted to tokens with `mask[i] == true`.
pub fn confusion_masked(
    planted: &TokenLabeling,
    inferred: &TokenLabeling,
    mask: &[bool],
) -> Result<ConfusionMatrix> {
    check_lengths(planted, inferred)?;
    if mask.len() != planted.len() {
        return Err(Error::LengthMismatch {
            left: planted.len(),
            right: mask.len(),
        });
    }
    let cm = tally(
        planted.labels(),
        inferred.labels(),
        Some(mask),
        planted.num_labels(),
        inferred.num_labels(),
    );
    if cm.total == 0 {
        return Err(Error::EmptyLabeling);
    }
    Ok(cm)
}

/// Information-theoretic overlap between two labelings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapScore<S> {
    /// `I` in bits.
    pub mutual_information: S,
    /// `H` of the planted (row) side, bits.
    pub entropy_planted: S,
    /// `H'` of the inferred (column) side, bits.
    pub entropy_inferred: S,
    /// `2I / (H + H')`, or 1 when both sides are a single class.
    pub nmi: S,
    /// `H + H' - 2I`, bits.
    pub voi: S,
}

fn entropy_of_counts<S: Real>(counts: &[u64], total: S) -> S {
    let terms = counts.iter().filter(|&&c| c > 0).map(|&c| {
        let p = S::from_u64(c).unwrap() / total;
        -p * p.log2()
    });
    compensated_sum(terms)
}

/// Scores a confusion matrix. Rounding can push `I` a hair outside
/// `[0, min(H, H')]`; it is clamped so that `0 ≤ Î ≤ 1` and `voi ≥ 0` hold exactly.
pub fn nmi<S: Real>(cm: &ConfusionMatrix) -> OverlapScore<S> {
    let n = S::from_u64(cm.total).unwrap();
    let rows = cm.row_counts();
    let cols = cm.col_counts();
    let h = entropy_of_counts(&rows, n);
    let h_prime = entropy_of_counts(&cols, n);

    let terms = (0..cm.rows)
        .flat_map(|i| (0..cm.cols).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let c = cm.count(i, j);
            (c > 0).then(|| {
                let c = S::from_u64(c).unwrap();
                let expected = S::from_u64(rows[i]).unwrap() * S::from_u64(cols[j]).unwrap();
                (c / n) * S::log2_ratio(c * n, expected)
            })
        });
    let mi = compensated_sum(terms).max(S::zero()).min(h.min(h_prime));

    let denom = h + h_prime;
    let nmi = if denom > S::zero() {
        (mi + mi) / denom
    } else {
        S::one()
    };
    OverlapScore {
        mutual_information: mi,
        entropy_planted: h,
        entropy_inferred: h_prime,
        nmi: nmi.min(S::one()),
        voi: h + h_prime - (mi + mi),
    }
}

/// Scoring knobs for token-level overlap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Restrict the confusion matrix to tokens of topical words.
    pub exclude_stopword_tokens: bool,
}

/// Token-level overlap between the planted labels of `corpus` and `inferred`.
pub fn token_overlap(
    corpus: &SyntheticCorpus,
    inferred: &TokenLabeling,
    options: ScoreOptions,
) -> Result<OverlapScore<f64>> {
    let cm = if options.exclude_stopword_tokens {
        confusion_masked(
            corpus.planted_labels(),
            inferred,
            &corpus.topical_token_mask(),
        )?
    } else {
        confusion(corpus.planted_labels(), inferred)?
    };
    Ok(nmi(&cm))
}

/// `s_d = argmax_t P̂(t|d)`, ties to the lowest topic index.
pub fn doc_classification_labels(result: &TopicModelResult) -> Vec<u32> {
    result
        .topic_doc
        .iter_rows()
        .map(|row| {
            let mut best = 0;
            for (t, &p) in row.iter().enumerate() {
                if p > row[best] {
                    best = t;
                }
            }
            best as u32
        })
        .collect()
}

/// NMI between predicted document classes and reference classes.
pub fn doc_classification_nmi<S: Real>(
    predicted: &[u32],
    reference: &[u32],
) -> Result<OverlapScore<S>> {
    let p = TokenLabeling::from_labels(predicted.to_vec());
    let r = TokenLabeling::from_labels(reference.to_vec());
    Ok(nmi(&confusion(&p, &r)?))
}

/// NMI between two inferred labelings of the same corpus.
pub fn reproducibility<S: Real>(a: &TokenLabeling, b: &TokenLabeling) -> Result<OverlapScore<S>> {
    Ok(nmi(&confusion(a, b)?))
}

/// Shannon entropy in bits of a probability vector.
pub fn entropy_bits<S: Real>(p: &[S]) -> S {
    compensated_sum(p.iter().filter(|&&x| x > S::zero()).map(|&x| -x * x.log2()))
}

/// `½ Σ |a_i - b_i|`; the shorter vector is padded with zeros.
pub fn total_variation<S: Real>(a: &[S], b: &[S]) -> S {
    let n = a.len().max(b.len());
    let at = |v: &[S], i: usize| v.get(i).copied().unwrap_or_else(S::zero);
    let half = S::one() / (S::one() + S::one());
    half * compensated_sum((0..n).map(|i| (at(a, i) - at(b, i)).abs()))
}
