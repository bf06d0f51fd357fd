use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::spec::CorpusSpec;
use crate::truth::GroundTruth;

/// One topic id per token, in document-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenLabeling {
    labels: Vec<u32>,
    num_labels: usize,
}

impl TokenLabeling {
    /// Labels must lie in `[0, num_labels)`.
    pub fn new(labels: Vec<u32>, num_labels: usize) -> Result<Self> {
        if let Some(&label) = labels.iter().find(|&&l| l as usize >= num_labels) {
            return Err(Error::LabelOutOfRange { label, num_labels });
        }
        Ok(TokenLabeling { labels, num_labels })
    }

    /// Label space sized to the largest label present.
    pub fn from_labels(labels: Vec<u32>) -> Self {
        let num_labels = labels.iter().max().map_or(0, |&m| m as usize + 1);
        TokenLabeling { labels, num_labels }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Size of the label space (may exceed the number of labels actually used).
    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// Number of distinct labels that occur at least once.
    pub fn num_used(&self) -> usize {
        let mut seen = vec![false; self.num_labels];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// Splits the flat labels back into per-document slices.
    pub fn split_by<'a>(
        &'a self,
        doc_lengths: impl IntoIterator<Item = usize> + 'a,
    ) -> impl Iterator<Item = &'a [u32]> + 'a {
        let mut start = 0;
        doc_lengths.into_iter().map(move |m| {
            let s = &self.labels[start..start + m];
            start += m;
            s
        })
    }
}

/// Generated corpus together with everything that was planted in it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    spec: CorpusSpec,
    truth: GroundTruth<f64>,
    docs: Vec<Vec<u32>>,
    planted: TokenLabeling,
}

impl SyntheticCorpus {
    pub fn from_parts(
        spec: CorpusSpec,
        truth: GroundTruth<f64>,
        docs: Vec<Vec<u32>>,
        planted: TokenLabeling,
    ) -> Result<Self> {
        let n: usize = docs.iter().map(Vec::len).sum();
        if planted.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: planted.len(),
            });
        }
        if docs.len() != truth.num_documents() {
            return Err(Error::DimensionMismatch(format!(
                "{} documents but truth covers {}",
                docs.len(),
                truth.num_documents()
            )));
        }
        if planted.num_labels() > truth.num_topics() {
            return Err(Error::DimensionMismatch(format!(
                "planted labels use {} topics, truth has {}",
                planted.num_labels(),
                truth.num_topics()
            )));
        }
        let v = truth.vocabulary_size();
        if let Some(&w) = docs.iter().flatten().find(|&&w| w as usize >= v) {
            return Err(Error::DimensionMismatch(format!(
                "word id {w} outside vocabulary of {v}"
            )));
        }
        Ok(SyntheticCorpus {
            spec,
            truth,
            docs,
            planted,
        })
    }

    pub fn spec(&self) -> &CorpusSpec {
        &self.spec
    }

    pub fn truth(&self) -> &GroundTruth<f64> {
        &self.truth
    }

    pub fn documents(&self) -> &[Vec<u32>] {
        &self.docs
    }

    pub fn planted_labels(&self) -> &TokenLabeling {
        &self.planted
    }

    pub fn num_tokens(&self) -> usize {
        self.planted.len()
    }

    pub fn doc_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.docs.iter().map(Vec::len)
    }

    /// `true` for tokens whose word is topical.
    pub fn topical_token_mask(&self) -> Vec<bool> {
        self.docs
            .iter()
            .flatten()
            .map(|&w| !self.truth.is_stopword(w as usize))
            .collect()
    }

    pub fn into_documents(self) -> Vec<Vec<u32>> {
        self.docs
    }
}

/// Output of any inference backend: `P̂(t|d)`, `P̂(w|t)` and per-token labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModelResult {
    pub topic_doc: DenseMatrix<f64>,
    pub word_topic: DenseMatrix<f64>,
    pub token_labels: TokenLabeling,
    pub algorithm_tag: String,
    pub hyperparams: BTreeMap<String, String>,
}

pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

impl TopicModelResult {
    pub fn new(
        topic_doc: DenseMatrix<f64>,
        word_topic: DenseMatrix<f64>,
        token_labels: TokenLabeling,
        algorithm_tag: impl Into<String>,
        hyperparams: BTreeMap<String, String>,
    ) -> Result<Self> {
        let result = TopicModelResult {
            topic_doc,
            word_topic,
            token_labels,
            algorithm_tag: algorithm_tag.into(),
            hyperparams,
        };
        result.validate()?;
        Ok(result)
    }

    /// Inferred topic count `K'`.
    pub fn num_topics(&self) -> usize {
        self.word_topic.rows()
    }

    pub fn validate(&self) -> Result<()> {
        if self.topic_doc.cols() != self.word_topic.rows() {
            return Err(Error::DimensionMismatch(format!(
                "P(t|d) has {} topic columns but P(w|t) has {} topic rows",
                self.topic_doc.cols(),
                self.word_topic.rows()
            )));
        }
        if let Some((row, sum)) = self
            .topic_doc
            .first_non_stochastic_row(STOCHASTIC_TOLERANCE)
        {
            return Err(Error::NotStochastic {
                matrix: "P(t|d)",
                row,
                sum,
            });
        }
        if let Some((row, sum)) = self
            .word_topic
            .first_non_stochastic_row(STOCHASTIC_TOLERANCE)
        {
            return Err(Error::NotStochastic {
                matrix: "P(w|t)",
                row,
                sum,
            });
        }
        if self.token_labels.num_labels() > self.num_topics() {
            return Err(Error::LabelOutOfRange {
                label: self.token_labels.num_labels() as u32 - 1,
                num_labels: self.num_topics(),
            });
        }
        Ok(())
    }
}
