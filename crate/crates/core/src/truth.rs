//! Closed-form ground-truth distributions of the planted-topic model.
//!
//! Everything here is a deterministic function of the word marginal `P(w)`,
//! the word-to-topic map, and the per-document topics. No sampling happens in
//! this module, so it is generic over any [`Probability`] scalar, including
//! exact rationals.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Probability;

/// Topic distribution over the corpus,
/// `P(t) = Σ_{w∈V_T} δ(t_w, t) P(w) / Σ_{w∈V_T} P(w)`.
///
/// `word_topic[w]` is `None` for stopwords.
pub fn topic_marginal<S: Probability>(
    word_marginal: &[S],
    word_topic: &[Option<u32>],
    num_topics: usize,
) -> Result<Vec<S>> {
    if word_marginal.len() != word_topic.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} word probabilities but {} word-topic entries",
            word_marginal.len(),
            word_topic.len()
        )));
    }
    let mut mass = vec![S::zero(); num_topics];
    let mut topical = S::zero();
    for (&p, t) in word_marginal.iter().zip(word_topic) {
        if let Some(t) = *t {
            let slot = mass.get_mut(t as usize).ok_or(Error::LabelOutOfRange {
                label: t,
                num_labels: num_topics,
            })?;
            *slot = *slot + p;
            topical = topical + p;
        }
    }
    if topical <= S::zero() {
        return Err(Error::NoTopicalMass);
    }
    Ok(mass.into_iter().map(|m| m / topical).collect())
}

/// Planted distributions: word marginal, vocabulary partition, topic marginal,
/// and document topics.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth<S> {
    word_marginal: Vec<S>,
    word_topic: Vec<Option<u32>>,
    topic_marginal: Vec<S>,
    doc_topic: Vec<u32>,
    topic_sizes: Vec<usize>,
}

impl<S: Probability> GroundTruth<S> {
    /// Builds the truth and derives `P(t)` and the topic sizes. Every topic must own at
    /// least one topical word.
    pub fn new(
        word_marginal: Vec<S>,
        word_topic: Vec<Option<u32>>,
        num_topics: usize,
        doc_topic: Vec<u32>,
    ) -> Result<Self> {
        let topic_marginal = topic_marginal(&word_marginal, &word_topic, num_topics)?;
        let mut topic_sizes = vec![0usize; num_topics];
        for t in word_topic.iter().flatten() {
            topic_sizes[*t as usize] += 1;
        }
        if let Some(t) = topic_sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidDistribution(format!(
                "topic {t} has no topical words"
            )));
        }
        if let Some(t) = topic_marginal.iter().position(|p| *p <= S::zero()) {
            return Err(Error::InvalidDistribution(format!(
                "topic {t} has zero probability mass"
            )));
        }
        if let Some(&t) = doc_topic.iter().find(|&&t| t as usize >= num_topics) {
            return Err(Error::LabelOutOfRange {
                label: t,
                num_labels: num_topics,
            });
        }
        Ok(GroundTruth {
            word_marginal,
            word_topic,
            topic_marginal,
            doc_topic,
            topic_sizes,
        })
    }

    pub fn num_topics(&self) -> usize {
        self.topic_marginal.len()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.word_marginal.len()
    }

    pub fn num_documents(&self) -> usize {
        self.doc_topic.len()
    }

    pub fn word_marginal(&self) -> &[S] {
        &self.word_marginal
    }

    pub fn topic_marginal(&self) -> &[S] {
        &self.topic_marginal
    }

    /// `t_w` per word; `None` marks a stopword.
    pub fn word_topic_map(&self) -> &[Option<u32>] {
        &self.word_topic
    }

    pub fn doc_topic_map(&self) -> &[u32] {
        &self.doc_topic
    }

    pub fn topic_sizes(&self) -> &[usize] {
        &self.topic_sizes
    }

    pub fn is_stopword(&self, w: usize) -> bool {
        self.word_topic[w].is_none()
    }

    pub fn stopwords(&self) -> impl Iterator<Item = u32> + '_ {
        self.word_topic
            .iter()
            .enumerate()
            .filter_map(|(w, t)| t.is_none().then_some(w as u32))
    }

    pub fn topical_words(&self) -> impl Iterator<Item = u32> + '_ {
        self.word_topic
            .iter()
            .enumerate()
            .filter_map(|(w, t)| t.is_some().then_some(w as u32))
    }

    /// `P(w|t) = c_w δ(t_w,t) P(w)/P(t) + (1 - c_w) P(w)` for topical words and
    /// `P(w)` for stopwords.
    pub fn word_given_topic(&self, c_w: S, w: usize, t: usize) -> S {
        let p_w = self.word_marginal[w];
        match self.word_topic[w] {
            None => p_w,
            Some(tw) => {
                let p_t = self.topic_marginal[t];
                debug_assert!(p_t > S::zero(), "topic {t} has zero mass");
                let structured = if tw as usize == t {
                    c_w * p_w / p_t
                } else {
                    S::zero()
                };
                structured + (S::one() - c_w) * p_w
            }
        }
    }

    /// `P(t|d) = c_d δ(t_d,t) + (1 - c_d) P(t)`.
    pub fn topic_given_doc(&self, c_d: S, t: usize, d: usize) -> S {
        let planted = if self.doc_topic[d] as usize == t {
            c_d
        } else {
            S::zero()
        };
        planted + (S::one() - c_d) * self.topic_marginal[t]
    }

    /// `K × V` matrix of `P(w|t)`.
    pub fn word_topic_matrix(&self, c_w: S) -> DenseMatrix<S> {
        let (k, v) = (self.num_topics(), self.vocabulary_size());
        let data = (0..k)
            .flat_map(|t| (0..v).map(move |w| (t, w)))
            .map(|(t, w)| self.word_given_topic(c_w, w, t))
            .collect();
        DenseMatrix::from_vec(k, v, data).expect("shape is consistent by construction")
    }

    /// `D × K` matrix of `P(t|d)`.
    pub fn topic_doc_matrix(&self, c_d: S) -> DenseMatrix<S> {
        let (k, d) = (self.num_topics(), self.num_documents());
        let data = (0..d)
            .flat_map(|d| (0..k).map(move |t| (t, d)))
            .map(|(t, d)| self.topic_given_doc(c_d, t, d))
            .collect();
        DenseMatrix::from_vec(d, k, data).expect("shape is consistent by construction")
    }
}
