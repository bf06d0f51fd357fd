//! Sampling a [`SyntheticCorpus`] from a [`CorpusSpec`].
//!
//! Vocabulary assignment draws from stream 0 of the spec seed; document `d`
//! draws its topic, its bursty rows, and all of its tokens from stream `d + 1`.
//! The corpus is therefore a pure function of the spec and independent of how
//! documents are scheduled across threads.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::corpus::{SyntheticCorpus, TokenLabeling};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{document_stream, vocabulary_stream};
use crate::sampling::{sample_dirichlet, CumulativeTable};
use crate::scalar::{compensated_sum, Real};
use crate::spec::{CorpusSpec, Shape};
use crate::truth::{topic_marginal, GroundTruth};

/// Normalized rank distribution: uniform, or `∝ r^(-γ)` over ranks `1..=n`.
/// Index `i` carries rank `i + 1`.
pub fn rank_distribution<S: Real>(shape: Shape, n: usize) -> Result<Vec<S>> {
    if n == 0 {
        return Err(Error::InvalidSpec("distribution over zero ranks".into()));
    }
    let weights: Vec<S> = match shape {
        Shape::Uniform => vec![S::one(); n],
        Shape::PowerLaw(gamma) if gamma > 1.0 && gamma.is_finite() => {
            let g = S::from_f64(gamma).expect("finite exponent");
            (1..=n).map(|r| S::from_count(r).powf(-g)).collect()
        }
        Shape::PowerLaw(gamma) => {
            return Err(Error::InvalidSpec(format!(
                "power-law exponent must be > 1, got {gamma}"
            )))
        }
    };
    let total = compensated_sum(weights.iter().copied());
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Global word marginal `P(w)`; word id `r - 1` has frequency rank `r`.
pub fn build_word_marginal<S: Real>(shape: Shape, vocabulary_size: usize) -> Result<Vec<S>> {
    if vocabulary_size < 2 {
        return Err(Error::InvalidSpec(format!(
            "vocabulary_size must be >= 2, got {vocabulary_size}"
        )));
    }
    rank_distribution(shape, vocabulary_size)
}

/// Integer topic sizes summing to `num_topical` with every topic nonempty.
///
/// Ideal sizes come from the rank distribution; integer parts are topped up by
/// largest fractional remainder, ties to the lowest topic index. Under a uniform
/// shape this hands the remainder one word each to the lowest-indexed topics.
pub fn topic_sizes(shape: Shape, num_topical: usize, num_topics: usize) -> Result<Vec<usize>> {
    if num_topics == 0 || num_topical < num_topics {
        return Err(Error::InvalidSpec(format!(
            "{num_topical} topical words cannot cover {num_topics} topics"
        )));
    }
    let q: Vec<f64> = rank_distribution(shape, num_topics)?;
    let ideal: Vec<f64> = q.iter().map(|p| p * num_topical as f64).collect();
    let mut sizes: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(1)).collect();
    let mut assigned: usize = sizes.iter().sum();

    let mut by_remainder: Vec<usize> = (0..num_topics).collect();
    by_remainder.sort_by(|&a, &b| {
        let (ra, rb) = (ideal[a] - ideal[a].floor(), ideal[b] - ideal[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut i = 0;
    while assigned < num_topical {
        sizes[by_remainder[i % num_topics]] += 1;
        assigned += 1;
        i += 1;
    }
    // the floor of one may have pushed small topics over budget; shave the largest
    while assigned > num_topical {
        let t = (0..num_topics)
            .filter(|&t| sizes[t] > 1)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("num_topical >= num_topics leaves room");
        sizes[t] -= 1;
        assigned -= 1;
    }
    Ok(sizes)
}

/// Split of the vocabulary into stopwords and topical words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyAssignment {
    pub stopwords: Vec<u32>,
    pub topical: Vec<u32>,
    pub topic_sizes: Vec<usize>,
    /// `t_w` per word id, `None` for stopwords.
    pub word_topic: Vec<Option<u32>>,
}

/// Picks `round(P_s·V)` stopwords (uniformly at random, or the most frequent ranks
/// when `stopwords_by_rank`) and partitions the rest uniformly at random into
/// topics of the prescribed sizes.
pub fn assign_vocabulary<R: Rng + ?Sized>(
    spec: &CorpusSpec,
    rng: &mut R,
) -> Result<VocabularyAssignment> {
    spec.validate()?;
    let v = spec.vocabulary_size;
    let n_stop = spec.num_stopwords();
    let sizes = topic_sizes(spec.topic_sizes, v - n_stop, spec.num_topics)?;

    let mut ids: Vec<u32> = (0..v as u32).collect();
    if !spec.stopwords_by_rank {
        ids.shuffle(rng);
    }
    let mut stopwords = ids[..n_stop].to_vec();
    let mut topical = ids[n_stop..].to_vec();
    topical.shuffle(rng);

    let mut word_topic = vec![None; v];
    let mut cursor = 0;
    for (t, &size) in sizes.iter().enumerate() {
        for &w in &topical[cursor..cursor + size] {
            word_topic[w as usize] = Some(t as u32);
        }
        cursor += size;
    }
    stopwords.sort_unstable();
    topical.sort_unstable();
    Ok(VocabularyAssignment {
        stopwords,
        topical,
        topic_sizes: sizes,
        word_topic,
    })
}

/// Per-document word-topic rows `P_d(w|t) ~ Dir(a_c · P(w|t))`, drawn on first use.
pub struct BurstyDocDistribution<'a> {
    base: &'a DenseMatrix<f64>,
    concentration: f64,
    rows: Vec<Option<Vec<f64>>>,
}

impl<'a> BurstyDocDistribution<'a> {
    pub fn new(base: &'a DenseMatrix<f64>, concentration: f64) -> Self {
        BurstyDocDistribution {
            base,
            concentration,
            rows: vec![None; base.rows()],
        }
    }

    pub fn row<R: Rng + ?Sized>(&mut self, topic: usize, rng: &mut R) -> Result<&[f64]> {
        if self.rows[topic].is_none() {
            let shape: Vec<f64> = self
                .base
                .row(topic)
                .iter()
                .map(|p| p * self.concentration)
                .collect();
            self.rows[topic] = Some(sample_dirichlet(&shape, rng)?);
        }
        Ok(self.rows[topic].as_deref().expect("filled above"))
    }
}

struct DocumentDraw {
    topic: u32,
    words: Vec<u32>,
    labels: Vec<u32>,
}

/// Runs the full generative process for `spec`.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let k = spec.num_topics;
    let word_marginal: Vec<f64> = build_word_marginal(spec.word_dist, spec.vocabulary_size)?;
    let vocab = assign_vocabulary(spec, &mut vocabulary_stream(spec.seed))?;
    let p_topic = topic_marginal(&word_marginal, &vocab.word_topic, k)?;

    // truth with a placeholder document map, only used to evaluate P(w|t)
    let shell = GroundTruth::new(word_marginal.clone(), vocab.word_topic.clone(), k, vec![])?;
    let word_topic = shell.word_topic_matrix(spec.structure_word);
    let word_tables = word_topic
        .iter_rows()
        .map(CumulativeTable::new)
        .collect::<Result<Vec<_>>>()?;
    let topic_table = CumulativeTable::new(&p_topic)?;
    let c_d = spec.structure_doc;

    let draw_document = |d: usize| -> Result<DocumentDraw> {
        let mut rng = document_stream(spec.seed, d);
        let t_d = topic_table.sample(&mut rng);
        let doc_topic: Vec<f64> = (0..k)
            .map(|t| if t == t_d { c_d } else { 0.0 } + (1.0 - c_d) * p_topic[t])
            .collect();
        let doc_table = CumulativeTable::new(&doc_topic)?;
        let m = spec.doc_length(d);
        let mut words = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        match spec.burstiness {
            None => {
                for _ in 0..m {
                    let z = doc_table.sample(&mut rng);
                    words.push(word_tables[z].sample(&mut rng) as u32);
                    labels.push(z as u32);
                }
            }
            Some(a_c) => {
                let mut bursty = BurstyDocDistribution::new(&word_topic, a_c);
                let mut tables: Vec<Option<CumulativeTable>> = vec![None; k];
                for _ in 0..m {
                    let z = doc_table.sample(&mut rng);
                    if tables[z].is_none() {
                        tables[z] = Some(CumulativeTable::new(bursty.row(z, &mut rng)?)?);
                    }
                    let table = tables[z].as_ref().expect("filled above");
                    words.push(table.sample(&mut rng) as u32);
                    labels.push(z as u32);
                }
            }
        }
        Ok(DocumentDraw {
            topic: t_d as u32,
            words,
            labels,
        })
    };

    let draws = (0..spec.num_documents)
        .into_par_iter()
        .map(draw_document)
        .collect::<Result<Vec<_>>>()?;

    let mut doc_topic = Vec::with_capacity(draws.len());
    let mut docs = Vec::with_capacity(draws.len());
    let mut planted = Vec::with_capacity(spec.total_tokens());
    for draw in draws {
        doc_topic.push(draw.topic);
        docs.push(draw.words);
        planted.extend(draw.labels);
    }
    let truth = GroundTruth::new(word_marginal, vocab.word_topic, k, doc_topic)?;
    let planted = TokenLabeling::new(planted, k)?;
    SyntheticCorpus::from_parts(spec.clone(), truth, docs, planted)
}
