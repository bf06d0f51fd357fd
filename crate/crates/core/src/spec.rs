//! Knobs of the generative process.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Functional form of a rank-ordered distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    #[default]
    Uniform,
    /// Mass of rank `r` (1-based) proportional to `r^(-exponent)`; requires `exponent > 1`.
    PowerLaw(f64),
}

/// Text form `uniform` or `power_law:<exponent>`.
impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Uniform => f.write_str("uniform"),
            Shape::PowerLaw(g) => write!(f, "power_law:{g:?}"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(Shape::Uniform);
        }
        s.strip_prefix("power_law:")
            .and_then(|g| g.parse().ok())
            .map(Shape::PowerLaw)
            .ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "bad shape `{s}` (expected uniform or power_law:<exponent>)"
                ))
            })
    }
}

impl Shape {
    fn validate(&self, what: &str) -> Result<()> {
        match *self {
            Shape::Uniform => Ok(()),
            Shape::PowerLaw(g) if g > 1.0 && g.is_finite() => Ok(()),
            Shape::PowerLaw(g) => Err(Error::InvalidSpec(format!(
                "{what} power-law exponent must be finite and > 1, got {g}"
            ))),
        }
    }
}

/// Document lengths: one shared length or an explicit per-document list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DocLengths {
    Fixed(usize),
    PerDocument(Vec<usize>),
}

impl DocLengths {
    pub fn length(&self, doc: usize) -> usize {
        match self {
            DocLengths::Fixed(m) => *m,
            DocLengths::PerDocument(v) => v[doc],
        }
    }
}

/// Full parameterization of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub num_topics: usize,
    pub num_documents: usize,
    pub doc_length: DocLengths,
    pub vocabulary_size: usize,
    #[serde(default)]
    pub stopword_fraction: f64,
    pub structure_word: f64,
    pub structure_doc: f64,
    #[serde(default)]
    pub word_dist: Shape,
    #[serde(default)]
    pub topic_sizes: Shape,
    /// Dirichlet concentration `a_c`; `None` disables burstiness.
    #[serde(default)]
    pub burstiness: Option<f64>,
    /// Take the most frequent words as stopwords instead of a random subset.
    #[serde(default)]
    pub stopwords_by_rank: bool,
    #[serde(default)]
    pub seed: u64,
}

impl CorpusSpec {
    /// Uniform word and topic-size distributions, no stopwords, no burstiness, `c = 1`.
    pub fn new(
        num_topics: usize,
        num_documents: usize,
        doc_length: usize,
        vocabulary_size: usize,
    ) -> Self {
        CorpusSpec {
            num_topics,
            num_documents,
            doc_length: DocLengths::Fixed(doc_length),
            vocabulary_size,
            stopword_fraction: 0.0,
            structure_word: 1.0,
            structure_doc: 1.0,
            word_dist: Shape::Uniform,
            topic_sizes: Shape::Uniform,
            burstiness: None,
            stopwords_by_rank: false,
            seed: 0,
        }
    }

    /// Sets `c_w = c_d = c`.
    pub fn with_structure(mut self, c: f64) -> Self {
        self.structure_word = c;
        self.structure_doc = c;
        self
    }

    pub fn with_stopword_fraction(mut self, p_s: f64) -> Self {
        self.stopword_fraction = p_s;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_word_dist(mut self, shape: Shape) -> Self {
        self.word_dist = shape;
        self
    }

    pub fn with_topic_sizes(mut self, shape: Shape) -> Self {
        self.topic_sizes = shape;
        self
    }

    pub fn with_burstiness(mut self, concentration: Option<f64>) -> Self {
        self.burstiness = concentration;
        self
    }

    pub fn with_doc_lengths(mut self, lengths: DocLengths) -> Self {
        self.doc_length = lengths;
        self
    }

    pub fn doc_length(&self, doc: usize) -> usize {
        self.doc_length.length(doc)
    }

    pub fn total_tokens(&self) -> usize {
        (0..self.num_documents).map(|d| self.doc_length(d)).sum()
    }

    /// `|V_S| = round(P_s · V)`.
    pub fn num_stopwords(&self) -> usize {
        (self.stopword_fraction * self.vocabulary_size as f64).round() as usize
    }

    pub fn num_topical_words(&self) -> usize {
        self.vocabulary_size - self.num_stopwords().min(self.vocabulary_size)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.num_topics == 0 {
            return bad("num_topics must be >= 1".into());
        }
        if self.num_documents == 0 {
            return bad("num_documents must be >= 1".into());
        }
        if self.vocabulary_size < 2 {
            return bad(format!(
                "vocabulary_size must be >= 2, got {}",
                self.vocabulary_size
            ));
        }
        match &self.doc_length {
            DocLengths::Fixed(0) => return bad("doc_length must be >= 1".into()),
            DocLengths::Fixed(_) => {}
            DocLengths::PerDocument(v) => {
                if v.len() != self.num_documents {
                    return bad(format!(
                        "{} document lengths given for {} documents",
                        v.len(),
                        self.num_documents
                    ));
                }
                if let Some(d) = v.iter().position(|&m| m == 0) {
                    return bad(format!("document {d} has length 0"));
                }
            }
        }
        for (name, x) in [
            ("stopword_fraction", self.stopword_fraction),
            ("structure_word", self.structure_word),
            ("structure_doc", self.structure_doc),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return bad(format!("{name} must lie in [0, 1], got {x}"));
            }
        }
        self.word_dist.validate("word_dist")?;
        self.topic_sizes.validate("topic_sizes")?;
        if let Some(a) = self.burstiness {
            if !(a > 0.0 && a.is_finite()) {
                return bad(format!("burstiness must be positive and finite, got {a}"));
            }
        }
        let topical = self.num_topical_words();
        if topical < self.num_topics {
            return bad(format!(
                "{topical} topical words cannot cover {} topics (need at least one word per topic)",
                self.num_topics
            ));
        }
        Ok(())
    }
}
