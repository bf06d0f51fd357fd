//! Synthetic corpora with a planted topic structure, a reference collapsed
//! Gibbs LDA sampler, and token-level overlap scores between planted and
//! inferred topic labels.
//!
//! The closed-form distributions ([`truth`]) and the information scores
//! ([`metrics`]) are generic over the scalar type; the aliases below fix the
//! common choices.

pub mod corpus;
pub mod error;
pub mod generator;
pub mod gibbs;
pub mod harness;
pub mod interchange;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod spec;
pub mod truth;

pub use corpus::{SyntheticCorpus, TokenLabeling, TopicModelResult};
pub use error::{Error, Result};
pub use generator::generate_corpus;
pub use gibbs::{run_gibbs, GibbsConfig, HyperparamPreset};
pub use metrics::{confusion, nmi, ConfusionMatrix, ScoreOptions};
pub use spec::{CorpusSpec, DocLengths, Shape};

/// Exact rational probabilities, for closed-form checks.
pub type Rational = num_rational::Ratio<i64>;

pub type GroundTruth64 = truth::GroundTruth<f64>;
pub type GroundTruth32 = truth::GroundTruth<f32>;
pub type ExactGroundTruth = truth::GroundTruth<Rational>;

pub type OverlapScore64 = metrics::OverlapScore<f64>;
pub type OverlapScore32 = metrics::OverlapScore<f32>;

pub type Matrix64 = matrix::DenseMatrix<f64>;
