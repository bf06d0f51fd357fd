use std::str::FromStr;

use serde::Serialize;

use super::mean_sd;
use crate::error::{Error, Result};
use crate::generator::generate_corpus;
use crate::gibbs::{run_gibbs, GibbsConfig};
use crate::metrics::reproducibility;
use crate::rng::mix_seed;
use crate::spec::CorpusSpec;

/// How the two runs on one corpus are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Both runs share a seed; the comparison then only checks determinism.
    Same,
    Independent,
}

impl FromStr for SeedPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same" => Ok(SeedPolicy::Same),
            "independent" => Ok(SeedPolicy::Independent),
            other => Err(Error::InvalidConfig(format!(
                "unknown seed policy `{other}` (expected same or independent)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproRow {
    pub realization: usize,
    pub corpus_seed: u64,
    pub seed_a: u64,
    pub seed_b: u64,
    #[serde(rename = "I_bits")]
    pub mutual_information_bits: f64,
    pub nmi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproReport {
    pub rows: Vec<ReproRow>,
    pub mean: f64,
    pub sd: f64,
}

/// Runs the sampler twice on each of `realizations` corpora and scores the
/// token-label agreement between the two runs.
pub fn run_reproducibility(
    spec: &CorpusSpec,
    config: &GibbsConfig,
    realizations: usize,
    policy: SeedPolicy,
) -> Result<ReproReport> {
    if realizations == 0 {
        return Err(Error::InvalidConfig(
            "realizations must be at least 1".into(),
        ));
    }
    let rows = (0..realizations)
        .map(|r| {
            let corpus_seed = mix_seed(spec.seed, r as u64);
            let corpus = generate_corpus(&spec.clone().with_seed(corpus_seed))?;
            let seed_a = mix_seed(corpus_seed, 1);
            let seed_b = match policy {
                SeedPolicy::Same => seed_a,
                SeedPolicy::Independent => mix_seed(corpus_seed, 2),
            };
            let run = |seed| {
                run_gibbs(
                    corpus.documents(),
                    spec.vocabulary_size,
                    &config.with_seed(seed),
                )
            };
            let (a, b) = (run(seed_a)?, run(seed_b)?);
            let score = reproducibility::<f64>(&a.token_labels, &b.token_labels)?;
            Ok(ReproRow {
                realization: r,
                corpus_seed,
                seed_a,
                seed_b,
                mutual_information_bits: score.mutual_information,
                nmi: score.nmi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (mean, sd) = mean_sd(&rows.iter().map(|r| r.nmi).collect::<Vec<_>>());
    Ok(ReproReport { rows, mean, sd })
}
