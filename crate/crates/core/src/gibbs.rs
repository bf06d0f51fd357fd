//! Collapsed Gibbs sampling for LDA with symmetric Dirichlet priors.
//!
//! Each token is resampled from
//! `p(z = t) ∝ (n_dt + α)(n_tw + β) / (n_t + Vβ)` with the token's own
//! assignment removed from the counts. No hyperparameter re-estimation and no
//! sample averaging: labels are read from the final state.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenLabeling, TopicModelResult};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{stream, StreamRng};

pub const DEFAULT_SWEEPS: usize = 1000;

/// Default hyperparameters of the two common LDA implementations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperparamPreset {
    /// `α = 5/K_a`, `β = 0.01`
    LdagsDefault,
    /// `α = 1/K_a`, `β = 1/K_a`
    LdavbDefault,
}

impl HyperparamPreset {
    pub fn name(self) -> &'static str {
        match self {
            HyperparamPreset::LdagsDefault => "ldags_default",
            HyperparamPreset::LdavbDefault => "ldavb_default",
        }
    }

    /// `(α, β)` for `assumed_topics`.
    pub fn values(self, assumed_topics: usize) -> (f64, f64) {
        let k = assumed_topics as f64;
        match self {
            HyperparamPreset::LdagsDefault => (5.0 / k, 0.01),
            HyperparamPreset::LdavbDefault => (1.0 / k, 1.0 / k),
        }
    }
}

impl FromStr for HyperparamPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ldags_default" => Ok(HyperparamPreset::LdagsDefault),
            "ldavb_default" => Ok(HyperparamPreset::LdavbDefault),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Looks up a preset by name.
pub fn hyperparam_preset(name: &str, assumed_topics: usize) -> Result<(f64, f64)> {
    if assumed_topics == 0 {
        return Err(Error::InvalidConfig("assumed_topics must be >= 1".into()));
    }
    Ok(name.parse::<HyperparamPreset>()?.values(assumed_topics))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    pub assumed_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sweeps: usize,
    pub seed: u64,
}

impl GibbsConfig {
    pub fn from_preset(preset: HyperparamPreset, assumed_topics: usize) -> Self {
        let (alpha, beta) = preset.values(assumed_topics.max(1));
        GibbsConfig {
            assumed_topics,
            alpha,
            beta,
            sweeps: DEFAULT_SWEEPS,
            seed: 0,
        }
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.sweeps = sweeps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.assumed_topics == 0 {
            return Err(Error::InvalidConfig("assumed_topics must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidConfig("sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Mutable chain state: assignments plus exact count tables.
pub struct GibbsSampler {
    num_topics: usize,
    vocabulary_size: usize,
    alpha: f64,
    beta: f64,
    words: Vec<u32>,
    doc_of: Vec<u32>,
    doc_offsets: Vec<usize>,
    z: Vec<u32>,
    n_dt: Vec<u32>,
    /// word-major: `n_wt[w * K + t]`
    n_wt: Vec<u32>,
    n_t: Vec<u32>,
    inv_denominator: Vec<f64>,
    weights: Vec<f64>,
    rng: StreamRng,
    iteration: usize,
}

impl GibbsSampler {
    /// Validates inputs and draws a uniform random initial assignment.
    pub fn new(docs: &[Vec<u32>], vocabulary_size: usize, config: &GibbsConfig) -> Result<Self> {
        config.validate()?;
        let n: usize = docs.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(Error::InvalidConfig("corpus has no tokens".into()));
        }
        if let Some(&w) = docs
            .iter()
            .flatten()
            .find(|&&w| w as usize >= vocabulary_size)
        {
            return Err(Error::DimensionMismatch(format!(
                "word id {w} outside vocabulary of {vocabulary_size}"
            )));
        }
        let k = config.assumed_topics;
        let mut doc_offsets = Vec::with_capacity(docs.len() + 1);
        let mut words = Vec::with_capacity(n);
        let mut doc_of = Vec::with_capacity(n);
        doc_offsets.push(0);
        for (d, doc) in docs.iter().enumerate() {
            words.extend_from_slice(doc);
            doc_of.extend(std::iter::repeat_n(d as u32, doc.len()));
            doc_offsets.push(words.len());
        }

        let mut rng = stream(config.seed, 0);
        let z: Vec<u32> = (0..n).map(|_| rng.random_range(0..k as u32)).collect();
        let mut sampler = GibbsSampler {
            num_topics: k,
            vocabulary_size,
            alpha: config.alpha,
            beta: config.beta,
            words,
            doc_of,
            doc_offsets,
            z,
            n_dt: vec![0; docs.len() * k],
            n_wt: vec![0; vocabulary_size * k],
            n_t: vec![0; k],
            inv_denominator: vec![0.0; k],
            weights: vec![0.0; k],
            rng,
            iteration: 0,
        };
        for i in 0..n {
            let (d, w, t) = (
                sampler.doc_of[i] as usize,
                sampler.words[i] as usize,
                sampler.z[i] as usize,
            );
            sampler.n_dt[d * k + t] += 1;
            sampler.n_wt[w * k + t] += 1;
            sampler.n_t[t] += 1;
        }
        for t in 0..k {
            sampler.refresh_denominator(t);
        }
        Ok(sampler)
    }

    fn refresh_denominator(&mut self, t: usize) {
        self.inv_denominator[t] =
            1.0 / (self.n_t[t] as f64 + self.vocabulary_size as f64 * self.beta);
    }

    /// One full pass over every token.
    pub fn sweep(&mut self) {
        let k = self.num_topics;
        for i in 0..self.words.len() {
            let d = self.doc_of[i] as usize;
            let w = self.words[i] as usize;
            let old = self.z[i] as usize;
            let dt = &mut self.n_dt[d * k..(d + 1) * k];
            let wt = &mut self.n_wt[w * k..(w + 1) * k];
            dt[old] -= 1;
            wt[old] -= 1;
            self.n_t[old] -= 1;
            self.inv_denominator[old] =
                1.0 / (self.n_t[old] as f64 + self.vocabulary_size as f64 * self.beta);

            let mut total = 0.0;
            for t in 0..k {
                total += (dt[t] as f64 + self.alpha)
                    * (wt[t] as f64 + self.beta)
                    * self.inv_denominator[t];
                self.weights[t] = total;
            }
            let u = self.rng.random::<f64>() * total;
            let new = self.weights.partition_point(|&c| c <= u).min(k - 1);

            dt[new] += 1;
            wt[new] += 1;
            self.n_t[new] += 1;
            self.inv_denominator[new] =
                1.0 / (self.n_t[new] as f64 + self.vocabulary_size as f64 * self.beta);
            self.z[i] = new as u32;
        }
        self.iteration += 1;
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Current topic of every token, document-major.
    pub fn assignments(&self) -> &[u32] {
        &self.z
    }

    /// Recounts the tables from `z` and compares; used by tests.
    pub fn counts_consistent(&self) -> bool {
        let k = self.num_topics;
        let mut n_dt = vec![0u32; self.n_dt.len()];
        let mut n_wt = vec![0u32; self.n_wt.len()];
        let mut n_t = vec![0u32; k];
        for i in 0..self.z.len() {
            let t = self.z[i] as usize;
            n_dt[self.doc_of[i] as usize * k + t] += 1;
            n_wt[self.words[i] as usize * k + t] += 1;
            n_t[t] += 1;
        }
        let doc_sums_ok = self.doc_offsets.windows(2).enumerate().all(|(d, w)| {
            self.n_dt[d * k..(d + 1) * k]
                .iter()
                .map(|&c| c as usize)
                .sum::<usize>()
                == w[1] - w[0]
        });
        n_dt == self.n_dt && n_wt == self.n_wt && n_t == self.n_t && doc_sums_ok
    }

    /// Reads out `P̂(t|d)`, `P̂(w|t)` and the token labels.
    pub fn result(&self, hyperparams: BTreeMap<String, String>) -> Result<TopicModelResult> {
        let k = self.num_topics;
        let v = self.vocabulary_size;
        let kalpha = k as f64 * self.alpha;
        let mut topic_doc = Vec::with_capacity((self.doc_offsets.len() - 1) * k);
        for (d, w) in self.doc_offsets.windows(2).enumerate() {
            let denom = (w[1] - w[0]) as f64 + kalpha;
            topic_doc.extend(
                self.n_dt[d * k..(d + 1) * k]
                    .iter()
                    .map(|&c| (c as f64 + self.alpha) / denom),
            );
        }
        let vbeta = v as f64 * self.beta;
        let mut word_topic = Vec::with_capacity(k * v);
        for t in 0..k {
            let denom = self.n_t[t] as f64 + vbeta;
            word_topic.extend((0..v).map(|w| (self.n_wt[w * k + t] as f64 + self.beta) / denom));
        }
        TopicModelResult::new(
            DenseMatrix::from_vec(self.doc_offsets.len() - 1, k, topic_doc)?,
            DenseMatrix::from_vec(k, v, word_topic)?,
            TokenLabeling::new(self.z.clone(), k)?,
            "gibbs",
            hyperparams,
        )
    }
}

/// Runs `config.sweeps` sweeps and returns the final state as a result.
pub fn run_gibbs(
    docs: &[Vec<u32>],
    vocabulary_size: usize,
    config: &GibbsConfig,
) -> Result<TopicModelResult> {
    let mut sampler = GibbsSampler::new(docs, vocabulary_size, config)?;
    for _ in 0..config.sweeps {
        sampler.sweep();
    }
    let hyperparams = BTreeMap::from([
        ("alpha".to_string(), format!("{:?}", config.alpha)),
        ("beta".to_string(), format!("{:?}", config.beta)),
        (
            "assumed_topics".to_string(),
            config.assumed_topics.to_string(),
        ),
        ("sweeps".to_string(), config.sweeps.to_string()),
        ("seed".to_string(), config.seed.to_string()),
    ]);
    sampler.result(hyperparams)
}
