use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::{HyperparamPreset, DEFAULT_SWEEPS};
use crate::spec::{CorpusSpec, DocLengths};

/// Parameter varied across the points of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    /// `c = c_w = c_d`
    Structure,
    AssumedTopics,
    StopwordFraction,
    DocLength,
    Preset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Number(f64),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweptParameter,
    pub values: Vec<SweepValue>,
}

fn default_tag() -> String {
    "gibbs".into()
}

fn default_sweeps() -> usize {
    DEFAULT_SWEEPS
}

fn default_preset() -> HyperparamPreset {
    HyperparamPreset::LdagsDefault
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    /// In-process collapsed Gibbs sampler.
    Gibbs {
        #[serde(default = "default_tag")]
        tag: String,
        /// Defaults to the planted topic count.
        #[serde(default)]
        assumed_topics: Option<usize>,
        #[serde(default = "default_preset")]
        preset: HyperparamPreset,
        #[serde(default = "default_sweeps")]
        sweeps: usize,
    },
    /// Result files produced out of process, read from
    /// `results_dir/<experiment>_p<point>_r<realization>.<tag>.result`.
    External { tag: String, results_dir: PathBuf },
}

impl AlgorithmSpec {
    pub fn gibbs(
        tag: impl Into<String>,
        assumed_topics: usize,
        preset: HyperparamPreset,
        sweeps: usize,
    ) -> Self {
        AlgorithmSpec::Gibbs {
            tag: tag.into(),
            assumed_topics: Some(assumed_topics),
            preset,
            sweeps,
        }
    }

    pub fn tag(&self) -> &str {
        match self {
            AlgorithmSpec::Gibbs { tag, .. } | AlgorithmSpec::External { tag, .. } => tag,
        }
    }
}

/// One realized point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub spec: CorpusSpec,
    pub assumed_topics: Option<usize>,
    pub preset: Option<HyperparamPreset>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub experiment_id: String,
    /// Base spec; its `seed` is the base seed of every derived cell seed.
    pub corpus: CorpusSpec,
    pub sweep: Sweep,
    pub realizations: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    pub output: PathBuf,
    /// Where blind corpus files for external algorithms are written.
    #[serde(default)]
    pub work_dir: Option<PathBuf>,
    #[serde(default)]
    pub exclude_stopword_tokens: bool,
}

fn integer(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value.is_finite() {
        Ok(value as usize)
    } else {
        Err(Error::InvalidPlan(format!(
            "{what} must be a positive integer, got {value}"
        )))
    }
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: ExperimentPlan =
            toml::from_str(text).map_err(|e| Error::InvalidPlan(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn base_seed(&self) -> u64 {
        self.corpus.seed
    }

    pub fn work_dir(&self) -> PathBuf {
        self.work_dir.clone().unwrap_or_else(|| {
            self.output
                .parent()
                .unwrap_or(Path::new("."))
                .join(format!("{}_corpora", self.experiment_id))
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidPlan("realizations must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidPlan("no algorithms listed".into()));
        }
        for alg in &self.algorithms {
            match alg {
                AlgorithmSpec::Gibbs { sweeps: 0, .. } => {
                    return Err(Error::InvalidPlan("gibbs sweeps must be >= 1".into()))
                }
                AlgorithmSpec::Gibbs {
                    assumed_topics: Some(0),
                    ..
                } => {
                    return Err(Error::InvalidPlan(
                        "gibbs assumed_topics must be >= 1".into(),
                    ))
                }
                _ => {}
            }
        }
        let mut tags: Vec<&str> = self.algorithms.iter().map(AlgorithmSpec::tag).collect();
        tags.sort_unstable();
        if tags.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPlan("algorithm tags must be unique".into()));
        }
        self.points().map(|_| ())
    }

    /// Expands the swept values into concrete points; rejects empty or out-of-domain values.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        if self.sweep.values.is_empty() {
            return Err(Error::InvalidPlan("sweep has an empty value list".into()));
        }
        self.sweep
            .values
            .iter()
            .enumerate()
            .map(|(index, value)| {
                let mut point = SweepPoint {
                    index,
                    spec: self.corpus.clone(),
                    assumed_topics: None,
                    preset: None,
                };
                match (self.sweep.parameter, value) {
                    (SweptParameter::Preset, SweepValue::Name(name)) => {
                        point.preset = Some(name.parse()?)
                    }
                    (SweptParameter::Preset, SweepValue::Number(x)) => {
                        return Err(Error::InvalidPlan(format!(
                            "preset sweep expects names, got {x}"
                        )))
                    }
                    (p, SweepValue::Name(name)) => {
                        return Err(Error::InvalidPlan(format!(
                            "{p:?} sweep expects numbers, got `{name}`"
                        )))
                    }
                    (SweptParameter::Structure, SweepValue::Number(c)) => {
                        if !(0.0..=1.0).contains(c) {
                            return Err(Error::InvalidPlan(format!(
                                "structure value {c} outside [0, 1]"
                            )));
                        }
                        point.spec = point.spec.with_structure(*c);
                    }
                    (SweptParameter::StopwordFraction, SweepValue::Number(p)) => {
                        if !(0.0..=1.0).contains(p) {
                            return Err(Error::InvalidPlan(format!(
                                "stopword fraction {p} outside [0, 1]"
                            )));
                        }
                        point.spec.stopword_fraction = *p;
                    }
                    (SweptParameter::DocLength, SweepValue::Number(m)) => {
                        point.spec.doc_length = DocLengths::Fixed(integer(*m, "document length")?);
                    }
                    (SweptParameter::AssumedTopics, SweepValue::Number(k)) => {
                        point.assumed_topics = Some(integer(*k, "assumed topics")?);
                    }
                }
                point
                    .spec
                    .validate()
                    .map_err(|e| Error::InvalidPlan(format!("point {index}: {e}")))?;
                Ok(point)
            })
            .collect()
    }
}

/// Problem size of the built-in recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// `D = 2000`, 5 realizations.
    Desk,
    /// `D = 10^4`, 10 realizations.
    Full,
}

impl Scale {
    fn documents(self) -> usize {
        match self {
            Scale::Desk => 2000,
            Scale::Full => 10_000,
        }
    }

    fn realizations(self) -> usize {
        match self {
            Scale::Desk => 5,
            Scale::Full => 10,
        }
    }
}

/// Built-in experiment plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    /// NMI against `c` for `K = 10`, with `K_a = 10` and `K_a = 100`.
    Structure,
    /// NMI against `c` for `K_a ∈ {5, 10, 20, 50, 100}`.
    AssumedTopics,
    /// Both hyperparameter presets at `c = 0.7`, `K_a = 10`.
    HyperparamSwap,
    /// NMI against the stopword fraction at `c = 0.7`.
    Stopwords,
    /// NMI against document length at `c = 0.7`.
    DocLength,
}

impl Recipe {
    pub const ALL: [Recipe; 5] = [
        Recipe::Structure,
        Recipe::AssumedTopics,
        Recipe::HyperparamSwap,
        Recipe::Stopwords,
        Recipe::DocLength,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Structure => "structure",
            Recipe::AssumedTopics => "assumed-topics",
            Recipe::HyperparamSwap => "hyperparam-swap",
            Recipe::Stopwords => "stopwords",
            Recipe::DocLength => "doc-length",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.name() == name)
            .ok_or_else(|| Error::InvalidPlan(format!("unknown recipe `{name}`")))
    }

    pub fn plan(self, scale: Scale, output: impl Into<PathBuf>) -> ExperimentPlan {
        let base = CorpusSpec::new(10, scale.documents(), 100, 1000).with_seed(1);
        let c_grid: Vec<SweepValue> = (0..=10)
            .map(|i| SweepValue::Number(i as f64 / 10.0))
            .collect();
        let gibbs = |k: usize| {
            AlgorithmSpec::gibbs(
                format!("gibbs_k{k}"),
                k,
                HyperparamPreset::LdagsDefault,
                DEFAULT_SWEEPS,
            )
        };
        let numbers = |v: &[f64]| v.iter().map(|&x| SweepValue::Number(x)).collect::<Vec<_>>();
        let (corpus, parameter, values, algorithms) = match self {
            Recipe::Structure => (
                base,
                SweptParameter::Structure,
                c_grid,
                vec![gibbs(10), gibbs(100)],
            ),
            Recipe::AssumedTopics => (
                base,
                SweptParameter::Structure,
                c_grid,
                [5, 10, 20, 50, 100].into_iter().map(gibbs).collect(),
            ),
            Recipe::HyperparamSwap => (
                base.with_structure(0.7),
                SweptParameter::Preset,
                vec![
                    SweepValue::Name("ldags_default".into()),
                    SweepValue::Name("ldavb_default".into()),
                ],
                vec![AlgorithmSpec::Gibbs {
                    tag: "gibbs".into(),
                    assumed_topics: Some(10),
                    preset: HyperparamPreset::LdagsDefault,
                    sweeps: DEFAULT_SWEEPS,
                }],
            ),
            Recipe::Stopwords => {
                let (k, k_a) = match scale {
                    Scale::Desk => (10, 10),
                    Scale::Full => (40, 100),
                };
                let mut corpus = base.with_structure(0.7);
                corpus.num_topics = k;
                (
                    corpus,
                    SweptParameter::StopwordFraction,
                    numbers(&[0.0, 0.15, 0.3, 0.45, 0.65, 0.8]),
                    vec![gibbs(k_a)],
                )
            }
            Recipe::DocLength => (
                base.with_structure(0.7),
                SweptParameter::DocLength,
                numbers(&[10.0, 20.0, 30.0, 50.0, 100.0, 200.0]),
                vec![gibbs(10)],
            ),
        };
        ExperimentPlan {
            experiment_id: self.name().to_string(),
            corpus,
            sweep: Sweep { parameter, values },
            realizations: scale.realizations(),
            algorithms,
            output: output.into(),
            work_dir: None,
            exclude_stopword_tokens: false,
        }
    }
}
