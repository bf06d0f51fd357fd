use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mean_sd;
use super::plan::{AlgorithmSpec, ExperimentPlan, SweepPoint};
use crate::corpus::{SyntheticCorpus, TopicModelResult};
use crate::error::{Error, Result};
use crate::generator::generate_corpus;
use crate::gibbs::{run_gibbs, GibbsConfig};
use crate::interchange::{export_corpus, import_result, CorpusFile, RESULT_EXT};
use crate::metrics::{
    doc_classification_labels, doc_classification_nmi, token_overlap, ScoreOptions,
};
use crate::rng::{cell_seed, mix_seed, SEED_MIX_DESCRIPTION};
use crate::spec::{CorpusSpec, DocLengths};

pub const STATUS_OK: &str = "ok";
pub const STATUS_FAILED: &str = "failed";

/// One evaluation: a corpus realization scored for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub experiment_id: String,
    pub algorithm_tag: String,
    #[serde(rename = "K_a")]
    pub assumed_topics: Option<usize>,
    pub c: f64,
    #[serde(rename = "P_s")]
    pub stopword_fraction: f64,
    pub m_d: usize,
    pub seed: u64,
    #[serde(rename = "I_bits")]
    pub mutual_information_bits: Option<f64>,
    #[serde(rename = "H_bits")]
    pub entropy_planted_bits: Option<f64>,
    #[serde(rename = "Hp_bits")]
    pub entropy_inferred_bits: Option<f64>,
    pub nmi: Option<f64>,
    pub voi_bits: Option<f64>,
    #[serde(rename = "K_inferred")]
    pub inferred_topics: Option<usize>,
    pub doc_nmi: Option<f64>,
    pub wall_ms: Option<u64>,
    pub status: String,
}

impl ScoreRow {
    /// Row with identifying columns filled and no scores.
    pub fn pending(
        experiment_id: &str,
        algorithm_tag: &str,
        assumed_topics: Option<usize>,
        spec: &CorpusSpec,
    ) -> Self {
        let m_d = match &spec.doc_length {
            DocLengths::Fixed(m) => *m,
            DocLengths::PerDocument(v) => {
                (v.iter().sum::<usize>() as f64 / v.len() as f64).round() as usize
            }
        };
        ScoreRow {
            experiment_id: experiment_id.into(),
            algorithm_tag: algorithm_tag.into(),
            assumed_topics,
            c: spec.structure_word,
            stopword_fraction: spec.stopword_fraction,
            m_d,
            seed: spec.seed,
            mutual_information_bits: None,
            entropy_planted_bits: None,
            entropy_inferred_bits: None,
            nmi: None,
            voi_bits: None,
            inferred_topics: None,
            doc_nmi: None,
            wall_ms: None,
            status: STATUS_FAILED.into(),
        }
    }

    fn key(&self) -> (String, String, Option<usize>, u64) {
        (
            self.experiment_id.clone(),
            self.algorithm_tag.clone(),
            self.assumed_topics,
            self.seed,
        )
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

/// Fills the score columns of `row` from a result on `corpus`.
pub fn score_result(
    row: &mut ScoreRow,
    corpus: &SyntheticCorpus,
    result: &TopicModelResult,
    options: ScoreOptions,
) -> Result<()> {
    let token = token_overlap(corpus, &result.token_labels, options)?;
    let predicted = doc_classification_labels(result);
    let doc = doc_classification_nmi::<f64>(&predicted, corpus.truth().doc_topic_map())?;
    row.mutual_information_bits = Some(token.mutual_information);
    row.entropy_planted_bits = Some(token.entropy_planted);
    row.entropy_inferred_bits = Some(token.entropy_inferred);
    row.nmi = Some(token.nmi);
    row.voi_bits = Some(token.voi);
    row.inferred_topics = Some(result.token_labels.num_used());
    row.doc_nmi = Some(doc.nmi);
    row.status = STATUS_OK.into();
    Ok(())
}

/// Per-point aggregate over realizations (successful rows only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub algorithm_tag: String,
    #[serde(rename = "K_a")]
    pub assumed_topics: Option<usize>,
    pub c: f64,
    #[serde(rename = "P_s")]
    pub stopword_fraction: f64,
    pub m_d: usize,
    pub realizations: usize,
    pub nmi_mean: f64,
    pub nmi_sd: f64,
    pub doc_nmi_mean: f64,
    pub doc_nmi_sd: f64,
    pub k_inferred_mean: f64,
    pub k_inferred_sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows_written: usize,
    pub rows_skipped: usize,
    /// `(row, reason)` for every row marked failed in this run.
    pub failures: Vec<(ScoreRow, String)>,
    pub summary: Vec<PointSummary>,
    pub summary_path: PathBuf,
}

fn read_rows(path: &Path) -> Result<Vec<ScoreRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

fn summarize(rows: &[ScoreRow], experiment_id: &str) -> Vec<PointSummary> {
    type Key = (String, Option<usize>, u64, u64, usize);
    let mut groups: BTreeMap<Key, Vec<&ScoreRow>> = BTreeMap::new();
    for row in rows
        .iter()
        .filter(|r| r.is_ok() && r.experiment_id == experiment_id)
    {
        let key = (
            row.algorithm_tag.clone(),
            row.assumed_topics,
            row.c.to_bits(),
            row.stopword_fraction.to_bits(),
            row.m_d,
        );
        groups.entry(key).or_default().push(row);
    }
    let mut out: Vec<PointSummary> = groups
        .into_values()
        .map(|g| {
            let col = |f: fn(&ScoreRow) -> Option<f64>| {
                mean_sd(&g.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            let (nmi_mean, nmi_sd) = col(|r| r.nmi);
            let (doc_nmi_mean, doc_nmi_sd) = col(|r| r.doc_nmi);
            let (k_inferred_mean, k_inferred_sd) = col(|r| r.inferred_topics.map(|k| k as f64));
            PointSummary {
                algorithm_tag: g[0].algorithm_tag.clone(),
                assumed_topics: g[0].assumed_topics,
                c: g[0].c,
                stopword_fraction: g[0].stopword_fraction,
                m_d: g[0].m_d,
                realizations: g.len(),
                nmi_mean,
                nmi_sd,
                doc_nmi_mean,
                doc_nmi_sd,
                k_inferred_mean,
                k_inferred_sd,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.algorithm_tag.as_str(), a.assumed_topics)
            .cmp(&(b.algorithm_tag.as_str(), b.assumed_topics))
            .then(a.c.total_cmp(&b.c))
            .then(a.stopword_fraction.total_cmp(&b.stopword_fraction))
            .then(a.m_d.cmp(&b.m_d))
    });
    out
}

pub fn summary_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.summary.csv"))
}

/// Append-only writer shared by all workers.
struct Appender {
    writer: csv::Writer<File>,
}

impl Appender {
    fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        if fresh {
            writeln!(file, "# {SEED_MIX_DESCRIPTION}").map_err(|e| Error::io(path, e))?;
        }
        let writer = csv::WriterBuilder::new()
            .has_headers(fresh)
            .from_writer(file);
        Ok(Appender { writer })
    }

    fn append(&mut self, row: &ScoreRow) -> Result<()> {
        self.writer.serialize(row)?;
        self.writer.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Appends `rows` to the scores CSV at `path`, writing the seed comment and
/// header first if the file is new.
pub fn append_rows(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    let mut appender = Appender::open(path)?;
    rows.iter().try_for_each(|row| appender.append(row))
}

struct Job<'a> {
    point: &'a SweepPoint,
    realization: usize,
    algorithms: Vec<(usize, &'a AlgorithmSpec)>,
}

fn cell_stem(plan: &ExperimentPlan, point: usize, realization: usize) -> String {
    format!("{}_p{point}_r{realization}", plan.experiment_id)
}

/// Runs every pending (point, realization, algorithm) cell of `plan`, appending
/// one row each to `plan.output`, and rewrites the per-point summary next to it.
///
/// Rows already present with status `ok` are skipped, so an interrupted sweep can
/// simply be rerun. Failed rows are retried.
pub fn run_sweep(plan: &ExperimentPlan) -> Result<SweepReport> {
    plan.validate()?;
    let points = plan.points()?;
    let existing = read_rows(&plan.output)?;
    let done: HashSet<_> = existing
        .iter()
        .filter(|r| r.is_ok())
        .map(ScoreRow::key)
        .collect();
    let options = ScoreOptions {
        exclude_stopword_tokens: plan.exclude_stopword_tokens,
    };

    let row_for = |point: &SweepPoint, realization: usize, alg: &AlgorithmSpec| -> ScoreRow {
        let mut spec = point.spec.clone();
        spec.seed = cell_seed(plan.base_seed(), point.index, realization);
        let (tag, k_a) = match alg {
            AlgorithmSpec::Gibbs {
                tag,
                assumed_topics,
                ..
            } => {
                let tag = match point.preset {
                    Some(p) => format!("{tag}+{}", p.name()),
                    None => tag.clone(),
                };
                (
                    tag,
                    Some(
                        point
                            .assumed_topics
                            .or(*assumed_topics)
                            .unwrap_or(spec.num_topics),
                    ),
                )
            }
            AlgorithmSpec::External { tag, .. } => (tag.clone(), None),
        };
        ScoreRow::pending(&plan.experiment_id, &tag, k_a, &spec)
    };

    let mut jobs = Vec::new();
    let mut skipped = 0;
    for point in &points {
        for realization in 0..plan.realizations {
            let algorithms: Vec<_> = plan
                .algorithms
                .iter()
                .enumerate()
                .filter(|(_, alg)| {
                    let pending = !done.contains(&row_for(point, realization, alg).key());
                    skipped += usize::from(!pending);
                    pending
                })
                .collect();
            if !algorithms.is_empty() {
                jobs.push(Job {
                    point,
                    realization,
                    algorithms,
                });
            }
        }
    }

    let has_external = plan
        .algorithms
        .iter()
        .any(|a| matches!(a, AlgorithmSpec::External { .. }));
    let work_dir = plan.work_dir();
    if has_external {
        fs::create_dir_all(&work_dir).map_err(|e| Error::io(&work_dir, e))?;
    }
    let appender = Mutex::new(Appender::open(&plan.output)?);
    let failures = Mutex::new(Vec::new());
    let written = Mutex::new(0usize);

    jobs.par_iter().try_for_each(|job| -> Result<()> {
        let mut spec = job.point.spec.clone();
        spec.seed = cell_seed(plan.base_seed(), job.point.index, job.realization);
        let corpus = generate_corpus(&spec)?;
        let stem = cell_stem(plan, job.point.index, job.realization);
        if has_external {
            export_corpus(&corpus, &work_dir.join(&stem), false)?;
        }
        for &(alg_index, alg) in &job.algorithms {
            let mut row = row_for(job.point, job.realization, alg);
            let start = Instant::now();
            let outcome = match alg {
                AlgorithmSpec::Gibbs { preset, sweeps, .. } => {
                    let preset = job.point.preset.unwrap_or(*preset);
                    let k_a = row.assumed_topics.expect("gibbs rows carry K_a");
                    let config = GibbsConfig::from_preset(preset, k_a)
                        .with_sweeps(*sweeps)
                        .with_seed(mix_seed(spec.seed, alg_index as u64 + 1));
                    run_gibbs(corpus.documents(), spec.vocabulary_size, &config)
                }
                AlgorithmSpec::External { tag, results_dir } => {
                    let path = results_dir.join(format!("{stem}.{tag}.{RESULT_EXT}"));
                    import_result(&path, Some(&CorpusFile::from_corpus(&corpus)))
                }
            };
            match outcome.and_then(|result| score_result(&mut row, &corpus, &result, options)) {
                Ok(()) => row.wall_ms = Some(start.elapsed().as_millis() as u64),
                Err(e) => failures.lock().unwrap().push((row.clone(), e.to_string())),
            }
            appender.lock().unwrap().append(&row)?;
            *written.lock().unwrap() += 1;
        }
        Ok(())
    })?;

    let all_rows = read_rows(&plan.output)?;
    let summary = summarize(&all_rows, &plan.experiment_id);
    let summary_path = summary_path(&plan.output);
    let mut writer = csv::Writer::from_path(&summary_path)?;
    for s in &summary {
        writer.serialize(s)?;
    }
    writer.flush().map_err(|e| Error::io(&summary_path, e))?;

    Ok(SweepReport {
        rows_written: written.into_inner().unwrap(),
        rows_skipped: skipped,
        failures: failures.into_inner().unwrap(),
        summary,
        summary_path,
    })
}
