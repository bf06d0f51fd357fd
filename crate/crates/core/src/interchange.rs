//! Plain-text file formats for corpora, planted labels, ground truth and
//! inference results.
//!
//! * Corpus file: a header line `#topicbench-corpus v1 key=value ...` echoing the
//!   spec, then one line per document of space-separated word ids.
//! * Label file: one line per document of space-separated topic ids, parallel to
//!   the corpus body. No header.
//! * Truth file (`#topicbench-truth v1`): `key value` lines followed by
//!   `[section]` blocks holding `P(w)`, `P(t)`, `t_w`, `t_d` and the stopword ids.
//! * Result file (`#topicbench-result v1`): tag, hyperparameters and shape lines,
//!   then `[topic_doc]`, `[word_topic]` and `[labels]` blocks.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which round-trips
//! every `f64`. Files are UTF-8 with LF line endings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::{SyntheticCorpus, TokenLabeling, TopicModelResult, STOCHASTIC_TOLERANCE};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::spec::{CorpusSpec, DocLengths, Shape};
use crate::truth::GroundTruth;

pub const CORPUS_MAGIC: &str = "#topicbench-corpus";
pub const TRUTH_MAGIC: &str = "#topicbench-truth";
pub const RESULT_MAGIC: &str = "#topicbench-result";
pub const FORMAT_VERSION: &str = "v1";

pub const CORPUS_EXT: &str = "corpus";
pub const LABELS_EXT: &str = "labels";
pub const TRUTH_EXT: &str = "truth";
pub const RESULT_EXT: &str = "result";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn check_magic(path: &Path, first: Option<&str>, magic: &str) -> Result<()> {
    let expected = format!("{magic} {FORMAT_VERSION}");
    let found = first
        .unwrap_or("")
        .split_whitespace()
        .take(2)
        .collect::<Vec<_>>()
        .join(" ");
    if found != expected {
        return Err(Error::UnsupportedVersion {
            path: path.to_path_buf(),
            found,
            expected,
        });
    }
    Ok(())
}

fn parse_row<T: FromStr>(path: &Path, line_no: usize, line: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    line.split_ascii_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|e| Error::parse(path, line_no, format!("`{tok}`: {e}")))
        })
        .collect()
}

/// Corpus body plus the spec echoed in its header.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFile {
    pub spec: CorpusSpec,
    pub docs: Vec<Vec<u32>>,
}

impl CorpusFile {
    pub fn from_corpus(corpus: &SyntheticCorpus) -> Self {
        CorpusFile {
            spec: corpus.spec().clone(),
            docs: corpus.documents().to_vec(),
        }
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    fn header(&self) -> String {
        let s = &self.spec;
        let m = match &s.doc_length {
            DocLengths::Fixed(m) => m.to_string(),
            DocLengths::PerDocument(_) => "varied".into(),
        };
        let burst = s.burstiness.map_or("off".to_string(), |a| format!("{a:?}"));
        format!(
            "{CORPUS_MAGIC} {FORMAT_VERSION} K={} D={} V={} m={m} P_s={:?} c_w={:?} c_d={:?} word_dist={} topic_sizes={} burstiness={burst} stopwords_by_rank={} seed={}",
            s.num_topics,
            s.num_documents,
            s.vocabulary_size,
            s.stopword_fraction,
            s.structure_word,
            s.structure_doc,
            s.word_dist,
            s.topic_sizes,
            s.stopwords_by_rank,
            s.seed,
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for doc in &self.docs {
            out.push_str(&join(doc));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(path, &read_file(path)?)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next();
        check_magic(path, header, CORPUS_MAGIC)?;
        let mut fields = BTreeMap::new();
        for kv in header.unwrap().split_whitespace().skip(2) {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::parse(path, 1, format!("header field `{kv}` is not key=value"))
            })?;
            fields.insert(k, v);
        }
        let field = |key: &str| -> Result<&str> {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| Error::parse(path, 1, format!("header lacks `{key}`")))
        };
        fn num<T: FromStr>(path: &Path, key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::parse(path, 1, format!("bad value `{v}` for `{key}`")))
        }
        let docs = lines
            .enumerate()
            .map(|(i, line)| parse_row::<u32>(path, i + 2, line))
            .collect::<Result<Vec<_>>>()?;

        let d: usize = num(path, "D", field("D")?)?;
        if docs.len() != d {
            return Err(Error::parse(
                path,
                docs.len() + 1,
                format!("header declares {d} documents, body has {}", docs.len()),
            ));
        }
        let doc_length = match field("m")? {
            "varied" => DocLengths::PerDocument(docs.iter().map(Vec::len).collect()),
            m => {
                let m: usize = num(path, "m", m)?;
                if let Some(i) = docs.iter().position(|doc| doc.len() != m) {
                    return Err(Error::parse(
                        path,
                        i + 2,
                        format!("document has {} tokens, header says m={m}", docs[i].len()),
                    ));
                }
                DocLengths::Fixed(m)
            }
        };
        let shape = |key: &str| -> Result<Shape> {
            let v = field(key)?;
            v.parse::<Shape>()
                .map_err(|_| Error::parse(path, 1, format!("bad value `{v}` for `{key}`")))
        };
        let spec = CorpusSpec {
            num_topics: num(path, "K", field("K")?)?,
            num_documents: d,
            doc_length,
            vocabulary_size: num(path, "V", field("V")?)?,
            stopword_fraction: num(path, "P_s", field("P_s")?)?,
            structure_word: num(path, "c_w", field("c_w")?)?,
            structure_doc: num(path, "c_d", field("c_d")?)?,
            word_dist: shape("word_dist")?,
            topic_sizes: shape("topic_sizes")?,
            burstiness: match field("burstiness")? {
                "off" => None,
                a => Some(num(path, "burstiness", a)?),
            },
            stopwords_by_rank: num(path, "stopwords_by_rank", field("stopwords_by_rank")?)?,
            seed: num(path, "seed", field("seed")?)?,
        };
        let v = spec.vocabulary_size;
        for (i, doc) in docs.iter().enumerate() {
            if let Some(w) = doc.iter().find(|&&w| w as usize >= v) {
                return Err(Error::parse(
                    path,
                    i + 2,
                    format!("word id {w} outside vocabulary of {v}"),
                ));
            }
        }
        Ok(CorpusFile { spec, docs })
    }
}

/// Per-document label rows, shape-identical to a corpus body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFile {
    pub docs: Vec<Vec<u32>>,
}

impl LabelFile {
    pub fn from_labeling(
        labels: &TokenLabeling,
        doc_lengths: impl IntoIterator<Item = usize>,
    ) -> Self {
        LabelFile {
            docs: labels.split_by(doc_lengths).map(<[u32]>::to_vec).collect(),
        }
    }

    pub fn to_labeling(&self, num_labels: usize) -> Result<TokenLabeling> {
        TokenLabeling::new(self.docs.concat(), num_labels)
    }

    pub fn to_text(&self) -> String {
        self.docs.iter().map(|d| join(d) + "\n").collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        let docs = text
            .lines()
            .enumerate()
            .map(|(i, line)| parse_row::<u32>(path, i + 1, line))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabelFile { docs })
    }

    /// Checks that every row matches the corresponding corpus document length.
    /// `first_line` is the file line number of row 0.
    pub fn check_shape(&self, path: &Path, first_line: usize, corpus: &[Vec<u32>]) -> Result<()> {
        for (i, (row, doc)) in self.docs.iter().zip(corpus).enumerate() {
            if row.len() != doc.len() {
                return Err(Error::parse(
                    path,
                    first_line + i,
                    format!(
                        "{} labels for document {i} with {} tokens",
                        row.len(),
                        doc.len()
                    ),
                ));
            }
        }
        if self.docs.len() != corpus.len() {
            return Err(Error::parse(
                path,
                first_line + self.docs.len().min(corpus.len()),
                format!(
                    "{} label rows for {} documents",
                    self.docs.len(),
                    corpus.len()
                ),
            ));
        }
        Ok(())
    }
}

/// Ground truth plus the structure parameters needed to rebuild `P(w|t)` and `P(t|d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthFile {
    pub truth: GroundTruth<f64>,
    pub structure_word: f64,
    pub structure_doc: f64,
}

impl TruthFile {
    pub fn from_corpus(corpus: &SyntheticCorpus) -> Self {
        TruthFile {
            truth: corpus.truth().clone(),
            structure_word: corpus.spec().structure_word,
            structure_doc: corpus.spec().structure_doc,
        }
    }

    pub fn word_topic_matrix(&self) -> DenseMatrix<f64> {
        self.truth.word_topic_matrix(self.structure_word)
    }

    pub fn topic_doc_matrix(&self) -> DenseMatrix<f64> {
        self.truth.topic_doc_matrix(self.structure_doc)
    }

    pub fn to_text(&self) -> String {
        let t = &self.truth;
        let mut out = String::new();
        let _ = writeln!(out, "{TRUTH_MAGIC} {FORMAT_VERSION}");
        let _ = writeln!(out, "topics {}", t.num_topics());
        let _ = writeln!(out, "documents {}", t.num_documents());
        let _ = writeln!(out, "vocabulary {}", t.vocabulary_size());
        let _ = writeln!(out, "c_w {}", real(self.structure_word));
        let _ = writeln!(out, "c_d {}", real(self.structure_doc));
        let _ = writeln!(
            out,
            "[word_marginal]\n{}",
            join(t.word_marginal().iter().map(|&x| real(x)))
        );
        let _ = writeln!(
            out,
            "[topic_marginal]\n{}",
            join(t.topic_marginal().iter().map(|&x| real(x)))
        );
        let tw = t
            .word_topic_map()
            .iter()
            .map(|x| x.map_or("-".to_string(), |t| t.to_string()));
        let _ = writeln!(out, "[word_topic]\n{}", join(tw));
        let _ = writeln!(out, "[doc_topic]\n{}", join(t.doc_topic_map()));
        let _ = writeln!(out, "[stopwords]\n{}", join(t.stopwords()));
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_text())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        let doc = Sectioned::parse(path, &text, TRUTH_MAGIC)?;
        let k: usize = doc.scalar("topics")?;
        let d: usize = doc.scalar("documents")?;
        let v: usize = doc.scalar("vocabulary")?;
        let c_w: f64 = doc.scalar("c_w")?;
        let c_d: f64 = doc.scalar("c_d")?;

        let pw: Vec<f64> = doc.single_row("word_marginal", v)?;
        let pt: Vec<f64> = doc.single_row("topic_marginal", k)?;
        let (tw_line, tw_text) = doc.section_line("word_topic")?;
        let word_topic = tw_text
            .split_ascii_whitespace()
            .map(|tok| match tok {
                "-" => Ok(None),
                t => t
                    .parse::<u32>()
                    .map(Some)
                    .map_err(|e| Error::parse(path, tw_line, format!("`{t}`: {e}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if word_topic.len() != v {
            return Err(Error::parse(
                path,
                tw_line,
                format!("{} entries, expected {v}", word_topic.len()),
            ));
        }
        let doc_topic: Vec<u32> = doc.single_row("doc_topic", d)?;
        let (sw_line, _) = doc.section_line("stopwords")?;
        let stopwords: Vec<u32> = doc.row("stopwords")?;

        let truth = GroundTruth::new(pw, word_topic, k, doc_topic)
            .map_err(|e| Error::parse(path, tw_line, e.to_string()))?;
        if truth.stopwords().collect::<Vec<_>>() != stopwords {
            return Err(Error::parse(
                path,
                sw_line,
                "stopword list disagrees with word_topic",
            ));
        }
        let (pt_line, _) = doc.section_line("topic_marginal")?;
        if let Some(t) = (0..k).find(|&t| (truth.topic_marginal()[t] - pt[t]).abs() > 1e-12) {
            return Err(Error::parse(
                path,
                pt_line,
                format!("P(t) of topic {t} disagrees with P(w) and word_topic"),
            ));
        }
        Ok(TruthFile {
            truth,
            structure_word: c_w,
            structure_doc: c_d,
        })
    }
}

/// Paths written by [`export_corpus`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedCorpus {
    pub corpus: PathBuf,
    pub labels: Option<PathBuf>,
    pub truth: Option<PathBuf>,
}

/// Writes `<stem>.corpus`, and with `with_truth` also `<stem>.labels` and
/// `<stem>.truth`. Without truth nothing planted leaves the process.
pub fn export_corpus(
    corpus: &SyntheticCorpus,
    stem: &Path,
    with_truth: bool,
) -> Result<ExportedCorpus> {
    let path = |ext: &str| {
        let mut name = stem.as_os_str().to_owned();
        name.push(".");
        name.push(ext);
        PathBuf::from(name)
    };
    let corpus_path = path(CORPUS_EXT);
    CorpusFile::from_corpus(corpus).write(&corpus_path)?;
    let mut out = ExportedCorpus {
        corpus: corpus_path,
        labels: None,
        truth: None,
    };
    if with_truth {
        let labels = path(LABELS_EXT);
        LabelFile::from_labeling(corpus.planted_labels(), corpus.doc_lengths()).write(&labels)?;
        let truth = path(TRUTH_EXT);
        TruthFile::from_corpus(corpus).write(&truth)?;
        out.labels = Some(labels);
        out.truth = Some(truth);
    }
    Ok(out)
}

/// Reassembles a corpus from its three files.
pub fn import_corpus(corpus: &Path, labels: &Path, truth: &Path) -> Result<SyntheticCorpus> {
    let corpus_file = CorpusFile::read(corpus)?;
    let label_file = LabelFile::read(labels)?;
    label_file.check_shape(labels, 1, &corpus_file.docs)?;
    let truth_file = TruthFile::read(truth)?;
    let planted = label_file.to_labeling(corpus_file.spec.num_topics)?;
    SyntheticCorpus::from_parts(
        corpus_file.spec,
        truth_file.truth,
        corpus_file.docs,
        planted,
    )
}

/// Renders a result; the label block is split into rows by `doc_lengths`.
pub fn result_to_text(result: &TopicModelResult, doc_lengths: &[usize]) -> Result<String> {
    if doc_lengths.iter().sum::<usize>() != result.token_labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels cannot be split into documents totalling {} tokens",
            result.token_labels.len(),
            doc_lengths.iter().sum::<usize>()
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{RESULT_MAGIC} {FORMAT_VERSION}");
    let _ = writeln!(out, "algorithm_tag {}", result.algorithm_tag);
    for (key, value) in &result.hyperparams {
        let _ = writeln!(out, "hyperparam {key} {value}");
    }
    let _ = writeln!(out, "topics {}", result.num_topics());
    let _ = writeln!(out, "documents {}", result.topic_doc.rows());
    let _ = writeln!(out, "vocabulary {}", result.word_topic.cols());
    let _ = writeln!(out, "[topic_doc]");
    for row in result.topic_doc.iter_rows() {
        let _ = writeln!(out, "{}", join(row.iter().map(|&x| real(x))));
    }
    let _ = writeln!(out, "[word_topic]");
    for row in result.word_topic.iter_rows() {
        let _ = writeln!(out, "{}", join(row.iter().map(|&x| real(x))));
    }
    let _ = writeln!(out, "[labels]");
    for row in result.token_labels.split_by(doc_lengths.iter().copied()) {
        let _ = writeln!(out, "{}", join(row));
    }
    Ok(out)
}

pub fn write_result(result: &TopicModelResult, doc_lengths: &[usize], path: &Path) -> Result<()> {
    write_file(path, &result_to_text(result, doc_lengths)?)
}

/// Reads and validates a result file. With `corpus`, the label block must match
/// its document lengths, and the matrix shapes its document and vocabulary counts.
pub fn import_result(path: &Path, corpus: Option<&CorpusFile>) -> Result<TopicModelResult> {
    let text = read_file(path)?;
    let doc = Sectioned::parse(path, &text, RESULT_MAGIC)?;
    let algorithm_tag = doc.scalar::<String>("algorithm_tag")?;
    let k: usize = doc.scalar("topics")?;
    let d: usize = doc.scalar("documents")?;
    let v: usize = doc.scalar("vocabulary")?;
    let mut hyperparams = BTreeMap::new();
    for (line, value) in doc.repeated("hyperparam") {
        let (key, val) = value
            .split_once(' ')
            .ok_or_else(|| Error::parse(path, line, "hyperparam needs a key and a value"))?;
        hyperparams.insert(key.to_string(), val.to_string());
    }

    if let Some(c) = corpus {
        if c.docs.len() != d {
            return Err(Error::parse(
                path,
                doc.scalar_line("documents")?,
                format!("{d} documents, corpus has {}", c.docs.len()),
            ));
        }
        if c.spec.vocabulary_size != v {
            return Err(Error::parse(
                path,
                doc.scalar_line("vocabulary")?,
                format!("vocabulary {v}, corpus has {}", c.spec.vocabulary_size),
            ));
        }
    }

    let topic_doc = doc.matrix("topic_doc", d, k)?;
    let word_topic = doc.matrix("word_topic", k, v)?;
    for (name, m, section) in [
        ("P(t|d)", &topic_doc, "topic_doc"),
        ("P(w|t)", &word_topic, "word_topic"),
    ] {
        if let Some((row, sum)) = m.first_non_stochastic_row(STOCHASTIC_TOLERANCE) {
            let line = doc.section_start(section)? + 1 + row;
            return Err(Error::parse(
                path,
                line,
                format!("{name} row {row} sums to {sum}, expected 1 within 1e-9"),
            ));
        }
    }
    let (label_start, label_rows) = doc.section("labels")?;
    let labels = LabelFile {
        docs: label_rows
            .iter()
            .enumerate()
            .map(|(i, line)| parse_row::<u32>(path, label_start + 1 + i, line))
            .collect::<Result<Vec<_>>>()?,
    };
    if let Some(c) = corpus {
        labels.check_shape(path, label_start + 1, &c.docs)?;
    }
    for (i, row) in labels.docs.iter().enumerate() {
        if let Some(&l) = row.iter().find(|&&l| l as usize >= k) {
            return Err(Error::parse(
                path,
                label_start + 1 + i,
                format!("label {l} not below K'={k}"),
            ));
        }
    }
    let token_labels = labels.to_labeling(k)?;
    TopicModelResult::new(
        topic_doc,
        word_topic,
        token_labels,
        algorithm_tag,
        hyperparams,
    )
}

/// Line-oriented `key value` header followed by `[section]` blocks.
struct Sectioned<'a> {
    path: &'a Path,
    scalars: Vec<(usize, &'a str, &'a str)>,
    sections: Vec<(usize, &'a str, Vec<&'a str>)>,
}

impl<'a> Sectioned<'a> {
    fn parse(path: &'a Path, text: &'a str, magic: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        check_magic(path, lines.next().map(|(_, l)| l), magic)?;
        let mut scalars = Vec::new();
        let mut sections: Vec<(usize, &str, Vec<&str>)> = Vec::new();
        for (no, line) in lines {
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                sections.push((no, name, Vec::new()));
            } else if let Some((_, _, rows)) = sections.last_mut() {
                rows.push(line);
            } else if !line.is_empty() {
                let (k, v) = line.split_once(' ').unwrap_or((line, ""));
                scalars.push((no, k, v));
            }
        }
        Ok(Sectioned {
            path,
            scalars,
            sections,
        })
    }

    fn scalar_line(&self, key: &str) -> Result<usize> {
        self.scalars
            .iter()
            .find(|(_, k, _)| *k == key)
            .map(|(no, _, _)| *no)
            .ok_or_else(|| Error::parse(self.path, 1, format!("missing `{key}`")))
    }

    fn scalar<T: FromStr>(&self, key: &str) -> Result<T> {
        let (no, _, v) = self
            .scalars
            .iter()
            .find(|(_, k, _)| *k == key)
            .ok_or_else(|| Error::parse(self.path, 1, format!("missing `{key}`")))?;
        v.parse()
            .map_err(|_| Error::parse(self.path, *no, format!("bad value `{v}` for `{key}`")))
    }

    fn repeated(&self, key: &str) -> impl Iterator<Item = (usize, &'a str)> + '_ {
        let key = key.to_string();
        self.scalars
            .iter()
            .filter(move |(_, k, _)| *k == key)
            .map(|(no, _, v)| (*no, *v))
    }

    fn section(&self, name: &str) -> Result<(usize, &[&'a str])> {
        self.sections
            .iter()
            .find(|(_, n, _)| *n == name)
            .map(|(no, _, rows)| (*no, rows.as_slice()))
            .ok_or_else(|| Error::parse(self.path, 1, format!("missing section [{name}]")))
    }

    fn section_start(&self, name: &str) -> Result<usize> {
        Ok(self.section(name)?.0)
    }

    /// Line number and text of a single-line section.
    fn section_line(&self, name: &str) -> Result<(usize, &'a str)> {
        let (start, rows) = self.section(name)?;
        Ok((start + 1, rows.first().copied().unwrap_or("")))
    }

    fn row<T: FromStr>(&self, name: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        let (line, text) = self.section_line(name)?;
        parse_row(self.path, line, text)
    }

    fn single_row<T: FromStr>(&self, name: &str, len: usize) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        let row = self.row(name)?;
        if row.len() != len {
            let (line, _) = self.section_line(name)?;
            return Err(Error::parse(
                self.path,
                line,
                format!("{} entries, expected {len}", row.len()),
            ));
        }
        Ok(row)
    }

    fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<DenseMatrix<f64>> {
        let (start, lines) = self.section(name)?;
        if lines.len() != rows {
            return Err(Error::parse(
                self.path,
                start + 1 + lines.len().min(rows),
                format!("[{name}] has {} rows, expected {rows}", lines.len()),
            ));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for (i, line) in lines.iter().enumerate() {
            let row: Vec<f64> = parse_row(self.path, start + 1 + i, line)?;
            if row.len() != cols {
                return Err(Error::parse(
                    self.path,
                    start + 1 + i,
                    format!("{} columns, expected {cols}", row.len()),
                ));
            }
            data.extend(row);
        }
        DenseMatrix::from_vec(rows, cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::generate_corpus;
    use crate::gibbs::{run_gibbs, GibbsConfig, HyperparamPreset};

    fn small_corpus() -> SyntheticCorpus {
        let spec = CorpusSpec::new(3, 3, 5, 20)
            .with_structure(0.6)
            .with_stopword_fraction(0.2)
            .with_seed(4);
        generate_corpus(&spec).unwrap()
    }

    #[test]
    fn corpus_reexport_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = small_corpus();
        let out = export_corpus(&corpus, &dir.path().join("c"), true).unwrap();
        let first = fs::read(&out.corpus).unwrap();
        let back = import_corpus(
            &out.corpus,
            out.labels.as_ref().unwrap(),
            out.truth.as_ref().unwrap(),
        )
        .unwrap();
        assert_eq!(back, corpus);
        let again = export_corpus(&back, &dir.path().join("d"), true).unwrap();
        assert_eq!(fs::read(&again.corpus).unwrap(), first);
        assert_eq!(
            fs::read(again.truth.unwrap()).unwrap(),
            fs::read(out.truth.unwrap()).unwrap()
        );
        let text = String::from_utf8(first).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn blind_export_has_no_labels() {
        let dir = tempfile::tempdir().unwrap();
        let out = export_corpus(&small_corpus(), &dir.path().join("blind"), false).unwrap();
        assert!(out.labels.is_none() && out.truth.is_none());
        assert!(!dir.path().join("blind.labels").exists());
        assert!(!dir.path().join("blind.truth").exists());
    }

    #[test]
    fn unknown_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.corpus");
        let text = CorpusFile::from_corpus(&small_corpus())
            .to_text()
            .replacen(" v1 ", " v2 ", 1);
        fs::write(&p, text).unwrap();
        assert!(matches!(
            CorpusFile::read(&p),
            Err(Error::UnsupportedVersion { .. })
        ));
    }

    #[test]
    fn result_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = small_corpus();
        let cfg = GibbsConfig::from_preset(HyperparamPreset::LdagsDefault, 4)
            .with_sweeps(5)
            .with_seed(1);
        let result = run_gibbs(corpus.documents(), 20, &cfg).unwrap();
        let p = dir.path().join("r.result");
        let lengths: Vec<usize> = corpus.doc_lengths().collect();
        write_result(&result, &lengths, &p).unwrap();
        let cf = CorpusFile::from_corpus(&corpus);
        assert_eq!(import_result(&p, Some(&cf)).unwrap(), result);
        assert_eq!(import_result(&p, None).unwrap(), result);
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(
            text.lines()
                .filter(|l| l.starts_with("hyperparam "))
                .count(),
            5
        );
    }

    fn two_doc_result_text(row0: &str) -> String {
        format!(
            "{RESULT_MAGIC} v1\nalgorithm_tag ext\ntopics 2\ndocuments 2\nvocabulary 2\n[topic_doc]\n{row0}\n0.5 0.5\n[word_topic]\n1 0\n0 1\n[labels]\n0 1\n1\n"
        )
    }

    #[test]
    fn result_validation_reports_rows_and_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.result");
        fs::write(&p, two_doc_result_text("0.5 0.4")).unwrap();
        let err = import_result(&p, None).unwrap_err().to_string();
        assert!(err.contains("row 0") && err.contains(":7:"), "{err}");

        fs::write(&p, two_doc_result_text("0.5 0.5")).unwrap();
        let corpus = CorpusFile {
            spec: CorpusSpec::new(2, 2, 1, 2).with_doc_lengths(DocLengths::PerDocument(vec![2, 2])),
            docs: vec![vec![0, 1], vec![1, 0]],
        };
        let err = import_result(&p, Some(&corpus)).unwrap_err().to_string();
        assert!(err.contains(":14:"), "{err}");

        fs::write(
            &p,
            two_doc_result_text("0.5 0.5").replace("[labels]\n0 1", "[labels]\n0 2"),
        )
        .unwrap();
        assert!(import_result(&p, None).is_err());
    }

    #[test]
    fn more_inferred_topics_than_planted_is_fine() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = small_corpus();
        let cfg = GibbsConfig::from_preset(HyperparamPreset::LdagsDefault, 25).with_sweeps(2);
        let result = run_gibbs(corpus.documents(), 20, &cfg).unwrap();
        let p = dir.path().join("k25.result");
        write_result(&result, &corpus.doc_lengths().collect::<Vec<_>>(), &p).unwrap();
        let back = import_result(&p, Some(&CorpusFile::from_corpus(&corpus))).unwrap();
        assert_eq!(back.num_topics(), 25);
    }

    #[test]
    fn truth_file_rejects_inconsistent_stopwords() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.truth");
        let tf = TruthFile::from_corpus(&small_corpus());
        let text = tf.to_text();
        let tampered = text.replace("[stopwords]\n", "[stopwords]\n19 ");
        fs::write(
            &p,
            if tampered == text {
                text.clone() + "x"
            } else {
                tampered
            },
        )
        .unwrap();
        assert!(TruthFile::read(&p).is_err());
    }
}
