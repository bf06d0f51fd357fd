use std::fs;
use std::path::Path;

use crate::corpus::{TokenLabeling, TopicModelResult};
use crate::error::{Error, Result};
use crate::interchange::TruthFile;
use crate::matrix::DenseMatrix;
use crate::metrics::{confusion, entropy_bits, total_variation};

/// Planted against inferred distributions after aligning inferred topics to planted ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionComparison {
    /// `matching[t]` is the inferred topic paired with planted topic `t`.
    pub matching: Vec<Option<usize>>,
    /// Inferred topic ids in aligned order: matched ones first (by planted topic), then the rest.
    pub order: Vec<usize>,
    pub planted_topic_doc: DenseMatrix<f64>,
    pub inferred_topic_doc: DenseMatrix<f64>,
    pub planted_word_topic: DenseMatrix<f64>,
    pub inferred_word_topic: DenseMatrix<f64>,
    /// Mean over documents of the total variation between `P(t|d)` rows (zero-padded).
    pub topic_doc_tv: f64,
    /// Mean over matched topics of the total variation between `P(w|t)` rows.
    pub word_topic_tv: f64,
    pub planted_topic_doc_entropy: f64,
    pub inferred_topic_doc_entropy: f64,
    pub planted_word_topic_entropy: f64,
    pub inferred_word_topic_entropy: f64,
}

impl DistributionComparison {
    pub fn num_matched(&self) -> usize {
        self.matching.iter().flatten().count()
    }

    /// Writes the four aligned grids as headerless CSV files into `dir`.
    pub fn write_grids(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let grids = [
            ("planted_topic_doc.csv", &self.planted_topic_doc),
            ("inferred_topic_doc.csv", &self.inferred_topic_doc),
            ("planted_word_topic.csv", &self.planted_word_topic),
            ("inferred_word_topic.csv", &self.inferred_word_topic),
        ];
        for (name, grid) in grids {
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_path(dir.join(name))?;
            for row in grid.iter_rows() {
                writer.write_record(row.iter().map(|x| format!("{x:.6e}")))?;
            }
            writer.flush().map_err(|e| Error::io(dir.join(name), e))?;
        }
        Ok(())
    }
}

fn mean_row_entropy(m: &DenseMatrix<f64>) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    m.iter_rows().map(entropy_bits::<f64>).sum::<f64>() / m.rows() as f64
}

/// Greedy one-to-one matching by decreasing overlap; ties go to the lowest (row, column).
fn greedy_match(overlap: &DenseMatrix<f64>) -> Vec<Option<usize>> {
    let mut cells: Vec<(usize, usize)> = (0..overlap.rows())
        .flat_map(|i| (0..overlap.cols()).map(move |j| (i, j)))
        .collect();
    cells.sort_by(|a, b| {
        overlap
            .get(b.0, b.1)
            .total_cmp(&overlap.get(a.0, a.1))
            .then(a.cmp(b))
    });
    let mut matching = vec![None; overlap.rows()];
    let mut taken = vec![false; overlap.cols()];
    for (i, j) in cells {
        if matching[i].is_none() && !taken[j] {
            matching[i] = Some(j);
            taken[j] = true;
        }
    }
    matching
}

/// Aligns `result` to the planted model in `truth` and measures how far apart they are.
///
/// Inferred topics are matched to planted ones by token co-assignment when
/// `planted` labels are given, otherwise by `Σ_d P(t|d) P̂(t'|d)`.
pub fn compare_distributions(
    truth: &TruthFile,
    result: &TopicModelResult,
    planted: Option<&TokenLabeling>,
) -> Result<DistributionComparison> {
    let planted_td = truth.topic_doc_matrix();
    let planted_wt = truth.word_topic_matrix();
    let (d, k, v) = (planted_td.rows(), planted_td.cols(), planted_wt.cols());
    let k_a = result.num_topics();
    if result.topic_doc.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "result has {} documents, truth has {d}",
            result.topic_doc.rows()
        )));
    }
    if result.word_topic.cols() != v {
        return Err(Error::DimensionMismatch(format!(
            "result has vocabulary {}, truth has {v}",
            result.word_topic.cols()
        )));
    }

    let overlap = match planted {
        Some(labels) => {
            let cm = confusion(labels, &result.token_labels)?;
            if cm.rows() > k || cm.cols() > k_a {
                return Err(Error::DimensionMismatch(format!(
                    "labels span {}×{} topics, expected at most {k}×{k_a}",
                    cm.rows(),
                    cm.cols()
                )));
            }
            let data = (0..k)
                .flat_map(|t| (0..k_a).map(move |s| (t, s)))
                .map(|(t, s)| {
                    if t < cm.rows() && s < cm.cols() {
                        cm.count(t, s) as f64
                    } else {
                        0.0
                    }
                })
                .collect();
            DenseMatrix::from_vec(k, k_a, data)?
        }
        None => {
            let mut data = vec![0.0; k * k_a];
            for doc in 0..d {
                for t in 0..k {
                    let p = planted_td.get(doc, t);
                    for s in 0..k_a {
                        data[t * k_a + s] += p * result.topic_doc.get(doc, s);
                    }
                }
            }
            DenseMatrix::from_vec(k, k_a, data)?
        }
    };

    let matching = greedy_match(&overlap);
    let mut order: Vec<usize> = matching.iter().flatten().copied().collect();
    order.extend((0..k_a).filter(|s| !matching.contains(&Some(*s))));

    let inferred_td = DenseMatrix::from_vec(
        d,
        k_a,
        (0..d)
            .flat_map(|doc| order.iter().map(move |&s| (doc, s)))
            .map(|(doc, s)| result.topic_doc.get(doc, s))
            .collect(),
    )?;
    let inferred_wt = DenseMatrix::from_rows(
        order
            .iter()
            .map(|&s| result.word_topic.row(s).to_vec())
            .collect(),
    )?;

    // planted topics without a partner take no column in `order`, so compare by matching
    let topic_doc_tv = (0..d)
        .map(|doc| {
            let mut aligned = vec![0.0; k];
            let mut extra = Vec::new();
            for s in 0..k_a {
                let p = result.topic_doc.get(doc, s);
                match matching.iter().position(|m| *m == Some(s)) {
                    Some(t) => aligned[t] = p,
                    None => extra.push(p),
                }
            }
            let mut planted_row = planted_td.row(doc).to_vec();
            planted_row.resize(k + extra.len(), 0.0);
            aligned.extend(extra);
            total_variation(&planted_row, &aligned)
        })
        .sum::<f64>()
        / d.max(1) as f64;
    let matched: Vec<(usize, usize)> = matching
        .iter()
        .enumerate()
        .filter_map(|(t, m)| m.map(|s| (t, s)))
        .collect();
    let word_topic_tv = if matched.is_empty() {
        1.0
    } else {
        matched
            .iter()
            .map(|&(t, s)| total_variation(planted_wt.row(t), result.word_topic.row(s)))
            .sum::<f64>()
            / matched.len() as f64
    };

    Ok(DistributionComparison {
        topic_doc_tv,
        word_topic_tv,
        planted_topic_doc_entropy: mean_row_entropy(&planted_td),
        inferred_topic_doc_entropy: mean_row_entropy(&inferred_td),
        planted_word_topic_entropy: mean_row_entropy(&planted_wt),
        inferred_word_topic_entropy: mean_row_entropy(&inferred_wt),
        matching,
        order,
        planted_topic_doc: planted_td,
        inferred_topic_doc: inferred_td,
        planted_word_topic: planted_wt,
        inferred_word_topic: inferred_wt,
    })
}
