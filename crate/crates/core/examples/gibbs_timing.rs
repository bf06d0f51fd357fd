//! Times one Gibbs run at desk scale and prints token NMI.
use std::time::Instant;

use topicbench::metrics::{token_overlap, ScoreOptions};
use topicbench::{generate_corpus, run_gibbs, CorpusSpec, GibbsConfig, HyperparamPreset};

fn main() {
    let mut args = std::env::args().skip(1);
    let c: f64 = args.next().map_or(0.8, |s| s.parse().unwrap());
    let k_a: usize = args.next().map_or(10, |s| s.parse().unwrap());
    let sweeps: usize = args.next().map_or(200, |s| s.parse().unwrap());
    let spec = CorpusSpec::new(10, 2000, 100, 1000)
        .with_structure(c)
        .with_seed(1);
    let corpus = generate_corpus(&spec).unwrap();
    let cfg = GibbsConfig::from_preset(HyperparamPreset::LdagsDefault, k_a)
        .with_sweeps(sweeps)
        .with_seed(2);
    let start = Instant::now();
    let result = run_gibbs(corpus.documents(), 1000, &cfg).unwrap();
    let score = token_overlap(&corpus, &result.token_labels, ScoreOptions::default()).unwrap();
    println!(
        "c={c} K_a={k_a} sweeps={sweeps} nmi={:.4} elapsed={:?}",
        score.nmi,
        start.elapsed()
    );
}
