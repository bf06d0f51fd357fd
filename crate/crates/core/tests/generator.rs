use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use topicbench::{generate_corpus, CorpusSpec, Shape};

fn small_spec() -> impl Strategy<Value = CorpusSpec> {
    (
        1usize..6,
        1usize..12,
        1usize..30,
        20usize..120,
        0.0f64..0.6,
        0.0f64..=1.0,
        0.0f64..=1.0,
        prop_oneof![
            Just(Shape::Uniform),
            (1.05f64..3.0).prop_map(Shape::PowerLaw)
        ],
        prop_oneof![Just(None), (0.5f64..200.0).prop_map(Some)],
        any::<u64>(),
    )
        .prop_map(|(k, d, m, v, ps, cw, cd, shape, burst, seed)| {
            let mut spec = CorpusSpec::new(k, d, m, v)
                .with_stopword_fraction(ps)
                .with_word_dist(shape)
                .with_seed(seed);
            spec.structure_word = cw;
            spec.structure_doc = cd;
            spec.burstiness = burst;
            spec
        })
        .prop_filter("valid spec", |s| s.validate().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_a_function_of_spec(spec in small_spec()) {
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn float_truth_is_normalized(spec in small_spec()) {
        let corpus = generate_corpus(&spec).unwrap();
        let truth = corpus.truth();
        let pw = truth.word_topic_matrix(spec.structure_word);
        for row in pw.iter_rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let pt = truth.topic_marginal();
        for w in 0..spec.vocabulary_size {
            let mix: f64 = (0..spec.num_topics).map(|t| pw.get(t, w) * pt[t]).sum();
            prop_assert!((mix - truth.word_marginal()[w]).abs() < 1e-12);
        }
        for row in truth.topic_doc_matrix(spec.structure_doc).iter_rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tokens_are_in_range_with_requested_lengths(spec in small_spec()) {
        let corpus = generate_corpus(&spec).unwrap();
        for (d, doc) in corpus.documents().iter().enumerate() {
            prop_assert_eq!(doc.len(), spec.doc_length(d));
            prop_assert!(doc.iter().all(|&w| (w as usize) < spec.vocabulary_size));
        }
        prop_assert!(corpus.planted_labels().labels().iter().all(|&t| (t as usize) < spec.num_topics));
    }

    #[test]
    fn pure_documents_carry_their_topic(spec in small_spec()) {
        let mut spec = spec;
        spec.structure_doc = 1.0;
        let corpus = generate_corpus(&spec).unwrap();
        let labels = corpus.planted_labels();
        for (d, doc_labels) in labels.split_by(corpus.doc_lengths()).enumerate() {
            let t_d = corpus.truth().doc_topic_map()[d];
            prop_assert!(doc_labels.iter().all(|&z| z == t_d));
        }
    }
}

#[test]
fn unstructured_tokens_follow_the_word_marginal() {
    let spec = CorpusSpec::new(5, 10_000, 100, 60)
        .with_structure(0.0)
        .with_stopword_fraction(0.2)
        .with_word_dist(Shape::PowerLaw(1.3))
        .with_seed(2024);
    let corpus = generate_corpus(&spec).unwrap();
    let mut counts = vec![0u64; 60];
    for &w in corpus.documents().iter().flatten() {
        counts[w as usize] += 1;
    }
    let n = corpus.num_tokens() as f64;
    assert_eq!(n, 1e6);
    let chi2: f64 = counts
        .iter()
        .zip(corpus.truth().word_marginal())
        .map(|(&c, &p)| (c as f64 - n * p).powi(2) / (n * p))
        .sum();
    let p_value = 1.0 - ChiSquared::new(59.0).unwrap().cdf(chi2);
    assert!(p_value > 1e-3, "chi2 = {chi2}, p = {p_value}");
}

#[test]
fn stopword_token_share_matches_stopword_mass() {
    let spec = CorpusSpec::new(10, 2000, 100, 1000)
        .with_structure(0.6)
        .with_stopword_fraction(0.3)
        .with_word_dist(Shape::PowerLaw(1.2))
        .with_seed(77);
    let corpus = generate_corpus(&spec).unwrap();
    let truth = corpus.truth();
    let mass: f64 = truth
        .stopwords()
        .map(|w| truth.word_marginal()[w as usize])
        .sum();
    let n = corpus.num_tokens() as f64;
    let hits = corpus
        .documents()
        .iter()
        .flatten()
        .filter(|&&w| truth.is_stopword(w as usize))
        .count() as f64;
    let se = (mass * (1.0 - mass) / n).sqrt();
    assert!(
        (hits / n - mass).abs() < 3.0 * se,
        "share {} vs mass {mass} (se {se})",
        hits / n
    );
}

#[test]
fn thread_count_does_not_change_the_corpus() {
    let spec = CorpusSpec::new(4, 300, 50, 200)
        .with_structure(0.5)
        .with_burstiness(Some(5.0))
        .with_seed(8);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| generate_corpus(&spec).unwrap())
    };
    assert_eq!(run(1), run(4));
}
