use proptest::prelude::*;
use topicbench::interchange::{
    export_corpus, import_corpus, import_result, result_to_text, write_result, CorpusFile,
    LabelFile, TruthFile,
};
use topicbench::{
    generate_corpus, run_gibbs, CorpusSpec, DocLengths, GibbsConfig, HyperparamPreset, Shape,
};

fn small_spec() -> impl Strategy<Value = CorpusSpec> {
    (
        1usize..5,
        1usize..8,
        prop_oneof![
            (1usize..20).prop_map(DocLengths::Fixed),
            prop::collection::vec(0usize..20, 8).prop_map(DocLengths::PerDocument),
        ],
        10usize..60,
        0.0f64..0.5,
        0.0f64..=1.0,
        prop_oneof![
            Just(Shape::Uniform),
            (1.01f64..3.0).prop_map(Shape::PowerLaw)
        ],
        prop_oneof![
            Just(Shape::Uniform),
            (1.01f64..2.0).prop_map(Shape::PowerLaw)
        ],
        prop_oneof![Just(None), (0.1f64..100.0).prop_map(Some)],
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(|(k, d, lengths, v, ps, c, wd, ts, burst, by_rank, seed)| {
            let lengths = match lengths {
                DocLengths::PerDocument(l) => DocLengths::PerDocument(l[..d].to_vec()),
                fixed => fixed,
            };
            let mut spec = CorpusSpec::new(k, d, 1, v)
                .with_doc_lengths(lengths)
                .with_stopword_fraction(ps)
                .with_structure(c)
                .with_word_dist(wd)
                .with_topic_sizes(ts)
                .with_burstiness(burst)
                .with_seed(seed);
            spec.stopwords_by_rank = by_rank;
            spec
        })
        .prop_filter("valid spec", |s| {
            s.validate().is_ok() && s.total_tokens() > 0
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_file_type_round_trips(spec in small_spec(), k_a in 1usize..6) {
        let corpus = generate_corpus(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = export_corpus(&corpus, &dir.path().join("c0.5"), true).unwrap();
        prop_assert!(written.corpus.ends_with("c0.5.corpus"));

        let back = import_corpus(&written.corpus, written.labels.as_ref().unwrap(), written.truth.as_ref().unwrap()).unwrap();
        prop_assert_eq!(&back, &corpus);

        let corpus_file = CorpusFile::read(&written.corpus).unwrap();
        prop_assert_eq!(&corpus_file, &CorpusFile::from_corpus(&corpus));
        prop_assert_eq!(corpus_file.to_text(), std::fs::read_to_string(&written.corpus).unwrap());

        let truth = TruthFile::read(written.truth.as_ref().unwrap()).unwrap();
        prop_assert_eq!(&truth, &TruthFile::from_corpus(&corpus));
        prop_assert_eq!(truth.to_text(), std::fs::read_to_string(written.truth.as_ref().unwrap()).unwrap());

        let labels = LabelFile::read(written.labels.as_ref().unwrap()).unwrap();
        prop_assert_eq!(&labels, &LabelFile::from_labeling(corpus.planted_labels(), corpus.doc_lengths()));

        let config = GibbsConfig::from_preset(HyperparamPreset::LdavbDefault, k_a).with_sweeps(3).with_seed(spec.seed);
        let result = run_gibbs(corpus.documents(), spec.vocabulary_size, &config).unwrap();
        let lengths: Vec<usize> = corpus.doc_lengths().collect();
        let path = dir.path().join("r.result");
        write_result(&result, &lengths, &path).unwrap();
        let read = import_result(&path, Some(&corpus_file)).unwrap();
        prop_assert_eq!(&read, &result);
        prop_assert_eq!(result_to_text(&read, &lengths).unwrap(), std::fs::read_to_string(&path).unwrap());
    }
}
