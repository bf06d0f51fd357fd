use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn topicbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topicbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("RUST_BACKTRACE")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = topicbench(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const SMALL: &[&str] = &[
    "--topics",
    "3",
    "--documents",
    "60",
    "--doc-length",
    "40",
    "--vocabulary",
    "60",
];

fn score_field(csv_text: &str, column: &str) -> f64 {
    let mut lines = csv_text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    row[i].parse().unwrap()
}

#[test]
fn generate_infer_score_recovers_planted_topics() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        &["generate", "--out", "c", "--structure", "1", "--seed", "3"],
        SMALL,
    ]
    .concat();
    ok(d, &args);
    for ext in ["corpus", "labels", "truth"] {
        assert!(d.join(format!("c.{ext}")).exists());
    }
    ok(
        d,
        &[
            "infer", "--corpus", "c.corpus", "--sweeps", "100", "--out", "c.result",
        ],
    );
    let row = ok(
        d,
        &["score", "--corpus", "c.corpus", "--result", "c.result"],
    );
    assert!(score_field(&row, "nmi") > 0.95, "{row}");
    assert_eq!(score_field(&row, "doc_nmi"), 1.0);
    assert_eq!(score_field(&row, "K_inferred"), 3.0);
}

#[test]
fn generation_and_inference_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (stem, seed) in [("a", "7"), ("b", "7"), ("c", "8")] {
        ok(
            d,
            &[
                &[
                    "generate",
                    "--out",
                    stem,
                    "--structure",
                    "0.5",
                    "--seed",
                    seed,
                ],
                SMALL,
            ]
            .concat(),
        );
        ok(
            d,
            &[
                "infer",
                "--corpus",
                &format!("{stem}.corpus"),
                "--sweeps",
                "20",
                "--seed",
                seed,
                "--out",
                &format!("{stem}.result"),
            ],
        );
    }
    let read = |p: &str| fs::read_to_string(d.join(p)).unwrap();
    assert_eq!(read("a.corpus"), read("b.corpus"));
    assert_eq!(read("a.truth"), read("b.truth"));
    assert_eq!(read("a.result"), read("b.result"));
    assert_ne!(
        read("a.corpus").lines().nth(1),
        read("c.corpus").lines().nth(1)
    );
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("gen.toml"),
        "topics = 4\ndocuments = 20\ndoc_length = 10\nvocabulary = 40\nstructure = 0.25\n\
         stopword_fraction = 0.1\nstopwords_by_rank = true\nword_dist = \"power_law:1.5\"\nseed = 11\nout = \"cfg\"\n",
    )
    .unwrap();
    ok(d, &["generate", "--config", "gen.toml"]);
    let header = fs::read_to_string(d.join("cfg.corpus"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    for field in [
        "K=4",
        "D=20",
        "m=10",
        "V=40",
        "c_w=0.25",
        "P_s=0.1",
        "stopwords_by_rank=true",
        "word_dist=power_law:1.5",
        "seed=11",
    ] {
        assert!(header.contains(field), "{field} missing from {header}");
    }
    ok(
        d,
        &[
            "--config", "gen.toml", "generate", "--topics", "2", "--seed", "12", "--out", "cli",
        ],
    );
    let header = fs::read_to_string(d.join("cli.corpus"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert!(
        header.contains("K=2") && header.contains("seed=12") && header.contains("D=20"),
        "{header}"
    );
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "topcs = 4\n").unwrap();
    let out = topicbench(
        dir.path(),
        &["generate", "--config", "bad.toml", "--out", "x"],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key `topcs`"));
}

#[test]
fn blind_export_writes_corpus_only() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &[&["generate", "--out", "b", "--blind"], SMALL].concat());
    assert!(d.join("b.corpus").exists());
    assert!(!d.join("b.labels").exists() && !d.join("b.truth").exists());
}

#[test]
fn externally_written_result_is_scored() {
    // stands in for the out-of-process adapter: any tool writing the result format
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[&["generate", "--out", "c", "--structure", "1"], SMALL].concat(),
    );
    let labels = fs::read_to_string(d.join("c.labels")).unwrap();
    let docs: Vec<&str> = labels.lines().collect();
    let truth = fs::read_to_string(d.join("c.truth")).unwrap();
    let doc_topic: Vec<usize> = truth
        .split("[doc_topic]")
        .nth(1)
        .unwrap()
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with('['))
        .filter(|l| !l.trim().is_empty())
        .flat_map(|l| {
            l.split_whitespace()
                .map(|x| x.parse::<usize>().unwrap())
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(doc_topic.len(), 60);
    let build = |first_row: Option<&str>| {
        let mut text = String::from("#topicbench-result v1\nalgorithm_tag external\ntopics 3\ndocuments 60\nvocabulary 60\n[topic_doc]\n");
        for (d, &t) in doc_topic.iter().enumerate() {
            let row: Vec<&str> = (0..3).map(|s| if s == t { "1" } else { "0" }).collect();
            match first_row {
                Some(bad) if d == 0 => text += bad,
                _ => text += &row.join(" "),
            }
            text += "\n";
        }
        text += "[word_topic]\n";
        for _ in 0..3 {
            text += &(vec!["0.016666666666666666"; 60].join(" ") + "\n");
        }
        text += "[labels]\n";
        for line in &docs {
            text += line;
            text += "\n";
        }
        text
    };
    fs::write(d.join("ext.result"), build(None)).unwrap();
    let row = ok(
        d,
        &[
            "score",
            "--corpus",
            "c.corpus",
            "--result",
            "ext.result",
            "--experiment-id",
            "ext",
        ],
    );
    assert_eq!(score_field(&row, "nmi"), 1.0);
    assert!(row.contains("ext,external,3"));

    // a row that does not sum to one is rejected with the offending line
    fs::write(d.join("broken.result"), build(Some("1 1 0"))).unwrap();
    let out = topicbench(
        d,
        &["score", "--corpus", "c.corpus", "--result", "broken.result"],
    );
    assert!(!out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("broken.result:7"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn sweep_plan_runs_resumes_and_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("plan.toml"),
        r#"
experiment_id = "mini"
realizations = 2
output = "scores.csv"

[corpus]
num_topics = 3
num_documents = 30
doc_length = 20
vocabulary_size = 30
structure_word = 1.0
structure_doc = 1.0
seed = 5

[sweep]
parameter = "structure"
values = [0.0, 1.0]

[[algorithms]]
kind = "gibbs"
tag = "gibbs"
sweeps = 40

[[algorithms]]
kind = "external"
tag = "vb"
results_dir = "results"
"#,
    )
    .unwrap();
    let first = ok(d, &["sweep", "--plan", "plan.toml"]);
    assert!(
        first.contains("8 rows written, 0 skipped, 4 failed"),
        "{first}"
    );
    let scores = fs::read_to_string(d.join("scores.csv")).unwrap();
    assert!(scores.starts_with("# splitmix64"));
    assert_eq!(scores.lines().count(), 10);
    assert!(d.join("scores.summary.csv").exists());
    assert!(d.join("mini_corpora/mini_p1_r1.corpus").exists());

    let second = ok(d, &["sweep", "--plan", "plan.toml"]);
    assert!(
        second.contains("4 rows written, 4 skipped, 4 failed"),
        "{second}"
    );
}

#[test]
fn sweep_recipe_prints_plan_and_rejects_empty_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let plan = ok(
        d,
        &[
            "sweep",
            "--recipe",
            "assumed-topics",
            "--output",
            "s.csv",
            "--print-plan",
            "--seed",
            "42",
        ],
    );
    assert!(
        plan.contains("num_documents = 2000") && plan.contains("seed = 42"),
        "{plan}"
    );
    for k in [
        "gibbs_k5",
        "gibbs_k10",
        "gibbs_k20",
        "gibbs_k50",
        "gibbs_k100",
    ] {
        assert!(plan.contains(k));
    }
    let full = ok(
        d,
        &[
            "sweep",
            "--recipe",
            "structure",
            "--full-scale",
            "--output",
            "s.csv",
            "--print-plan",
        ],
    );
    assert!(full.contains("num_documents = 10000") && full.contains("realizations = 10"));

    fs::write(
        d.join("empty.toml"),
        plan.replace(
            "values = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]",
            "values = []",
        ),
    )
    .unwrap();
    let out = topicbench(d, &["sweep", "--plan", "empty.toml"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty value list"));
    assert!(!d.join("s.csv").exists());
}

#[test]
fn repro_with_shared_seed_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        &[
            "repro",
            "--sweeps",
            "20",
            "--realizations",
            "2",
            "--policy",
            "same",
            "--structure",
            "0.3",
        ],
        SMALL,
    ]
    .concat();
    let table = ok(dir.path(), &args);
    let nmi: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(nmi, vec![1.0, 1.0]);
}

#[test]
fn compare_dist_writes_grids_for_wide_results() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[&["generate", "--out", "c", "--structure", "0.7"], SMALL].concat(),
    );
    ok(
        d,
        &[
            "infer",
            "--corpus",
            "c.corpus",
            "--assumed-topics",
            "8",
            "--sweeps",
            "30",
            "--out",
            "c.result",
        ],
    );
    let report = ok(
        d,
        &[
            "compare-dist",
            "--truth",
            "c.truth",
            "--result",
            "c.result",
            "--labels",
            "c.labels",
            "--out",
            "grids",
        ],
    );
    assert!(report.contains("matched topics       3 of 3"), "{report}");
    let grid = fs::read_to_string(d.join("grids/inferred_topic_doc.csv")).unwrap();
    assert_eq!(grid.lines().count(), 60);
    assert_eq!(grid.lines().next().unwrap().split(',').count(), 8);

    ok(
        d,
        &[
            &["generate", "--out", "other", "--vocabulary", "70"],
            &SMALL[..6],
        ]
        .concat(),
    );
    let out = topicbench(
        d,
        &[
            "compare-dist",
            "--truth",
            "other.truth",
            "--result",
            "c.result",
            "--out",
            "g2",
        ],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}
