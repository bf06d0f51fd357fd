use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use topicbench::generate_corpus;
use topicbench::gibbs::{run_gibbs, GibbsConfig, HyperparamPreset};
use topicbench::harness::{
    append_rows, compare_distributions, run_reproducibility, run_sweep, score_result,
    AlgorithmSpec, ExperimentPlan, Recipe, Scale, ScoreRow, SeedPolicy, SweepReport,
};
use topicbench::interchange::{
    export_corpus, import_corpus, import_result, write_result, CorpusFile, LabelFile, TruthFile,
};
use topicbench::metrics::ScoreOptions;
use topicbench::spec::{CorpusSpec, Shape};

const DEFAULT_SEED: u64 = 1;

/// Planted-topic synthetic corpora and topic-model scoring.
#[derive(Debug, Parser)]
#[command(name = "topicbench", version)]
struct Cli {
    /// TOML file with defaults for the chosen command. Keys are flag names with `_`
    /// in place of `-`; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for everything random in the command (ignored by score and compare-dist).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a corpus and write `<out>.corpus`, `<out>.labels` and `<out>.truth`.
    Generate(GenerateArgs),
    /// Run the collapsed Gibbs sampler on a corpus file and write a result file.
    Infer(InferArgs),
    /// Score a result file against the planted labels and print one CSV row.
    Score(ScoreArgs),
    /// Run an experiment plan (or a built-in recipe) and write scores plus a summary.
    Sweep(SweepArgs),
    /// Run the sampler twice per corpus and report label agreement between runs.
    Repro(ReproArgs),
    /// Align a result with the planted distributions and write comparison grids.
    CompareDist(CompareArgs),
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Planted topics K.
    #[arg(long, default_value_t = 10)]
    topics: usize,
    /// Documents D.
    #[arg(long, default_value_t = 2000)]
    documents: usize,
    /// Tokens per document.
    #[arg(long, default_value_t = 100)]
    doc_length: usize,
    /// Vocabulary size V.
    #[arg(long, default_value_t = 1000)]
    vocabulary: usize,
    /// Fraction of the vocabulary used as stopwords.
    #[arg(long, default_value_t = 0.0)]
    stopword_fraction: f64,
    /// Structure c applied to both words and documents.
    #[arg(long, default_value_t = 1.0)]
    structure: f64,
    /// Word structure c_w (overrides --structure).
    #[arg(long)]
    structure_word: Option<f64>,
    /// Document structure c_d (overrides --structure).
    #[arg(long)]
    structure_doc: Option<f64>,
    /// Word marginal: `uniform` or `power_law:<exponent>`.
    #[arg(long, default_value = "uniform")]
    word_dist: Shape,
    /// Topic sizes: `uniform` or `power_law:<exponent>`.
    #[arg(long, default_value = "uniform")]
    topic_sizes: Shape,
    /// Dirichlet concentration for per-document word distributions (off when absent).
    #[arg(long)]
    burstiness: Option<f64>,
    /// Take the most frequent words as stopwords instead of a random subset.
    #[arg(long)]
    stopwords_by_rank: bool,
}

impl SpecArgs {
    fn spec(&self, seed: u64) -> Result<CorpusSpec> {
        let mut spec = CorpusSpec::new(
            self.topics,
            self.documents,
            self.doc_length,
            self.vocabulary,
        )
        .with_structure(self.structure)
        .with_stopword_fraction(self.stopword_fraction)
        .with_word_dist(self.word_dist)
        .with_topic_sizes(self.topic_sizes)
        .with_seed(seed);
        spec.structure_word = self.structure_word.unwrap_or(spec.structure_word);
        spec.structure_doc = self.structure_doc.unwrap_or(spec.structure_doc);
        spec.burstiness = self.burstiness;
        spec.stopwords_by_rank = self.stopwords_by_rank;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
struct GibbsArgs {
    /// Assumed topics K_a (defaults to the planted K).
    #[arg(long)]
    assumed_topics: Option<usize>,
    /// Hyperparameter preset: ldags_default or ldavb_default.
    #[arg(long, default_value = "ldags_default")]
    preset: HyperparamPreset,
    /// Document-topic prior (overrides the preset).
    #[arg(long)]
    alpha: Option<f64>,
    /// Topic-word prior (overrides the preset).
    #[arg(long)]
    beta: Option<f64>,
    /// Full sweeps over the corpus.
    #[arg(long, default_value_t = topicbench::gibbs::DEFAULT_SWEEPS)]
    sweeps: usize,
}

impl GibbsArgs {
    fn config(&self, planted_topics: usize, seed: u64) -> Result<GibbsConfig> {
        let k_a = self.assumed_topics.unwrap_or(planted_topics);
        let mut config = GibbsConfig::from_preset(self.preset, k_a)
            .with_sweeps(self.sweeps)
            .with_seed(seed);
        config.alpha = self.alpha.unwrap_or(config.alpha);
        config.beta = self.beta.unwrap_or(config.beta);
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Output stem; extensions are appended.
    #[arg(long)]
    out: PathBuf,
    /// Write the corpus file only, without labels and truth.
    #[arg(long)]
    blind: bool,
}

#[derive(Debug, Args)]
struct InferArgs {
    /// Corpus file to fit.
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    gibbs: GibbsArgs,
    /// Algorithm tag recorded in the result file.
    #[arg(long, default_value = "gibbs")]
    tag: String,
    /// Result file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Corpus file; labels and truth default to the same stem.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Result file to score.
    #[arg(long)]
    result: PathBuf,
    #[arg(long, default_value = "adhoc")]
    experiment_id: String,
    /// Leave stopword tokens out of the token-level score.
    #[arg(long)]
    exclude_stopwords: bool,
    /// Append the row to this scores CSV instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Experiment plan (TOML).
    #[arg(long, conflicts_with = "recipe", required_unless_present = "recipe")]
    plan: Option<PathBuf>,
    /// Built-in plan: structure, assumed-topics, hyperparam-swap, stopwords or doc-length.
    #[arg(long)]
    recipe: Option<String>,
    /// Use the full problem size (D = 10^4, 10 realizations) for a recipe.
    #[arg(long)]
    full_scale: bool,
    /// Scores CSV (required with --recipe).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Realizations per point.
    #[arg(long)]
    realizations: Option<usize>,
    /// Sweeps for every in-process Gibbs algorithm.
    #[arg(long)]
    sweeps: Option<usize>,
    /// Directory for exported corpora of external algorithms.
    #[arg(long)]
    work_dir: Option<PathBuf>,
    /// Print the resolved plan as TOML and exit.
    #[arg(long)]
    print_plan: bool,
}

#[derive(Debug, Args)]
struct ReproArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    gibbs: GibbsArgs,
    /// Corpora to generate.
    #[arg(long, default_value_t = 5)]
    realizations: usize,
    /// `independent` seeds per run, or the `same` seed twice.
    #[arg(long, default_value = "independent")]
    policy: SeedPolicy,
    /// Write the table here as CSV instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Truth file of the corpus.
    #[arg(long)]
    truth: PathBuf,
    /// Result file to compare.
    #[arg(long)]
    result: PathBuf,
    /// Planted labels; when given, topics are matched by token co-assignment.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Directory for the CSV grids.
    #[arg(long)]
    out: PathBuf,
}

fn command() -> clap::Command {
    Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true))
}

/// Turns the keys of a config file into flags placed ahead of the user's own.
fn config_args(sub: &clap::Command, path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table: toml::Table =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut args = Vec::new();
    for (key, value) in table {
        if key == "seed" {
            continue;
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_id() == key.as_str() && a.get_long().is_some())
            .filter(|a| a.get_id() != "config")
            .with_context(|| {
                format!(
                    "{}: unknown key `{key}` for `{}`",
                    path.display(),
                    sub.get_name()
                )
            })?;
        let flag = format!("--{}", arg.get_long().unwrap());
        let is_switch = matches!(arg.get_action(), ArgAction::SetTrue);
        let scalar = |v: &toml::Value| -> Result<String> {
            Ok(match v {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                other => bail!("{}: `{key}` has unsupported value {other}", path.display()),
            })
        };
        match value {
            toml::Value::Boolean(b) if is_switch => {
                if b {
                    args.push(flag.into());
                }
            }
            v => args.push(format!("{flag}={}", scalar(&v)?).into()),
        }
    }
    Ok(args)
}

/// Looks up a global option in a partial parse, wherever it was given.
fn global<T: Clone + Send + Sync + 'static>(matches: &clap::ArgMatches, id: &str) -> Option<T> {
    let here = matches.try_get_one::<T>(id).ok().flatten().cloned();
    here.or_else(|| matches.subcommand().and_then(|(_, sub)| global(sub, id)))
}

fn parse() -> Result<Cli> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    // a first, lenient pass only locates --config; required flags may live in the file
    let partial = command()
        .ignore_errors(true)
        .try_get_matches_from(&argv)
        .ok();
    let config = partial
        .as_ref()
        .and_then(|m| global::<PathBuf>(m, "config"));
    let name = partial
        .as_ref()
        .and_then(|m| m.subcommand_name().map(str::to_string));
    let (Some(config), Some(name)) = (config, name) else {
        return Ok(Cli::from_arg_matches(&command().get_matches_from(argv))?);
    };
    let root = command();
    let sub = root.find_subcommand(&name).context("unknown subcommand")?;
    let extra = config_args(sub, &config)?;
    let at = argv
        .iter()
        .position(|a| *a == *name)
        .context("subcommand not found in arguments")?;
    let mut merged: Vec<OsString> = argv[..=at].to_vec();
    merged.extend(extra);
    merged.extend(argv[at + 1..].iter().cloned());
    let mut cli = Cli::from_arg_matches(&command().get_matches_from(merged))?;
    if cli.seed.is_none() {
        cli.seed = config_seed(&config)?;
    }
    Ok(cli)
}

fn config_seed(path: &Path) -> Result<Option<u64>> {
    let table: toml::Table = toml::from_str(&fs::read_to_string(path)?)?;
    match table.get("seed") {
        None => Ok(None),
        Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
        Some(other) => bail!(
            "{}: `seed` must be a non-negative integer, got {other}",
            path.display()
        ),
    }
}

fn main() -> Result<()> {
    let cli = parse()?;
    let seed = cli.seed;
    match cli.command {
        Command::Generate(args) => generate(args, seed),
        Command::Infer(args) => infer(args, seed),
        Command::Score(args) => score(args),
        Command::Sweep(args) => sweep(args, seed),
        Command::Repro(args) => repro(args, seed),
        Command::CompareDist(args) => compare(args),
    }
}

fn generate(args: GenerateArgs, seed: Option<u64>) -> Result<()> {
    let spec = args.spec.spec(seed.unwrap_or(DEFAULT_SEED))?;
    let corpus = generate_corpus(&spec)?;
    let written = export_corpus(&corpus, &args.out, !args.blind)?;
    println!("{}", written.corpus.display());
    for path in written.labels.iter().chain(&written.truth) {
        println!("{}", path.display());
    }
    Ok(())
}

fn infer(args: InferArgs, seed: Option<u64>) -> Result<()> {
    let corpus = CorpusFile::read(&args.corpus)?;
    let config = args
        .gibbs
        .config(corpus.spec.num_topics, seed.unwrap_or(DEFAULT_SEED))?;
    let mut result = run_gibbs(&corpus.docs, corpus.spec.vocabulary_size, &config)?;
    result.algorithm_tag = args.tag;
    result
        .hyperparams
        .insert("preset".into(), args.gibbs.preset.name().into());
    let lengths: Vec<usize> = corpus.docs.iter().map(Vec::len).collect();
    write_result(&result, &lengths, &args.out)?;
    println!("{}", args.out.display());
    Ok(())
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn score(args: ScoreArgs) -> Result<()> {
    let labels = args
        .labels
        .unwrap_or_else(|| sibling(&args.corpus, topicbench::interchange::LABELS_EXT));
    let truth = args
        .truth
        .unwrap_or_else(|| sibling(&args.corpus, topicbench::interchange::TRUTH_EXT));
    let corpus = import_corpus(&args.corpus, &labels, &truth)?;
    let result = import_result(&args.result, Some(&CorpusFile::from_corpus(&corpus)))?;
    let mut row = ScoreRow::pending(
        &args.experiment_id,
        &result.algorithm_tag,
        Some(result.num_topics()),
        corpus.spec(),
    );
    score_result(
        &mut row,
        &corpus,
        &result,
        ScoreOptions {
            exclude_stopword_tokens: args.exclude_stopwords,
        },
    )?;
    match args.out {
        Some(out) => append_rows(&out, &[row])?,
        None => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            writer.serialize(&row)?;
            writer.flush()?;
        }
    }
    Ok(())
}

fn sweep(args: SweepArgs, seed: Option<u64>) -> Result<()> {
    let mut plan = match (&args.plan, &args.recipe) {
        (Some(path), _) => ExperimentPlan::read(path)?,
        (None, Some(name)) => {
            let output = args
                .output
                .clone()
                .context("--output is required with --recipe")?;
            let scale = if args.full_scale {
                Scale::Full
            } else {
                Scale::Desk
            };
            Recipe::from_name(name)?.plan(scale, output)
        }
        (None, None) => unreachable!("clap requires --plan or --recipe"),
    };
    if let Some(output) = args.output {
        plan.output = output;
    }
    if let Some(r) = args.realizations {
        plan.realizations = r;
    }
    if let Some(dir) = args.work_dir {
        plan.work_dir = Some(dir);
    }
    if let Some(seed) = seed {
        plan.corpus.seed = seed;
    }
    if let Some(n) = args.sweeps {
        for alg in &mut plan.algorithms {
            if let AlgorithmSpec::Gibbs { sweeps, .. } = alg {
                *sweeps = n;
            }
        }
    }
    plan.validate()?;
    if args.print_plan {
        print!("{}", plan.to_toml());
        return Ok(());
    }
    let report = run_sweep(&plan)?;
    print_report(&plan, &report);
    Ok(())
}

fn print_report(plan: &ExperimentPlan, report: &SweepReport) {
    for (row, reason) in &report.failures {
        eprintln!(
            "failed: {} K_a={:?} seed={}: {reason}",
            row.algorithm_tag, row.assumed_topics, row.seed
        );
    }
    println!(
        "{}: {} rows written, {} skipped, {} failed",
        plan.output.display(),
        report.rows_written,
        report.rows_skipped,
        report.failures.len()
    );
    println!("summary: {}", report.summary_path.display());
    println!(
        "{:<20} {:>5} {:>6} {:>6} {:>6} {:>3} {:>15} {:>15}",
        "algorithm", "K_a", "c", "P_s", "m_d", "R", "nmi", "doc_nmi"
    );
    for s in &report.summary {
        let k_a = s.assumed_topics.map_or("-".to_string(), |k| k.to_string());
        println!(
            "{:<20} {:>5} {:>6.3} {:>6.3} {:>6} {:>3} {:>7.4}±{:<7.4} {:>7.4}±{:<7.4}",
            s.algorithm_tag,
            k_a,
            s.c,
            s.stopword_fraction,
            s.m_d,
            s.realizations,
            s.nmi_mean,
            s.nmi_sd,
            s.doc_nmi_mean,
            s.doc_nmi_sd
        );
    }
}

fn repro(args: ReproArgs, seed: Option<u64>) -> Result<()> {
    let spec = args.spec.spec(seed.unwrap_or(DEFAULT_SEED))?;
    let config = args.gibbs.config(spec.num_topics, 0)?;
    let report = run_reproducibility(&spec, &config, args.realizations, args.policy)?;
    match &args.out {
        Some(path) => {
            let mut writer = csv::Writer::from_path(path)?;
            report.rows.iter().try_for_each(|r| writer.serialize(r))?;
            writer.flush()?;
        }
        None => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            report.rows.iter().try_for_each(|r| writer.serialize(r))?;
            writer.flush()?;
        }
    }
    eprintln!(
        "reproducibility nmi {:.4} ± {:.4} over {} corpora",
        report.mean,
        report.sd,
        report.rows.len()
    );
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let truth = TruthFile::read(&args.truth)?;
    let result = import_result(&args.result, None)?;
    let planted = match &args.labels {
        Some(path) => Some(LabelFile::read(path)?.to_labeling(truth.truth.num_topics())?),
        None => None,
    };
    let cmp = compare_distributions(&truth, &result, planted.as_ref())?;
    cmp.write_grids(&args.out)?;
    println!(
        "matched topics       {} of {}",
        cmp.num_matched(),
        truth.truth.num_topics()
    );
    println!("mean TV P(t|d)       {:.6}", cmp.topic_doc_tv);
    println!("mean TV P(w|t)       {:.6}", cmp.word_topic_tv);
    println!(
        "entropy P(t|d) bits  planted {:.4} inferred {:.4}",
        cmp.planted_topic_doc_entropy, cmp.inferred_topic_doc_entropy
    );
    println!(
        "entropy P(w|t) bits  planted {:.4} inferred {:.4}",
        cmp.planted_word_topic_entropy, cmp.inferred_word_topic_entropy
    );
    println!("grids: {}", args.out.display());
    Ok(())
}
