//! Subcommands, argument structs and their drivers.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tagzero_core::embedding::{train_sgns, EmbeddingMatrix, SgnsConfig, Vocabulary};
use tagzero_core::eval::{
    accuracy, run_supervised_experiment, run_zsl_experiment, Averaging, PooledData, Setting, SplitSize,
    SupervisedConfig, SupervisedReport, ZslConfig, ZslReport,
};
use tagzero_core::ingest::{
    extract_hashtags, filter_corpus, materialize_dataset, minimal_clean, normalize_raw, remove_stopwords,
    select_top_labels, tokenize_tweet, Corpus, Dataset,
};
use tagzero_core::supervised::{train_baseline_on_features, FeatureExtractor, TrainSpec};
use tagzero_core::zsl::{dem_fit_indexed, eszsl_fit_features, recommend, AttributeMatrix, ZslMethod, ZslModel};

use crate::bundle::ModelBundle;
use crate::config::{resolve, CONFIG_ENV};
use crate::error::{CliError, Result, EXIT_OK, EXIT_USAGE};
use crate::files::{
    load_stopwords, read_clean_jsonl, read_json, read_token_corpus, to_json_string, write_bytes, write_clean_jsonl,
    write_json, LabelCatalog, LabelEntry,
};
use crate::raw::read_raw_jsonl;
use crate::table::{pct, render};
use crate::word2vec::{load_embeddings, save_embeddings};

#[derive(Debug, Parser)]
#[command(name = "tagzero", version, about = "Hashtag recommendation for short texts, including hashtags never seen in training")]
pub struct Cli {
    /// JSON file with one object of settings per command name.
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean raw tweets, extract hashtags and pick the label set.
    Ingest(IngestArgs),
    /// Train skip-gram word vectors on a tokenized corpus.
    TrainEmbeddings(EmbedArgs),
    /// Train the classifier and zero-shot heads on every catalog label.
    TrainBaseline(BaselineArgs),
    /// Stratified k-fold evaluation of the supervised classifier.
    Eval(EvalArgs),
    /// Zero-shot sweep over seen/unseen label splits.
    Zsl(ZslArgs),
    /// Few-shot sweep: like zsl, with a few examples of each unseen label in training.
    Fsl(FslArgs),
    /// Rank candidate hashtags for a piece of text.
    Recommend(RecommendArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::TrainEmbeddings(_) => "train-embeddings",
            Command::TrainBaseline(_) => "train-baseline",
            Command::Eval(_) => "eval",
            Command::Zsl(_) => "zsl",
            Command::Fsl(_) => "fsl",
            Command::Recommend(_) => "recommend",
        }
    }
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("missing --{flag} (on the command line or in the config file)")))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    /// Raw tweets, one JSON object per line.
    #[arg(long = "in", value_name = "RAW_JSONL")]
    pub input: Option<PathBuf>,
    /// Stopword list, one word per line. Defaults to the bundled English list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Cleaned tweets as JSON lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Label catalog (JSON) of the selected hashtags.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Drop-counter report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Lightly cleaned text of every English tweet, one line each, for embedding training.
    #[arg(long)]
    pub embed_corpus: Option<PathBuf>,
    /// Keep at most this many of the most frequent hashtags.
    #[arg(long, default_value_t = 50)]
    pub top_n: usize,
    /// Minimum number of distinct tweets a kept hashtag needs.
    #[arg(long, default_value_t = 200)]
    pub min_tweets: usize,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EmbedArgs {
    /// One whitespace-tokenized sentence per line.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// word2vec text output; token counts go to `<out>.vocab`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 150)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Frequent-word subsampling threshold (e.g. 1e-3); off when unset.
    #[arg(long)]
    pub subsample: Option<f64>,
    /// Training summary (JSON): settings, vocabulary size, per-epoch loss.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    /// Cleaned tweets from `ingest --out`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Label catalog from `ingest --labels`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// word2vec text embeddings.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.001)]
    pub learning_rate: f64,
    /// Hidden layer width, which is also the tweet feature dimension.
    #[arg(long, default_value_t = 1024)]
    pub hidden_units: usize,
}

impl TrainArgs {
    fn spec(&self, seed: u64) -> TrainSpec {
        TrainSpec {
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            learning_rate: self.learning_rate,
            hidden_units: self.hidden_units,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HeadArgs {
    /// ESZSL regularization.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Epochs for the DEM label mapper.
    #[arg(long, default_value_t = 50)]
    pub dem_epochs: usize,
    /// Number of top seen labels ConSE mixes; all when unset.
    #[arg(long)]
    pub conse_top_t: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BaselineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub heads: HeadArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Heads to fit besides ConSE, which needs no fitting.
    #[arg(long, value_delimiter = ',', default_value = "conse,eszsl,dem")]
    pub methods: Vec<ZslMethod>,
    /// Model bundle (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// micro or macro.
    #[arg(long, default_value = "micro")]
    pub averaging: Averaging,
    /// Full results (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub heads: HeadArgs,
    /// Seen/unseen label counts.
    #[arg(long, value_delimiter = ',', default_value = "40/10,30/20,25/25")]
    pub splits: Vec<SplitSize>,
    #[arg(long, value_delimiter = ',', default_value = "conse,eszsl,dem")]
    pub methods: Vec<ZslMethod>,
    /// One run per seed; tables show the mean.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub seeds: Vec<u64>,
    /// Cut-offs for Flat-Hit@K.
    #[arg(long, value_delimiter = ',', default_value = "1,2,5")]
    pub ks: Vec<usize>,
    /// Full results (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ZslArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
}

/// `N` or `MIN-MAX` examples per unseen label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ShotRange {
    pub min: usize,
    pub max: usize,
}

impl FromStr for ShotRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("shots {s:?} must be N or MIN-MAX");
        let (min, max) = match s.split_once('-') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let n = s.trim().parse().map_err(|_| bad())?;
                (n, n)
            }
        };
        if min > max {
            return Err(format!("shots range {s:?} is empty"));
        }
        Ok(ShotRange { min, max })
    }
}

impl From<ShotRange> for String {
    fn from(r: ShotRange) -> String {
        if r.min == r.max {
            r.min.to_string()
        } else {
            format!("{}-{}", r.min, r.max)
        }
    }
}

impl TryFrom<String> for ShotRange {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FslArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    /// Training examples per unseen label, drawn uniformly from the range.
    #[arg(long, default_value = "5-10")]
    pub shots: ShotRange,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RecommendArgs {
    /// Model bundle from `train-baseline`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Use this embedding file instead of the one recorded in the bundle (must be identical).
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// The text to tag.
    #[arg(long)]
    pub text: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value = "conse")]
    pub method: ZslMethod,
    /// Candidate hashtags (with or without '#'); the model's own labels when neither this nor a file is given.
    #[arg(long, value_delimiter = ',')]
    pub candidates: Vec<String>,
    /// Candidate hashtags, one per line.
    #[arg(long)]
    pub candidates_file: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code. Errors are reported on stderr.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    init_logging(cli.verbose);
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    match run(&cli, sub) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.hint() {
                eprintln!("hint: {hint}");
            }
            e.exit_code()
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .try_init();
}

pub fn run(cli: &Cli, matches: &ArgMatches) -> Result<()> {
    let name = cli.command.name();
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(&resolve(a, matches, name, config)?),
        Command::TrainEmbeddings(a) => cmd_train_embeddings(&resolve(a, matches, name, config)?),
        Command::TrainBaseline(a) => cmd_train_baseline(&resolve(a, matches, name, config)?),
        Command::Eval(a) => cmd_eval(&resolve(a, matches, name, config)?),
        Command::Zsl(a) => {
            let a = resolve(a, matches, name, config)?;
            cmd_sweep(&a.sweep, Setting::Zsl, ShotRange { min: 0, max: 0 }, config_value(&a))
        }
        Command::Fsl(a) => {
            let a = resolve(a, matches, name, config)?;
            cmd_sweep(&a.sweep, Setting::Fsl, a.shots, config_value(&a))
        }
        Command::Recommend(a) => cmd_recommend(&resolve(a, matches, name, config)?),
    }
}

fn config_value<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("serializable arguments")
}

fn emit(json: bool, value: &Value, table: &str) {
    if json {
        print!("{}", to_json_string(value));
    } else {
        print!("{table}");
    }
}

pub fn cmd_ingest(a: &IngestArgs) -> Result<()> {
    let input = required(&a.input, "in")?;
    let out = required(&a.out, "out")?;
    let records = read_raw_jsonl(crate::files::open(input)?, input)?;
    let stopwords = load_stopwords(a.stopwords.as_deref())?;
    let (corpus, report) = filter_corpus(&records, &stopwords);
    write_clean_jsonl(out, &corpus.tweets)?;

    let labels = select_top_labels(&corpus.label_counts, a.top_n, a.min_tweets);
    let config = config_value(a);
    let catalog = LabelCatalog {
        config: config.clone(),
        labels: labels
            .iter()
            .map(|l| LabelEntry {
                label: l.clone(),
                tweets: corpus.label_counts[l],
            })
            .collect(),
    };
    if let Some(path) = &a.labels {
        write_json(path, &catalog)?;
    }
    let summary = json!({ "config": config, "report": report, "labels": catalog.labels.len() });
    if let Some(path) = &a.report {
        write_json(path, &summary)?;
    }
    if let Some(path) = &a.embed_corpus {
        let mut text = String::new();
        for r in records.iter().filter(|r| r.lang == "en") {
            if let Ok(body) = normalize_raw(r) {
                let tokens = minimal_clean(body);
                if !tokens.is_empty() {
                    text.push_str(&tokens.join(" "));
                    text.push('\n');
                }
            }
        }
        write_bytes(path, text.as_bytes())?;
    }

    let d = report.dropped;
    let rows: Vec<Vec<String>> = [
        ("records", report.inputs),
        ("kept", report.kept),
        ("dropped: malformed", d.malformed),
        ("dropped: not English", d.non_english),
        ("dropped: no hashtag", d.no_hashtag),
        ("dropped: too short", d.too_short),
        ("dropped: duplicate", d.duplicate),
        ("labels selected", catalog.labels.len()),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), v.to_string()])
    .collect();
    emit(a.json, &summary, &render(&["", "count"], &rows));
    Ok(())
}

pub fn cmd_train_embeddings(a: &EmbedArgs) -> Result<()> {
    let corpus_path = required(&a.corpus, "corpus")?;
    let out = required(&a.out, "out")?;
    let sentences = read_token_corpus(corpus_path)?;
    let config = SgnsConfig {
        dim: a.dim,
        window: a.window,
        negatives: a.negatives,
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        min_count: a.min_count,
        seed: a.seed,
        subsample_threshold: a.subsample,
    };
    let model = train_sgns(&sentences, &config)?;
    save_embeddings(out, &model.vocab, &model.embeddings)?;
    let summary = json!({
        "config": config_value(a),
        "vocabulary": model.vocab.len(),
        "epoch_losses": model.epoch_losses,
    });
    if let Some(path) = &a.summary {
        write_json(path, &summary)?;
    }
    let rows: Vec<Vec<String>> = model
        .epoch_losses
        .iter()
        .enumerate()
        .map(|(i, l)| vec![(i + 1).to_string(), format!("{l:.4}")])
        .collect();
    println!("{} tokens, {} dimensions", model.vocab.len(), model.embeddings.dim());
    print!("{}", render(&["epoch", "loss"], &rows));
    Ok(())
}

struct LoadedData {
    dataset: Dataset,
    vocab: Vocabulary,
    embeddings: EmbeddingMatrix,
    embeddings_path: PathBuf,
}

fn load_data(a: &DataArgs) -> Result<LoadedData> {
    let data = required(&a.data, "data")?;
    let labels_path = required(&a.labels, "labels")?;
    let embeddings_path = required(&a.embeddings, "embeddings")?;
    let catalog: LabelCatalog = read_json(labels_path)?;
    if catalog.labels.is_empty() {
        return Err(CliError::Data(format!(
            "{}: the label catalog is empty; re-run ingest with a lower --min-tweets",
            labels_path.display()
        )));
    }
    let corpus = Corpus::from_tweets(read_clean_jsonl(data)?);
    let dataset = materialize_dataset(&corpus, &catalog.names())?;
    let (vocab, embeddings) = load_embeddings(embeddings_path)?;
    Ok(LoadedData {
        dataset,
        vocab,
        embeddings,
        embeddings_path: embeddings_path.clone(),
    })
}

pub fn cmd_train_baseline(a: &BaselineArgs) -> Result<()> {
    let out = required(&a.out, "out")?;
    let loaded = load_data(&a.data)?;
    let pooled = PooledData::from_dataset(&loaded.dataset, &loaded.vocab, &loaded.embeddings);
    let attributes = AttributeMatrix::from_embedding(&pooled.label_set, &loaded.vocab, &loaded.embeddings)?;
    let spec = a.train.spec(a.seed);
    let classifier = train_baseline_on_features(&pooled.inputs, &pooled.labels, pooled.label_set.clone(), &spec)?;
    let predictions = pooled
        .inputs
        .iter()
        .map(|x| classifier.predict_pooled(x))
        .collect::<tagzero_core::Result<Vec<_>>>()?;
    let train_accuracy = accuracy(&pooled.labels, &predictions);
    let final_loss = classifier.epoch_losses.last().copied();

    let mut model = ZslModel::new(classifier, attributes)?;
    if let Some(t) = a.heads.conse_top_t {
        model.conse_top_t = t.clamp(1, model.seen.len());
    }
    if a.methods.contains(&ZslMethod::Eszsl) || a.methods.contains(&ZslMethod::Dem) {
        let features = pooled
            .inputs
            .iter()
            .map(|x| model.classifier.features(x))
            .collect::<tagzero_core::Result<Vec<_>>>()?;
        if a.methods.contains(&ZslMethod::Eszsl) {
            model.eszsl = Some(eszsl_fit_features(&features, &pooled.labels, &model.seen, a.heads.gamma)?);
        }
        if a.methods.contains(&ZslMethod::Dem) {
            let dem_spec = TrainSpec {
                epochs: a.heads.dem_epochs,
                ..spec.clone()
            };
            model.dem = Some(dem_fit_indexed(&features, &pooled.labels, &model.seen, &dem_spec)?);
        }
    }
    let heads: Vec<&str> = model.methods().iter().map(|m| m.as_str()).collect();
    ModelBundle::new(config_value(a), &loaded.embeddings_path, model.clone())?.save(out)?;
    let rows = vec![
        vec!["examples".into(), pooled.len().to_string()],
        vec!["labels".into(), pooled.label_set.len().to_string()],
        vec!["train accuracy (%)".into(), pct(100.0 * train_accuracy)],
        vec!["final loss".into(), final_loss.map_or("-".into(), |l| format!("{l:.4}"))],
        vec!["heads".into(), heads.join(",")],
    ];
    print!("{}", render(&["", "value"], &rows));
    Ok(())
}

pub fn supervised_table(report: &SupervisedReport) -> String {
    let row = |name: String, m: &tagzero_core::eval::MetricsReport| {
        vec![
            name,
            pct(100.0 * m.accuracy),
            pct(100.0 * m.precision),
            pct(100.0 * m.recall),
            pct(100.0 * m.f1),
        ]
    };
    let mut rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| row(format!("fold {}", c.fold + 1), &c.metrics))
        .collect();
    rows.push(row("mean".into(), &report.mean));
    render(&["", "Accuracy (%)", "Precision", "Recall", "F1"], &rows)
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let loaded = load_data(&a.data)?;
    let pooled = PooledData::from_dataset(&loaded.dataset, &loaded.vocab, &loaded.embeddings);
    let config = SupervisedConfig {
        folds: a.folds,
        seed: a.seed,
        averaging: a.averaging,
        train: a.train.spec(a.seed),
    };
    let report = run_supervised_experiment(&pooled, &config)?;
    let value = json!({
        "experiment": report.experiment,
        "config": config_value(a),
        "cells": report.cells,
        "mean": report.mean,
    });
    if let Some(path) = &a.out {
        write_json(path, &value)?;
    }
    emit(a.json, &value, &supervised_table(&report));
    Ok(())
}

pub fn sweep_table(report: &ZslReport) -> String {
    let ks = &report.config.ks;
    let methods = &report.config.methods;
    let mut headers = vec!["Seen/Unseen".to_owned()];
    for m in methods {
        for k in ks {
            headers.push(format!("{}@{k}", m.display_name()));
        }
    }
    let mut rows = Vec::new();
    for split in &report.config.splits {
        let mut row = vec![split.to_string()];
        for &m in methods {
            let summary = report.summary_for(*split, m);
            for &k in ks {
                row.push(summary.and_then(|s| s.metrics.get(k)).map_or("-".into(), pct));
            }
        }
        rows.push(row);
    }
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut out = String::new();
    let title = match report.config.setting {
        Setting::Zsl => "Zero-shot",
        Setting::Fsl => "Few-shot",
    };
    let _ = writeln!(out, "{title} Flat-Hit@K (%), mean over {} seed(s)", report.config.seeds.len());
    out.push_str(&render(&headers, &rows));
    out
}

fn cmd_sweep(a: &SweepArgs, setting: Setting, shots: ShotRange, echo: Value) -> Result<()> {
    let loaded = load_data(&a.data)?;
    let pooled = PooledData::from_dataset(&loaded.dataset, &loaded.vocab, &loaded.embeddings);
    let attributes = AttributeMatrix::from_embedding(&pooled.label_set, &loaded.vocab, &loaded.embeddings)?;
    let train = a.train.spec(0);
    let config = ZslConfig {
        splits: a.splits.clone(),
        methods: a.methods.clone(),
        setting,
        shots_min: shots.min,
        shots_max: shots.max,
        seeds: a.seeds.clone(),
        ks: a.ks.clone(),
        dem: TrainSpec {
            epochs: a.heads.dem_epochs,
            ..train.clone()
        },
        train,
        gamma: a.heads.gamma,
        conse_top_t: a.heads.conse_top_t,
    };
    let report = run_zsl_experiment(&pooled, &attributes, &config)?;
    let value = json!({
        "experiment": report.experiment,
        "config": echo,
        "cells": report.cells,
        "summary": report.summary,
    });
    if let Some(path) = &a.out {
        write_json(path, &value)?;
    }
    emit(a.json, &value, &sweep_table(&report));
    Ok(())
}

fn normalize_candidate(c: &str) -> Option<String> {
    let c = c.trim().trim_start_matches('#').to_lowercase();
    (!c.is_empty()).then_some(c)
}

pub fn cmd_recommend(a: &RecommendArgs) -> Result<()> {
    let model_path = required(&a.model, "model")?;
    let text = required(&a.text, "text")?;
    let bundle = ModelBundle::load(model_path)?;
    let (vocab, emb) = bundle.load_embeddings(a.embeddings.as_deref())?;
    let stopwords = load_stopwords(a.stopwords.as_deref())?;

    let mut candidates: Vec<String> = a.candidates.iter().filter_map(|c| normalize_candidate(c)).collect();
    if let Some(path) = &a.candidates_file {
        candidates.extend(crate::files::read_to_string(path)?.lines().filter_map(normalize_candidate));
    }
    if candidates.is_empty() {
        candidates = bundle.model.seen.labels().to_vec();
    }
    let mut unique = std::collections::BTreeSet::new();
    candidates.retain(|c| unique.insert(c.clone()));
    if a.k > candidates.len() {
        log::warn!("only {} candidates; showing all of them", candidates.len());
    }
    let candidate_attrs = AttributeMatrix::from_embedding(&candidates, &vocab, &emb)?;

    let (body, _) = extract_hashtags(tokenize_tweet(text));
    let tokens = remove_stopwords(body, &stopwords);
    let rec = recommend(a.method, &bundle.model, &tokens, &vocab, &emb, &candidate_attrs, a.k)?;
    if rec.all_oov {
        log::warn!("no word of the text is in the embedding vocabulary; the ranking is uninformative");
    }
    let value = json!({
        "config": config_value(a),
        "tokens": tokens,
        "all_oov": rec.all_oov,
        "ranked": rec.prediction,
    });
    let rows: Vec<Vec<String>> = rec
        .prediction
        .ranked
        .iter()
        .enumerate()
        .map(|(i, r)| vec![(i + 1).to_string(), format!("#{}", r.label), format!("{:.4}", r.score)])
        .collect();
    emit(a.json, &value, &render(&["rank", "hashtag", "score"], &rows));
    Ok(())
}
