use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use pagbasa::classifiers::{Hyperparams, ModelKind, TrainedModel};
use pagbasa::corpus::{
    extract_rows, generate_synthetic, load_corpus, read_features_csv, rows_to_dataset, write_features_csv, CorpusError,
    FeatureRow, LoadOptions, SynthParams,
};
use pagbasa::evaluation::{cross_validate, polysyllabic_profile, EvalReport, ModelSpec, DEFAULT_FOLDS};
use pagbasa::features::{ExtractOptions, FeatureSet, LexOptions, DEFAULT_SAMPLE_SIZE, FEATURE_NAMES};
use pagbasa::pos::{TagsetMapping, DEFAULT_SEPARATOR};
use pagbasa::ranking::{rank_features, DEFAULT_BINS, DEFAULT_TOP_K};
use pagbasa::text::DEFAULT_POLYSYLLABIC_THRESHOLD;

const EXIT_FATAL: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pagbasa",
    version,
    about = "Readability-level features, classifiers and evaluation"
)]
struct Cli {
    /// Global seed; every random choice is derived from it.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the 15 features for every document in a manifest.
    Extract(ExtractCmd),
    /// Train a classifier on a features file and save it as JSON.
    Train(TrainCmd),
    /// Cross-validate a classifier and write a JSON report.
    Evaluate(EvaluateCmd),
    /// Rank features by information gain against the level.
    Rank(RankCmd),
    /// Predict levels with a saved model.
    Predict(PredictCmd),
    /// Generate a seeded synthetic tagged corpus.
    Synth(SynthCmd),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Sentences sampled per document for the lexical features.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_SIZE)]
    sample_size: usize,
    /// A word is polysyllabic when it has more syllables than this.
    #[arg(long, default_value_t = DEFAULT_POLYSYLLABIC_THRESHOLD)]
    poly_threshold: usize,
    /// Tag-prefix to category mapping file (`prefix=Category` lines).
    #[arg(long)]
    tagset: Option<PathBuf>,
    /// Separator between a word and its tag in tagged files.
    #[arg(long, default_value_t = DEFAULT_SEPARATOR)]
    separator: char,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value = "both")]
    feature_set: FeatureSet,
    #[arg(long, default_value = "svm")]
    classifier: ModelKind,
}

#[derive(Debug, Args)]
struct ExtractCmd {
    #[arg(long)]
    manifest: PathBuf,
    /// Features CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write per-level polysyllabic totals as CSV.
    #[arg(long)]
    profile_csv: Option<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Debug, Args)]
struct TrainCmd {
    #[arg(long)]
    features: PathBuf,
    /// Model JSON to write.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    model_args: ModelArgs,
}

#[derive(Debug, Args)]
struct EvaluateCmd {
    /// Labeled features file.
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    features: Option<PathBuf>,
    /// Labeled corpus; features are extracted first.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Report JSON to write.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    /// Print class-weighted F1 instead of macro-F1.
    #[arg(long)]
    weighted_f1: bool,
    /// Also write the pooled confusion matrix as CSV.
    #[arg(long)]
    confusion_csv: Option<PathBuf>,
    #[command(flatten)]
    model_args: ModelArgs,
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Debug, Args)]
struct RankCmd {
    #[arg(long)]
    features: PathBuf,
    /// Ranking CSV to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
    #[arg(long, default_value = "both")]
    feature_set: FeatureSet,
}

#[derive(Debug, Args)]
struct PredictCmd {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    features: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Expected feature set; must match the model's.
    #[arg(long)]
    feature_set: Option<FeatureSet>,
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Debug, Args)]
struct SynthCmd {
    /// Output directory for documents and manifest.csv.
    #[arg(long)]
    out: PathBuf,
    /// Parameter preset: default or synergy.
    #[arg(long, default_value = "default")]
    preset: String,
    /// Override the number of documents per level.
    #[arg(long)]
    per_level: Option<usize>,
}

/// Command outcome: data was produced, possibly with skipped inputs.
enum Outcome {
    Ok,
    Partial,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed;
    let result = match cli.command {
        Command::Extract(cmd) => cmd_extract(cmd, seed),
        Command::Train(cmd) => cmd_train(cmd, seed),
        Command::Evaluate(cmd) => cmd_evaluate(cmd, seed),
        Command::Rank(cmd) => cmd_rank(cmd),
        Command::Predict(cmd) => cmd_predict(cmd, seed),
        Command::Synth(cmd) => cmd_synth(cmd, seed),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(EXIT_PARTIAL),
        // A closed stdout (e.g. piped into `head`) is not a failure.
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}

impl CorpusArgs {
    fn load_options(&self) -> Result<LoadOptions> {
        let mapping = match &self.tagset {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                TagsetMapping::parse(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => TagsetMapping::default(),
        };
        Ok(LoadOptions {
            separator: self.separator,
            mapping,
            ..LoadOptions::default()
        })
    }

    fn extract_options(&self, seed: u64) -> ExtractOptions {
        ExtractOptions {
            polysyllabic_threshold: self.poly_threshold,
            lex: LexOptions {
                sample_size: self.sample_size,
                ..LexOptions::default()
            },
            seed,
        }
    }

    /// Loads and extracts a corpus. Per-document failures are reported on
    /// stderr; the flag says whether any occurred.
    fn rows_from_manifest(&self, manifest: &Path, seed: u64) -> Result<(Vec<FeatureRow>, bool)> {
        let corpus = load_corpus(manifest, &self.load_options()?)
            .with_context(|| format!("loading manifest {}", manifest.display()))?;
        let (rows, errors) = extract_rows(&corpus, &self.extract_options(seed));
        let failures: Vec<&CorpusError> = corpus.errors.iter().chain(&errors).collect();
        for e in &failures {
            eprintln!("warning: {e}");
        }
        Ok((rows, !failures.is_empty()))
    }
}

fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_features_csv(file).with_context(|| format!("reading features {}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn hyperparams(seed: u64) -> Hyperparams {
    Hyperparams {
        seed,
        ..Hyperparams::default()
    }
}

fn cmd_extract(cmd: ExtractCmd, seed: u64) -> Result<Outcome> {
    let (rows, partial) = cmd.corpus.rows_from_manifest(&cmd.manifest, seed)?;
    let mut buf = Vec::new();
    write_features_csv(&mut buf, &rows)?;
    write_file(&cmd.out, &buf)?;
    if let Some(path) = &cmd.profile_csv {
        let poly = FEATURE_NAMES
            .iter()
            .position(|n| *n == "polysyllabic_count")
            .expect("canonical name");
        let profile = polysyllabic_profile(rows.iter().filter_map(|r| r.level.map(|l| (l, r.values[poly] as u64))));
        write_file(path, profile.to_csv().as_bytes())?;
    }
    eprintln!("extracted {} documents to {}", rows.len(), cmd.out.display());
    Ok(if partial { Outcome::Partial } else { Outcome::Ok })
}

fn cmd_train(cmd: TrainCmd, seed: u64) -> Result<Outcome> {
    let rows = read_features(&cmd.features)?;
    let data = rows_to_dataset(&rows, cmd.model_args.feature_set)?;
    let model = TrainedModel::train(cmd.model_args.classifier, &data, &hyperparams(seed)).context("training failed")?;
    write_file(&cmd.model, model.to_json().as_bytes())?;
    eprintln!(
        "trained {} on {} rows ({} features) -> {}",
        model.kind(),
        data.len(),
        data.dim(),
        cmd.model.display()
    );
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ReportFile<'a> {
    tool: &'static str,
    version: &'static str,
    /// Input file name to SHA-256 of its contents.
    inputs: BTreeMap<String, String>,
    report: &'a EvalReport,
}

fn input_label(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn cmd_evaluate(cmd: EvaluateCmd, seed: u64) -> Result<Outcome> {
    let mut inputs = BTreeMap::new();
    let (rows, partial) = match (&cmd.features, &cmd.manifest) {
        (Some(path), _) => {
            inputs.insert(input_label(path), sha256_hex(path)?);
            (read_features(path)?, false)
        }
        (None, Some(manifest)) => {
            inputs.insert(input_label(manifest), sha256_hex(manifest)?);
            cmd.corpus.rows_from_manifest(manifest, seed)?
        }
        (None, None) => bail!("either --features or --manifest is required"),
    };
    let data = rows_to_dataset(&rows, cmd.model_args.feature_set)?;
    let spec = ModelSpec {
        kind: cmd.model_args.classifier,
        hyperparams: hyperparams(seed),
    };
    let report = cross_validate(&data, &spec, cmd.folds, seed).context("cross-validation failed")?;

    let file = ReportFile {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        inputs,
        report: &report,
    };
    let mut json = serde_json::to_string_pretty(&file)?;
    json.push('\n');
    write_file(&cmd.report, json.as_bytes())?;
    if let Some(path) = &cmd.confusion_csv {
        write_file(path, report.confusion.to_csv().as_bytes())?;
    }

    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", report.summary_line(cmd.weighted_f1))?;
    writeln!(out, "{}", report.confusion)?;
    write!(out, "{}", report.rates_block())?;
    Ok(if partial { Outcome::Partial } else { Outcome::Ok })
}

fn cmd_rank(cmd: RankCmd) -> Result<Outcome> {
    let rows = read_features(&cmd.features)?;
    let data = rows_to_dataset(&rows, cmd.feature_set)?;
    let report = rank_features(&data, cmd.bins, cmd.top_k).context("ranking failed")?;
    write_file(&cmd.out, report.to_csv().as_bytes())?;
    print!("{}", report.listing());
    Ok(Outcome::Ok)
}

fn cmd_predict(cmd: PredictCmd, seed: u64) -> Result<Outcome> {
    let text = fs::read_to_string(&cmd.model).with_context(|| format!("reading {}", cmd.model.display()))?;
    let model = TrainedModel::from_json(&text).with_context(|| format!("loading model {}", cmd.model.display()))?;
    let Some(model_set) = model.feature_set() else {
        bail!("model does not record a feature set");
    };
    if let Some(expected) = cmd.feature_set {
        if expected != model_set {
            bail!(
                "feature set mismatch: model uses {}, input requested {}",
                model_set.as_str(),
                expected.as_str()
            );
        }
    }
    if model.feature_order() != model_set.names() {
        bail!(
            "feature order mismatch: model lists {:?}, {} expects {:?}",
            model.feature_order(),
            model_set.as_str(),
            model_set.names()
        );
    }

    let (rows, partial) = match (&cmd.features, &cmd.manifest) {
        (Some(path), _) => (read_features(path)?, false),
        (None, Some(manifest)) => cmd.corpus.rows_from_manifest(manifest, seed)?,
        (None, None) => bail!("either --features or --manifest is required"),
    };

    let mut out = std::io::stdout().lock();
    for row in &rows {
        let (level, probs) = model
            .predict(&model_set.select(&row.values))
            .with_context(|| format!("predicting {}", row.doc_id))?;
        let probs: Vec<String> = probs.iter().map(f64::to_string).collect();
        writeln!(out, "{}\t{}\t{}", row.doc_id, level, probs.join("\t"))?;
    }
    Ok(if partial { Outcome::Partial } else { Outcome::Ok })
}

fn cmd_synth(cmd: SynthCmd, seed: u64) -> Result<Outcome> {
    let Some(mut params) = SynthParams::named(&cmd.preset) else {
        bail!("unknown preset {:?} (expected default or synergy)", cmd.preset);
    };
    params = params.with_seed(seed);
    if let Some(n) = cmd.per_level {
        params = params.with_documents_per_level(n);
    }
    let manifest = generate_synthetic(&params, &cmd.out)?;
    let docs: usize = params.levels.iter().map(|l| l.documents).sum();
    eprintln!("wrote {docs} documents and {}", manifest.display());
    Ok(Outcome::Ok)
}
