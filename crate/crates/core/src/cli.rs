//! Command-line front end. Each subcommand is one stage of the workflow:
//! ingest, extract, label, train, eval, compare, discrepancies.
//!
//! Exit codes: 0 on success, 1 when inputs or arguments are invalid, 2 when
//! the run fails for any other reason.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, RwLock};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::annotate::{self, AnnotateError, AnnotationSession};
use crate::dataset::{self, Dataset, DatasetError, Label};
use crate::eval::{self, CompareConfig, EvalError, ExternalRows};
use crate::extractor::{extract_corpus, CodeCommentPair};
use crate::features::{FeatureError, Scheme};
use crate::ingest::{
    scan_local, FixtureTransport, GithubClient, GithubConfig, IngestError, NoSleep, ScanOptions,
    Sleeper, Transport,
};
use crate::models::{load_external_predictions, Algorithm, ModelError};
use crate::par::{self, Execution};
use crate::pipeline::{
    import_labels, manifest_path, read_labels, write_file, CorpusSource, ModelArtifact,
    PipelineConfig, PipelineError, RunManifest, SplitConfig,
};

/// Marks an error as caused by bad input (exit code 1).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ValidationError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(
    name = "commentum",
    version,
    about = "Classify C code comments as useful or not useful"
)]
pub struct Cli {
    /// Pipeline configuration (TOML); flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download .c files of GitHub repositories into a corpus directory.
    Ingest(IngestArgs),
    /// Extract code-comment pairs from a corpus directory into JSONL.
    Extract(ExtractArgs),
    /// Label pairs: web service (default), terminal prompts, or file import.
    Label(LabelArgs),
    /// Train one algorithm on the training side of the split.
    Train(TrainArgs),
    /// Evaluate a trained model on the test side of its split.
    Eval(EvalArgs),
    /// Compare every algorithm trained on seed data vs seed + generated data.
    Compare(CompareArgs),
    /// List pairs where a model disagrees with the manual label.
    Discrepancies(DiscrepanciesArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Repository search query.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long)]
    pub max_repos: Option<usize>,
    /// Corpus directory to fill (`<owner>/<name>/<path>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replay recorded API exchanges from this directory instead of the network.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Record live API exchanges into this directory.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub context_lines: Option<usize>,
    /// Blank lines allowed between merged `//` comment lines.
    #[arg(long, conflicts_with = "no_merge")]
    pub merge_gap: Option<usize>,
    /// Keep every `//` line as its own pair.
    #[arg(long)]
    pub no_merge: bool,
    /// Leading path components naming the repository (0 for none).
    #[arg(long)]
    pub repo_depth: Option<usize>,
    #[arg(long)]
    pub max_file_bytes: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Pairs in the session (the first N rows of the dataset).
    #[arg(long, default_value_t = annotate::DEFAULT_TARGET)]
    pub target: usize,
    #[arg(long, default_value = "127.0.0.1:8765")]
    pub addr: SocketAddr,
    /// Origin allowed by CORS; `*` allows any.
    #[arg(long, default_value = "*")]
    pub cors_origin: String,
    /// Label in the terminal instead of starting the service.
    #[arg(long, conflicts_with = "import")]
    pub tty: bool,
    /// Apply labels from a JSONL file of `{"id", "label"}` lines.
    #[arg(long)]
    pub import: Option<PathBuf>,
    /// Allow --import to change labels that are already set.
    #[arg(long, requires = "import")]
    pub force_relabel: bool,
    #[arg(long, default_value = "cli")]
    pub annotator: String,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Seed of the stratified train/test split.
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Test fraction.
    #[arg(long)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// nb, logreg, svm, tree, forest or knn.
    #[arg(long)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
    /// Metrics JSON; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Labeled seed pairs.
    #[arg(long)]
    pub seed: Option<PathBuf>,
    /// Labeled generated pairs; omitted means none.
    #[arg(long)]
    pub generated: Option<PathBuf>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<Algorithm>>,
    /// Run seed: fixes the split and every derived training seed.
    #[arg(long)]
    pub seed_rng: Option<u64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// `NAME=SEED_PREDICTIONS[,AUGMENTED_PREDICTIONS]` rows from outside models.
    #[arg(long)]
    pub external: Vec<String>,
    /// Report JSON; a markdown table is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscrepanciesArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
    /// JSONL output; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are printed to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let printable: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match run(cli, printable) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

/// 1 for invalid input, 2 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<ValidationError>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<DatasetError>() {
            return dataset_code(e);
        }
        if let Some(e) = cause.downcast_ref::<PipelineError>() {
            return match e {
                PipelineError::Io { .. } => 2,
                PipelineError::Dataset(d) => dataset_code(d),
                _ => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<ModelError>() {
            return model_code(e);
        }
        if cause.is::<FeatureError>() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return match e {
                EvalError::Model(m) => model_code(m),
                EvalError::Dataset(d) => dataset_code(d),
                _ => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<IngestError>() {
            return match e {
                IngestError::InvalidArgument(_)
                | IngestError::MissingToken
                | IngestError::DirNotFound(_) => 1,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<AnnotateError>() {
            return match e {
                AnnotateError::Dataset(d) => dataset_code(d),
                _ => 2,
            };
        }
    }
    2
}

fn dataset_code(e: &DatasetError) -> i32 {
    if matches!(e, DatasetError::Io { .. } | DatasetError::Csv(_)) {
        2
    } else {
        1
    }
}

fn model_code(e: &ModelError) -> i32 {
    if matches!(e, ModelError::Io { .. }) {
        2
    } else {
        1
    }
}

struct Ctx {
    config: PipelineConfig,
    args: Vec<String>,
    exec: Execution,
}

impl Ctx {
    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::start(command, self.args.clone(), &self.config)
    }
}

pub fn run(cli: Cli, args: Vec<String>) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => {
            require_file(p)?;
            PipelineConfig::load(p)?
        }
        None => PipelineConfig::default(),
    };
    if cli.sequential {
        config.execution.mode = Execution::Sequential;
    }
    if let Some(t) = cli.threads {
        config.execution.threads = t;
    }
    let ctx = Ctx {
        exec: config.execution.mode,
        args,
        config,
    };
    let threads = ctx.config.execution.threads;
    let go = move || match cli.command {
        Command::Ingest(a) => cmd_ingest(ctx, a),
        Command::Extract(a) => cmd_extract(ctx, a),
        Command::Label(a) => cmd_label(ctx, a),
        Command::Train(a) => cmd_train(ctx, a),
        Command::Eval(a) => cmd_eval(ctx, a),
        Command::Compare(a) => cmd_compare(ctx, a),
        Command::Discrepancies(a) => cmd_discrepancies(ctx, a),
    };
    if threads > 0 {
        par::with_threads(threads, go)
    } else {
        go()
    }
}

fn require_file(p: &Path) -> Result<()> {
    if !p.is_file() {
        return Err(invalid(format!(
            "input file {} does not exist",
            p.display()
        )));
    }
    Ok(())
}

fn load_dataset(p: &Path) -> Result<Dataset> {
    require_file(p)?;
    Dataset::load(p).with_context(|| format!("loading {}", p.display()))
}

/// Rejects absolute paths and `..` so remote names stay inside the corpus.
fn safe_relative(path: &str) -> Option<PathBuf> {
    let p = Path::new(path);
    p.components()
        .all(|c| matches!(c, Component::Normal(_)))
        .then(|| p.to_path_buf())
}

fn cmd_ingest(mut ctx: Ctx, a: IngestArgs) -> Result<()> {
    if let Some(q) = a.query {
        ctx.config.corpus.query = q;
    }
    if let Some(n) = a.max_repos {
        ctx.config.corpus.max_repos = n;
    }
    if let Some(f) = a.fixtures {
        ctx.config.corpus.source = CorpusSource::Fixtures;
        ctx.config.corpus.fixtures = Some(f);
    }
    if let Some(o) = a.out {
        ctx.config.paths.corpus = o;
    }
    let corpus = ctx.config.corpus.clone();
    let out = ctx.config.paths.corpus.clone();
    let gh = GithubConfig {
        max_file_bytes: corpus.max_file_bytes,
        ..GithubConfig::default()
    };

    let mut recorder = None;
    let client = match corpus.source {
        CorpusSource::Local => {
            return Err(invalid(
                "corpus source is local; run `extract --in <dir>` on the directory directly",
            ))
        }
        CorpusSource::Fixtures => {
            let dir = corpus
                .fixtures
                .clone()
                .ok_or_else(|| invalid("corpus.fixtures is not set"))?;
            if !dir.is_dir() {
                return Err(invalid(format!(
                    "fixture directory {} does not exist",
                    dir.display()
                )));
            }
            let sleeper: Arc<dyn Sleeper> = Arc::new(NoSleep::default());
            GithubClient::anonymous(Arc::new(FixtureTransport::load(&dir)?), sleeper, gh)
        }
        CorpusSource::Github => {
            let token = std::env::var(crate::ingest::TOKEN_ENV).unwrap_or_default();
            let transport = live_transport()?;
            let transport: Arc<dyn Transport> = match &a.record {
                Some(dir) => {
                    std::fs::create_dir_all(dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    let r = Arc::new(crate::ingest::RecordingTransport::new(transport, dir));
                    recorder = Some(r.clone());
                    r
                }
                None => transport,
            };
            GithubClient::api(
                transport,
                Arc::new(crate::ingest::ThreadSleeper),
                &token,
                gh,
            )?
        }
    };

    let mut manifest = ctx.manifest("ingest");
    let repos = client.search_repos(&corpus.query, corpus.max_repos)?;
    let mut per_repo = Vec::new();
    for repo in &repos {
        let listing = match client.list_c_files(repo) {
            Ok(l) => l,
            Err(e @ (IngestError::RateLimited { .. } | IngestError::AuthFailed)) => {
                return Err(e.into())
            }
            Err(e) => {
                eprintln!("warning: skipping {repo}: {e}");
                per_repo.push(json!({ "repo": repo, "error": e.to_string() }));
                continue;
            }
        };
        let fetched = client.fetch_files(repo, &listing);
        let mut written = Vec::new();
        let mut skipped: Vec<_> = fetched
            .skipped
            .iter()
            .map(|(p, r)| json!({ "path": p, "reason": r }))
            .collect();
        for f in &fetched.files {
            let Some(rel) = safe_relative(&f.path) else {
                skipped.push(json!({ "path": f.path, "reason": "unsafe path" }));
                continue;
            };
            let dest = out.join(repo).join(rel);
            write_file(&dest, f.content.as_bytes())?;
            manifest.output(&dest)?;
            written.push(f.path.clone());
        }
        per_repo.push(json!({ "repo": repo, "files": written, "skipped": skipped }));
    }
    if let Some(r) = recorder {
        r.finish()?;
    }
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let files: usize = manifest.outputs.len();
    manifest.details = json!({ "repositories": per_repo });
    manifest.finish(&out.join("manifest.json"))?;
    println!(
        "ingested {files} files from {} repositories into {}",
        repos.len(),
        out.display()
    );
    Ok(())
}

#[cfg(feature = "github")]
fn live_transport() -> Result<Arc<dyn Transport>> {
    Ok(Arc::new(crate::ingest::ReqwestTransport::new()?))
}

#[cfg(not(feature = "github"))]
fn live_transport() -> Result<Arc<dyn Transport>> {
    Err(invalid(
        "built without the `github` feature; use --fixtures",
    ))
}

fn cmd_extract(mut ctx: Ctx, a: ExtractArgs) -> Result<()> {
    if let Some(i) = a.input {
        ctx.config.paths.corpus = i;
    }
    if let Some(o) = a.out {
        ctx.config.paths.dataset = o;
    }
    if let Some(c) = a.context_lines {
        ctx.config.extract.context_lines = c;
    }
    if a.no_merge {
        ctx.config.extract.merge_gap = None;
    } else if let Some(g) = a.merge_gap {
        ctx.config.extract.merge_gap = Some(g);
    }
    if let Some(d) = a.repo_depth {
        ctx.config.corpus.repo_depth = d;
    }
    if let Some(m) = a.max_file_bytes {
        ctx.config.corpus.max_file_bytes = m;
    }
    let input = ctx.config.paths.corpus.clone();
    let out = ctx.config.paths.dataset.clone();
    let scan = scan_local(
        &input,
        &ScanOptions {
            max_file_bytes: ctx.config.corpus.max_file_bytes,
            repo_depth: ctx.config.corpus.repo_depth,
        },
    )?;
    let mut manifest = ctx.manifest("extract");
    let extraction = extract_corpus(&scan.files, &ctx.config.extract, ctx.exec);
    let name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dataset = Dataset::new(&name, extraction.pairs)?;
    write_file(&out, dataset.to_jsonl().as_bytes())?;
    manifest.output(&out)?;
    let diagnostics: Vec<_> = extraction
        .files
        .iter()
        .filter(|f| !f.diagnostics.is_empty())
        .collect();
    let dropped: usize = extraction.files.iter().map(|f| f.dropped_empty).sum();
    manifest.details = json!({
        "corpus": input.display().to_string(),
        "files": scan.files.len(),
        "pairs": dataset.len(),
        "dropped_empty": dropped,
        "skipped": scan.skipped.iter().map(|(p, r)| json!({ "path": p, "reason": r })).collect::<Vec<_>>(),
        "diagnostics": diagnostics,
    });
    manifest.finish(&manifest_path(&out))?;
    println!(
        "extracted {} pairs from {} files into {}",
        dataset.len(),
        scan.files.len(),
        out.display()
    );
    Ok(())
}

fn cmd_label(mut ctx: Ctx, a: LabelArgs) -> Result<()> {
    if let Some(d) = a.dataset {
        ctx.config.paths.dataset = d;
    }
    let path = ctx.config.paths.dataset.clone();
    require_file(&path)?;

    if let Some(import) = &a.import {
        require_file(import)?;
        let mut manifest = ctx.manifest("label");
        manifest.input(import)?;
        let ds = load_dataset(&path)?;
        let file =
            std::fs::File::open(import).with_context(|| format!("opening {}", import.display()))?;
        let labels = read_labels(std::io::BufReader::new(file), import)?;
        let (updated, outcome) = import_labels(&ds, &labels, a.force_relabel)?;
        updated.save(&path)?;
        manifest.output(&path)?;
        manifest.details = serde_json::to_value(outcome)?;
        manifest.finish(&manifest_path(&path))?;
        let stats = updated.label_stats();
        println!(
            "imported {} labels ({} unchanged, {} relabeled); {} useful, {} not useful, {} unlabeled",
            outcome.applied, outcome.unchanged, outcome.relabeled, stats.useful, stats.not_useful, stats.unlabeled
        );
        return Ok(());
    }

    let session = AnnotationSession::open(&path, a.target)?;
    if a.tty {
        let stdin = std::io::stdin();
        let stdout = std::io::stdout();
        let mut session = session;
        label_interactive(&mut session, &a.annotator, stdin.lock(), stdout.lock())?;
        return Ok(());
    }
    let shared = Arc::new(RwLock::new(session));
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting the async runtime")?;
    let origin = a.cors_origin.clone();
    rt.block_on(annotate::serve(shared, a.addr, Some(&origin), |bound| {
        println!("annotation service listening on http://{bound}");
        println!("point the annotator UI at this address; ctrl-c to stop");
    }))
    .with_context(|| format!("serving on {}", a.addr))?;
    Ok(())
}

/// Terminal labeling loop: `u` useful, `n` not useful, `s` skip, `q` quit.
pub fn label_interactive<R: BufRead, W: Write>(
    session: &mut AnnotationSession,
    annotator: &str,
    mut input: R,
    mut out: W,
) -> Result<usize> {
    let mut labeled = 0;
    let mut skipped: Vec<String> = Vec::new();
    loop {
        let next: Option<CodeCommentPair> = match session.next_unlabeled(usize::MAX) {
            Ok(pairs) => pairs
                .into_iter()
                .find(|p| !skipped.contains(&p.id))
                .cloned(),
            Err(AnnotateError::SessionComplete { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let Some(pair) = next else {
            let p = session.progress();
            writeln!(out, "done: {}/{} labeled", p.labeled, p.target)?;
            return Ok(labeled);
        };
        let p = session.progress();
        writeln!(
            out,
            "\n[{}/{}] {}:{} ({})",
            p.labeled + 1,
            p.target,
            pair.path,
            pair.comment.line_start,
            pair.id
        )?;
        writeln!(
            out,
            "comment:\n{}\ncode:\n{}",
            pair.comment.text, pair.code_context
        )?;
        loop {
            write!(out, "[u]seful / [n]ot useful / [s]kip / [q]uit > ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                return Ok(labeled);
            }
            let label = match line.trim() {
                "u" | "useful" => Label::Useful,
                "n" | "not_useful" => Label::NotUseful,
                "s" => {
                    skipped.push(pair.id.clone());
                    break;
                }
                "q" => return Ok(labeled),
                _ => continue,
            };
            session.submit_label(&pair.id, label, annotator)?;
            labeled += 1;
            break;
        }
    }
}

fn apply_split(cfg: &mut SplitConfig, a: &SplitArgs) {
    if let Some(s) = a.split_seed {
        cfg.seed = s;
    }
    if let Some(r) = a.ratio {
        cfg.ratio = r;
    }
}

fn cmd_train(mut ctx: Ctx, a: TrainArgs) -> Result<()> {
    if let Some(d) = &a.dataset {
        ctx.config.paths.dataset = d.clone();
    }
    if let Some(s) = a.scheme {
        ctx.config.features.scheme = s;
    }
    apply_split(&mut ctx.config.split, &a.split);
    let path = ctx.config.paths.dataset.clone();
    let ds = load_dataset(&path)?;
    let stats = ds.label_stats();
    if stats.useful == 0 || stats.not_useful == 0 {
        return Err(invalid(format!(
            "{} has {} useful and {} not useful labeled pairs; both classes need labels. \
             Run `commentum label --dataset {}` first",
            path.display(),
            stats.useful,
            stats.not_useful,
            path.display()
        )));
    }
    let alg = ctx.config.algorithm_config(a.algorithm).ok_or_else(|| {
        invalid(format!(
            "{} cannot be trained here",
            a.algorithm.short_name()
        ))
    })?;
    let alg = alg.with_seed(eval::derive_seed(
        ctx.config.split.seed,
        a.algorithm.short_name(),
    ));
    let labeled = ds.labeled_subset();
    let split = dataset::split(&labeled, ctx.config.split.ratio, ctx.config.split.seed)
        .map_err(|e| invalid(format!("{e}; label more pairs with `commentum label`")))?;
    let train = eval::train_pairs(&labeled, &split)?;

    let mut manifest = ctx.manifest("train");
    manifest.input(&path)?;
    let fitted = eval::fit(&train, &ctx.config.features, &alg, ctx.exec)?;
    let artifact = ModelArtifact {
        dataset_digest: eval::dataset_digest(&labeled),
        split: ctx.config.split,
        fitted,
    };
    write_file(&a.out, artifact.to_json().as_bytes())?;
    manifest.output(&a.out)?;
    manifest.details =
        json!({ "train_size": train.len(), "test_size": split.test_ids.len(), "algorithm": alg });
    manifest.finish(&manifest_path(&a.out))?;
    println!(
        "trained {} on {} pairs ({} held out) -> {}",
        a.algorithm.display_name(),
        train.len(),
        split.test_ids.len(),
        a.out.display()
    );
    Ok(())
}

fn load_artifact(p: &Path) -> Result<ModelArtifact> {
    require_file(p)?;
    Ok(ModelArtifact::load(p)?)
}

fn cmd_eval(mut ctx: Ctx, a: EvalArgs) -> Result<()> {
    if let Some(d) = &a.dataset {
        ctx.config.paths.dataset = d.clone();
    }
    let path = ctx.config.paths.dataset.clone();
    let artifact = load_artifact(&a.model)?;
    let ds = load_dataset(&path)?;
    let labeled = ds.labeled_subset();
    if eval::dataset_digest(&labeled) != artifact.dataset_digest {
        eprintln!(
            "warning: the labeled pairs of {} differ from those the model was trained on; the split is recomputed",
            path.display()
        );
    }
    ctx.config.split = artifact.split;
    ctx.config.features = artifact.fitted.features;
    let split = dataset::split(&labeled, artifact.split.ratio, artifact.split.seed)?;
    let mut manifest = ctx.manifest("eval");
    manifest.input(&path)?;
    manifest.input(&a.model)?;
    let result = eval::evaluate(
        &artifact.fitted.model,
        &artifact.fitted.vocabulary,
        &artifact.fitted.features,
        &labeled,
        &split,
        ctx.exec,
    )?;
    let m = &result.metrics;
    let body = json!({
        "algorithm": artifact.fitted.model.algorithm,
        "confusion": result.confusion,
        "metrics": result.metrics,
    });
    let text = format!("{}\n", serde_json::to_string_pretty(&body)?);
    match &a.out {
        Some(out) => {
            write_file(out, text.as_bytes())?;
            manifest.output(out)?;
            manifest.finish(&manifest_path(out))?;
            println!(
                "precision {} recall {} f1 {} accuracy {} on {} test pairs",
                eval::fmt3(m.precision),
                eval::fmt3(m.recall),
                eval::fmt3(m.f1),
                eval::fmt3(m.accuracy),
                m.support
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_external(spec: &str) -> Result<ExternalRows> {
    let (name, files) = spec.split_once('=').ok_or_else(|| {
        invalid(format!(
            "--external expects NAME=SEED[,AUGMENTED], got {spec:?}"
        ))
    })?;
    let mut parts = files.split(',').map(str::trim).filter(|s| !s.is_empty());
    let load = |p: Option<&str>| -> Result<_> {
        match p {
            Some(p) => {
                require_file(Path::new(p))?;
                Ok(Some(load_external_predictions(Path::new(p))?))
            }
            None => Ok(None),
        }
    };
    Ok(ExternalRows {
        name: name.to_string(),
        seed: load(parts.next())?,
        augmented: load(parts.next())?,
    })
}

fn cmd_compare(mut ctx: Ctx, a: CompareArgs) -> Result<()> {
    if let Some(s) = &a.seed {
        ctx.config.paths.dataset = s.clone();
    }
    if a.generated.is_some() {
        ctx.config.paths.generated = a.generated.clone();
    }
    if let Some(s) = a.seed_rng {
        ctx.config.split.seed = s;
    }
    if let Some(r) = a.ratio {
        ctx.config.split.ratio = r;
    }
    if let Some(s) = a.scheme {
        ctx.config.features.scheme = s;
    }
    if let Some(algs) = &a.algorithms {
        let mut chosen = Vec::new();
        for alg in algs {
            chosen.push(
                ctx.config.algorithm_config(*alg).ok_or_else(|| {
                    invalid(format!("{} cannot be trained here", alg.short_name()))
                })?,
            );
        }
        ctx.config.algorithms = chosen;
    }
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| ctx.config.paths.reports.join("report.json"));

    let seed_path = ctx.config.paths.dataset.clone();
    let seed = load_dataset(&seed_path)?;
    let mut manifest = ctx.manifest("compare");
    manifest.input(&seed_path)?;
    let generated = match &ctx.config.paths.generated {
        Some(g) => {
            manifest.input(g)?;
            load_dataset(g)?
        }
        None => Dataset::new("none", Vec::new())?,
    };
    let external = a
        .external
        .iter()
        .map(|s| parse_external(s))
        .collect::<Result<Vec<_>>>()?;
    let cfg = CompareConfig {
        algorithms: ctx.config.algorithms.clone(),
        features: ctx.config.features,
        split_ratio: ctx.config.split.ratio,
        split_seed: ctx.config.split.seed,
    };
    let report = eval::compare(&seed, &generated, &cfg, &external, ctx.exec)?;
    let md_path = out.with_extension("md");
    write_file(&out, report.to_json().as_bytes())?;
    write_file(&md_path, eval::render_markdown(&report).as_bytes())?;
    manifest.output(&out)?;
    manifest.output(&md_path)?;
    manifest.finish(&manifest_path(&out))?;
    print!("{}", eval::render_markdown(&report));
    Ok(())
}

fn cmd_discrepancies(mut ctx: Ctx, a: DiscrepanciesArgs) -> Result<()> {
    if let Some(d) = &a.dataset {
        ctx.config.paths.dataset = d.clone();
    }
    let path = ctx.config.paths.dataset.clone();
    let artifact = load_artifact(&a.model)?;
    let ds = load_dataset(&path)?;
    if ds.label_stats().total() == ds.label_stats().unlabeled {
        return Err(invalid(format!(
            "{} has no labeled pairs; run `commentum label --dataset {}` first",
            path.display(),
            path.display()
        )));
    }
    ctx.config.features = artifact.fitted.features;
    let mut manifest = ctx.manifest("discrepancies");
    manifest.input(&path)?;
    manifest.input(&a.model)?;
    let rows = eval::discrepancies(
        &ds.pairs,
        &artifact.fitted.model,
        &artifact.fitted.vocabulary,
        &artifact.fitted.features,
        ctx.exec,
    )?;
    let mut text = String::new();
    for r in &rows {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    match &a.out {
        Some(out) => {
            write_file(out, text.as_bytes())?;
            manifest.output(out)?;
            manifest.details =
                json!({ "discrepancies": rows.len(), "labeled": ds.labeled().count() });
            manifest.finish(&manifest_path(out))?;
            println!("{} discrepancies -> {}", rows.len(), out.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
