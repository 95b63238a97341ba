use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use polyfeat::dataset::{
    read_labels_csv, rank_features, simplify, split, write_labels_csv, write_ranking_csv, LabelledCorpus,
    DEFAULT_TRAIN_FRACTION,
};
use polyfeat::features::{descriptors_to_json, evaluate_matrix, feature_specs, BaseReading, FeatureMatrix};
use polyfeat::heuristics::{
    brown, read_predictions, sotd, write_predictions, PredictionRecord, PredictionSet, SotdMode, SOTD_MAX_VARS,
};
use polyfeat::ml::{
    assign_targets, baselines, evaluate_predictions, knn_train, read_timings_csv, validate_limits,
    write_histogram_csv, EvaluationReport, KnnConfig, KnnModel, LimitSchedule, TimingTable,
};
use polyfeat::ordering::Ordering;
use polyfeat::problem::{load_corpus, CorpusEntry};

const FORMATS: &str = "\
File formats:
  problem file    `vars: x1, x2, x3` then one polynomial per line (`#` comments);
                  `.smt2` files are read as SMT-LIB; `.jsonl` files hold one
                  {\"id\", \"vars\": [..], \"polys\": [..]} object per line.
                  Directories are read in file-name order.
  feature CSV     problem_id,<serial>,<serial>,... ; integers exact, other
                  values as decimals (fractions a/b are also accepted).
  labels CSV      problem_id,class,ordering (class 1..n!, lexicographic order
                  of elimination sequences; ordering like x1>x3>x2, first
                  eliminated first).
  timing CSV      problem_id,ordering,time_s,status (status ok|timeout).
  predictions     JSON array of {problem_id, method, orderings: [..], scores: {ordering: number}}.";

#[derive(Parser)]
#[command(name = "polyfeat", version, about = "Degree features, ordering heuristics and KNN evaluation for polynomial systems", after_help = FORMATS)]
struct Cli {
    /// Worker threads (0 = one per core). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Seed for every random choice (splits, cross-validation folds).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every enumerated feature on a corpus.
    #[command(after_help = FORMATS)]
    Featurize(FeaturizeArgs),
    /// Drop constant feature columns and merge identical ones.
    #[command(after_help = "Input: feature CSV. Output: feature CSV; the merge report is JSON \
{original_serials, removed_constant: [{serial, value}], merge_groups: [{representative, members}]}.")]
    Simplify(SimplifyArgs),
    /// Rank feature columns by ANOVA F-value.
    #[command(after_help = "Inputs: feature CSV and labels CSV (problem_id,class,ordering). \
Output CSV: rank,serial,formula,F with `inf` for an unbounded F; JSON holds the same fields.")]
    Rank(RankArgs),
    /// Brown's heuristic: orderings by degree criteria, all ties kept.
    #[command(after_help = FORMATS)]
    Brown(HeuristicArgs),
    /// Sum-of-total-degrees heuristic over projection sets.
    #[command(after_help = FORMATS)]
    Sotd(SotdArgs),
    /// Derive target orderings (fastest per problem) from a timing CSV.
    #[command(after_help = "Input: timing CSV problem_id,ordering,time_s,status. Output: labels CSV \
problem_id,class,ordering with the lowest-class fastest ordering; --targets writes every \
tied target as JSON [{problem_id, targets, min_time_s}].")]
    Label(LabelArgs),
    /// Split a feature CSV into training and test rows.
    #[command(after_help = "Inputs and outputs are feature CSVs; rows keep their original order.")]
    Split(SplitArgs),
    /// Train the nearest-neighbour classifier with cross-validated k.
    #[command(after_help = "Inputs: feature CSV and labels CSV. Output: model JSON \
{version, serials, nvars, standardizer, points, classes, k, weighting, cv_scores, folds, seed}.")]
    Train(TrainArgs),
    /// Predict one ordering per problem with a trained model.
    #[command(after_help = FORMATS)]
    Predict(PredictArgs),
    /// Tie-aware accuracy and total time of prediction files.
    #[command(after_help = FORMATS)]
    Evaluate(EvaluateArgs),
    /// Baselines (virtual best, virtual worst, random), methods and histogram.
    #[command(after_help = "Histogram CSV: bin_start_percent,count with 1% bins of the \
percentage time increase over the fastest ordering.\n\n".to_owned() + FORMATS)]
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reading {
    /// sgn(d_v) times the total degree.
    Formula,
    /// d_v times the total degree.
    WorkedExample,
}

#[derive(Args)]
struct FeaturizeArgs {
    /// Problem files or directories.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Required number of variables per problem.
    #[arg(long)]
    vars: Option<usize>,
    /// Feature CSV output (stdout if absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the descriptor list as JSON.
    #[arg(long)]
    descriptors: Option<PathBuf>,
    /// Append the polynomial count and maximum total degree columns.
    #[arg(long)]
    extras: bool,
    /// Reading of the sign-weighted base map.
    #[arg(long, value_enum, default_value = "formula")]
    reading: Reading,
}

#[derive(Args)]
struct SimplifyArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Merge report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Use every row instead of the seeded training split.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    train_fraction: f64,
    /// Keep only the best K features.
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HeuristicArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SotdArgs {
    #[command(flatten)]
    common: HeuristicArgs,
    /// Count repeated projection polynomials instead of deduplicating.
    #[arg(long)]
    multiplicity: bool,
    #[arg(long, default_value_t = SOTD_MAX_VARS)]
    max_vars: usize,
}

#[derive(Args)]
struct LabelArgs {
    timings: PathBuf,
    /// Corpus supplying variable names (otherwise names are sorted naturally).
    #[arg(long, num_args = 1..)]
    corpus: Vec<PathBuf>,
    /// Require every timeout to carry this limit.
    #[arg(long, conflicts_with = "limit_schedule")]
    time_limit: Option<f64>,
    /// Doubling schedule START:CAP, e.g. 4:64.
    #[arg(long)]
    limit_schedule: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    targets: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    train_fraction: f64,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    test_out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Candidate k values, e.g. `1-30` or `1,3,5`.
    #[arg(long, default_value = "1-30")]
    grid: String,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    model: PathBuf,
    input: PathBuf,
    /// Corpus supplying variable names for the orderings (default x1, x2, ...).
    #[arg(long, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long, default_value = "knn")]
    method: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, required = true, num_args = 1..)]
    pred: Vec<PathBuf>,
    #[arg(long)]
    timings: PathBuf,
    #[arg(long, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    timings: PathBuf,
    /// Prediction files; baselines cover the problems of the first method.
    #[arg(long, num_args = 1..)]
    pred: Vec<PathBuf>,
    #[arg(long, num_args = 1..)]
    corpus: Vec<PathBuf>,
    /// Histogram CSV for --method.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Method whose histogram is written (default: the first predicted method).
    #[arg(long)]
    method: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
        // the panic hook has already printed the message
        Err(_) => ExitCode::from(2),
    }
}

/// The error chain, skipping causes already quoted by an outer message.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = e.to_string();
    for cause in e.chain().skip(1) {
        let c = cause.to_string();
        if !msg.contains(&c) {
            msg = format!("{msg}: {c}");
        }
    }
    msg
}

fn run(cli: Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .context("starting worker threads")?;
    let seed = cli.seed;
    match cli.command {
        Command::Featurize(a) => featurize(a),
        Command::Simplify(a) => simplify_cmd(a),
        Command::Rank(a) => rank(a, seed),
        Command::Brown(a) => heuristic(&a, "brown", |pr| Ok(brown(pr))),
        Command::Sotd(a) => {
            let mode = if a.multiplicity {
                SotdMode::Multiplicity
            } else {
                SotdMode::Deduplicate
            };
            heuristic(&a.common, "sotd", |pr| Ok(sotd(pr, mode, a.max_vars)?))
        }
        Command::Label(a) => label(a),
        Command::Split(a) => split_cmd(a, seed),
        Command::Train(a) => train(a, seed),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Report(a) => report(a),
    }
}

/// Writes to `path` via a temporary file and rename, or to stdout when the
/// path is absent or `-`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path.filter(|p| *p != Path::new("-")) {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(p) => {
            let name = p.file_name().context("output path has no file name")?;
            let tmp = p.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
            fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, p).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<FeatureMatrix> {
    FeatureMatrix::read_csv(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn corpus(paths: &[PathBuf]) -> Result<Vec<CorpusEntry>> {
    Ok(load_corpus(paths)?)
}

fn names_by_id(paths: &[PathBuf]) -> Result<Option<HashMap<String, Vec<String>>>> {
    if paths.is_empty() {
        return Ok(None);
    }
    Ok(Some(
        corpus(paths)?
            .into_iter()
            .map(|e| (e.id, e.problem.variables().names().to_vec()))
            .collect(),
    ))
}

fn read_timings(path: &Path, corpus_paths: &[PathBuf]) -> Result<TimingTable> {
    let names = names_by_id(corpus_paths)?;
    read_timings_csv(open(path)?, names.as_ref()).with_context(|| format!("reading {}", path.display()))
}

fn labelled(matrix: FeatureMatrix, labels_path: &Path) -> Result<LabelledCorpus> {
    let labels = read_labels_csv(open(labels_path)?).with_context(|| format!("reading {}", labels_path.display()))?;
    let Some(first) = labels.first() else {
        bail!("{} has no labels", labels_path.display());
    };
    let nvars = first.ordering.split('>').count();
    Ok(LabelledCorpus::new(matrix, &labels, nvars)?)
}

fn featurize(a: FeaturizeArgs) -> Result<()> {
    let entries = corpus(&a.inputs)?;
    let Some(first) = entries.first() else {
        bail!("no problems found");
    };
    let nvars = a.vars.unwrap_or(first.problem.nvars());
    if let Some(e) = entries.iter().find(|e| e.problem.nvars() != nvars) {
        bail!("problem {} has {} variables, expected {nvars}", e.id, e.problem.nvars());
    }
    let specs = feature_specs(nvars, a.extras);
    let reading = match a.reading {
        Reading::Formula => BaseReading::Formula,
        Reading::WorkedExample => BaseReading::WorkedExample,
    };
    let m = evaluate_matrix(&entries, &specs, reading)?;
    if let Some(p) = &a.descriptors {
        emit(Some(p), descriptors_to_json(&specs).as_bytes())?;
    }
    emit(a.output.as_deref(), m.to_csv_string().as_bytes())
}

fn simplify_cmd(a: SimplifyArgs) -> Result<()> {
    let m = read_matrix(&a.input)?;
    let (s, report) = simplify(&m)?;
    if let Some(p) = &a.report {
        emit(Some(p), report.to_json().as_bytes())?;
    }
    eprintln!(
        "{} columns: {} constant, {} kept",
        m.ncols(),
        report.removed_constant.len(),
        report.surviving()
    );
    emit(a.output.as_deref(), s.to_csv_string().as_bytes())
}

fn rank(a: RankArgs, seed: u64) -> Result<()> {
    let mut corpus = labelled(read_matrix(&a.input)?, &a.labels)?;
    if !a.all {
        corpus = corpus.split(a.train_fraction, seed)?.0;
    }
    let mut ranked = rank_features(&corpus)?;
    if let Some(k) = a.top_k {
        ranked.truncate(k);
    }
    let formulas: HashMap<u32, String> = feature_specs(corpus.nvars, true)
        .iter()
        .map(|s| (s.serial(), s.formula()))
        .collect();
    let formula = |s: u32| formulas.get(&s).cloned().unwrap_or_default();
    let bytes = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_ranking_csv(&ranked, formula, &mut buf)?;
            buf
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = ranked
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    serde_json::json!({
                        "rank": i + 1,
                        "serial": r.serial,
                        "formula": formula(r.serial),
                        "F": r.f.render(),
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s.into_bytes()
        }
    };
    emit(a.output.as_deref(), &bytes)
}

fn heuristic(
    a: &HeuristicArgs,
    method: &str,
    f: impl Fn(&polyfeat::ProblemInstance) -> Result<PredictionSet> + Sync,
) -> Result<()> {
    use rayon::prelude::*;
    let entries = corpus(&a.inputs)?;
    let records: Vec<PredictionRecord> = entries
        .par_iter()
        .map(|e| {
            let set = f(&e.problem).with_context(|| format!("problem {}", e.id))?;
            Ok(PredictionRecord::new(&e.id, method, &set, e.problem.variables().names()))
        })
        .collect::<Result<_>>()?;
    let mut buf = Vec::new();
    write_predictions(&records, &mut buf)?;
    emit(a.output.as_deref(), &buf)
}

fn parse_schedule(s: &str) -> Result<LimitSchedule> {
    let (a, b) = s.split_once(':').context("limit schedule must be START:CAP")?;
    let start: f64 = a.trim().parse().context("bad schedule start")?;
    let cap: f64 = b.trim().parse().context("bad schedule cap")?;
    if !(start > 0.0 && cap >= start) {
        bail!("limit schedule needs 0 < START <= CAP");
    }
    Ok(LimitSchedule::Doubling { start, cap })
}

fn label(a: LabelArgs) -> Result<()> {
    let table = read_timings(&a.timings, &a.corpus)?;
    if let Some(l) = a.time_limit {
        validate_limits(&table, LimitSchedule::Fixed(l))?;
    }
    if let Some(s) = &a.limit_schedule {
        validate_limits(&table, parse_schedule(s)?)?;
    }
    let targets = assign_targets(&table);
    if let Some(p) = &a.targets {
        let mut s = serde_json::to_string_pretty(&targets)?;
        s.push('\n');
        emit(Some(p), s.as_bytes())?;
    }
    let records: Vec<_> = targets.iter().map(|t| t.to_label_record()).collect();
    let mut buf = Vec::new();
    write_labels_csv(&records, &mut buf)?;
    emit(a.output.as_deref(), &buf)
}

fn split_cmd(a: SplitArgs, seed: u64) -> Result<()> {
    let m = read_matrix(&a.input)?;
    let (train, test) = split(m.nrows(), a.train_fraction, seed)?;
    emit(Some(&a.train_out), m.select_rows(&train).to_csv_string().as_bytes())?;
    emit(Some(&a.test_out), m.select_rows(&test).to_csv_string().as_bytes())
}

fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty range {part}");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().with_context(|| format!("bad k {part:?}"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn train(a: TrainArgs, seed: u64) -> Result<()> {
    let corpus = labelled(read_matrix(&a.input)?, &a.labels)?;
    let config = KnnConfig {
        grid: parse_grid(&a.grid)?,
        folds: a.folds,
        seed,
    };
    let m = &corpus.matrix;
    let model = knn_train(&m.to_f64(), &corpus.labels, m.serials(), corpus.nvars, &config)?;
    eprintln!("selected k = {}", model.k);
    emit(a.output.as_deref(), model.to_json().as_bytes())
}

fn predict(a: PredictArgs) -> Result<()> {
    let text = fs::read_to_string(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let model = KnnModel::from_json(&text).with_context(|| format!("reading {}", a.model.display()))?;
    let m = read_matrix(&a.input)?;
    let classes = model.predict_matrix(&m)?;
    let names = names_by_id(&a.corpus)?;
    let generic: Vec<String> = (1..=model.nvars).map(|i| format!("x{i}")).collect();
    let mut records = Vec::with_capacity(classes.len());
    for (id, c) in m.ids().iter().zip(classes) {
        let vars = match &names {
            Some(n) => n.get(id).with_context(|| format!("problem {id} is not in the corpus"))?,
            None => &generic,
        };
        if vars.len() != model.nvars {
            bail!("problem {id} has {} variables, the model expects {}", vars.len(), model.nvars);
        }
        let set = PredictionSet::single(Ordering::from_class(model.nvars, c)?);
        records.push(PredictionRecord::new(id, &a.method, &set, vars));
    }
    let mut buf = Vec::new();
    write_predictions(&records, &mut buf)?;
    emit(a.output.as_deref(), &buf)
}

fn read_all_predictions(paths: &[PathBuf]) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_predictions(open(p)?).with_context(|| format!("reading {}", p.display()))?);
    }
    Ok(out)
}

fn render_report(report: &EvaluationReport, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_summary_csv(&mut buf)?;
            buf
        }
    })
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let table = read_timings(&a.timings, &a.corpus)?;
    let records = read_all_predictions(&a.pred)?;
    let report = EvaluationReport::new(evaluate_predictions(&records, &table)?);
    emit(a.output.as_deref(), &render_report(&report, a.format)?)
}

fn report(a: ReportArgs) -> Result<()> {
    let table = read_timings(&a.timings, &a.corpus)?;
    let records = read_all_predictions(&a.pred)?;
    let methods = evaluate_predictions(&records, &table)?;
    let ids: Vec<String> = match methods.first() {
        Some(m) => m.per_problem.iter().map(|e| e.problem_id.clone()).collect(),
        None => table.problems.iter().map(|p| p.id.clone()).collect(),
    };
    let mut all = baselines(&table, &ids)?;
    all.extend(methods);
    let report = EvaluationReport::new(all);
    if let Some(path) = &a.histogram {
        let wanted = a
            .method
            .clone()
            .or_else(|| records.first().map(|r| r.method.clone()))
            .unwrap_or_else(|| "virtual-best".into());
        let m = report
            .methods
            .iter()
            .find(|m| m.method == wanted)
            .with_context(|| format!("no method named {wanted}"))?;
        let mut buf = Vec::new();
        write_histogram_csv(&m.histogram, &mut buf)?;
        emit(Some(path), &buf)?;
    }
    emit(a.output.as_deref(), &render_report(&report, a.format)?)
}
