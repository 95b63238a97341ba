//! Targets from timing data, a distance-weighted nearest-neighbour classifier
//! with cross-validated `k`, and tie-aware evaluation of ordering predictions.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, LabelRecord, Standardizer};
use crate::features::FeatureMatrix;
use crate::heuristics::PredictionRecord;
use crate::ordering::{factorial, natural_sort, Ordering, OrderingError};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("timings line {line}: {message}")]
    Timing { line: usize, message: String },
    #[error("problem {id} has no timing for ordering {ordering}")]
    MissingOrdering { id: String, ordering: String },
    #[error("problem {id}: {message}")]
    Limit { id: String, message: String },
    #[error("no timings for problem {0}")]
    UnknownProblem(String),
    #[error("problem {id} is predicted twice by {method}")]
    DuplicatePrediction { id: String, method: String },
    #[error("prediction for {id}: {source}")]
    BadPrediction { id: String, source: OrderingError },
    #[error("prediction for {id} is empty")]
    EmptyPrediction { id: String },
    #[error("the k grid is empty or contains 0")]
    BadGrid,
    #[error("need at least 2 folds and at least as many points as folds ({points} points, {folds} folds)")]
    BadFolds { points: usize, folds: usize },
    #[error("expected {expected} features, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("the model needs feature {0}, which the matrix lacks")]
    MissingFeature(u32),
    #[error("model file version {0} is not supported")]
    Version(u32),
    #[error("{0} training points but {1} labels")]
    LabelCount(usize, usize),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
}

/// All `n!` timings of one problem, indexed by class index − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemTimings {
    pub id: String,
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub status: Vec<Status>,
}

impl ProblemTimings {
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn time(&self, o: &Ordering) -> f64 {
        self.times[o.class_index() - 1]
    }

    pub fn min_time(&self) -> f64 {
        self.times.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_time(&self) -> f64 {
        self.times.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn render(&self, o: &Ordering) -> String {
        o.render(&self.names)
    }
}

/// Timings per problem in order of first appearance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimingTable {
    pub problems: Vec<ProblemTimings>,
}

impl TimingTable {
    pub fn get(&self, id: &str) -> Option<&ProblemTimings> {
        self.problems.iter().find(|p| p.id == id)
    }

    fn index(&self) -> HashMap<&str, &ProblemTimings> {
        self.problems.iter().map(|p| (p.id.as_str(), p)).collect()
    }
}

#[derive(Deserialize)]
struct TimingRow {
    problem_id: String,
    ordering: String,
    time_s: f64,
    status: Status,
}

/// Reads a timing CSV `problem_id,ordering,time_s,status`. Variable names
/// come from `names` when a problem is listed there, otherwise from the
/// problem's orderings in natural sort order (`x2` before `x10`).
pub fn read_timings_csv<R: Read>(
    r: R,
    names: Option<&HashMap<String, Vec<String>>>,
) -> Result<TimingTable, MlError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["problem_id", "ordering", "time_s", "status"] {
        return Err(MlError::Timing {
            line: 1,
            message: "header must be problem_id,ordering,time_s,status".into(),
        });
    }
    let mut rows: Vec<(usize, TimingRow)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let row: TimingRow = rec.deserialize(Some(&header)).map_err(|e| MlError::Timing {
            line,
            message: e.to_string(),
        })?;
        if !(row.time_s > 0.0 && row.time_s.is_finite()) {
            return Err(MlError::Timing {
                line,
                message: format!("time_s must be positive, got {}", row.time_s),
            });
        }
        if row.problem_id.is_empty() {
            return Err(MlError::Timing {
                line,
                message: "empty problem_id".into(),
            });
        }
        rows.push((line, row));
    }

    let mut table = TimingTable::default();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for (line, row) in rows {
        let err = |message: String| MlError::Timing { line, message };
        let idx = match slot.get(&row.problem_id) {
            Some(&i) => i,
            None => {
                let vars = match names.and_then(|m| m.get(&row.problem_id)) {
                    Some(v) => v.clone(),
                    None => {
                        let mut v: Vec<String> = row.ordering.split('>').map(|s| s.trim().to_string()).collect();
                        natural_sort(&mut v);
                        v
                    }
                };
                let n = factorial(vars.len());
                table.problems.push(ProblemTimings {
                    id: row.problem_id.clone(),
                    names: vars,
                    times: vec![f64::NAN; n],
                    status: vec![Status::Ok; n],
                });
                slot.insert(row.problem_id.clone(), table.problems.len() - 1);
                table.problems.len() - 1
            }
        };
        let p = &mut table.problems[idx];
        let o = Ordering::parse(&row.ordering, &p.names).map_err(|e| err(e.to_string()))?;
        let c = o.class_index() - 1;
        if !p.times[c].is_nan() {
            return Err(err(format!("duplicate record for {} {}", row.problem_id, row.ordering)));
        }
        p.times[c] = row.time_s;
        p.status[c] = row.status;
    }
    for p in &table.problems {
        if let Some(c) = p.times.iter().position(|t| t.is_nan()) {
            let o = Ordering::from_class(p.nvars(), c + 1).expect("in range");
            return Err(MlError::MissingOrdering {
                id: p.id.clone(),
                ordering: p.render(&o),
            });
        }
    }
    Ok(table)
}

pub fn write_timings_csv<W: Write>(table: &TimingTable, w: W) -> Result<(), MlError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["problem_id", "ordering", "time_s", "status"])?;
    for p in &table.problems {
        for (c, o) in Ordering::all(p.nvars()).iter().enumerate() {
            let status = match p.status[c] {
                Status::Ok => "ok",
                Status::Timeout => "timeout",
            };
            out.write_record([p.id.clone(), p.render(o), format!("{}", p.times[c]), status.into()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Time limits the timings were generated under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitSchedule {
    /// One limit for every problem.
    Fixed(f64),
    /// Start at `start` and double until some ordering completes, up to `cap`.
    Doubling { start: f64, cap: f64 },
}

/// Checks that every timeout carries the limit in force for its problem and
/// that the limit is the one the schedule would have reached.
pub fn validate_limits(table: &TimingTable, schedule: LimitSchedule) -> Result<(), MlError> {
    for p in &table.problems {
        let err = |message: String| MlError::Limit {
            id: p.id.clone(),
            message,
        };
        let limits: Vec<f64> = p
            .times
            .iter()
            .zip(&p.status)
            .filter(|(_, s)| **s == Status::Timeout)
            .map(|(t, _)| *t)
            .collect();
        let completed: Vec<f64> = p
            .times
            .iter()
            .zip(&p.status)
            .filter(|(_, s)| **s == Status::Ok)
            .map(|(t, _)| *t)
            .collect();
        let fastest = completed.iter().copied().fold(f64::INFINITY, f64::min);
        match schedule {
            LimitSchedule::Fixed(limit) => {
                if let Some(t) = limits.iter().find(|&&t| t != limit) {
                    return Err(err(format!("timeout recorded as {t} s, limit is {limit} s")));
                }
                if let Some(t) = completed.iter().find(|&&t| t > limit) {
                    return Err(err(format!("completed time {t} s exceeds the limit {limit} s")));
                }
            }
            LimitSchedule::Doubling { start, cap } => {
                let Some(&limit) = limits.first() else {
                    continue;
                };
                if limits.iter().any(|&t| t != limit) {
                    return Err(err("timeouts carry different limits".into()));
                }
                let mut l = start;
                while l < limit && l < cap {
                    l *= 2.0;
                }
                if l != limit || limit > cap {
                    return Err(err(format!("{limit} s is not a limit of the schedule")));
                }
                if let Some(t) = completed.iter().find(|&&t| t > limit) {
                    return Err(err(format!("completed time {t} s exceeds the limit {limit} s")));
                }
                if completed.is_empty() && limit != cap {
                    return Err(err(format!("every ordering timed out at {limit} s, below the cap {cap} s")));
                }
                if limit > start && fastest <= limit / 2.0 {
                    return Err(err(format!(
                        "an ordering finished in {fastest} s, so the limit should have stopped at {} s",
                        limit / 2.0
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The orderings attaining the minimum time (exact comparison).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetLabel {
    pub problem_id: String,
    pub targets: Vec<String>,
    pub min_time_s: f64,
    #[serde(skip)]
    pub orderings: Vec<Ordering>,
}

impl TargetLabel {
    /// Lowest class index among the targets.
    pub fn single_class(&self) -> usize {
        self.orderings.iter().map(Ordering::class_index).min().expect("non-empty")
    }

    pub fn to_label_record(&self) -> LabelRecord {
        let c = self.single_class();
        let i = self.orderings.iter().position(|o| o.class_index() == c).expect("present");
        LabelRecord {
            problem_id: self.problem_id.clone(),
            class: c,
            ordering: self.targets[i].clone(),
        }
    }
}

pub fn assign_targets(table: &TimingTable) -> Vec<TargetLabel> {
    table
        .problems
        .iter()
        .map(|p| {
            let min = p.min_time();
            let orderings: Vec<Ordering> = Ordering::all(p.nvars())
                .into_iter()
                .enumerate()
                .filter(|(c, _)| p.times[*c] == min)
                .map(|(_, o)| o)
                .collect();
            TargetLabel {
                problem_id: p.id.clone(),
                targets: orderings.iter().map(|o| p.render(o)).collect(),
                min_time_s: min,
                orderings,
            }
        })
        .collect()
}

/// Euclidean nearest neighbours with 1/distance voting.
///
/// Every training point at the k-th smallest distance takes part, so the
/// result does not depend on the order of the training points. Points at
/// distance 0 outvote everything else; among them the majority class wins.
/// Remaining ties go to the lower class index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub version: u32,
    pub serials: Vec<u32>,
    pub nvars: usize,
    pub standardizer: Standardizer,
    pub points: Vec<Vec<f64>>,
    pub classes: Vec<usize>,
    pub k: usize,
    pub weighting: String,
    /// Mean macro F-score per candidate `k`.
    pub cv_scores: Vec<(usize, f64)>,
    pub folds: usize,
    pub seed: u64,
}

fn distance2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Training points sorted by `(distance, class)`.
fn neighbours(points: &[Vec<f64>], classes: &[usize], query: &[f64]) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .zip(classes)
        .map(|(p, &c)| (distance2(p, query).sqrt(), c))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d
}

/// Votes among the `k` nearest of `sorted` (plus ties at the k-th distance).
fn vote(sorted: &[(f64, usize)], k: usize) -> usize {
    let k = k.min(sorted.len());
    let kth = sorted[k - 1].0;
    let end = k + sorted[k..].iter().take_while(|(d, _)| *d == kth).count();
    let near = &sorted[..end];
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    if near[0].0 == 0.0 {
        for (d, c) in near.iter().take_while(|(d, _)| *d == 0.0) {
            debug_assert_eq!(*d, 0.0);
            *weights.entry(*c).or_insert(0.0) += 1.0;
        }
    } else {
        for (d, c) in near {
            *weights.entry(*c).or_insert(0.0) += 1.0 / d;
        }
    }
    // max weight, first (lowest) class on ties
    let mut best = (0usize, f64::NEG_INFINITY);
    for (c, w) in weights {
        if w > best.1 {
            best = (c, w);
        }
    }
    best.0
}

/// Predicts the class of an already standardized point.
pub fn knn_predict_standardized(points: &[Vec<f64>], classes: &[usize], k: usize, query: &[f64]) -> usize {
    vote(&neighbours(points, classes, query), k)
}

/// Macro-averaged F1 over the classes occurring in either vector.
pub fn macro_f1(truth: &[usize], pred: &[usize]) -> f64 {
    let labels: std::collections::BTreeSet<usize> = truth.iter().chain(pred).copied().collect();
    if labels.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &l in &labels {
        let tp = truth.iter().zip(pred).filter(|(t, p)| **t == l && **p == l).count() as f64;
        let fp = truth.iter().zip(pred).filter(|(t, p)| **t != l && **p == l).count() as f64;
        let fneg = truth.iter().zip(pred).filter(|(t, p)| **t == l && **p != l).count() as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fneg > 0.0 { tp / (tp + fneg) } else { 0.0 };
        if precision + recall > 0.0 {
            total += 2.0 * precision * recall / (precision + recall);
        }
    }
    total / labels.len() as f64
}

/// Shuffled k-fold partition of `0..n`; fold sizes differ by at most one.
pub fn kfold(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = n / folds + usize::from(f < n % folds);
        out.push(idx[start..start + size].to_vec());
        start += size;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnConfig {
    pub grid: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            grid: (1..=30).collect(),
            folds: 5,
            seed: 0,
        }
    }
}

/// Standardizes `rows`, picks `k` by cross-validated macro F-score (ties to
/// the smaller `k`) and stores the standardized training set.
pub fn knn_train(
    rows: &[Vec<f64>],
    classes: &[usize],
    serials: &[u32],
    nvars: usize,
    config: &KnnConfig,
) -> Result<KnnModel, MlError> {
    if rows.len() != classes.len() {
        return Err(MlError::LabelCount(rows.len(), classes.len()));
    }
    if config.grid.is_empty() || config.grid.contains(&0) {
        return Err(MlError::BadGrid);
    }
    if config.folds < 2 || rows.len() < config.folds {
        return Err(MlError::BadFolds {
            points: rows.len(),
            folds: config.folds,
        });
    }
    let standardizer = Standardizer::fit(rows, serials)?;
    let points = standardizer.transform(rows)?;
    let folds = kfold(points.len(), config.folds, config.seed);

    // per fold: sorted neighbour lists of the held-out points, then every k
    let per_fold: Vec<Vec<f64>> = folds
        .par_iter()
        .map(|test| {
            let held: HashSet<usize> = test.iter().copied().collect();
            let train: Vec<usize> = (0..points.len()).filter(|i| !held.contains(i)).collect();
            let tp: Vec<Vec<f64>> = train.iter().map(|&i| points[i].clone()).collect();
            let tc: Vec<usize> = train.iter().map(|&i| classes[i]).collect();
            let sorted: Vec<Vec<(f64, usize)>> = test.iter().map(|&i| neighbours(&tp, &tc, &points[i])).collect();
            let truth: Vec<usize> = test.iter().map(|&i| classes[i]).collect();
            config
                .grid
                .iter()
                .map(|&k| {
                    let pred: Vec<usize> = sorted.iter().map(|s| vote(s, k)).collect();
                    macro_f1(&truth, &pred)
                })
                .collect()
        })
        .collect();
    let cv_scores: Vec<(usize, f64)> = config
        .grid
        .iter()
        .enumerate()
        .map(|(g, &k)| (k, per_fold.iter().map(|f| f[g]).sum::<f64>() / folds.len() as f64))
        .collect();
    let mut best = cv_scores[0];
    for &(k, s) in &cv_scores[1..] {
        if s > best.1 || (s == best.1 && k < best.0) {
            best = (k, s);
        }
    }
    Ok(KnnModel {
        version: MODEL_VERSION,
        serials: serials.to_vec(),
        nvars,
        standardizer,
        points,
        classes: classes.to_vec(),
        k: best.0,
        weighting: "inverse-distance".into(),
        cv_scores,
        folds: config.folds,
        seed: config.seed,
    })
}

impl KnnModel {
    /// Predicts the class of a raw (unstandardized) feature row.
    pub fn predict_row(&self, row: &[f64]) -> Result<usize, MlError> {
        if row.len() != self.serials.len() {
            return Err(MlError::Dimension {
                expected: self.serials.len(),
                found: row.len(),
            });
        }
        let z = self.standardizer.transform_row(row)?;
        Ok(knn_predict_standardized(&self.points, &self.classes, self.k, &z))
    }

    /// Predicts every row of `m`, picking the model's columns by serial.
    pub fn predict_matrix(&self, m: &FeatureMatrix) -> Result<Vec<usize>, MlError> {
        let cols: Vec<usize> = self
            .serials
            .iter()
            .map(|&s| m.column_index(s).ok_or(MlError::MissingFeature(s)))
            .collect::<Result<_, _>>()?;
        let rows = m.select_columns(&cols).to_f64();
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MlError> {
        let version = serde_json::from_str::<serde_json::Value>(text)?
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as u32;
        if version != MODEL_VERSION {
            return Err(MlError::Version(version));
        }
        let m: KnnModel = serde_json::from_str(text)?;
        let d = m.serials.len();
        if m.k == 0
            || m.points.is_empty()
            || m.points.len() != m.classes.len()
            || m.points.iter().any(|p| p.len() != d)
            || m.standardizer.means.len() != d
            || m.standardizer.sds.len() != d
        {
            return Err(MlError::Dimension {
                expected: d,
                found: m.points.first().map_or(0, Vec::len),
            });
        }
        Ok(m)
    }
}

/// Per-problem outcome of a prediction set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEvaluation {
    pub problem_id: String,
    pub accuracy_percent: f64,
    pub time_s: f64,
    pub min_time_s: f64,
    pub increase_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_start_percent: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub problems: usize,
    /// Uniform mean of per-problem accuracies.
    pub accuracy_percent: f64,
    pub total_time_s: f64,
    pub histogram: Vec<HistogramBin>,
    pub per_problem: Vec<ProblemEvaluation>,
}

/// Evaluates one method's predictions. Per problem: accuracy is the share of
/// predicted orderings that are targets, time is the mean time over the
/// predicted orderings.
pub fn evaluate_method(
    method: &str,
    predictions: &[(String, Vec<Ordering>)],
    table: &TimingTable,
) -> Result<MethodReport, MlError> {
    let index = table.index();
    let mut seen = HashSet::new();
    let mut per_problem = Vec::with_capacity(predictions.len());
    for (id, pred) in predictions {
        let p = index.get(id.as_str()).ok_or_else(|| MlError::UnknownProblem(id.clone()))?;
        if !seen.insert(id.as_str()) {
            return Err(MlError::DuplicatePrediction {
                id: id.clone(),
                method: method.to_string(),
            });
        }
        if pred.is_empty() {
            return Err(MlError::EmptyPrediction { id: id.clone() });
        }
        let min = p.min_time();
        let hits = pred.iter().filter(|o| p.time(o) == min).count();
        let time = pred.iter().map(|o| p.time(o)).sum::<f64>() / pred.len() as f64;
        per_problem.push(ProblemEvaluation {
            problem_id: id.clone(),
            accuracy_percent: hits as f64 / pred.len() as f64 * 100.0,
            time_s: time,
            min_time_s: min,
            increase_percent: (time - min) / min * 100.0,
        });
    }
    let n = per_problem.len();
    let accuracy = if n == 0 {
        0.0
    } else {
        per_problem.iter().map(|e| e.accuracy_percent).sum::<f64>() / n as f64
    };
    Ok(MethodReport {
        method: method.to_string(),
        problems: n,
        accuracy_percent: accuracy,
        total_time_s: per_problem.iter().map(|e| e.time_s).sum(),
        histogram: histogram(per_problem.iter().map(|e| e.increase_percent)),
        per_problem,
    })
}

/// Counts in 1% bins `[b, b+1)`, non-empty bins only.
pub fn histogram(values: impl Iterator<Item = f64>) -> Vec<HistogramBin> {
    let mut bins: BTreeMap<u64, usize> = BTreeMap::new();
    for v in values {
        *bins.entry(v.max(0.0).floor() as u64).or_insert(0) += 1;
    }
    bins.into_iter()
        .map(|(b, count)| HistogramBin {
            bin_start_percent: b,
            count,
        })
        .collect()
}

/// Groups prediction records by method (first-appearance order) and parses
/// their orderings against the timing table's variable names.
pub fn evaluate_predictions(records: &[PredictionRecord], table: &TimingTable) -> Result<Vec<MethodReport>, MlError> {
    let index = table.index();
    let mut methods: Vec<(String, Vec<(String, Vec<Ordering>)>)> = Vec::new();
    for r in records {
        let p = index
            .get(r.problem_id.as_str())
            .ok_or_else(|| MlError::UnknownProblem(r.problem_id.clone()))?;
        let mut orderings = Vec::with_capacity(r.orderings.len());
        for s in &r.orderings {
            let o = Ordering::parse(s, &p.names).map_err(|source| MlError::BadPrediction {
                id: r.problem_id.clone(),
                source,
            })?;
            if !orderings.contains(&o) {
                orderings.push(o);
            }
        }
        match methods.iter_mut().find(|(m, _)| *m == r.method) {
            Some((_, v)) => v.push((r.problem_id.clone(), orderings)),
            None => methods.push((r.method.clone(), vec![(r.problem_id.clone(), orderings)])),
        }
    }
    methods
        .iter()
        .map(|(m, preds)| evaluate_method(m, preds, table))
        .collect()
}

/// Virtual best (the targets), virtual worst (the slowest orderings) and
/// random (all orderings) over the given problems.
pub fn baselines(table: &TimingTable, ids: &[String]) -> Result<Vec<MethodReport>, MlError> {
    let index = table.index();
    let mut best = Vec::new();
    let mut worst = Vec::new();
    let mut random = Vec::new();
    for id in ids {
        let p = index.get(id.as_str()).ok_or_else(|| MlError::UnknownProblem(id.clone()))?;
        let all = Ordering::all(p.nvars());
        let (min, max) = (p.min_time(), p.max_time());
        best.push((id.clone(), all.iter().filter(|o| p.time(o) == min).cloned().collect()));
        worst.push((id.clone(), all.iter().filter(|o| p.time(o) == max).cloned().collect()));
        random.push((id.clone(), all));
    }
    Ok(vec![
        evaluate_method("virtual-best", &best, table)?,
        evaluate_method("virtual-worst", &worst, table)?,
        evaluate_method("random", &random, table)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// How per-problem accuracies are combined.
    pub accuracy_averaging: String,
    pub methods: Vec<MethodReport>,
}

impl EvaluationReport {
    pub fn new(methods: Vec<MethodReport>) -> Self {
        EvaluationReport {
            accuracy_averaging: "uniform mean over problems".into(),
            methods,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `method,problems,accuracy_percent,total_time_s`.
    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<(), MlError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["method", "problems", "accuracy_percent", "total_time_s"])?;
        for m in &self.methods {
            out.write_record([
                m.method.clone(),
                m.problems.to_string(),
                format!("{}", m.accuracy_percent),
                format!("{}", m.total_time_s),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `bin_start_percent,count`.
pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], w: W) -> Result<(), MlError> {
    let mut out = csv::Writer::from_writer(w);
    for b in bins {
        out.serialize(b)?;
    }
    if bins.is_empty() {
        out.write_record(["bin_start_percent", "count"])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIMINGS: &str = "problem_id,ordering,time_s,status
a,x1>x2>x3,1.0,ok
a,x1>x3>x2,2.0,ok
a,x2>x1>x3,2.0,ok
a,x2>x3>x1,4.0,ok
a,x3>x1>x2,8.0,ok
a,x3>x2>x1,16.0,ok
b,x1>x2>x3,128,timeout
b,x1>x3>x2,128,timeout
b,x2>x1>x3,128,timeout
b,x2>x3>x1,128,timeout
b,x3>x1>x2,128,timeout
b,x3>x2>x1,128,timeout
";

    fn table() -> TimingTable {
        read_timings_csv(TIMINGS.as_bytes(), None).unwrap()
    }

    fn o(s: &str) -> Ordering {
        Ordering::parse(s, &["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn targets() {
        let t = assign_targets(&table());
        assert_eq!(t[0].targets, ["x1>x2>x3"]);
        assert_eq!(t[0].min_time_s, 1.0);
        assert_eq!(t[1].targets.len(), 6);
        assert_eq!(t[1].single_class(), 1);
        assert_eq!(t[1].to_label_record().ordering, "x1>x2>x3");
    }

    #[test]
    fn timing_errors() {
        let missing: String = TIMINGS.lines().take(12).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            read_timings_csv(missing.as_bytes(), None),
            Err(MlError::MissingOrdering { .. })
        ));
        let dup = format!("{TIMINGS}a,x1>x2>x3,1.0,ok\n");
        assert!(matches!(read_timings_csv(dup.as_bytes(), None), Err(MlError::Timing { line: 14, .. })));
        let neg = TIMINGS.replace("a,x1>x2>x3,1.0", "a,x1>x2>x3,-1.0");
        assert!(read_timings_csv(neg.as_bytes(), None).is_err());
        let bad_status = TIMINGS.replace("4.0,ok", "4.0,maybe");
        assert!(read_timings_csv(bad_status.as_bytes(), None).is_err());
        assert!(read_timings_csv("a,b\n".as_bytes(), None).is_err());
        let mut buf = Vec::new();
        write_timings_csv(&table(), &mut buf).unwrap();
        assert_eq!(read_timings_csv(buf.as_slice(), None).unwrap(), table());
    }

    #[test]
    fn limit_validation() {
        let t = table();
        assert!(validate_limits(&t, LimitSchedule::Fixed(128.0)).is_ok());
        assert!(validate_limits(&t, LimitSchedule::Fixed(64.0)).is_err());
        assert!(validate_limits(&t, LimitSchedule::Doubling { start: 4.0, cap: 64.0 }).is_err());
        let ok = TIMINGS.replace("128,timeout", "64,timeout");
        let t = read_timings_csv(ok.as_bytes(), None).unwrap();
        assert!(validate_limits(&t, LimitSchedule::Doubling { start: 4.0, cap: 64.0 }).is_ok());
        // a timeout at 8 s while another ordering finished in 1 s under 4 s
        let early = TIMINGS.replace("a,x3>x2>x1,16.0,ok", "a,x3>x2>x1,8,timeout");
        let t = read_timings_csv(early.as_bytes(), None).unwrap();
        assert!(validate_limits(&t, LimitSchedule::Doubling { start: 4.0, cap: 64.0 }).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let t = table();
        let r = evaluate_method("m", &[("a".into(), vec![o("x1>x2>x3")])], &t).unwrap();
        assert_eq!((r.accuracy_percent, r.total_time_s), (100.0, 1.0));
        let r = evaluate_method("m", &[("a".into(), vec![o("x1>x2>x3"), o("x1>x3>x2")])], &t).unwrap();
        assert_eq!((r.accuracy_percent, r.total_time_s), (50.0, 1.5));
        assert_eq!(r.histogram, [HistogramBin { bin_start_percent: 50, count: 1 }]);
        assert!(evaluate_method("m", &[("zz".into(), vec![o("x1>x2>x3")])], &t).is_err());

        let ids: Vec<String> = vec!["a".into(), "b".into()];
        let b = baselines(&t, &ids).unwrap();
        assert_eq!(b[0].accuracy_percent, 100.0);
        assert_eq!(b[0].total_time_s, 1.0 + 128.0);
        assert_eq!(b[1].total_time_s, 16.0 + 128.0);
        assert_eq!(b[2].total_time_s, 33.0 / 6.0 + 128.0);
        assert!((b[2].accuracy_percent - (100.0 / 6.0 + 100.0) / 2.0).abs() < 1e-12);
        assert_eq!(b[0].histogram.iter().map(|h| h.count).sum::<usize>(), 2);
    }

    #[test]
    fn knn_behaviour() {
        let points = vec![vec![0.0], vec![2.0]];
        // equidistant query: lower class wins
        assert_eq!(knn_predict_standardized(&points, &[2, 1], 2, &[1.0]), 1);
        assert_eq!(knn_predict_standardized(&points, &[2, 1], 1, &[0.0]), 2);
        // k=1 with a tie at the first distance uses both points
        assert_eq!(knn_predict_standardized(&points, &[2, 1], 1, &[1.0]), 1);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![if i < 10 { 0.1 * i as f64 } else { 100.0 + 0.1 * i as f64 }, (i % 3) as f64 * 0.01])
            .collect();
        let classes: Vec<usize> = (0..20).map(|i| if i < 10 { 1 } else { 2 }).collect();
        let m = knn_train(&rows, &classes, &[1, 2], 3, &KnnConfig::default()).unwrap();
        assert_eq!(m.k, 1);
        for (r, c) in rows.iter().zip(&classes) {
            assert_eq!(m.predict_row(r).unwrap(), *c);
        }
        let back = KnnModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(m.predict_row(&[1.0]).is_err());
        assert!(knn_train(&rows, &classes, &[1, 2], 3, &KnnConfig { grid: vec![], ..Default::default() }).is_err());
        assert!(knn_train(&rows[..1], &classes[..1], &[1, 2], 3, &KnnConfig::default()).is_err());
        assert!(KnnModel::from_json(&m.to_json().replace("\"version\": 1", "\"version\": 9")).is_err());
    }

    #[test]
    fn f1() {
        assert_eq!(macro_f1(&[1, 1, 2, 2], &[1, 1, 2, 2]), 1.0);
        assert_eq!(macro_f1(&[1, 2], &[2, 1]), 0.0);
        // class 1: p=1/2 r=1 f=2/3; class 2: p=1 r=1/2 f=2/3
        assert!((macro_f1(&[1, 2, 2], &[1, 1, 2]) - 2.0 / 3.0).abs() < 1e-15);
    }
}
