//! Column simplification, ANOVA F-value ranking, standardization and
//! splitting of labelled feature matrices.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::matrix::parse_value;
use crate::features::FeatureMatrix;
use crate::ordering::{factorial, Ordering};
use crate::poly::Rational;

/// Default training share: 4612 of 6117 problems.
pub const DEFAULT_TRAIN_FRACTION: f64 = 4612.0 / 6117.0;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("need at least 2 problems, got {0}")]
    TooFewRows(usize),
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("class {0} has no members")]
    EmptyClass(usize),
    #[error("{values} values but {labels} labels")]
    LengthMismatch { values: usize, labels: usize },
    #[error("column {serial} has zero variance in the training data")]
    ZeroVariance { serial: u32 },
    #[error("expected {expected} features, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("train fraction {0} is not in (0, 1)")]
    BadFraction(f64),
    #[error("no label for problem {0}")]
    MissingLabel(String),
    #[error("merge report does not match the matrix: {0}")]
    ReportMismatch(String),
    #[error("labels line {line}: {message}")]
    Labels { line: usize, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantColumn {
    pub serial: u32,
    /// Exact value, `a` or `a/b`.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeGroup {
    pub representative: u32,
    /// All serials with identical columns, ascending, including the
    /// representative.
    pub members: Vec<u32>,
}

/// What [`simplify`] removed, with enough detail to rebuild the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    pub original_serials: Vec<u32>,
    pub removed_constant: Vec<ConstantColumn>,
    pub merge_groups: Vec<MergeGroup>,
}

impl MergeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Number of columns that survive.
    pub fn surviving(&self) -> usize {
        self.merge_groups.len()
    }
}

/// Removes constant columns and merges identical ones (exact equality). The
/// lowest serial of each group is kept, in original column order.
pub fn simplify(m: &FeatureMatrix) -> Result<(FeatureMatrix, MergeReport), DatasetError> {
    if m.nrows() < 2 {
        return Err(DatasetError::TooFewRows(m.nrows()));
    }
    let columns: Vec<Vec<Rational>> = (0..m.ncols()).map(|j| m.column(j)).collect();
    let mut removed_constant = Vec::new();
    let mut groups: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut by_value: HashMap<&[Rational], usize> = HashMap::new();
    for (j, col) in columns.iter().enumerate() {
        let serial = m.serials()[j];
        if col.iter().all(|v| *v == col[0]) {
            removed_constant.push(ConstantColumn {
                serial,
                value: col[0].to_string(),
            });
            continue;
        }
        match by_value.get(col.as_slice()) {
            Some(&g) => groups[g].1.push(serial),
            None => {
                by_value.insert(col, groups.len());
                groups.push((j, vec![serial]));
            }
        }
    }
    let mut keep = Vec::with_capacity(groups.len());
    let mut merge_groups = Vec::with_capacity(groups.len());
    for (first_col, mut members) in groups {
        members.sort_unstable();
        let rep = members[0];
        let col = if m.serials()[first_col] == rep {
            first_col
        } else {
            m.column_index(rep).expect("member is a column")
        };
        keep.push(col);
        merge_groups.push(MergeGroup {
            representative: rep,
            members,
        });
    }
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by_key(|&i| keep[i]);
    let keep: Vec<usize> = order.iter().map(|&i| keep[i]).collect();
    let merge_groups = order.iter().map(|&i| merge_groups[i].clone()).collect();
    Ok((
        m.select_columns(&keep),
        MergeReport {
            original_serials: m.serials().to_vec(),
            removed_constant,
            merge_groups,
        },
    ))
}

/// Rebuilds the pre-simplification matrix.
pub fn reconstruct(simplified: &FeatureMatrix, report: &MergeReport) -> Result<FeatureMatrix, DatasetError> {
    let mismatch = |s: String| DatasetError::ReportMismatch(s);
    let mut source: HashMap<u32, Source> = HashMap::new();
    for c in &report.removed_constant {
        let v = parse_value(&c.value).ok_or_else(|| mismatch(format!("bad constant {:?}", c.value)))?;
        source.insert(c.serial, Source::Constant(v));
    }
    for g in &report.merge_groups {
        let col = simplified
            .column_index(g.representative)
            .ok_or_else(|| mismatch(format!("column {} missing", g.representative)))?;
        for &s in &g.members {
            source.insert(s, Source::Column(col));
        }
    }
    let mut plan = Vec::with_capacity(report.original_serials.len());
    for s in &report.original_serials {
        plan.push(
            source
                .get(s)
                .ok_or_else(|| mismatch(format!("serial {s} is not accounted for")))?,
        );
    }
    let values = simplified
        .rows()
        .iter()
        .map(|row| {
            plan.iter()
                .map(|src| match src {
                    Source::Constant(v) => v.clone(),
                    Source::Column(j) => row[*j].clone(),
                })
                .collect()
        })
        .collect();
    Ok(FeatureMatrix::new(
        simplified.ids().to_vec(),
        report.original_serials.clone(),
        values,
    ))
}

enum Source {
    Constant(Rational),
    Column(usize),
}

/// An F-value; `Infinite` when the within-class variability vanishes but the
/// between-class variability does not.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FValue {
    Finite(Rational),
    Infinite,
}

impl FValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            FValue::Finite(q) => q.to_f64().unwrap_or(f64::NAN),
            FValue::Infinite => f64::INFINITY,
        }
    }

    /// `inf` for the sentinel, otherwise the shortest round-trip decimal.
    pub fn render(&self) -> String {
        match self {
            FValue::Infinite => "inf".into(),
            FValue::Finite(_) => format!("{}", self.to_f64()),
        }
    }
}

fn group_by_class<T>(values: &[T], labels: &[usize]) -> Result<BTreeMap<usize, Vec<usize>>, DatasetError> {
    if values.len() != labels.len() {
        return Err(DatasetError::LengthMismatch {
            values: values.len(),
            labels: labels.len(),
        });
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in labels.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    if classes.len() < 2 {
        return Err(DatasetError::TooFewClasses(classes.len()));
    }
    Ok(classes)
}

/// ANOVA F-value over the classes that occur in `labels`.
pub fn f_value(values: &[f64], labels: &[usize]) -> Result<f64, DatasetError> {
    let classes = group_by_class(values, labels)?;
    let n = values.len() as f64;
    let c = classes.len() as f64;
    let grand = values.iter().sum::<f64>() / n;
    let mut between = 0.0;
    let mut within = 0.0;
    for members in classes.values() {
        let nc = members.len() as f64;
        let mean = members.iter().map(|&i| values[i]).sum::<f64>() / nc;
        between += nc * (mean - grand) * (mean - grand);
        within += members.iter().map(|&i| (values[i] - mean).powi(2)).sum::<f64>();
    }
    Ok(ratio(between, within, c, n))
}

fn ratio(between: f64, within: f64, c: f64, n: f64) -> f64 {
    if within == 0.0 {
        return if between > 0.0 { f64::INFINITY } else { 0.0 };
    }
    (between / (c - 1.0)) / (within / (n - c))
}

/// F-value requiring every class `1..=classes` to occur.
pub fn f_value_declared(values: &[f64], labels: &[usize], classes: usize) -> Result<f64, DatasetError> {
    if classes < 2 {
        return Err(DatasetError::TooFewClasses(classes));
    }
    for c in 1..=classes {
        if !labels.contains(&c) {
            return Err(DatasetError::EmptyClass(c));
        }
    }
    if let Some(&bad) = labels.iter().find(|&&c| c == 0 || c > classes) {
        return Err(DatasetError::EmptyClass(bad));
    }
    f_value(values, labels)
}

/// Exact F-value over the classes present.
pub fn f_value_exact(values: &[Rational], labels: &[usize]) -> Result<FValue, DatasetError> {
    let classes = group_by_class(values, labels)?;
    let int = |k: usize| Rational::from_integer(k.into());
    let n = values.len();
    let c = classes.len();
    let grand: Rational = values.iter().sum::<Rational>() / int(n);
    let mut between = Rational::zero();
    let mut within = Rational::zero();
    for members in classes.values() {
        let mean = members.iter().map(|&i| &values[i]).sum::<Rational>() / int(members.len());
        let d = &mean - &grand;
        between += &d * &d * int(members.len());
        for &i in members {
            let e = &values[i] - &mean;
            within += &e * &e;
        }
    }
    if within.is_zero() {
        return Ok(if between.is_zero() {
            FValue::Finite(Rational::zero())
        } else {
            FValue::Infinite
        });
    }
    Ok(FValue::Finite((between / int(c - 1)) / (within / int(n - c))))
}

/// A feature matrix with one class per problem. Classes are 1-based indices
/// into [`Ordering::all`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledCorpus {
    pub matrix: FeatureMatrix,
    pub labels: Vec<usize>,
    pub nvars: usize,
}

impl LabelledCorpus {
    /// Aligns labels to matrix rows by problem id. Labels for ids absent from
    /// the matrix are ignored.
    pub fn new(matrix: FeatureMatrix, labels: &[LabelRecord], nvars: usize) -> Result<Self, DatasetError> {
        let by_id: HashMap<&str, usize> = labels.iter().map(|l| (l.problem_id.as_str(), l.class)).collect();
        let max = factorial(nvars);
        let mut out = Vec::with_capacity(matrix.nrows());
        for id in matrix.ids() {
            let class = *by_id
                .get(id.as_str())
                .ok_or_else(|| DatasetError::MissingLabel(id.clone()))?;
            if class == 0 || class > max {
                return Err(DatasetError::Labels {
                    line: 0,
                    message: format!("class {class} for {id} is outside 1..={max}"),
                });
            }
            out.push(class);
        }
        Ok(LabelledCorpus {
            matrix,
            labels: out,
            nvars,
        })
    }

    pub fn class_map(&self) -> Vec<Ordering> {
        Ordering::all(self.nvars)
    }

    pub fn class_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &c in &self.labels {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts
    }

    pub fn select_rows(&self, rows: &[usize]) -> LabelledCorpus {
        LabelledCorpus {
            matrix: self.matrix.select_rows(rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            nvars: self.nvars,
        }
    }

    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(LabelledCorpus, LabelledCorpus), DatasetError> {
        let (train, test) = split(self.matrix.nrows(), train_fraction, seed)?;
        Ok((self.select_rows(&train), self.select_rows(&test)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub serial: u32,
    pub f: FValue,
}

/// Columns by descending F-value, ties by ascending serial.
pub fn rank_features(corpus: &LabelledCorpus) -> Result<Vec<RankedFeature>, DatasetError> {
    let m = &corpus.matrix;
    let mut ranked: Vec<RankedFeature> = (0..m.ncols())
        .into_par_iter()
        .map(|j| {
            Ok(RankedFeature {
                serial: m.serials()[j],
                f: f_value_exact(&m.column(j), &corpus.labels)?,
            })
        })
        .collect::<Result<_, DatasetError>>()?;
    ranked.sort_by(|a, b| b.f.cmp(&a.f).then(a.serial.cmp(&b.serial)));
    Ok(ranked)
}

/// CSV `rank,serial,formula,F`.
pub fn write_ranking_csv<W: Write>(
    ranked: &[RankedFeature],
    formula: impl Fn(u32) -> String,
    w: W,
) -> Result<(), DatasetError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rank", "serial", "formula", "F"])?;
    for (i, r) in ranked.iter().enumerate() {
        out.write_record([
            (i + 1).to_string(),
            r.serial.to_string(),
            formula(r.serial),
            r.f.render(),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-column mean and population standard deviation of a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardizer {
    /// `serials` only labels errors.
    pub fn fit(rows: &[Vec<f64>], serials: &[u32]) -> Result<Self, DatasetError> {
        let d = serials.len();
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(DatasetError::Dimension {
                expected: d,
                found: r.len(),
            });
        }
        if rows.is_empty() {
            return Err(DatasetError::TooFewRows(0));
        }
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        let mut sds = vec![0.0; d];
        for j in 0..d {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            if var <= 0.0 || !var.is_finite() {
                return Err(DatasetError::ZeroVariance { serial: serials[j] });
            }
            means[j] = mean;
            sds[j] = var.sqrt();
        }
        Ok(Standardizer { means, sds })
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>, DatasetError> {
        if row.len() != self.means.len() {
            return Err(DatasetError::Dimension {
                expected: self.means.len(),
                found: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(x, (m, s))| (x - m) / s)
            .collect())
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, DatasetError> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Scales `apply_to` with the statistics of `train`.
pub fn standardize(train: &FeatureMatrix, apply_to: &FeatureMatrix) -> Result<Vec<Vec<f64>>, DatasetError> {
    if train.serials() != apply_to.serials() {
        return Err(DatasetError::Dimension {
            expected: train.ncols(),
            found: apply_to.ncols(),
        });
    }
    Standardizer::fit(&train.to_f64(), train.serials())?.transform(&apply_to.to_f64())
}

/// Row indices for a seeded random split; `round(n · train_fraction)` go to
/// training. Both parts keep their original relative order.
pub fn split(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::BadFraction(train_fraction));
    }
    let n_train = (n as f64 * train_fraction).round() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// One row of a labels CSV `problem_id,class,ordering`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub problem_id: String,
    pub class: usize,
    pub ordering: String,
}

pub fn write_labels_csv<W: Write>(labels: &[LabelRecord], w: W) -> Result<(), DatasetError> {
    let mut out = csv::Writer::from_writer(w);
    for l in labels {
        out.serialize(l)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads and checks a labels CSV: unique ids, classes within `1..=n!` where
/// `n` is the number of variables named in the ordering column.
pub fn read_labels_csv<R: Read>(r: R) -> Result<Vec<LabelRecord>, DatasetError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["problem_id", "class", "ordering"] {
        return Err(DatasetError::Labels {
            line: 1,
            message: "header must be problem_id,class,ordering".into(),
        });
    }
    let mut out: Vec<LabelRecord> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut nvars = None;
    for (i, rec) in rdr.deserialize::<LabelRecord>().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| DatasetError::Labels {
            line,
            message: e.to_string(),
        })?;
        let bad = |message: String| DatasetError::Labels { line, message };
        if rec.problem_id.is_empty() {
            return Err(bad("empty problem_id".into()));
        }
        if !seen.insert(rec.problem_id.clone()) {
            return Err(bad(format!("duplicate problem id {}", rec.problem_id)));
        }
        let mut names: Vec<&str> = rec.ordering.split('>').map(str::trim).collect();
        let n = names.len();
        names.sort_unstable();
        names.dedup();
        if names.len() != n || names.iter().any(|s| s.is_empty()) {
            return Err(bad(format!("{:?} is not an ordering", rec.ordering)));
        }
        if *nvars.get_or_insert(n) != n {
            return Err(bad("orderings name different numbers of variables".into()));
        }
        if rec.class == 0 || rec.class > factorial(n) {
            return Err(bad(format!("class {} is outside 1..={}", rec.class, factorial(n))));
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn matrix(cols: &[(u32, &[i64])]) -> FeatureMatrix {
        let nrows = cols[0].1.len();
        FeatureMatrix::new(
            (0..nrows).map(|i| format!("p{i}")).collect(),
            cols.iter().map(|c| c.0).collect(),
            (0..nrows)
                .map(|i| cols.iter().map(|c| q(c.1[i])).collect())
                .collect(),
        )
    }

    #[test]
    fn simplify_removes_constants_and_duplicates() {
        let m = matrix(&[(1, &[3, 3, 3]), (2, &[1, 2, 3]), (3, &[0, 1, 0]), (4, &[1, 2, 3])]);
        let (s, report) = simplify(&m).unwrap();
        assert_eq!(s.serials(), [2, 3]);
        assert_eq!(report.removed_constant, [ConstantColumn { serial: 1, value: "3".into() }]);
        assert_eq!(report.merge_groups[0].members, [2, 4]);
        let json = report.to_json();
        let back = MergeReport::from_json(&json).unwrap();
        assert_eq!(reconstruct(&s, &back).unwrap(), m);
        assert!(matches!(simplify(&matrix(&[(1, &[1])])), Err(DatasetError::TooFewRows(1))));
    }

    #[test]
    fn representative_is_lowest_serial() {
        let m = matrix(&[(9, &[1, 2]), (4, &[1, 2]), (7, &[0, 5])]);
        let (s, report) = simplify(&m).unwrap();
        assert_eq!(s.serials(), [4, 7]);
        assert_eq!(report.merge_groups[0].representative, 4);
        assert_eq!(reconstruct(&s, &report).unwrap(), m);
    }

    #[test]
    fn f_value_examples() {
        assert_eq!(f_value(&[0.0, 1.0, 2.0, 3.0], &[1, 1, 2, 2]).unwrap(), 8.0);
        assert_eq!(
            f_value_exact(&[q(0), q(1), q(2), q(3)], &[1, 1, 2, 2]).unwrap(),
            FValue::Finite(q(8))
        );
        assert_eq!(f_value(&[0.0, 1.0, 1.0, 0.0], &[1, 1, 2, 2]).unwrap(), 0.0);
        assert_eq!(f_value(&[0.0, 0.0, 1.0, 1.0], &[1, 1, 2, 2]).unwrap(), f64::INFINITY);
        assert_eq!(
            f_value_exact(&[q(0), q(0), q(1), q(1)], &[1, 1, 2, 2]).unwrap(),
            FValue::Infinite
        );
        assert_eq!(f_value(&[5.0, 5.0, 5.0], &[1, 2, 2]).unwrap(), 0.0);
        assert!(matches!(f_value(&[1.0, 2.0], &[1, 1]), Err(DatasetError::TooFewClasses(1))));
        assert!(matches!(
            f_value_declared(&[1.0, 2.0, 3.0], &[1, 1, 3], 3),
            Err(DatasetError::EmptyClass(2))
        ));
        assert!(f_value(&[1.0], &[1, 2]).is_err());
    }

    #[test]
    fn ranking_puts_label_column_first() {
        let m = matrix(&[(1, &[0, 1, 0, 1, 3]), (2, &[1, 1, 2, 2, 3]), (3, &[1, 2, 3, 4, 5])]);
        let corpus = LabelledCorpus {
            matrix: m,
            labels: vec![1, 1, 2, 2, 3],
            nvars: 3,
        };
        let ranked = rank_features(&corpus).unwrap();
        assert_eq!(ranked[0].serial, 2);
        assert_eq!(ranked[0].f, FValue::Infinite);
        let mut buf = Vec::new();
        write_ranking_csv(&ranked, |s| format!("f{s}"), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rank,serial,formula,F\n1,2,f2,inf\n"), "{text}");
    }

    #[test]
    fn standardization() {
        let train = matrix(&[(1, &[0, 2])]);
        let apply = matrix(&[(1, &[1, 0])]);
        assert_eq!(standardize(&train, &train).unwrap(), [[-1.0], [1.0]]);
        assert_eq!(standardize(&train, &apply).unwrap(), [[0.0], [-1.0]]);
        assert!(matches!(
            standardize(&matrix(&[(1, &[1, 1])]), &apply),
            Err(DatasetError::ZeroVariance { serial: 1 })
        ));
    }

    #[test]
    fn splits() {
        let (tr, te) = split(6117, DEFAULT_TRAIN_FRACTION, 0).unwrap();
        assert_eq!((tr.len(), te.len()), (4612, 1505));
        assert_eq!(split(10, 0.8, 3).unwrap().0.len(), 8);
        assert_eq!(split(10, 0.8, 3).unwrap(), split(10, 0.8, 3).unwrap());
        let (a, b) = split(100, 0.5, 1).unwrap();
        let mut all = [a, b].concat();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(split(10, 1.0, 0).is_err());
        assert!(split(10, 0.0, 0).is_err());
    }

    #[test]
    fn labels_csv() {
        let labels = vec![
            LabelRecord { problem_id: "a".into(), class: 1, ordering: "x1>x2>x3".into() },
            LabelRecord { problem_id: "b,c".into(), class: 6, ordering: "x3>x2>x1".into() },
        ];
        let mut buf = Vec::new();
        write_labels_csv(&labels, &mut buf).unwrap();
        assert_eq!(read_labels_csv(buf.as_slice()).unwrap(), labels);
        assert!(read_labels_csv("problem_id,class,ordering\na,7,x>y>z\n".as_bytes()).is_err());
        assert!(read_labels_csv("problem_id,class,ordering\na,1,x>x>z\n".as_bytes()).is_err());
        assert!(read_labels_csv("problem_id,class,ordering\na,1,x>y\na,1,x>y\n".as_bytes()).is_err());
        assert!(read_labels_csv("id,class,ordering\n".as_bytes()).is_err());
    }
}
