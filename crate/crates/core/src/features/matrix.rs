use std::io::{Read, Write};

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::{BaseReading, FeatureSpec, ProblemTables};
use crate::poly::parse::parse_decimal;
use crate::poly::Rational;
use crate::problem::CorpusEntry;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("the corpus is empty")]
    EmptyCorpus,
    #[error("problem {id} has {found} variables but the corpus uses {expected}")]
    MixedVariableCount {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("feature {serial} is not defined for {nvars} variables")]
    UnknownFeature { serial: u32, nvars: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("duplicate problem id {0}")]
    DuplicateId(String),
}

/// Problems by features, with exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    serials: Vec<u32>,
    values: Vec<Vec<Rational>>,
}

impl FeatureMatrix {
    /// Panics if a row length differs from the column count.
    pub fn new(ids: Vec<String>, serials: Vec<u32>, values: Vec<Vec<Rational>>) -> Self {
        assert_eq!(ids.len(), values.len(), "one row per id");
        assert!(values.iter().all(|r| r.len() == serials.len()), "ragged matrix");
        FeatureMatrix { ids, serials, values }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn serials(&self) -> &[u32] {
        &self.serials
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn nrows(&self) -> usize {
        self.ids.len()
    }

    pub fn ncols(&self) -> usize {
        self.serials.len()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.values.iter().map(|r| r[j].clone()).collect()
    }

    pub fn column_index(&self, serial: u32) -> Option<usize> {
        self.serials.iter().position(|&s| s == serial)
    }

    pub fn row_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|r| r.iter().map(to_f64).collect())
            .collect()
    }

    /// Keeps the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            ids: self.ids.clone(),
            serials: cols.iter().map(|&j| self.serials[j]).collect(),
            values: self
                .values
                .iter()
                .map(|r| cols.iter().map(|&j| r[j].clone()).collect())
                .collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            ids: rows.iter().map(|&i| self.ids[i].clone()).collect(),
            serials: self.serials.clone(),
            values: rows.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }

    /// CSV with a `problem_id` column followed by one column per serial.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MatrixError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["problem_id".to_string()];
        header.extend(self.serials.iter().map(u32::to_string));
        out.write_record(&header)?;
        for (id, row) in self.ids.iter().zip(&self.values) {
            let mut rec = Vec::with_capacity(row.len() + 1);
            rec.push(id.clone());
            rec.extend(row.iter().map(render_decimal));
            out.write_record(&rec)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<FeatureMatrix, MatrixError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("problem_id") {
            return Err(MatrixError::Header("first column must be problem_id".into()));
        }
        let mut serials = Vec::with_capacity(header.len() - 1);
        for h in header.iter().skip(1) {
            let s: u32 = h
                .trim()
                .parse()
                .map_err(|_| MatrixError::Header(format!("column {h:?} is not a feature serial")))?;
            if serials.contains(&s) {
                return Err(MatrixError::Header(format!("duplicate column {s}")));
            }
            serials.push(s);
        }
        let mut ids = Vec::new();
        let mut values = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            // header is line 1
            let row = i + 2;
            let id = rec[0].to_string();
            if id.is_empty() {
                return Err(MatrixError::Row {
                    row,
                    message: "empty problem_id".into(),
                });
            }
            if !seen.insert(id.clone()) {
                return Err(MatrixError::DuplicateId(id));
            }
            let mut vals = Vec::with_capacity(serials.len());
            for field in rec.iter().skip(1) {
                vals.push(parse_value(field).ok_or_else(|| MatrixError::Row {
                    row,
                    message: format!("{field:?} is not a number"),
                })?);
            }
            ids.push(id);
            values.push(vals);
        }
        Ok(FeatureMatrix { ids, serials, values })
    }
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Integers exactly, anything else as the shortest decimal that round-trips
/// through `f64`.
pub fn render_decimal(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let f = to_f64(q);
        if f.is_finite() {
            format!("{f}")
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }
}

/// Accepts decimals (with optional exponent) and `a/b` fractions.
pub(crate) fn parse_value(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().ok()?;
        let d: num_bigint::BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    parse_decimal(s)
}

/// Evaluates `specs` on every problem. Problems are processed on the current
/// rayon pool; the output order follows the corpus.
pub fn evaluate_matrix(
    corpus: &[CorpusEntry],
    specs: &[FeatureSpec],
    reading: BaseReading,
) -> Result<FeatureMatrix, MatrixError> {
    let first = corpus.first().ok_or(MatrixError::EmptyCorpus)?;
    let nvars = first.problem.nvars();
    if let Some(e) = corpus.iter().find(|e| e.problem.nvars() != nvars) {
        return Err(MatrixError::MixedVariableCount {
            id: e.id.clone(),
            expected: nvars,
            found: e.problem.nvars(),
        });
    }
    for s in specs {
        if let FeatureSpec::Framework(d) = s {
            if d.base.var >= nvars {
                return Err(MatrixError::UnknownFeature {
                    serial: d.serial,
                    nvars,
                });
            }
        }
    }
    let canon: Vec<_> = specs
        .iter()
        .map(|s| match s {
            FeatureSpec::Framework(d) => Some(d.canonical()),
            FeatureSpec::Builtin { .. } => None,
        })
        .collect();
    let values: Vec<Vec<Rational>> = corpus
        .par_iter()
        .map(|e| {
            let tables = ProblemTables::new(&e.problem, reading);
            specs
                .iter()
                .zip(&canon)
                .map(|(s, c)| match (s, c) {
                    (FeatureSpec::Builtin { feature, .. }, _) => tables.evaluate_builtin(*feature),
                    (_, Some(c)) => tables.evaluate(c),
                    (_, None) => unreachable!(),
                })
                .collect()
        })
        .collect();
    Ok(FeatureMatrix {
        ids: corpus.iter().map(|e| e.id.clone()).collect(),
        serials: specs.iter().map(FeatureSpec::serial).collect(),
        values,
    })
}
