//! Human-made ordering heuristics: Brown's degree criteria and the sum of
//! total degrees over projection sets (sotd). Both return every tied ordering.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::permutations;
use crate::ordering::Ordering;
use crate::poly::{discriminant, resultant, Polynomial};
use crate::problem::ProblemInstance;

/// Default variable bound for sotd (it scores all `n!` orderings).
pub const SOTD_MAX_VARS: usize = 6;

#[derive(Debug, Error)]
pub enum HeuristicError {
    #[error("sotd is limited to {max} variables, the problem has {nvars}")]
    TooManyVariables { nvars: usize, max: usize },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// A non-empty set of distinct orderings, sorted by class index, with
/// optional per-ordering scores.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub orderings: Vec<Ordering>,
    pub scores: BTreeMap<Ordering, f64>,
}

impl PredictionSet {
    fn from_orderings(mut orderings: Vec<Ordering>, scores: BTreeMap<Ordering, f64>) -> Self {
        orderings.sort_by_key(Ordering::class_index);
        orderings.dedup();
        assert!(!orderings.is_empty(), "prediction sets are non-empty");
        PredictionSet { orderings, scores }
    }

    pub fn single(o: Ordering) -> Self {
        PredictionSet {
            orderings: vec![o],
            scores: BTreeMap::new(),
        }
    }
}

/// Brown's per-variable measures: overall degree, the largest total degree of
/// a term containing the variable, and the number of such terms.
pub fn brown_criteria(pr: &ProblemInstance) -> Vec<(u32, u64, usize)> {
    (0..pr.nvars())
        .map(|v| {
            let mut degree = 0;
            let mut max_total = 0;
            let mut count = 0;
            for p in pr.polynomials() {
                for e in p.exponents() {
                    degree = degree.max(e[v]);
                    if e[v] > 0 {
                        max_total = max_total.max(e.iter().map(|&d| u64::from(d)).sum());
                        count += 1;
                    }
                }
            }
            (degree, max_total, count)
        })
        .collect()
}

/// Variables ranked by the criteria, smallest eliminated first; variables
/// tied on all three yield every consistent ordering.
pub fn brown(pr: &ProblemInstance) -> PredictionSet {
    let criteria = brown_criteria(pr);
    let mut vars: Vec<usize> = (0..pr.nvars()).collect();
    vars.sort_by_key(|&v| (criteria[v], v));
    let groups: Vec<&[usize]> = vars.chunk_by(|&a, &b| criteria[a] == criteria[b]).collect();
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for g in groups {
        let perms = permutations(g.len());
        prefixes = prefixes
            .iter()
            .flat_map(|pre| {
                perms.iter().map(move |perm| {
                    let mut next = pre.clone();
                    next.extend(perm.iter().map(|&i| g[i]));
                    next
                })
            })
            .collect();
    }
    let orderings = prefixes
        .into_iter()
        .map(|seq| Ordering::new(seq).expect("groups partition the variables"))
        .collect();
    PredictionSet::from_orderings(orderings, BTreeMap::new())
}

/// Coefficients with respect to `v`, discriminants of inputs of degree at
/// least 2 in `v`, and resultants of every pair with positive degree in `v`.
/// Constants are dropped; results are made monic and deduplicated, so
/// polynomials differing by a constant factor count once.
pub fn projection_set(polys: &[Polynomial], v: usize) -> Vec<Polynomial> {
    projection(polys, v, true)
}

fn projection(polys: &[Polynomial], v: usize, dedup: bool) -> Vec<Polynomial> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |p: Polynomial| {
        if p.is_constant() {
            return;
        }
        let p = p.monic();
        if !dedup || seen.insert(p.clone()) {
            out.push(p);
        }
    };
    for p in polys {
        for c in p.coefficients_in(v) {
            push(c);
        }
        if p.degree_in(v) >= 2 {
            push(discriminant(p, v).expect("degree checked"));
        }
    }
    let involved: Vec<&Polynomial> = polys.iter().filter(|p| p.degree_in(v) >= 1).collect();
    for (i, p) in involved.iter().enumerate() {
        for q in &involved[i + 1..] {
            push(resultant(p, q, v).expect("degrees checked"));
        }
    }
    out
}

/// Whether projection polynomials are deduplicated (up to a constant factor) or counted
/// with multiplicity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SotdMode {
    #[default]
    Deduplicate,
    Multiplicity,
}

/// Sum of total degrees of every monomial in the input and all successive
/// projection sets, for each ordering. Returns the minimizers; `scores`
/// holds the sum for every ordering.
pub fn sotd(pr: &ProblemInstance, mode: SotdMode, max_vars: usize) -> Result<PredictionSet, HeuristicError> {
    let n = pr.nvars();
    if n > max_vars {
        return Err(HeuristicError::TooManyVariables { nvars: n, max: max_vars });
    }
    let dedup = mode == SotdMode::Deduplicate;
    let mut base: Vec<Polynomial> = Vec::new();
    for p in pr.polynomials() {
        let p = p.monic();
        if !dedup || !base.contains(&p) {
            base.push(p);
        }
    }
    let mut scores: Vec<(Vec<usize>, u64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut seen: HashSet<Polynomial> = base.iter().cloned().collect();
            let score = base.iter().map(Polynomial::sum_of_total_degrees).sum();
            descend(&base, vec![first], n, dedup, &mut seen, score, &mut out);
            out
        })
        .collect();
    scores.sort();
    let best = scores.iter().map(|s| s.1).min().expect("at least one ordering");
    let to_ordering = |seq: &[usize]| Ordering::new(seq.to_vec()).expect("permutation");
    let winners = scores.iter().filter(|s| s.1 == best).map(|s| to_ordering(&s.0)).collect();
    let all = scores.iter().map(|(seq, s)| (to_ordering(seq), *s as f64)).collect();
    Ok(PredictionSet::from_orderings(winners, all))
}

/// Projects `current` on the last variable of `prefix`, then recurses on
/// every extension until one variable remains. `seen` is the union so far.
fn descend(
    current: &[Polynomial],
    prefix: Vec<usize>,
    n: usize,
    dedup: bool,
    seen: &mut HashSet<Polynomial>,
    score: u64,
    out: &mut Vec<(Vec<usize>, u64)>,
) {
    if prefix.len() == n {
        // the last variable is never projected
        out.push((prefix, score));
        return;
    }
    let v = *prefix.last().expect("non-empty prefix");
    let next = projection(current, v, dedup);
    let mut added = Vec::new();
    let mut score = score;
    for p in &next {
        if !dedup {
            score += p.sum_of_total_degrees();
        } else if seen.insert(p.clone()) {
            score += p.sum_of_total_degrees();
            added.push(p.clone());
        }
    }
    if prefix.len() == n - 1 {
        let last = (0..n).find(|u| !prefix.contains(u)).expect("one variable left");
        let mut full = prefix;
        full.push(last);
        out.push((full, score));
    } else {
        for u in (0..n).filter(|u| !prefix.contains(u)) {
            let mut p2 = prefix.clone();
            p2.push(u);
            descend(&next, p2, n, dedup, seen, score, out);
        }
    }
    for p in added {
        seen.remove(&p);
    }
}

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub problem_id: String,
    pub method: String,
    pub orderings: Vec<String>,
    #[serde(default)]
    pub scores: BTreeMap<String, f64>,
}

impl PredictionRecord {
    pub fn new<S: AsRef<str>>(problem_id: &str, method: &str, set: &PredictionSet, names: &[S]) -> Self {
        PredictionRecord {
            problem_id: problem_id.to_string(),
            method: method.to_string(),
            orderings: set.orderings.iter().map(|o| o.render(names)).collect(),
            scores: set.scores.iter().map(|(o, s)| (o.render(names), *s)).collect(),
        }
    }
}

/// Predictions as a pretty-printed JSON array.
pub fn write_predictions<W: Write>(records: &[PredictionRecord], mut w: W) -> Result<(), HeuristicError> {
    serde_json::to_writer_pretty(&mut w, records)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_predictions<R: Read>(r: R) -> Result<Vec<PredictionRecord>, HeuristicError> {
    Ok(serde_json::from_reader(r)?)
}
