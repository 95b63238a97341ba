//! Problem instances and corpus loading.
//!
//! Native problem files look like
//!
//! ```text
//! # comment
//! vars: x1, x2, x3
//! x1^2*x2 - x3
//! x1*x2^4*x3^2 + x1*x3
//! ```
//!
//! A corpus is a directory of such files (`.smt2` files are read with the
//! s-expression reader) or a JSON-lines file with `{id, vars, polys}` records.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::poly::{parse_polynomial, ParseError, PolyError, Polynomial, VariableSet};
use crate::smt::{parse_problem_smt, SmtError};

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("problem has no polynomials")]
    Empty,
    #[error("polynomial {index} is zero")]
    ZeroPolynomial { index: usize },
    #[error("polynomial {index} has {found} variables, expected {expected}")]
    VariableCountMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: missing `vars:` declaration")]
    MissingVars { line: usize },
    #[error("line {line}: zero polynomial")]
    ZeroPolynomialAt { line: usize },
    #[error("line {line}: {source}")]
    Variables { line: usize, source: PolyError },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: malformed record: {message}")]
    Record { line: usize, message: String },
    #[error("line {line} (problem `{id}`): {message}")]
    InRecord {
        line: usize,
        id: String,
        message: String,
    },
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    InFile { path: PathBuf, message: String },
    #[error("duplicate problem id `{0}`")]
    DuplicateId(String),
}

/// A finite, non-empty list of nonzero polynomials over named variables.
/// The list order provides the `p` labels only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    variables: VariableSet,
    polynomials: Vec<Polynomial>,
}

impl ProblemInstance {
    pub fn new(variables: VariableSet, polynomials: Vec<Polynomial>) -> Result<Self, ProblemError> {
        if polynomials.is_empty() {
            return Err(ProblemError::Empty);
        }
        for (index, p) in polynomials.iter().enumerate() {
            if p.nvars() != variables.len() {
                return Err(ProblemError::VariableCountMismatch {
                    index,
                    found: p.nvars(),
                    expected: variables.len(),
                });
            }
            if p.is_zero() {
                return Err(ProblemError::ZeroPolynomial { index });
            }
        }
        Ok(ProblemInstance {
            variables,
            polynomials,
        })
    }

    pub fn variables(&self) -> &VariableSet {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polynomials
    }

    /// `P`.
    pub fn num_polynomials(&self) -> usize {
        self.polynomials.len()
    }

    /// Renders the instance in the native file format.
    pub fn to_native(&self) -> String {
        let mut out = format!("vars: {}\n", self.variables.names().join(", "));
        for p in &self.polynomials {
            out.push_str(&p.display(&self.variables));
            out.push('\n');
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Reads the native format: a `vars:` line, then one polynomial per line.
pub fn parse_problem_native(text: &str) -> Result<ProblemInstance, ProblemError> {
    let mut vars: Option<VariableSet> = None;
    let mut polys = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        match &vars {
            None => {
                let rest = line
                    .strip_prefix("vars:")
                    .ok_or(ProblemError::MissingVars { line: line_no })?;
                let names: Vec<&str> = rest
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect();
                vars = Some(VariableSet::new(names).map_err(|source| ProblemError::Variables {
                    line: line_no,
                    source,
                })?);
            }
            Some(vs) => {
                // columns refer to the raw line, so offset by the leading whitespace
                let offset = strip_comment(raw).len() - strip_comment(raw).trim_start().len();
                let p = parse_polynomial(line, vs).map_err(|e| {
                    let column = e.column + raw[..offset].chars().count();
                    ParseError { column, ..e }.at_line(line_no)
                })?;
                if p.is_zero() {
                    return Err(ProblemError::ZeroPolynomialAt { line: line_no });
                }
                polys.push(p);
            }
        }
    }
    let vars = vars.ok_or(ProblemError::MissingVars {
        line: text.lines().count().max(1),
    })?;
    ProblemInstance::new(vars, polys)
}

/// One named problem of a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub problem: ProblemInstance,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    id: String,
    vars: Vec<String>,
    polys: Vec<String>,
}

/// Reads a JSON-lines corpus (`{id, vars, polys}` per line; blank lines ignored).
pub fn parse_corpus_jsonl(text: &str) -> Result<Vec<CorpusEntry>, ProblemError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(line).map_err(|e| ProblemError::Record {
            line: line_no,
            message: e.to_string(),
        })?;
        let in_record = |message: String| ProblemError::InRecord {
            line: line_no,
            id: rec.id.clone(),
            message,
        };
        let vars = VariableSet::new(rec.vars.iter().map(String::as_str))
            .map_err(|e| in_record(e.to_string()))?;
        let mut polys = Vec::with_capacity(rec.polys.len());
        for (k, text) in rec.polys.iter().enumerate() {
            let p = parse_polynomial(text, &vars)
                .map_err(|e| in_record(format!("polynomial {}: {e}", k + 1)))?;
            polys.push(p);
        }
        let problem = ProblemInstance::new(vars, polys).map_err(|e| in_record(e.to_string()))?;
        out.push(CorpusEntry {
            id: rec.id,
            problem,
        });
    }
    check_unique_ids(&out)?;
    Ok(out)
}

/// Renders a corpus as JSON lines.
pub fn corpus_to_jsonl(entries: &[CorpusEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let vars = e.problem.variables();
        let rec = JsonRecord {
            id: e.id.clone(),
            vars: vars.names().to_vec(),
            polys: e
                .problem
                .polynomials()
                .iter()
                .map(|p| p.display(vars))
                .collect(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("plain record serializes"));
        out.push('\n');
    }
    out
}

fn check_unique_ids(entries: &[CorpusEntry]) -> Result<(), ProblemError> {
    let mut seen = std::collections::HashSet::new();
    for e in entries {
        if !seen.insert(e.id.as_str()) {
            return Err(ProblemError::DuplicateId(e.id.clone()));
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, ProblemError> {
    fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_file(path: &Path) -> Result<Vec<CorpusEntry>, ProblemError> {
    let text = read(path)?;
    let wrap = |e: ProblemError| ProblemError::InFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => parse_corpus_jsonl(&text).map_err(wrap),
        Some("smt2") => Ok(vec![CorpusEntry {
            id: file_id(path),
            problem: parse_problem_smt(&text).map_err(|e| wrap(e.into()))?,
        }]),
        _ => Ok(vec![CorpusEntry {
            id: file_id(path),
            problem: parse_problem_native(&text).map_err(wrap)?,
        }]),
    }
}

/// Loads problems from files and directories. Directory entries are read in
/// file-name order; hidden files are skipped. Ids must be unique overall.
pub fn load_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<CorpusEntry>, ProblemError> {
    let mut out = Vec::new();
    for path in paths {
        let path = path.as_ref();
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|source| ProblemError::Io {
                    path: path.to_path_buf(),
                    source,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .filter(|p| {
                    !p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with('.'))
                })
                .collect();
            files.sort();
            for f in files {
                out.extend(load_file(&f)?);
            }
        } else {
            out.extend(load_file(path)?);
        }
    }
    check_unique_ids(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = "vars: x1, x2, x3\nx1^2*x2 - x3\nx1*x2^4*x3^2 + x1*x3\n";

    #[test]
    fn worked_example_counts() {
        let pr = parse_problem_native(WORKED).unwrap();
        assert_eq!(pr.num_polynomials(), 2);
        assert_eq!(pr.polynomials()[0].num_monomials(), 2);
        assert_eq!(pr.polynomials()[1].num_monomials(), 2);
    }

    #[test]
    fn single_variable_line() {
        let pr = parse_problem_native("vars: x1\nx1\n").unwrap();
        assert_eq!(pr.num_polynomials(), 1);
        assert_eq!(pr.polynomials()[0].num_monomials(), 1);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let noisy = "# header\n\nvars: x1, x2, x3   # labels\n\n  x1^2*x2 - x3 # first\n# between\n\nx1*x2^4*x3^2 + x1*x3\n\n";
        assert_eq!(
            parse_problem_native(noisy).unwrap(),
            parse_problem_native(WORKED).unwrap()
        );
    }

    #[test]
    fn native_errors() {
        assert!(matches!(
            parse_problem_native("x1 + 1\n"),
            Err(ProblemError::MissingVars { line: 1 })
        ));
        assert!(matches!(
            parse_problem_native("vars: x\n"),
            Err(ProblemError::Empty)
        ));
        assert!(matches!(
            parse_problem_native("vars: x\nx - x\n"),
            Err(ProblemError::ZeroPolynomialAt { line: 2 })
        ));
        match parse_problem_native("vars: x\n\n   x + y\n") {
            Err(ProblemError::Parse(e)) => assert_eq!((e.line, e.column), (3, 8)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_problem_native("vars: x, x\nx\n"),
            Err(ProblemError::Variables { line: 1, .. })
        ));
    }

    #[test]
    fn jsonl_round_trip() {
        let text = r#"{"id": "a", "vars": ["x", "y"], "polys": ["x*y - 1", "x^2"]}

{"id": "b", "vars": ["u"], "polys": ["u + 1/2"]}
"#;
        let corpus = parse_corpus_jsonl(text).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[1].id, "b");
        let again = parse_corpus_jsonl(&corpus_to_jsonl(&corpus)).unwrap();
        assert_eq!(again, corpus);
    }

    #[test]
    fn jsonl_errors_carry_line_numbers() {
        let err = parse_corpus_jsonl("{\"id\": \"a\", \"vars\": [\"x\"], \"polys\": [\"x\"]}\n{oops}\n")
            .unwrap_err();
        assert!(matches!(err, ProblemError::Record { line: 2, .. }));
        let err = parse_corpus_jsonl("{\"id\": \"a\", \"vars\": [\"x\"], \"polys\": [\"y\"]}\n")
            .unwrap_err();
        assert!(matches!(err, ProblemError::InRecord { line: 1, .. }));
        let dup = "{\"id\": \"a\", \"vars\": [\"x\"], \"polys\": [\"x\"]}\n".repeat(2);
        assert!(matches!(
            parse_corpus_jsonl(&dup),
            Err(ProblemError::DuplicateId(_))
        ));
    }

    #[test]
    fn native_rendering_round_trips() {
        let pr = parse_problem_native(WORKED).unwrap();
        assert_eq!(parse_problem_native(&pr.to_native()).unwrap(), pr);
    }
}
