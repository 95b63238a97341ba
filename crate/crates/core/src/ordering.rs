//! Variable orderings and their class indices.

use std::fmt;

use thiserror::Error;

use crate::features::permutations;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("{0:?} is not a permutation of the variable indices")]
    NotAPermutation(Vec<usize>),
    #[error("class {class} is out of range 1..={max}")]
    ClassOutOfRange { class: usize, max: usize },
    #[error("unknown variable {name:?} in ordering {text:?}")]
    UnknownVariable { name: String, text: String },
    #[error("ordering {text:?} must list each of the {expected} variables exactly once")]
    Incomplete { text: String, expected: usize },
}

/// An elimination sequence of variable indices, first-eliminated first.
/// Renders as `x1>x2>x3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(seq: Vec<usize>) -> Result<Self, OrderingError> {
        let mut seen = vec![false; seq.len()];
        for &v in &seq {
            if v >= seq.len() || std::mem::replace(&mut seen[v], true) {
                return Err(OrderingError::NotAPermutation(seq));
            }
        }
        Ok(Ordering(seq))
    }

    pub fn identity(n: usize) -> Self {
        Ordering((0..n).collect())
    }

    /// All `n!` orderings in class order.
    pub fn all(n: usize) -> Vec<Ordering> {
        permutations(n).into_iter().map(Ordering).collect()
    }

    /// Class indices are 1-based positions in the lexicographic enumeration
    /// of index sequences.
    pub fn from_class(n: usize, class: usize) -> Result<Self, OrderingError> {
        let max = factorial(n);
        if class == 0 || class > max {
            return Err(OrderingError::ClassOutOfRange { class, max });
        }
        // decode the factorial-base rank directly
        let mut rank = class - 1;
        let mut pool: Vec<usize> = (0..n).collect();
        let mut seq = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let f = factorial(i);
            seq.push(pool.remove(rank / f));
            rank %= f;
        }
        Ok(Ordering(seq))
    }

    pub fn class_index(&self) -> usize {
        let n = self.0.len();
        let mut rank = 0;
        for (i, &v) in self.0.iter().enumerate() {
            let smaller_later = self.0[i + 1..].iter().filter(|&&w| w < v).count();
            rank += smaller_later * factorial(n - 1 - i);
        }
        rank + 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sequence(&self) -> &[usize] {
        &self.0
    }

    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        self.0
            .iter()
            .map(|&v| names[v].as_ref())
            .collect::<Vec<_>>()
            .join(">")
    }

    /// Parses `a>b>c` against the given variable names. Whitespace around
    /// names is ignored.
    pub fn parse<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Self, OrderingError> {
        let mut seq = Vec::with_capacity(names.len());
        for part in text.split('>') {
            let part = part.trim();
            let idx = names
                .iter()
                .position(|n| n.as_ref() == part)
                .ok_or_else(|| OrderingError::UnknownVariable {
                    name: part.to_string(),
                    text: text.to_string(),
                })?;
            seq.push(idx);
        }
        if seq.len() != names.len() {
            return Err(OrderingError::Incomplete {
                text: text.to_string(),
                expected: names.len(),
            });
        }
        Ordering::new(seq).map_err(|_| OrderingError::Incomplete {
            text: text.to_string(),
            expected: names.len(),
        })
    }

    /// Applies a variable renaming: variable `v` becomes `map[v]`.
    pub fn relabel(&self, map: &[usize]) -> Ordering {
        Ordering(self.0.iter().map(|&v| map[v]).collect())
    }
}

impl fmt::Display for Ordering {
    /// Generic `x1>x2>...` names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("x{}", v + 1)).collect();
        f.write_str(&parts.join(">"))
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Sorts names so that embedded digit runs compare numerically (`x2 < x10`).
pub fn natural_sort(names: &mut [String]) {
    names.sort_by(|a, b| natural_cmp(a, b));
}

fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return std::cmp::Ordering::Equal,
            (None, _) => return std::cmp::Ordering::Less,
            (_, None) => return std::cmp::Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let la = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let lb = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let da = trim_zeros(&a[..la]);
                let db = trim_zeros(&b[..lb]);
                let ord = da.len().cmp(&db.len()).then(da.cmp(db)).then(la.cmp(&lb));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
                a = &a[la..];
                b = &b[lb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let k = d.iter().take_while(|&&c| c == b'0').count();
    &d[k..]
}
