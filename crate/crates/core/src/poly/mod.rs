//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] stores its terms in a map keyed by exponent vector, so like
//! terms are always combined and zero coefficients never stored. Variables are
//! positional; their names live in a separate [`VariableSet`].

pub(crate) mod parse;
mod resultant;
mod zpoly;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use parse::{parse_polynomial, ParseError, ParseErrorKind};
pub use resultant::{discriminant, resultant};

/// Exact rational coefficient type.
pub type Rational = num_rational::BigRational;

/// Upper bound on the number of terms any single arithmetic result may carry
/// when built from untrusted text.
pub const MAX_PARSED_TERMS: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable set is empty")]
    NoVariables,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("monomial index {index} out of range (polynomial has {len} monomials)")]
    MonomialOutOfRange { index: usize, len: usize },
    #[error("variable index {index} out of range ({nvars} variables)")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("polynomial has degree {degree} in variable {var}, need at least {required}")]
    DegreeTooLow { var: usize, degree: u32, required: u32 },
}

/// Ordered, duplicate-free list of variable names. The order is a labelling
/// only; it carries no elimination-order meaning.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSet {
    names: Vec<String>,
}

impl VariableSet {
    pub fn new<I, S>(names: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(PolyError::NoVariables);
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(PolyError::InvalidVariableName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(PolyError::DuplicateVariable(name.clone()));
            }
        }
        Ok(VariableSet { names })
    }

    /// `x1, …, xn`.
    pub fn generic(n: usize) -> Self {
        assert!(n > 0, "generic variable set needs at least one variable");
        VariableSet {
            names: (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// One term `c · x_1^{d_1} ⋯ x_n^{d_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coefficient: Rational,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn total_degree(&self) -> u64 {
        self.exponents.iter().map(|&d| u64::from(d)).sum()
    }
}

/// A polynomial in a fixed number of positional variables.
///
/// Terms are keyed by exponent vector in lexicographic order with variable 0
/// most significant. The monomial index `m` used by the feature framework is
/// the position in that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The polynomial `x_var`.
    pub fn variable(nvars: usize, var: usize) -> Self {
        assert!(var < nvars);
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Self::from_terms(nvars, [(exps, Rational::one())])
    }

    /// Builds a normalized polynomial from possibly repeated or zero terms.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "exponent vector length mismatch");
            p.add_term(exps, c);
        }
        p
    }

    pub fn from_monomials<I>(nvars: usize, monomials: I) -> Self
    where
        I: IntoIterator<Item = Monomial>,
    {
        Self::from_terms(
            nvars,
            monomials.into_iter().map(|m| (m.exponents, m.coefficient)),
        )
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    /// `M_p`, the number of monomials.
    pub fn num_monomials(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[u32], &Rational)> + ExactSizeIterator {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn exponents(&self) -> impl DoubleEndedIterator<Item = &[u32]> + ExactSizeIterator {
        self.terms.keys().map(Vec::as_slice)
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(e, c)| Monomial {
            coefficient: c.clone(),
            exponents: e.clone(),
        })
    }

    /// Monomial number `m` (0-based) in the canonical term order.
    pub fn monomial(&self, m: usize) -> Result<Monomial, PolyError> {
        self.monomials()
            .nth(m)
            .ok_or(PolyError::MonomialOutOfRange {
                index: m,
                len: self.terms.len(),
            })
    }

    /// `d_v^{m,p}`: degree of variable `v` in monomial `m` (both 0-based).
    pub fn degree(&self, m: usize, v: usize) -> Result<u32, PolyError> {
        if v >= self.nvars {
            return Err(PolyError::VariableOutOfRange {
                index: v,
                nvars: self.nvars,
            });
        }
        let exps = self
            .terms
            .keys()
            .nth(m)
            .ok_or(PolyError::MonomialOutOfRange {
                index: m,
                len: self.terms.len(),
            })?;
        Ok(exps[v])
    }

    /// Degree in variable `v`; 0 for the zero polynomial.
    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| u64::from(d)).sum())
            .max()
            .unwrap_or(0)
    }

    /// Sum of the total degrees of all monomials.
    pub fn sum_of_total_degrees(&self) -> u64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| u64::from(d)).sum::<u64>())
            .sum()
    }

    /// Coefficients with respect to `v`, indexed by power of `v`. Entry `k` is a
    /// polynomial free of `v`; entries may be zero.
    pub fn coefficients_in(&self, v: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Polynomial::zero(self.nvars); deg + 1];
        for (exps, c) in &self.terms {
            let k = exps[v] as usize;
            let mut rest = exps.clone();
            rest[v] = 0;
            out[k].terms.insert(rest, c.clone());
        }
        out
    }

    pub fn derivative(&self, v: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|(e, _)| e[v] > 0).map(|(e, c)| {
            let mut e = e.clone();
            let k = e[v];
            e[v] -= 1;
            (e, c * Rational::from_integer(BigInt::from(k)))
        });
        Polynomial::from_terms(self.nvars, terms)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Leading term in lexicographic order.
    pub fn leading_term(&self) -> Option<(&[u32], &Rational)> {
        self.terms.iter().next_back().map(|(e, c)| (e.as_slice(), c))
    }

    /// The representative of `{self, -self}` whose leading coefficient is positive.
    pub fn sign_normalized(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// The representative of `{c · self : c ≠ 0}` with leading coefficient 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder or the divisor is zero.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (dlead_exps, dlead_coeff) = divisor.leading_term()?;
        let dlead_exps = dlead_exps.to_vec();
        let dlead_coeff = dlead_coeff.clone();
        if divisor.terms.len() == 1 {
            // monomial divisor: divide termwise
            let mut terms = BTreeMap::new();
            for (e, c) in &self.terms {
                let q = sub_exponents(e, &dlead_exps)?;
                terms.insert(q, c / &dlead_coeff);
            }
            return Some(Polynomial {
                nvars: self.nvars,
                terms,
            });
        }
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((lead_e, lead_c)) = rem.leading_term() {
            let q_e = sub_exponents(lead_e, &dlead_exps)?;
            let q_c = lead_c / &dlead_coeff;
            for (e, c) in &divisor.terms {
                let prod_e: Vec<u32> = e.iter().zip(&q_e).map(|(a, b)| a + b).collect();
                rem.add_term(prod_e, -(c * &q_c));
            }
            quot.add_term(q_e, q_c);
        }
        Some(quot)
    }

    /// Renders the polynomial in the native grammar; `parse_polynomial` reads it
    /// back to an identical value.
    pub fn display(&self, vars: &VariableSet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (exps, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || exps.iter().all(|&d| d == 0) {
                factors.push(abs.to_string());
            }
            for (v, &d) in exps.iter().enumerate() {
                match d {
                    0 => {}
                    1 => factors.push(vars.name(v).to_string()),
                    _ => factors.push(format!("{}^{}", vars.name(v), d)),
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }
}

fn sub_exponents(a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
