//! Recursive-descent parser for the native polynomial grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INTEGER)?
//! atom   := NUMBER | IDENT | '(' expr ')'
//! ```
//!
//! Products and powers are expanded eagerly. Division is only allowed by a
//! nonzero constant.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Polynomial, Rational, VariableSet, MAX_PARSED_TERMS};

const MAX_EXPONENT: u32 = 10_000;
const MAX_NESTING: usize = 200;
const MAX_PRODUCT_WORK: usize = 100_000;
const MAX_COEFFICIENT_BITS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownVariable(String),
    NegativeExponent,
    NonIntegerExponent,
    ExponentTooLarge,
    DivisionByNonConstant,
    DivisionByZero,
    TooLarge,
    TooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::NegativeExponent => write!(f, "negative exponent"),
            ParseErrorKind::NonIntegerExponent => {
                write!(f, "exponent must be a non-negative integer literal")
            }
            ParseErrorKind::ExponentTooLarge => {
                write!(f, "exponent exceeds {MAX_EXPONENT}")
            }
            ParseErrorKind::DivisionByNonConstant => {
                write!(f, "division is only allowed by a nonzero constant")
            }
            ParseErrorKind::DivisionByZero => write!(f, "division by zero"),
            ParseErrorKind::TooLarge => {
                write!(f, "expression too large to expand (limit {MAX_PARSED_TERMS} terms)")
            }
            ParseErrorKind::TooDeep => write!(f, "expression nested too deeply"),
        }
    }
}

/// Parse failure with a 1-based line and column (in characters).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn at_line(mut self, line: usize) -> Self {
        self.line = line;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(q, _) => write!(f, "{q}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

/// Parses an unsigned decimal literal (`12`, `0.25`) into an exact rational.
/// The flag reports whether the literal had a fractional part.
pub(crate) fn parse_unsigned_decimal(s: &str) -> Option<(Rational, bool)> {
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if int_part.is_empty() && frac_part.is_none_or(str::is_empty) {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let frac = frac_part.unwrap_or("");
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some((Rational::new(numer, denom), frac_part.is_some()))
}

/// Parses a signed decimal with optional exponent (`-1.5e-3`) exactly.
pub(crate) fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (mut q, _) = parse_unsigned_decimal(mantissa)?;
    if exp.unsigned_abs() > 400 {
        return None;
    }
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), exp.unsigned_abs() as usize));
    if exp >= 0 {
        q *= scale;
    } else {
        q /= scale;
    }
    Some(if neg { -q } else { q })
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |col: usize, kind| ParseError {
        line: 1,
        column: col + 1,
        kind,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                let (q, frac) = parse_unsigned_decimal(&lit)
                    .ok_or_else(|| err(start, ParseErrorKind::UnexpectedToken(lit.clone())))?;
                toks.push((Tok::Num(q, frac), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(err(start, ParseErrorKind::UnexpectedChar(other))),
        };
        toks.push((tok, start));
        i += 1;
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    vars: &'a VariableSet,
    depth: usize,
    work: usize,
}

impl Parser<'_> {
    fn err(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: 1,
            column: col + 1,
            kind,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.pos) {
            Some((t, c)) => self.err(*c, ParseErrorKind::UnexpectedToken(t.to_string())),
            None => self.err(self.end_col, ParseErrorKind::UnexpectedEnd),
        }
    }

    fn check_size(&self, p: &Polynomial, col: usize) -> Result<(), ParseError> {
        if p.num_monomials() > MAX_PARSED_TERMS {
            Err(self.err(col, ParseErrorKind::TooLarge))
        } else {
            Ok(())
        }
    }

    fn multiply(&mut self, a: &Polynomial, b: &Polynomial, col: usize) -> Result<Polynomial, ParseError> {
        self.work = self
            .work
            .saturating_add(a.num_monomials().saturating_mul(b.num_monomials()));
        if self.work > MAX_PRODUCT_WORK {
            return Err(self.err(col, ParseErrorKind::TooLarge));
        }
        let p = a * b;
        self.check_size(&p, col)?;
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.err(self.col(), ParseErrorKind::TooDeep));
        }
        let mut acc = self.term()?;
        loop {
            let col = self.col();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
            self.check_size(&acc, col)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let col = self.col();
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.multiply(&acc, &rhs, col)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if !rhs.is_constant() {
                        return Err(self.err(col, ParseErrorKind::DivisionByNonConstant));
                    }
                    let c = match rhs.leading_term() {
                        Some((_, c)) => c.clone(),
                        None => return Err(self.err(col, ParseErrorKind::DivisionByZero)),
                    };
                    acc = acc.scale(&(Rational::one() / c));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.nest(|p| Ok(-p.unary()?))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.nest(Self::unary)
            }
            _ => self.power(),
        }
    }

    fn nest<F>(&mut self, f: F) -> Result<Polynomial, ParseError>
    where
        F: FnOnce(&mut Self) -> Result<Polynomial, ParseError>,
    {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.err(self.col(), ParseErrorKind::TooDeep));
        }
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let caret_col = self.col();
        self.pos += 1;
        let col = self.col();
        let exp = match self.next() {
            Some((Tok::Num(q, frac), _)) => {
                if frac || !q.is_integer() {
                    return Err(self.err(col, ParseErrorKind::NonIntegerExponent));
                }
                match u32::try_from(q.to_integer()) {
                    Ok(e) if e <= MAX_EXPONENT => e,
                    _ => return Err(self.err(col, ParseErrorKind::ExponentTooLarge)),
                }
            }
            Some((Tok::Minus, _)) => return Err(self.err(col, ParseErrorKind::NegativeExponent)),
            Some(_) => return Err(self.err(col, ParseErrorKind::NonIntegerExponent)),
            None => return Err(self.err(self.end_col, ParseErrorKind::UnexpectedEnd)),
        };
        if base.num_monomials() == 1 {
            // single term: raise exponents directly
            let (e, c) = base.leading_term().expect("one term");
            let mut exps = Vec::with_capacity(e.len());
            for &d in e {
                match d.checked_mul(exp) {
                    Some(v) if v <= MAX_EXPONENT => exps.push(v),
                    _ => return Err(self.err(caret_col, ParseErrorKind::ExponentTooLarge)),
                }
            }
            let bits = c.numer().bits() + c.denom().bits();
            if bits.saturating_mul(u64::from(exp)) > MAX_COEFFICIENT_BITS {
                return Err(self.err(caret_col, ParseErrorKind::TooLarge));
            }
            let coeff = num_traits::pow(c.clone(), exp as usize);
            return Ok(Polynomial::from_terms(base.nvars(), [(exps, coeff)]));
        }
        if base.is_zero() {
            return Ok(if exp == 0 {
                Polynomial::one(base.nvars())
            } else {
                base
            });
        }
        let mut acc = Polynomial::one(base.nvars());
        for _ in 0..exp {
            acc = self.multiply(&acc, &base, caret_col)?;
            if acc.total_degree() > u64::from(MAX_EXPONENT) {
                return Err(self.err(caret_col, ParseErrorKind::ExponentTooLarge));
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.vars.len();
        match self.next() {
            Some((Tok::Num(q, _), _)) => Ok(Polynomial::constant(n, q)),
            Some((Tok::Ident(name), col)) => match self.vars.index_of(&name) {
                Some(v) => Ok(Polynomial::variable(n, v)),
                None => Err(self.err(col, ParseErrorKind::UnknownVariable(name))),
            },
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        Err(self.unexpected())
                    }
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected())
            }
        }
    }
}

/// Parses `text` over `vars` and returns the expanded, normalized polynomial.
pub fn parse_polynomial(text: &str, vars: &VariableSet) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count(),
        vars,
        depth: 0,
        work: 0,
    };
    let p = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(parser.unexpected());
    }
    Ok(p)
}
