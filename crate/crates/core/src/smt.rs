//! Extracts the polynomial set of an SMT-LIB style script.
//!
//! Only the asserted-atom fragment is read: every arithmetic comparison
//! `(σ a b)` contributes the polynomial `a - b`, and the Boolean structure
//! around it is discarded. Quantifiers, `let` and `define-fun` are rejected.

use std::fmt;

use num_traits::One;

use crate::poly::{parse::parse_unsigned_decimal, Polynomial, Rational, VariableSet};
use crate::problem::ProblemInstance;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmtErrorKind {
    Syntax(String),
    UnsupportedOperator(String),
    UnsupportedCommand(String),
    UnsupportedSort(String),
    UnknownSymbol(String),
    DuplicateDeclaration(String),
    NoPolynomialAtoms,
    TooLarge,
}

impl fmt::Display for SmtErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmtErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            SmtErrorKind::UnsupportedOperator(op) => write!(f, "unsupported operator `{op}`"),
            SmtErrorKind::UnsupportedCommand(c) => write!(f, "unsupported command `{c}`"),
            SmtErrorKind::UnsupportedSort(s) => write!(f, "unsupported sort `{s}`"),
            SmtErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            SmtErrorKind::DuplicateDeclaration(s) => write!(f, "`{s}` declared twice"),
            SmtErrorKind::NoPolynomialAtoms => write!(f, "no polynomial atoms found"),
            SmtErrorKind::TooLarge => write!(f, "term too large to expand"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct SmtError {
    pub line: usize,
    pub column: usize,
    pub kind: SmtErrorKind,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

fn err(pos: Pos, kind: SmtErrorKind) -> SmtError {
    SmtError {
        line: pos.line,
        column: pos.column,
        kind,
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<SExpr>, SmtError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            if self.chars.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read(0)?);
        }
    }

    fn read(&mut self, depth: usize) -> Result<SExpr, SmtError> {
        self.skip_trivia();
        let start = self.pos;
        if depth > MAX_DEPTH {
            return Err(err(start, SmtErrorKind::TooLarge));
        }
        match self.chars.peek().copied() {
            None => Err(err(start, SmtErrorKind::Syntax("unexpected end of input".into()))),
            Some(')') => Err(err(start, SmtErrorKind::Syntax("unexpected `)`".into()))),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(err(start, SmtErrorKind::Syntax("unclosed `(`".into())))
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.read(depth + 1)?),
                    }
                }
            }
            Some('|') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(err(start, SmtErrorKind::Syntax("unclosed `|`".into())))
                        }
                        Some('|') => return Ok(SExpr::Atom(s, start)),
                        Some(c) => s.push(c),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::from("\"");
                loop {
                    match self.bump() {
                        None => {
                            return Err(err(start, SmtErrorKind::Syntax("unclosed string".into())))
                        }
                        Some('"') => {
                            // "" is an escaped quote inside a string literal
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                s.push('"');
                                return Ok(SExpr::Atom(s, start));
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '|' | '"') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(SExpr::Atom(s, start))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Real,
    Bool,
}

struct Extractor {
    names: Vec<String>,
    sorts: Vec<Sort>,
    assertions: Vec<SExpr>,
}

impl Extractor {
    fn sort_of(&self, name: &str) -> Option<Sort> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.sorts[i])
    }

    fn declare(&mut self, name: &SExpr, sort: &SExpr) -> Result<(), SmtError> {
        let SExpr::Atom(name_s, pos) = name else {
            return Err(err(name.pos(), SmtErrorKind::Syntax("expected a symbol".into())));
        };
        let sort = match sort {
            SExpr::Atom(s, _) if s == "Real" || s == "Int" => Sort::Real,
            SExpr::Atom(s, _) if s == "Bool" => Sort::Bool,
            other => {
                return Err(err(
                    other.pos(),
                    SmtErrorKind::UnsupportedSort(render(other)),
                ))
            }
        };
        if self.names.contains(name_s) {
            return Err(err(*pos, SmtErrorKind::DuplicateDeclaration(name_s.clone())));
        }
        self.names.push(name_s.clone());
        self.sorts.push(sort);
        Ok(())
    }

    fn command(&mut self, cmd: &SExpr) -> Result<(), SmtError> {
        let SExpr::List(items, pos) = cmd else {
            return Err(err(cmd.pos(), SmtErrorKind::Syntax("expected a command".into())));
        };
        let Some(SExpr::Atom(head, _)) = items.first() else {
            return Err(err(*pos, SmtErrorKind::Syntax("expected a command name".into())));
        };
        let arity = |n: usize| {
            if items.len() == n + 1 {
                Ok(())
            } else {
                Err(err(
                    *pos,
                    SmtErrorKind::Syntax(format!("`{head}` expects {n} argument(s)")),
                ))
            }
        };
        match head.as_str() {
            "set-logic" | "set-info" | "set-option" | "check-sat" | "check-sat-assuming"
            | "get-model" | "get-value" | "get-info" | "get-option" | "get-assignment"
            | "get-unsat-core" | "exit" | "push" | "pop" | "echo" | "reset"
            | "reset-assertions" => Ok(()),
            "declare-const" => {
                arity(2)?;
                self.declare(&items[1], &items[2])
            }
            "declare-fun" => {
                arity(3)?;
                match &items[2] {
                    SExpr::List(args, _) if args.is_empty() => self.declare(&items[1], &items[3]),
                    other => Err(err(
                        other.pos(),
                        SmtErrorKind::UnsupportedOperator("declare-fun with arguments".into()),
                    )),
                }
            }
            "assert" => {
                arity(1)?;
                self.assertions.push(items[1].clone());
                Ok(())
            }
            other => Err(err(*pos, SmtErrorKind::UnsupportedCommand(other.to_string()))),
        }
    }
}

fn render(e: &SExpr) -> String {
    match e {
        SExpr::Atom(s, _) => s.clone(),
        SExpr::List(items, _) => format!(
            "({})",
            items.iter().map(render).collect::<Vec<_>>().join(" ")
        ),
    }
}

struct AtomCollector<'a> {
    ex: &'a Extractor,
    real_vars: &'a [String],
    polys: Vec<Polynomial>,
}

const COMPARISONS: [&str; 6] = ["=", "<", "<=", ">", ">=", "distinct"];
const CONNECTIVES: [&str; 5] = ["and", "or", "not", "=>", "xor"];
const REJECTED: [&str; 4] = ["let", "forall", "exists", "ite"];

impl AtomCollector<'_> {
    fn nvars(&self) -> usize {
        self.real_vars.len()
    }

    fn is_arith(&self, e: &SExpr) -> bool {
        match e {
            SExpr::Atom(s, _) => {
                parse_unsigned_decimal(s).is_some()
                    || self.real_vars.iter().any(|v| v == s)
            }
            SExpr::List(items, _) => match items.first() {
                Some(SExpr::Atom(h, _)) => matches!(h.as_str(), "+" | "-" | "*" | "/"),
                _ => false,
            },
        }
    }

    fn boolean(&mut self, e: &SExpr) -> Result<(), SmtError> {
        match e {
            SExpr::Atom(s, pos) => match s.as_str() {
                "true" | "false" => Ok(()),
                _ if self.ex.sort_of(s) == Some(Sort::Bool) => Ok(()),
                _ => Err(err(*pos, SmtErrorKind::UnknownSymbol(s.clone()))),
            },
            SExpr::List(items, pos) => {
                let Some(SExpr::Atom(head, hpos)) = items.first() else {
                    return Err(err(*pos, SmtErrorKind::Syntax("expected an operator".into())));
                };
                let args = &items[1..];
                if CONNECTIVES.contains(&head.as_str()) {
                    for a in args {
                        self.boolean(a)?;
                    }
                    Ok(())
                } else if head == "!" {
                    match args.first() {
                        Some(inner) => self.boolean(inner),
                        None => Err(err(*pos, SmtErrorKind::Syntax("empty annotation".into()))),
                    }
                } else if COMPARISONS.contains(&head.as_str()) {
                    if args.len() < 2 {
                        return Err(err(
                            *pos,
                            SmtErrorKind::Syntax(format!("`{head}` needs two arguments")),
                        ));
                    }
                    let arith_args = args.iter().filter(|a| self.is_arith(a)).count();
                    if arith_args == 0 && matches!(head.as_str(), "=" | "distinct") {
                        // Boolean equivalence
                        for a in args {
                            self.boolean(a)?;
                        }
                        return Ok(());
                    }
                    // evaluating every side surfaces the precise error for
                    // unknown symbols or operators
                    let terms = args
                        .iter()
                        .map(|a| self.arith(a, 0))
                        .collect::<Result<Vec<_>, _>>()?;
                    for w in terms.windows(2) {
                        self.push(&w[0] - &w[1]);
                    }
                    if head == "distinct" {
                        for i in 0..terms.len() {
                            for j in i + 2..terms.len() {
                                self.push(&terms[i] - &terms[j]);
                            }
                        }
                    }
                    Ok(())
                } else {
                    Err(err(*hpos, SmtErrorKind::UnsupportedOperator(head.clone())))
                }
            }
        }
    }

    fn push(&mut self, p: Polynomial) {
        if !p.is_zero() && !self.polys.contains(&p) {
            self.polys.push(p);
        }
    }

    fn arith(&self, e: &SExpr, depth: usize) -> Result<Polynomial, SmtError> {
        if depth > MAX_DEPTH {
            return Err(err(e.pos(), SmtErrorKind::TooLarge));
        }
        let n = self.nvars();
        match e {
            SExpr::Atom(s, pos) => {
                if let Some((q, _)) = parse_unsigned_decimal(s) {
                    return Ok(Polynomial::constant(n, q));
                }
                match self.real_vars.iter().position(|v| v == s) {
                    Some(i) => Ok(Polynomial::variable(n, i)),
                    None => Err(err(*pos, SmtErrorKind::UnknownSymbol(s.clone()))),
                }
            }
            SExpr::List(items, pos) => {
                let Some(SExpr::Atom(head, hpos)) = items.first() else {
                    return Err(err(*pos, SmtErrorKind::Syntax("expected an operator".into())));
                };
                let args = items[1..]
                    .iter()
                    .map(|a| self.arith(a, depth + 1))
                    .collect::<Result<Vec<_>, _>>()?;
                if args.is_empty() {
                    return Err(err(
                        *pos,
                        SmtErrorKind::Syntax(format!("`{head}` needs arguments")),
                    ));
                }
                match head.as_str() {
                    "+" => Ok(args
                        .iter()
                        .fold(Polynomial::zero(n), |acc, a| &acc + a)),
                    "-" if args.len() == 1 => Ok(-&args[0]),
                    "-" => Ok(args[1..].iter().fold(args[0].clone(), |acc, a| &acc - a)),
                    "*" => {
                        let mut acc = Polynomial::one(n);
                        for a in &args {
                            if acc.num_monomials().saturating_mul(a.num_monomials())
                                > crate::poly::MAX_PARSED_TERMS
                            {
                                return Err(err(*pos, SmtErrorKind::TooLarge));
                            }
                            acc = &acc * a;
                        }
                        Ok(acc)
                    }
                    "/" => {
                        let mut acc = args[0].clone();
                        for d in &args[1..] {
                            match d.leading_term() {
                                Some((_, c)) if d.is_constant() => {
                                    acc = acc.scale(&(Rational::one() / c));
                                }
                                _ => {
                                    return Err(err(
                                        *hpos,
                                        SmtErrorKind::UnsupportedOperator("/".into()),
                                    ))
                                }
                            }
                        }
                        Ok(acc)
                    }
                    _ => Err(err(*hpos, SmtErrorKind::UnsupportedOperator(head.clone()))),
                }
            }
        }
    }
}

/// Reads a script and returns the set of distinct polynomials of its atoms, in
/// order of first occurrence. The variables are the declared real or integer
/// constants, in declaration order.
pub fn parse_problem_smt(text: &str) -> Result<ProblemInstance, SmtError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, column: 1 },
    };
    let script = reader.read_all()?;
    let mut ex = Extractor {
        names: Vec::new(),
        sorts: Vec::new(),
        assertions: Vec::new(),
    };
    for cmd in &script {
        ex.command(cmd)?;
    }
    let real_vars: Vec<String> = ex
        .names
        .iter()
        .zip(&ex.sorts)
        .filter(|(_, s)| **s == Sort::Real)
        .map(|(n, _)| n.clone())
        .collect();
    let end = reader.pos;
    for a in &ex.assertions {
        reject_binders(a)?;
    }
    let mut collector = AtomCollector {
        ex: &ex,
        real_vars: &real_vars,
        polys: Vec::new(),
    };
    for a in &ex.assertions {
        collector.boolean(a)?;
    }
    let polys = collector.polys;
    if polys.is_empty() || real_vars.is_empty() {
        return Err(err(end, SmtErrorKind::NoPolynomialAtoms));
    }
    let vars = VariableSet::new(sanitize_names(&real_vars))
        .map_err(|e| err(end, SmtErrorKind::Syntax(e.to_string())))?;
    debug_assert!(polys.iter().all(|p| !p.is_zero()));
    Ok(ProblemInstance::new(vars, polys).expect("atoms are nonzero and share the variable set"))
}

fn reject_binders(e: &SExpr) -> Result<(), SmtError> {
    if let SExpr::List(items, _) = e {
        if let Some(SExpr::Atom(h, pos)) = items.first() {
            if REJECTED.contains(&h.as_str()) {
                return Err(err(*pos, SmtErrorKind::UnsupportedOperator(h.clone())));
            }
        }
        for it in items {
            reject_binders(it)?;
        }
    }
    Ok(())
}

/// Maps SMT symbols to identifiers of the native grammar: characters outside
/// `[A-Za-z0-9_]` become `_`, a leading digit gets a `_` prefix, and clashes
/// get a numeric suffix.
fn sanitize_names(names: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(names.len());
    for name in names {
        let mut s: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
            s.insert(0, '_');
        }
        let base = s.clone();
        let mut k = 1;
        while out.contains(&s) || (s != *name && names.contains(&s)) {
            s = format!("{base}_{k}");
            k += 1;
        }
        out.push(s);
    }
    out
}
