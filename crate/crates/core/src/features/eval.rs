use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Aggregator, BaseKind, BaseMap, BuiltinFeature, CanonicalFeature, FeatureDescriptor, Scope, Step};
use crate::poly::{PolyError, Rational};
use crate::problem::ProblemInstance;

/// How the sign-weighted base map is read.
///
/// `Formula` evaluates `sgn(d_v) · Σ_{v'} d_{v'}`. `WorkedExample` evaluates
/// `d_v · Σ_{v'} d_{v'}`, which reproduces the products listed in the
/// framework's published worked example; it exists for comparison only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BaseReading {
    #[default]
    Formula,
    WorkedExample,
}

fn base_value(kind: BaseKind, exps: &[u32], var: usize, reading: BaseReading) -> u64 {
    let d = u64::from(exps[var]);
    match kind {
        BaseKind::VariableDegree => d,
        BaseKind::SignWeightedTotalDegree => {
            let total: u64 = exps.iter().map(|&e| u64::from(e)).sum();
            match reading {
                BaseReading::Formula => u64::from(d > 0) * total,
                BaseReading::WorkedExample => d * total,
            }
        }
    }
}

/// `h^{m,p}` for one monomial (`m`, `p` and the variable are 0-based).
pub fn evaluate_base(
    base: BaseMap,
    pr: &ProblemInstance,
    m: usize,
    p: usize,
) -> Result<Rational, PolyError> {
    if base.var >= pr.nvars() {
        return Err(PolyError::VariableOutOfRange {
            index: base.var,
            nvars: pr.nvars(),
        });
    }
    let poly = pr
        .polynomials()
        .get(p)
        .ok_or(PolyError::MonomialOutOfRange {
            index: p,
            len: pr.num_polynomials(),
        })?;
    let exps = poly
        .exponents()
        .nth(m)
        .ok_or(PolyError::MonomialOutOfRange {
            index: m,
            len: poly.num_monomials(),
        })?;
    Ok(int(base_value(base.kind, exps, base.var, BaseReading::Formula)))
}

fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Exponent vectors of a problem, grouped by polynomial, ready for repeated
/// feature evaluation.
#[derive(Debug, Clone)]
pub struct ProblemTables {
    nvars: usize,
    exponents: Vec<Vec<Vec<u32>>>,
    reading: BaseReading,
}

impl ProblemTables {
    pub fn new(pr: &ProblemInstance, reading: BaseReading) -> Self {
        ProblemTables {
            nvars: pr.nvars(),
            exponents: pr
                .polynomials()
                .iter()
                .map(|p| p.exponents().map(<[u32]>::to_vec).collect())
                .collect(),
            reading,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn evaluate(&self, feature: &CanonicalFeature) -> Rational {
        let mut state = State::Monomials(
            self.exponents
                .iter()
                .map(|poly| {
                    poly.iter()
                        .map(|e| int(base_value(feature.base.kind, e, feature.base.var, self.reading)))
                        .collect()
                })
                .collect(),
        );
        for step in &feature.steps {
            state = state.apply(*step);
        }
        match state {
            State::Scalar(v) => v,
            other => panic!("feature did not reduce to a scalar: {other:?}"),
        }
    }

    pub fn evaluate_builtin(&self, feature: BuiltinFeature) -> Rational {
        match feature {
            BuiltinFeature::PolynomialCount => int(self.exponents.len() as u64),
            BuiltinFeature::MaxTotalDegree => int(
                self.exponents
                    .iter()
                    .flatten()
                    .map(|e| e.iter().map(|&d| u64::from(d)).sum::<u64>())
                    .max()
                    .unwrap_or(0),
            ),
        }
    }
}

#[derive(Debug)]
enum State {
    Monomials(Vec<Vec<Rational>>),
    Polynomials(Vec<Rational>),
    Scalar(Rational),
}

fn sign(v: &Rational) -> Rational {
    if v.is_zero() {
        Rational::zero()
    } else if v.is_positive() {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn aggregate(agg: Aggregator, values: &[Rational]) -> Rational {
    match agg {
        Aggregator::Max => values.iter().max().cloned().expect("non-empty aggregation"),
        Aggregator::Sum => values.iter().sum(),
        Aggregator::Av => {
            let s: Rational = values.iter().sum();
            s / int(values.len() as u64)
        }
    }
}

impl State {
    fn apply(self, step: Step) -> State {
        match (step, self) {
            (Step::Sign, State::Monomials(v)) => {
                State::Monomials(v.iter().map(|p| p.iter().map(sign).collect()).collect())
            }
            (Step::Sign, State::Polynomials(v)) => State::Polynomials(v.iter().map(sign).collect()),
            (Step::Sign, State::Scalar(v)) => State::Scalar(sign(&v)),
            (Step::Aggregate(agg, Scope::M), State::Monomials(v)) => {
                State::Polynomials(v.iter().map(|p| aggregate(agg, p)).collect())
            }
            (Step::Aggregate(agg, Scope::P), State::Polynomials(v)) => {
                State::Scalar(aggregate(agg, &v))
            }
            (Step::Aggregate(agg, Scope::MP), State::Monomials(v)) => State::Scalar(match agg {
                Aggregator::Max | Aggregator::Sum => {
                    let flat: Vec<Rational> = v.into_iter().flatten().collect();
                    aggregate(agg, &flat)
                }
                // mean over polynomials of the per-polynomial means
                Aggregator::Av => {
                    let per_poly: Vec<Rational> =
                        v.iter().map(|p| aggregate(Aggregator::Av, p)).collect();
                    aggregate(Aggregator::Av, &per_poly)
                }
            }),
            (step, state) => panic!("step {step:?} does not apply to {state:?}"),
        }
    }
}

/// Evaluates a descriptor under the default base reading.
pub fn evaluate_feature(d: &FeatureDescriptor, pr: &ProblemInstance) -> Rational {
    ProblemTables::new(pr, BaseReading::Formula).evaluate(&d.canonical())
}

pub fn evaluate_builtin(feature: BuiltinFeature, pr: &ProblemInstance) -> Rational {
    ProblemTables::new(pr, BaseReading::Formula).evaluate_builtin(feature)
}
