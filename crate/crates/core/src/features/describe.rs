use super::{Aggregator, BaseKind, CanonicalFeature, FeatureDescriptor, Scope, Step};

/// Human-readable rendering of a descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    /// Compact formula, e.g. `av_{m,p} sgn(d_2)`.
    pub formula: String,
    /// Plain-language reading of the formula.
    pub gloss: String,
}

pub fn describe(d: &FeatureDescriptor) -> Description {
    let c = d.canonical();
    Description {
        formula: formula(&c),
        gloss: gloss(&c),
    }
}

fn scope_label(scope: Scope) -> &'static str {
    match scope {
        Scope::M => "m",
        Scope::P => "p",
        Scope::MP => "{m,p}",
    }
}

fn op_label(agg: Aggregator) -> &'static str {
    match agg {
        Aggregator::Max => "max",
        Aggregator::Sum => "Σ",
        Aggregator::Av => "av",
    }
}

pub(crate) fn formula(c: &CanonicalFeature) -> String {
    let v = c.base.var + 1;
    let mut expr = match c.base.kind {
        BaseKind::VariableDegree => format!("d_{v}"),
        BaseKind::SignWeightedTotalDegree => format!("sgn(d_{v})·(Σ_v' d_v')"),
    };
    for step in &c.steps {
        expr = match step {
            Step::Sign => format!("sgn({expr})"),
            Step::Aggregate(agg, scope) => {
                format!("{}_{} {expr}", op_label(*agg), scope_label(*scope))
            }
        };
    }
    expr
}

fn gloss(c: &CanonicalFeature) -> String {
    let v = c.base.var + 1;
    let mut text = match c.base.kind {
        BaseKind::VariableDegree => format!("the degree of x_{v} in a monomial"),
        BaseKind::SignWeightedTotalDegree => {
            format!("the total degree of a monomial if it contains x_{v}, otherwise 0")
        }
    };
    // sgn of a non-negative quantity reads as "whether it is positive"
    for step in &c.steps {
        text = match step {
            Step::Sign => format!("whether {text} is positive (1 or 0)"),
            Step::Aggregate(agg, scope) => {
                let what = match agg {
                    Aggregator::Max => "the maximum of",
                    Aggregator::Sum => "the sum of",
                    Aggregator::Av => "the mean of",
                };
                let over = match (agg, scope) {
                    (_, Scope::M) => "over the monomials of each polynomial",
                    (_, Scope::P) => "over the polynomials",
                    (Aggregator::Av, Scope::MP) => {
                        "over each polynomial's monomials, then averaged across polynomials"
                    }
                    (_, Scope::MP) => "over all monomials of all polynomials",
                };
                format!("{what} {text} {over}")
            }
        };
    }
    text
}
