//! The composed degree-feature framework.
//!
//! A feature is `g4 ∘ g3 ∘ g2 ∘ g1 ∘ h`, where `h` maps each monomial of each
//! polynomial to a degree quantity ([`BaseMap`]) and the `g_i` are one each of
//! max, sum, average and sign ([`ChainFunction`]). Max, sum and average may
//! aggregate over monomials within a polynomial (`m`), over polynomials (`p`),
//! over both at once (`pm`), or act as the identity (`0`). Sign is either
//! applied pointwise or the identity.
//!
//! [`enumerate_descriptors`] produces every combination of an index
//! distribution row, an ordering of the four classes and a base map. Many
//! combinations coincide; [`FeatureDescriptor::canonical`] reduces a descriptor
//! to the steps that actually run.

mod describe;
mod eval;
pub(crate) mod matrix;

use serde::{Deserialize, Serialize};

pub use describe::{describe, Description};
pub use eval::{evaluate_base, evaluate_builtin, evaluate_feature, BaseReading, ProblemTables};
pub use matrix::{evaluate_matrix, render_decimal, FeatureMatrix, MatrixError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseKind {
    /// `d_v`
    VariableDegree,
    /// `sgn(d_v) · Σ_{v'} d_{v'}`
    SignWeightedTotalDegree,
}

/// The map `h^{m,p}`. `var` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseMap {
    pub kind: BaseKind,
    pub var: usize,
}

impl BaseMap {
    /// The `2n` base maps, all `VariableDegree` first.
    pub fn all(nvars: usize) -> Vec<BaseMap> {
        [BaseKind::VariableDegree, BaseKind::SignWeightedTotalDegree]
            .into_iter()
            .flat_map(|kind| (0..nvars).map(move |var| BaseMap { kind, var }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionClass {
    Max,
    Av,
    Sum,
    Sgn,
}

impl FunctionClass {
    /// Column order of the index distribution table.
    pub const ALL: [FunctionClass; 4] = [
        FunctionClass::Max,
        FunctionClass::Av,
        FunctionClass::Sum,
        FunctionClass::Sgn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionClass::Max => "max",
            FunctionClass::Av => "av",
            FunctionClass::Sum => "sum",
            FunctionClass::Sgn => "sgn",
        }
    }
}

/// Index carried by a chain function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexSpec {
    /// Identity (`0`).
    #[serde(rename = "0")]
    Identity,
    #[serde(rename = "p")]
    P,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "pm")]
    PM,
    /// Sign applied pointwise (`1`).
    #[serde(rename = "1")]
    Applied,
}

impl IndexSpec {
    pub fn label(self) -> &'static str {
        match self {
            IndexSpec::Identity => "0",
            IndexSpec::P => "p",
            IndexSpec::M => "m",
            IndexSpec::PM => "pm",
            IndexSpec::Applied => "1",
        }
    }

    fn aggregates(self) -> bool {
        matches!(self, IndexSpec::P | IndexSpec::M | IndexSpec::PM)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainFunction {
    #[serde(rename = "cls")]
    pub class: FunctionClass,
    pub index: IndexSpec,
}

use IndexSpec::{Applied as ON, Identity as ID, M, P, PM};

/// Index distributions over the classes `(max, av, sum, sgn)`: which aggregating
/// classes take part and whether the sign is applied.
///
/// Row 9 is `(p, 0, m, 1)`, the sign-applied counterpart of row 3; a row with
/// a `p` index and no `m` index would not reduce to a scalar.
pub const INDEX_DISTRIBUTIONS: [[IndexSpec; 4]; 12] = [
    [PM, ID, ID, ID],
    [P, M, ID, ID],
    [P, ID, M, ID],
    [ID, PM, ID, ID],
    [ID, P, M, ID],
    [ID, ID, PM, ID],
    [PM, ID, ID, ON],
    [P, M, ID, ON],
    [P, ID, M, ON],
    [ID, PM, ID, ON],
    [ID, P, M, ON],
    [ID, ID, PM, ON],
];

/// A point of the enumeration: a base map and four chain functions, `chain[0]`
/// applied first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureDescriptor {
    pub serial: u32,
    pub base: BaseMap,
    pub chain: [ChainFunction; 4],
}

/// Scope of an aggregation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    /// Over the monomials of each polynomial.
    M,
    /// Over the polynomials.
    P,
    /// Over all monomials of all polynomials at once.
    MP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregator {
    Max,
    Sum,
    Av,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Sign,
    Aggregate(Aggregator, Scope),
}

/// The steps a descriptor actually executes, innermost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalFeature {
    pub base: BaseMap,
    pub steps: Vec<Step>,
}

impl FeatureDescriptor {
    /// Drops identities and binds the aggregation scopes by chain position: of
    /// two aggregating functions the earlier one runs over `m` and the later
    /// one over `p`, whatever indices the distribution row gave them. This keeps
    /// every descriptor well defined (monomial counts differ per polynomial, so
    /// `m` must be eliminated first).
    pub fn canonical(&self) -> CanonicalFeature {
        let n_aggregating = self.chain.iter().filter(|f| f.index.aggregates()).count();
        let mut seen = 0;
        let mut steps = Vec::with_capacity(3);
        for f in &self.chain {
            let agg = match f.class {
                FunctionClass::Max => Aggregator::Max,
                FunctionClass::Sum => Aggregator::Sum,
                FunctionClass::Av => Aggregator::Av,
                FunctionClass::Sgn => {
                    if f.index == IndexSpec::Applied {
                        steps.push(Step::Sign);
                    }
                    continue;
                }
            };
            match f.index {
                IndexSpec::PM => steps.push(Step::Aggregate(agg, Scope::MP)),
                IndexSpec::P | IndexSpec::M => {
                    let scope = if n_aggregating == 1 {
                        // a lone p- or m-index cannot occur in a valid row
                        Scope::MP
                    } else if seen == 0 {
                        Scope::M
                    } else {
                        Scope::P
                    };
                    seen += 1;
                    steps.push(Step::Aggregate(agg, scope));
                }
                _ => {}
            }
        }
        CanonicalFeature {
            base: self.base,
            steps,
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// Every descriptor for `nvars` variables, numbered from 1 in the order
/// distribution row, then class permutation, then base map.
pub fn enumerate_descriptors(nvars: usize) -> Vec<FeatureDescriptor> {
    let bases = BaseMap::all(nvars);
    let perms = permutations(4);
    let mut out = Vec::with_capacity(INDEX_DISTRIBUTIONS.len() * perms.len() * bases.len());
    let mut serial = 1;
    for row in &INDEX_DISTRIBUTIONS {
        for perm in &perms {
            // perm[i] is the class placed at chain position i
            let chain = std::array::from_fn(|i| ChainFunction {
                class: FunctionClass::ALL[perm[i]],
                index: row[perm[i]],
            });
            for &base in &bases {
                out.push(FeatureDescriptor {
                    serial,
                    base,
                    chain,
                });
                serial += 1;
            }
        }
    }
    out
}

/// Features outside the enumeration: the polynomial count and the maximum total
/// degree, which do not depend on a single variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuiltinFeature {
    PolynomialCount,
    MaxTotalDegree,
}

impl BuiltinFeature {
    pub const ALL: [BuiltinFeature; 2] =
        [BuiltinFeature::PolynomialCount, BuiltinFeature::MaxTotalDegree];

    pub fn formula(self) -> &'static str {
        match self {
            BuiltinFeature::PolynomialCount => "P",
            BuiltinFeature::MaxTotalDegree => "max_{m,p} (Σ_v' d_v')",
        }
    }
}

/// One column of a feature matrix: an enumerated descriptor or a built-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureSpec {
    Framework(FeatureDescriptor),
    Builtin { serial: u32, feature: BuiltinFeature },
}

impl FeatureSpec {
    pub fn serial(&self) -> u32 {
        match self {
            FeatureSpec::Framework(d) => d.serial,
            FeatureSpec::Builtin { serial, .. } => *serial,
        }
    }

    pub fn formula(&self) -> String {
        match self {
            FeatureSpec::Framework(d) => describe(d).formula,
            FeatureSpec::Builtin { feature, .. } => feature.formula().to_string(),
        }
    }
}

/// The enumeration, optionally followed by the built-ins numbered after it.
pub fn feature_specs(nvars: usize, with_builtins: bool) -> Vec<FeatureSpec> {
    let mut out: Vec<FeatureSpec> = enumerate_descriptors(nvars)
        .into_iter()
        .map(FeatureSpec::Framework)
        .collect();
    if with_builtins {
        let mut serial = out.len() as u32 + 1;
        for feature in BuiltinFeature::ALL {
            out.push(FeatureSpec::Builtin { serial, feature });
            serial += 1;
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct BaseJson {
    kind: String,
    v: usize,
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    serial: u32,
    base: Option<BaseJson>,
    chain: Vec<ChainFunction>,
    formula: String,
}

/// JSON array of `{serial, base: {kind, v}, chain: [{cls, index}], formula}`.
/// Built-ins carry `base: null` and an empty chain.
pub fn descriptors_to_json(specs: &[FeatureSpec]) -> String {
    let items: Vec<DescriptorJson> = specs
        .iter()
        .map(|s| match s {
            FeatureSpec::Framework(d) => DescriptorJson {
                serial: d.serial,
                base: Some(BaseJson {
                    kind: match d.base.kind {
                        BaseKind::VariableDegree => "VariableDegree".into(),
                        BaseKind::SignWeightedTotalDegree => "SignWeightedTotalDegree".into(),
                    },
                    v: d.base.var + 1,
                }),
                chain: d.chain.to_vec(),
                formula: describe(d).formula,
            },
            FeatureSpec::Builtin { serial, feature } => DescriptorJson {
                serial: *serial,
                base: None,
                chain: Vec::new(),
                formula: feature.formula().to_string(),
            },
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("descriptor list serializes")
}

/// Reads the descriptor list back as `(serial, formula)` pairs.
pub fn descriptor_formulas_from_json(text: &str) -> Result<Vec<(u32, String)>, serde_json::Error> {
    let items: Vec<DescriptorJson> = serde_json::from_str(text)?;
    Ok(items.into_iter().map(|d| (d.serial, d.formula)).collect())
}
