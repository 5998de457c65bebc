//! Serde model of a check manifest. Everything here is plain data; names are
//! resolved in `workspace`.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub charts: Vec<ChartSpec>,
    /// Named scalars, referenced from checks as `$name`.
    #[serde(default)]
    pub scalars: BTreeMap<String, ScalarSpec>,
    #[serde(default)]
    pub forms: BTreeMap<String, TensorSpec>,
    #[serde(default)]
    pub vectors: BTreeMap<String, TensorSpec>,
    /// Built in order; later entries may refer to earlier ones.
    #[serde(default)]
    pub structures: Vec<StructureSpec>,
    #[serde(default)]
    pub preq: Vec<PreqSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub name: String,
    pub coords: Vec<CoordSpec>,
    #[serde(default)]
    pub units: Vec<UnitSpec>,
}

#[derive(Debug, Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    #[default]
    Real,
    Positive,
    Nonnegative,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordSpec {
    pub name: String,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub periodic: bool,
}

/// `name = e^(rate * base)`, with `rate` a rational like `"1"` or `"-1/2"`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSpec {
    pub name: String,
    pub base: String,
    #[serde(default = "one")]
    pub rate: String,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSpec {
    pub chart: String,
    pub expr: String,
}

/// Coefficients against basis keys: `"dx^dy"` for forms, `"x^y"` for
/// multivectors. A 1-form or vector field may instead give `components`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub chart: String,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub terms: BTreeMap<String, String>,
    #[serde(default)]
    pub components: Option<Vec<String>>,
}

fn default_degree() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusSpec {
    pub coord: String,
    pub value: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub x: Vec<String>,
    pub xi: Vec<String>,
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub g: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSpec {
    GraphTwoForm {
        id: String,
        form: String,
        #[serde(default)]
        loci: Vec<LocusSpec>,
    },
    GraphBivector {
        id: String,
        bivector: String,
    },
    Jacobi {
        id: String,
        bivector: String,
        vector: String,
    },
    FormPair {
        id: String,
        omega: String,
        sigma: String,
    },
    FromDirac {
        id: String,
        of: String,
    },
    /// Raw generators; `e1` frames carry `f` and `g`.
    Frame {
        id: String,
        chart: String,
        #[serde(default)]
        e1: bool,
        gens: Vec<GenSpec>,
        #[serde(default)]
        loci: Vec<LocusSpec>,
    },
    /// A named structure from the built-in fixtures, e.g.
    /// `lebrun.lebrun_poisson`.
    Fixture {
        id: String,
        name: String,
        #[serde(default = "one_usize")]
        n: usize,
    },
}

fn one_usize() -> usize {
    1
}

impl StructureSpec {
    pub fn id(&self) -> &str {
        match self {
            StructureSpec::GraphTwoForm { id, .. }
            | StructureSpec::GraphBivector { id, .. }
            | StructureSpec::Jacobi { id, .. }
            | StructureSpec::FormPair { id, .. }
            | StructureSpec::FromDirac { id, .. }
            | StructureSpec::Frame { id, .. }
            | StructureSpec::Fixture { id, .. } => id,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    #[serde(default)]
    pub vector: Option<String>,
    #[serde(default)]
    pub form: Option<String>,
}

/// Either explicit data on a Dirac structure or a built-in fixture.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreqSpec {
    pub id: String,
    #[serde(default)]
    pub fixture: Option<String>,
    #[serde(default)]
    pub c: Option<i64>,
    #[serde(default)]
    pub base: Option<String>,
    #[serde(default)]
    pub omega: Option<String>,
    #[serde(default)]
    pub alpha_sigma: Option<String>,
    #[serde(default)]
    pub anchor: Option<AnchorSpec>,
    /// The cochain as values on the base frame generators.
    #[serde(default)]
    pub beta: Option<Vec<String>>,
    /// Integrality of `[Omega]` is never checked; this records the claim.
    #[serde(default)]
    pub integrality: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct CheckSpec {
    pub id: String,
    pub op: String,
    #[serde(flatten)]
    pub args: BTreeMap<String, Value>,
}
