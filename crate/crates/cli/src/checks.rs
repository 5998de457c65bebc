//! Binding of check arguments at load time and execution at run time.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use prequant::algebroid::{beta_from_pair, preq_residual, table_is_zero, upsilon};
use prequant::calculus::{KForm, KVector};
use prequant::dirac::{courant_bracket, Admissibility, Basic, DiracStructure, Integrability};
use prequant::djacobi::{ext_courant_bracket, reeb_solve, DiracJacobiStructure, DjAdmissibility, Extension};
use prequant::lebrun::*;
use prequant::linalg;
use prequant::linpair::{span_equal, E1Section, SpanVerdict};
use prequant::preq::*;
use prequant::sample::Sampler;
use prequant::scalar::vars::TAU;
use prequant::scalar::{ChartRef, Point, Scalar, VarId};
use prequant::Error;
use serde_json::Value;

use crate::manifest::CheckSpec;
use crate::report::{CheckResult, Verdict};
use crate::workspace::{invalid, LoadError, Structure, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmExpect {
    Admissible,
    NotCertified,
    NotAdmissible,
}

#[derive(Clone, Debug)]
pub enum Against {
    ContactGraph,
    PoissonLift(KVector),
    Structure(Structure),
}

/// How randomized representation checks draw their functions: `g` is
/// `g_factor` times a polynomial in `g_vars`, a section is
/// `h_factor * p + h_offset`.
#[derive(Clone, Debug)]
pub struct Sampling {
    pub g_vars: Vec<VarId>,
    pub g_factor: Scalar,
    pub h_factor: Scalar,
    pub h_offset: Scalar,
}

#[derive(Clone, Debug)]
pub enum Bound {
    Integrable { s: Structure, expect: bool },
    CharRank { d: DiracStructure, point: Point, expect: usize },
    Admissible { s: Structure, f: Scalar, expect: AdmExpect, factor: Option<String> },
    Basic { s: Structure, f: Scalar, expect: bool },
    Bracket { s: Structure, f: Scalar, g: Scalar, expect: Scalar },
    SpanEqual { a: Structure, b: Structure, expect: bool },
    JacobiRandom { s: Structure, count: usize, degree: u32 },
    Reeb { form: KForm, expect: Option<KVector> },
    Hamiltonian { s: Structure, f: Scalar, expect: KVector },
    Diracization { s: DiracJacobiStructure, sigma: KForm },
    EmbeddingRandom { chart: ChartRef, count: usize },
    EtHomRandom { s: DiracJacobiStructure, count: usize },
    LbarIntegrable { p: PreqData },
    LbarSpanEqual { p: PreqData, against: Against },
    LbarTangent { p: PreqData, expect: Vec<KVector> },
    PreqHamiltonian { p: PreqData, f: Scalar, expect: KVector },
    ForwardWitnesses { p: PreqData },
    Leaf { p: PreqData, point: Point, expect: String, lcp: Option<(KForm, KForm)> },
    Residual { p: PreqData },
    Curvature { p: PreqData },
    LconnRepRandom { p: PreqData, count: usize, unchecked: bool, sampling: Sampling },
    LconnDomain { p: PreqData, h: Scalar, expect: bool },
    RepLawRandom { p: PreqData, count: usize, grades: Vec<i64>, sampling: Sampling },
    GradeAdditivity { p: PreqData, grades: Vec<i64> },
    BfieldShift { p: PreqData, gamma: KForm },
    Lebrun { variant: String, n: usize },
}

pub struct BoundCheck {
    pub id: String,
    pub op: String,
    /// Position in the manifest; mixes into the seed so that `--only` does
    /// not change sampled inputs.
    pub index: usize,
    pub bound: Bound,
}

struct Args<'a> {
    ws: &'a Workspace,
    at: String,
    map: &'a BTreeMap<String, Value>,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Args<'a> {
    fn raw(&self, k: &str) -> Option<&'a Value> {
        self.used.borrow_mut().insert(k.to_string());
        self.map.get(k)
    }

    fn opt_str(&self, k: &str) -> Result<Option<&'a str>, LoadError> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(invalid(&self.at, format!("`{k}` must be a string, got {other}"))),
        }
    }

    fn str(&self, k: &str) -> Result<&'a str, LoadError> {
        self.opt_str(k)?.ok_or_else(|| invalid(&self.at, format!("missing `{k}`")))
    }

    fn bool_or(&self, k: &str, d: bool) -> Result<bool, LoadError> {
        match self.raw(k) {
            None => Ok(d),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(invalid(&self.at, format!("`{k}` must be a boolean, got {other}"))),
        }
    }

    fn uint_or(&self, k: &str, d: u64) -> Result<u64, LoadError> {
        match self.raw(k) {
            None => Ok(d),
            Some(v) => v.as_u64().ok_or_else(|| invalid(&self.at, format!("`{k}` must be a nonnegative integer"))),
        }
    }

    fn ints(&self, k: &str, d: &[i64]) -> Result<Vec<i64>, LoadError> {
        match self.raw(k) {
            None => Ok(d.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| v.as_i64().ok_or_else(|| invalid(&self.at, format!("`{k}` must list integers"))))
                .collect(),
            Some(_) => Err(invalid(&self.at, format!("`{k}` must be an array"))),
        }
    }

    fn structure(&self, k: &str) -> Result<Structure, LoadError> {
        self.ws.structure(self.str(k)?, &self.at).cloned()
    }

    fn dirac(&self, k: &str) -> Result<DiracStructure, LoadError> {
        match self.structure(k)? {
            Structure::Dirac(d) => Ok(d),
            Structure::Dj(_) => Err(invalid(&self.at, format!("`{k}` must be a Dirac structure"))),
        }
    }

    fn dj(&self, k: &str) -> Result<DiracJacobiStructure, LoadError> {
        match self.structure(k)? {
            Structure::Dj(d) => Ok(d),
            Structure::Dirac(_) => Err(invalid(&self.at, format!("`{k}` must be a Dirac-Jacobi structure"))),
        }
    }

    fn preq(&self) -> Result<PreqData, LoadError> {
        Ok(self.ws.preq(self.str("preq")?, &self.at)?.data.clone())
    }

    fn scalar(&self, k: &str, c: &ChartRef) -> Result<Scalar, LoadError> {
        self.ws.scalar(self.str(k)?, c, &self.at)
    }

    fn scalar_or(&self, k: &str, c: &ChartRef, d: &str) -> Result<Scalar, LoadError> {
        self.ws.scalar(self.opt_str(k)?.unwrap_or(d), c, &self.at)
    }

    fn form(&self, k: &str) -> Result<KForm, LoadError> {
        self.ws.form(self.str(k)?, &self.at).cloned()
    }

    fn vector(&self, k: &str) -> Result<KVector, LoadError> {
        self.ws.vector(self.str(k)?, &self.at).cloned()
    }

    fn point(&self, c: &ChartRef) -> Result<Point, LoadError> {
        let m: BTreeMap<String, String> = match self.raw("point") {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| invalid(&self.at, format!("`point` must map coordinates to rationals: {e}")))?,
            None => return Err(invalid(&self.at, "missing `point`")),
        };
        self.ws.point(&m, c, &self.at)
    }

    /// Vectors on `c` given as component lists.
    fn vectors_on(&self, k: &str, c: &ChartRef) -> Result<Vec<KVector>, LoadError> {
        let rows: Vec<Vec<String>> = match self.raw(k) {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| invalid(&self.at, format!("`{k}` must be a list of component lists: {e}")))?,
            None => return Err(invalid(&self.at, format!("missing `{k}`"))),
        };
        rows.iter()
            .map(|r| {
                if r.len() != c.dim() {
                    return Err(invalid(&self.at, format!("`{k}` rows need {} components", c.dim())));
                }
                let comps = r.iter().map(|s| self.ws.scalar(s, c, &self.at)).collect::<Result<_, _>>()?;
                Ok(KVector::vector(c, comps))
            })
            .collect()
    }

    fn sampling(&self, c: &ChartRef) -> Result<Sampling, LoadError> {
        let g_vars = match self.raw("g_coords") {
            None => c.coords().iter().filter(|k| !k.periodic).map(|k| k.var).collect(),
            Some(v) => {
                let names: Vec<String> = serde_json::from_value(v.clone())
                    .map_err(|e| invalid(&self.at, format!("`g_coords` must list coordinate names: {e}")))?;
                names
                    .iter()
                    .map(|n| {
                        c.index_of(n).map(|i| c.var(i)).ok_or_else(|| LoadError::UnknownReference {
                            kind: "coordinate",
                            name: n.clone(),
                            at: self.at.clone(),
                        })
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(Sampling {
            g_vars,
            g_factor: self.scalar_or("g_factor", c, "1")?,
            h_factor: self.scalar_or("h_factor", c, "1")?,
            h_offset: self.scalar_or("h_offset", c, "0")?,
        })
    }

    fn finish(&self) -> Result<(), LoadError> {
        let used = self.used.borrow();
        match self.map.keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(invalid(&self.at, format!("unexpected argument `{k}`"))),
            None => Ok(()),
        }
    }
}

fn expect_bool(a: &Args, d: bool) -> Result<bool, LoadError> {
    a.bool_or("expect", d)
}

pub fn bind(ws: &Workspace, spec: &CheckSpec, index: usize) -> Result<BoundCheck, LoadError> {
    let a = Args { ws, at: format!("check `{}`", spec.id), map: &spec.args, used: RefCell::new(BTreeSet::new()) };
    let bound = match spec.op.as_str() {
        "integrable" => Bound::Integrable { s: a.structure("structure")?, expect: expect_bool(&a, true)? },
        "char_rank" => {
            let d = a.dirac("structure")?;
            let point = a.point(d.chart())?;
            Bound::CharRank { d, point, expect: a.uint_or("expect", 0)? as usize }
        }
        "admissible" => {
            let s = a.structure("structure")?;
            let f = a.scalar("f", s.chart())?;
            let expect = match a.str("expect")? {
                "admissible" => AdmExpect::Admissible,
                "not_certified" => AdmExpect::NotCertified,
                "not_admissible" => AdmExpect::NotAdmissible,
                other => return Err(invalid(&a.at, format!("unknown expectation `{other}`"))),
            };
            Bound::Admissible { s, f, expect, factor: a.opt_str("factor")?.map(str::to_string) }
        }
        "basic" => {
            let s = a.structure("structure")?;
            let f = a.scalar("f", s.chart())?;
            Bound::Basic { s, f, expect: expect_bool(&a, true)? }
        }
        "bracket" => {
            let s = a.structure("structure")?;
            let c = s.chart().clone();
            Bound::Bracket { f: a.scalar("f", &c)?, g: a.scalar("g", &c)?, expect: a.scalar("expect", &c)?, s }
        }
        "span_equal" => Bound::SpanEqual { a: a.structure("a")?, b: a.structure("b")?, expect: expect_bool(&a, true)? },
        "jacobi_random" => Bound::JacobiRandom {
            s: a.structure("structure")?,
            count: a.uint_or("count", 25)? as usize,
            degree: a.uint_or("degree", 3)? as u32,
        },
        "reeb" => {
            let form = a.form("form")?;
            let expect = match a.str("expect")? {
                "not_contact" => None,
                name => Some(ws.vector(name, &a.at)?.clone()),
            };
            Bound::Reeb { form, expect }
        }
        "hamiltonian" => {
            let s = a.structure("structure")?;
            let f = a.scalar("f", s.chart())?;
            Bound::Hamiltonian { s, f, expect: a.vector("expect")? }
        }
        "diracization" => Bound::Diracization { s: a.dj("structure")?, sigma: a.form("sigma")? },
        "embedding_random" => {
            let chart = ws.chart(a.str("chart")?, &a.at)?.clone();
            Bound::EmbeddingRandom { chart, count: a.uint_or("count", 5)? as usize }
        }
        "et_homomorphism_random" => Bound::EtHomRandom { s: a.dj("structure")?, count: a.uint_or("count", 5)? as usize },
        "lbar_integrable" => Bound::LbarIntegrable { p: a.preq()? },
        "lbar_span_equal" => {
            let p = a.preq()?;
            let against = match a.str("against")? {
                "contact_graph" => Against::ContactGraph,
                "poisson_lift" => Against::PoissonLift(a.vector("bivector")?),
                name => Against::Structure(ws.structure(name, &a.at)?.clone()),
            };
            Bound::LbarSpanEqual { p, against }
        }
        "lbar_tangent" => {
            let p = a.preq()?;
            let expect = a.vectors_on("expect", &p.q_chart().clone())?;
            Bound::LbarTangent { p, expect }
        }
        "preq_hamiltonian" => {
            let p = a.preq()?;
            let f = a.scalar("f", &p.base().chart().clone())?;
            let q = p.q_chart().clone();
            let expect = match a.raw("expect") {
                Some(Value::String(z)) if z == "zero" => KVector::zero(&q, 1),
                _ => {
                    let v = a.vectors_on("expect", &q)?;
                    if v.len() != 1 {
                        return Err(invalid(&a.at, "`expect` must hold one vector or \"zero\""));
                    }
                    v[0].clone()
                }
            };
            Bound::PreqHamiltonian { p, f, expect }
        }
        "forward_witnesses" => Bound::ForwardWitnesses { p: a.preq()? },
        "leaf" => {
            let p = a.preq()?;
            let point = a.point(&p.base().chart().clone())?;
            let expect = a.str("expect")?.to_string();
            if expect != "precontact" && expect != "lcp" {
                return Err(invalid(&a.at, "`expect` is `precontact` or `lcp`"));
            }
            let lcp = match (a.opt_str("gamma")?, a.opt_str("omega_l")?) {
                (Some(g), Some(o)) => Some((ws.form(g, &a.at)?.clone(), ws.form(o, &a.at)?.clone())),
                (None, None) => None,
                _ => return Err(invalid(&a.at, "`gamma` and `omega_l` go together")),
            };
            Bound::Leaf { p, point, expect, lcp }
        }
        "residual" => Bound::Residual { p: a.preq()? },
        "curvature" => Bound::Curvature { p: a.preq()? },
        "lconn_rep_random" => {
            let p = a.preq()?;
            let sampling = a.sampling(&p.base().chart().clone())?;
            Bound::LconnRepRandom {
                count: a.uint_or("count", 5)? as usize,
                unchecked: a.bool_or("unchecked", false)?,
                sampling,
                p,
            }
        }
        "lconn_domain" => {
            let p = a.preq()?;
            let h = a.scalar("h", &p.base().chart().clone())?;
            Bound::LconnDomain { p, h, expect: expect_bool(&a, true)? }
        }
        "rep_law_random" => {
            let p = a.preq()?;
            let sampling = a.sampling(&p.base().chart().clone())?;
            Bound::RepLawRandom {
                count: a.uint_or("count", 3)? as usize,
                grades: a.ints("grades", &[-2, -1, 0, 1, 2])?,
                sampling,
                p,
            }
        }
        "grade_additivity" => Bound::GradeAdditivity { p: a.preq()?, grades: a.ints("grades", &[-2, -1, 0, 1, 2])? },
        "bfield_shift" => Bound::BfieldShift { p: a.preq()?, gamma: a.form("gamma")? },
        "lebrun" => {
            let variant = a.str("variant")?.to_string();
            const KNOWN: [&str; 9] = [
                "overlap",
                "residuals",
                "linearization",
                "jacobi_pair",
                "pinch",
                "conformal_pinch",
                "contact",
                "boundary",
                "symplectization",
            ];
            if !KNOWN.contains(&variant.as_str()) {
                return Err(invalid(&a.at, format!("unknown lebrun variant `{variant}`")));
            }
            Bound::Lebrun { variant, n: a.uint_or("n", 1)? as usize }
        }
        other => return Err(invalid(&a.at, format!("unknown op `{other}`"))),
    };
    a.finish()?;
    Ok(BoundCheck { id: spec.id.clone(), op: spec.op.clone(), index, bound })
}

struct Outcome {
    verdict: Verdict,
    detail: String,
    witness: Vec<String>,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { verdict: Verdict::Pass, detail: detail.into(), witness: vec![] }
}

fn fail(detail: impl Into<String>, witness: Vec<String>) -> Outcome {
    Outcome { verdict: Verdict::Fail, detail: detail.into(), witness }
}

fn verdict(ok: bool, detail: impl Into<String>, witness: Vec<String>) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail, witness)
    }
}

type R = prequant::Result<Outcome>;

pub fn run(c: &BoundCheck, seed: u64, timing: bool) -> CheckResult {
    let start = Instant::now();
    let mut smp = Sampler::new(seed.wrapping_add(c.index as u64));
    let out = exec(&c.bound, &mut smp).unwrap_or_else(|e| {
        let v = match e {
            Error::RankNotCertified(_) | Error::DenominatorNotCertified(_) => Verdict::NoCertificate,
            _ => Verdict::Fail,
        };
        Outcome { verdict: v, detail: format!("error: {e}"), witness: vec![] }
    });
    CheckResult {
        id: c.id.clone(),
        op: c.op.clone(),
        verdict: out.verdict,
        detail: out.detail,
        witness: out.witness,
        timing_ms: timing.then(|| start.elapsed().as_millis()),
    }
}

fn integrability(s: &Structure) -> prequant::Result<Integrability> {
    match s {
        Structure::Dirac(d) => d.integrability(),
        Structure::Dj(d) => d.integrability(),
    }
}

fn span(a: &Structure, b: &Structure) -> prequant::Result<Option<SpanVerdict>> {
    Ok(match (a, b) {
        (Structure::Dirac(x), Structure::Dirac(y)) => Some(span_equal(x.frame(), y.frame())?),
        (Structure::Dj(x), Structure::Dj(y)) => Some(span_equal(x.frame(), y.frame())?),
        _ => None,
    })
}

fn span_witness(v: &SpanVerdict) -> Vec<String> {
    v.witness.map(|(side, i)| vec![format!("generator {i} of {} is not produced", ["a", "b"][side])]).unwrap_or_default()
}

fn sample_g(smp: &mut Sampler, s: &Sampling) -> Scalar {
    &s.g_factor * &smp.poly_in(&s.g_vars, 2, 3)
}

fn sample_h(smp: &mut Sampler, c: &ChartRef, s: &Sampling) -> Scalar {
    &(&s.h_factor * &smp.poly(c, 3, 4)) + &s.h_offset
}

/// `Lbar` on a chart carrying `chi = e^theta`, where `E` acts by 1.
fn lbar_with_unit(d: &PreqData) -> prequant::Result<(DiracJacobiStructure, Scalar)> {
    let q = d.q_chart();
    let theta = q.coord_name(q.dim() - 1).to_string();
    let chi = q.fresh_name("chi");
    let qu = q.extend(&format!("{}_chi", q.name)).unit(&chi, &theta, 1, 1).build()?;
    let gens = build_lbar(d)?
        .frame()
        .gens()
        .iter()
        .map(|g| E1Section::new(g.x.rechart(&qu)?, g.f.clone(), g.xi.rechart(&qu)?, g.g.clone()))
        .collect::<prequant::Result<Vec<_>>>()?;
    let w = Scalar::var(qu.unit_var(&chi).expect("unit just added"));
    Ok((DiracJacobiStructure::from_gens(&qu, gens)?, w))
}

fn exec(b: &Bound, smp: &mut Sampler) -> R {
    Ok(match b {
        Bound::Integrable { s, expect } => match integrability(s)? {
            Integrability::Pass => verdict(*expect, "integrable", vec![]),
            Integrability::Fail { i, j, k, value } => verdict(
                !*expect,
                "not integrable",
                vec![format!("<[e{i}, e{j}], e{k}>_+ = {value}")],
            ),
        },
        Bound::CharRank { d, point, expect } => {
            let k = d.char_dist_at_point(point)?;
            let w = k.iter().map(|v| v.to_string()).collect();
            verdict(k.len() == *expect, format!("rank {} at {point}", k.len()), w)
        }
        Bound::Admissible { s, f, expect, factor } => {
            let (got, fac, wit) = match s {
                Structure::Dirac(d) => match d.admissible_solve(f) {
                    Ok(Admissibility::Admissible(x)) => (AdmExpect::Admissible, None, vec![format!("X = {x}")]),
                    Ok(Admissibility::NotCertified { x, factor, witness }) => (
                        AdmExpect::NotCertified,
                        Some(factor.clone()),
                        vec![format!("X = {x}"), format!("denominator {factor}, vanishing at {}", opt_point(&witness))],
                    ),
                    Err(Error::NoSolutionOverFractionField) => (AdmExpect::NotAdmissible, None, vec![]),
                    Err(e) => return Err(e),
                },
                Structure::Dj(d) => match d.admissible_solve(f) {
                    Ok(DjAdmissibility::Admissible(p)) => {
                        (AdmExpect::Admissible, None, vec![format!("X = {}, phi = {}", p.x, p.phi)])
                    }
                    Ok(DjAdmissibility::NotCertified { pair, factor, witness }) => (
                        AdmExpect::NotCertified,
                        Some(factor.clone()),
                        vec![format!("X = {}, phi = {}", pair.x, pair.phi), format!("denominator {factor}, vanishing at {}", opt_point(&witness))],
                    ),
                    Err(Error::NoSolutionOverFractionField) => (AdmExpect::NotAdmissible, None, vec![]),
                    Err(e) => return Err(e),
                },
            };
            let ok = got == *expect && (factor.is_none() || factor == &fac);
            let v = if !ok && got == AdmExpect::NotCertified && *expect == AdmExpect::Admissible {
                Verdict::NoCertificate
            } else if ok {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Outcome { verdict: v, detail: format!("{got:?}"), witness: wit }
        }
        Bound::Basic { s, f, expect } => {
            let r = match s {
                Structure::Dirac(d) => d.is_basic(f)?,
                Structure::Dj(d) => d.is_basic(f)?,
            };
            match r {
                Basic::Basic => verdict(*expect, "basic", vec![]),
                Basic::NotBasic { witness, detail } => {
                    verdict(!*expect, "not basic", vec![detail, format!("at {}", opt_point(&witness))])
                }
            }
        }
        Bound::Bracket { s, f, g, expect } => {
            let v = match s {
                Structure::Dirac(d) => d.adm_bracket(f, g)?,
                Structure::Dj(d) => d.bracket(f, g)?,
            };
            verdict(&v == expect, format!("{{f, g}} = {v}"), vec![format!("expected {expect}")])
        }
        Bound::SpanEqual { a, b, expect } => match span(a, b)? {
            Some(v) => verdict(v.equal == *expect, if v.equal { "equal spans" } else { "different spans" }, span_witness(&v)),
            None => verdict(!*expect, "structures of different kinds", vec![]),
        },
        Bound::JacobiRandom { s, count, degree } => {
            let c = s.chart().clone();
            for k in 0..*count {
                let (f, g, h) = (smp.poly(&c, *degree, 4), smp.poly(&c, *degree, 4), smp.poly(&c, *degree, 4));
                let r = match s {
                    Structure::Dirac(d) => d.jacobi_residual(&f, &g, &h)?,
                    Structure::Dj(d) => d.jacobi_residual(&f, &g, &h)?,
                };
                if !r.is_zero() {
                    return Ok(fail(format!("triple {k}"), vec![format!("f = {f}"), format!("g = {g}"), format!("h = {h}"), format!("residual {r}")]));
                }
            }
            pass(format!("{count} triples"))
        }
        Bound::Reeb { form, expect } => match (reeb_solve(form), expect) {
            (Ok(e), Some(want)) => verdict(&e == want, format!("E = {e}"), vec![format!("expected {want}")]),
            (Ok(e), None) => fail(format!("E = {e}, expected NotContact"), vec![]),
            (Err(Error::NotContact(_)), None) => pass("not contact"),
            (Err(Error::NotContact(w)), Some(_)) => fail("not contact", vec![w]),
            (Err(e), _) => return Err(e),
        },
        Bound::Hamiltonian { s, f, expect } => {
            let x = match s {
                Structure::Dirac(d) => d.hamiltonian(f)?,
                Structure::Dj(d) => d.hamiltonian(f)?.x,
            };
            verdict(&x == expect, format!("X = {x}"), vec![format!("expected {expect}")])
        }
        Bound::Diracization { s, sigma } => {
            let (dz, ext) = s.diracization()?;
            let esig = ext.lift_form(sigma).scale(&ext.et());
            let sym = DiracStructure::graph_two_form(&esig.d()?)?;
            let v = span_equal(dz.frame(), sym.frame())?;
            verdict(v.equal, "Diracization against graph d(e^t sigma)", span_witness(&v))
        }
        Bound::EmbeddingRandom { chart, count } => {
            let u = Extension::new(chart)?;
            for k in 0..*count {
                let (a, b) = (random_e1(smp, chart)?, random_e1(smp, chart)?);
                let lhs = u.embed(&ext_courant_bracket(&a, &b)?);
                let rhs = courant_bracket(&u.embed(&a), &u.embed(&b))?;
                if lhs != rhs {
                    return Ok(fail(format!("pair {k}"), vec![format!("a = {a}"), format!("b = {b}")]));
                }
            }
            pass(format!("{count} pairs"))
        }
        Bound::EtHomRandom { s, count } => {
            let (dz, ext) = s.diracization()?;
            let c = s.chart().clone();
            let et = ext.et();
            for k in 0..*count {
                let (f, g) = (smp.poly(&c, 2, 3), smp.poly(&c, 2, 3));
                let lhs = &et * &s.bracket(&f, &g)?;
                let rhs = dz.adm_bracket(&(&et * &f), &(&et * &g))?;
                if lhs != rhs {
                    return Ok(fail(format!("pair {k}"), vec![format!("f = {f}"), format!("g = {g}")]));
                }
            }
            pass(format!("{count} pairs"))
        }
        Bound::LbarIntegrable { p } => {
            let s = Structure::Dj(build_lbar(p)?);
            exec(&Bound::Integrable { s, expect: true }, smp)?
        }
        Bound::LbarSpanEqual { p, against } => {
            let lb = build_lbar(p)?;
            let other = match against {
                Against::ContactGraph => {
                    let sg = p.sigma();
                    DiracJacobiStructure::form_pair(&sg.d()?, &sg)?
                }
                Against::PoissonLift(l) => {
                    let (l, e) = poisson_lift(p, &l.rechart(p.base().chart())?)?;
                    DiracJacobiStructure::jacobi(&l, &e)?
                }
                Against::Structure(Structure::Dj(d)) => d.clone(),
                Against::Structure(Structure::Dirac(_)) => return Ok(fail("comparison needs a Dirac-Jacobi structure", vec![])),
            };
            let v = span_equal(lb.frame(), other.frame())?;
            verdict(v.equal, "Lbar against the comparison structure", span_witness(&v))
        }
        Bound::LbarTangent { p, expect } => {
            let got = tangent_distribution(&build_lbar(p)?);
            let m = |v: &[KVector]| -> linalg::Matrix { v.iter().map(|x| x.components()).collect() };
            let (mg, me) = (m(&got), m(expect));
            let mut both = mg.clone();
            both.extend(me.clone());
            let r = |x: &linalg::Matrix| if x.is_empty() { 0 } else { linalg::rref(x, None).rank() };
            let ok = r(&mg) == r(&me) && r(&both) == r(&mg);
            verdict(ok, format!("Lbar cap TQ rank {}", got.len()), got.iter().map(|v| v.to_string()).collect())
        }
        Bound::PreqHamiltonian { p, f, expect } => {
            let x = preq_hamiltonian(p, f)?;
            verdict(&x == expect, format!("X = {x}"), vec![format!("expected {expect}")])
        }
        Bound::ForwardWitnesses { p } => {
            let lb = build_lbar(p)?;
            let lift = DiracJacobiStructure::from_dirac(p.base())?;
            for (i, g) in lift.frame().gens().iter().enumerate() {
                if let ForwardWitness::Fail(r) = forward_image_witness(p, &lb, g)? {
                    return Ok(fail(format!("generator {i} has no witness"), vec![g.to_string(), r]));
                }
            }
            pass(format!("{} generators", lift.frame().len()))
        }
        Bound::Leaf { p, point, expect, lcp } => {
            let l = leaf_classify(p, point, lcp.as_ref().map(|(a, b)| (a, b)))?;
            let (kind, w) = match &l {
                Leaf::Precontact { form } => ("precontact", vec![format!("form {form}")]),
                Leaf::Lcp { data: Some((a, b)) } => ("lcp", vec![format!("omega_F = {a}"), format!("Omega_F = {b}")]),
                Leaf::Lcp { data: None } => ("lcp", vec![]),
            };
            verdict(kind == expect, kind, w)
        }
        Bound::Residual { p } => {
            let b = beta_from_pair(p.base(), p.pair())?;
            let r = preq_residual(p.base(), p.omega(), &b)?;
            verdict(table_is_zero(&r), "rho* Omega - Upsilon - d_L beta", vec![])
        }
        Bound::Curvature { p } => {
            let dc = lconn(p);
            let up = upsilon(p.base())?;
            let probe = smp.nonzero_poly(p.base().chart(), 2, 3);
            let n = p.base().frame().len();
            for i in 0..n {
                for j in 0..n {
                    let r = dc.curvature(i, j, &probe)?;
                    let want = &Scalar::tau() * &up[i][j];
                    if r != want {
                        return Ok(fail(format!("R_D(e{i}, e{j}) = {r}"), vec![format!("tau Upsilon = {want}")]));
                    }
                }
            }
            pass(format!("{} frame pairs", n * n))
        }
        Bound::LconnRepRandom { p, count, unchecked, sampling } => {
            let dc = lconn(p);
            let c = p.base().chart().clone();
            for k in 0..*count {
                let g = sample_g(smp, sampling);
                let h = sample_h(smp, &c, sampling);
                let got = if *unchecked {
                    GradedFunction::single(-1, dc.rep_unchecked(&g, &h)?)
                } else {
                    lconn_rep(&dc, &g, &GradedFunction::single(-1, h.clone()))?
                };
                let want = rep_apply(p, &g, &GradedFunction::single(-1, h.clone()))?;
                if got != want {
                    return Ok(fail(format!("sample {k}"), vec![format!("g = {g}"), format!("h = {h}")]));
                }
            }
            pass(format!("{count} sections{}", if *unchecked { ", domain check skipped" } else { "" }))
        }
        Bound::LconnDomain { p, h, expect } => {
            let d = lconn(p).domain_defect(h)?;
            verdict(d.is_none() == *expect, if d.is_none() { "in the polarized domain" } else { "outside the polarized domain" }, d.into_iter().collect())
        }
        Bound::RepLawRandom { p, count, grades, sampling } => {
            let c = p.base().chart().clone();
            for k in 0..*count {
                let (f, g) = (sample_g(smp, sampling), sample_g(smp, sampling));
                let mut phi = GradedFunction::default();
                for &n in grades {
                    phi.0.insert(n, sample_h(smp, &c, sampling));
                }
                let d = rep_commutator_defect(p, &f, &g, &phi)?;
                if !d.is_zero() {
                    return Ok(fail(format!("sample {k}"), vec![format!("f = {f}"), format!("g = {g}")]));
                }
                for &n in grades {
                    let out = rep_apply(p, &f, &GradedFunction::single(n, phi.get(n)))?;
                    if out.grades().iter().any(|&m| m != n) {
                        return Ok(fail(format!("grade {n} not preserved"), vec![]));
                    }
                }
            }
            pass(format!("{count} samples over grades {grades:?}"))
        }
        Bound::GradeAdditivity { p, grades } => {
            let (lb, chi) = lbar_with_unit(p)?;
            let cv = *chi.vars().iter().next().expect("unit");
            let c = p.base().chart().clone();
            let tau1 = [(TAU, Scalar::one())].into();
            for &n in grades {
                for &m in grades {
                    let (h, k) = (smp.poly(&c, 2, 3), smp.poly(&c, 2, 3));
                    let (w, v) = graded_bracket(p, (n, &h), (m, &k))?;
                    let direct = lb.basic_bracket(&(&h * &chi.pow(n as i32)?), &(&k * &chi.pow(m as i32)?))?;
                    let coeff = direct.checked_div(&chi.pow((n + m) as i32)?)?;
                    if w != n + m || coeff.depends_on(cv) || coeff != v.subst(&tau1)? {
                        return Ok(fail(format!("grades ({n}, {m})"), vec![format!("h = {h}"), format!("k = {k}")]));
                    }
                }
            }
            pass(format!("grades {grades:?}"))
        }
        Bound::BfieldShift { p, gamma } => {
            let lb = build_lbar(p)?;
            let shifted = build_lbar(&p.shifted(gamma, true)?)?;
            let v42 = span_equal(lb.frame(), shifted.frame())?;
            if !v42.equal {
                return Ok(fail("shifted pair gives a different Lbar", span_witness(&v42)));
            }
            if !gamma.is_closed()? {
                return Ok(pass("shift invariance (gamma not closed, gauge step skipped)"));
            }
            let moved = build_lbar(&p.shifted(gamma, false)?)?;
            let bf = ext_bfield(&lb, &p.pull_form(gamma))?;
            let v43 = span_equal(bf.frame(), moved.frame())?;
            verdict(v43.equal, "shift invariance and gauge transform", span_witness(&v43))
        }
        Bound::Lebrun { variant, n } => lebrun(variant, *n)?,
    })
}

fn opt_point(p: &Option<Point>) -> String {
    p.as_ref().map_or_else(|| "no rational witness".to_string(), |p| p.to_string())
}

fn random_e1(smp: &mut Sampler, c: &ChartRef) -> prequant::Result<E1Section> {
    let n = c.dim();
    let x = KVector::vector(c, (0..n).map(|_| smp.poly(c, 2, 2)).collect());
    let xi = KForm::one_form(c, (0..n).map(|_| smp.poly(c, 2, 2)).collect());
    E1Section::new(x, smp.poly(c, 2, 2), xi, smp.poly(c, 2, 2))
}

fn lebrun(variant: &str, n: usize) -> R {
    let f = LebrunFamily::new(n)?;
    Ok(match variant {
        "overlap" => {
            let g = f.glued_dirac()?;
            let both = g.s_side.integrability()?.passed() && g.r_side.integrability()?.passed();
            verdict(
                g.overlap.equal && both,
                "transport of graph d(s sigma) matches graph(Lambda); both ends integrable",
                vec![format!(
                    "bare s = 1/r: graph(Lambda) {}, graph(-Lambda) {}",
                    g.bare.equal, g.bare_negated.equal
                )],
            )
        }
        "residuals" => {
            for d in [f.preq_data_s()?, f.preq_data_r()?] {
                let b = beta_from_pair(d.base(), d.pair())?;
                if !table_is_zero(&preq_residual(d.base(), d.omega(), &b)?) {
                    return Ok(fail(format!("residual on {}", d.base().chart().name), vec![]));
                }
            }
            pass("residual zero on both charts")
        }
        "linearization" => {
            let c = &f.r_chart;
            let zero = prequant::dirac::int_point(c, &vec![0; c.dim()]);
            let lin = linearize_at_point(&f.lebrun_lambda(c)?, &zero)?;
            let r = Scalar::var(c.var(c.dim() - 1));
            let mut want = KVector::zero(c, 2);
            for i in 0..n {
                want = want.add(&KVector::partial(c, 1 + i).wedge(&KVector::partial(c, 1 + n + i))?)?;
            }
            let want = want.scale(&r);
            verdict(lin == want, format!("linearization {lin}"), vec![])
        }
        "jacobi_pair" => {
            let j = f.lebrun_jacobi()?;
            let lit = f.lebrun_jacobi_literal(j.lambda.chart())?;
            let dj = DiracJacobiStructure::jacobi(&j.lambda, &j.e)?;
            verdict(j == lit && dj.integrability()?.passed(), format!("Lambda = {}, E = {}", j.lambda, j.e), vec![])
        }
        "pinch" => {
            let p = pinch_transform(&f.lebrun_jacobi()?)?;
            let t = p.pair.e.chart().clone();
            let (xi, yi) = (t.dim() - 2, t.dim() - 1);
            let mut want = vec![Scalar::zero(); t.dim()];
            want[xi] = -&Scalar::var(t.var(yi));
            want[yi] = Scalar::var(t.var(xi));
            let ok = p.pair.e == KVector::vector(&t, want) && p.e_zero_locus.as_ref().is_some_and(|z| z.len() == 2);
            let ok = ok && DiracJacobiStructure::jacobi(&p.pair.lambda, &p.pair.e)?.integrability()?.passed();
            verdict(ok, format!("E' = {}, zero locus {}", p.pair.e, p.e_zero_locus.as_ref().map_or("none".to_string(), |z| z.join(", "))), vec![format!("Lambda' = {}", p.pair.lambda)])
        }
        "conformal_pinch" | "contact" => {
            let j = f.lebrun_jacobi()?;
            let r = Scalar::var(j.lambda.chart().var(j.lambda.chart().dim() - 2));
            let pc = pinch_transform(&conformal_transform(&j, &r)?)?;
            if variant == "conformal_pinch" {
                let dj = DiracJacobiStructure::jacobi(&pc.pair.lambda, &pc.pair.e)?;
                return Ok(verdict(dj.integrability()?.passed(), format!("E'' = {}", pc.pair.e), vec![format!("Lambda'' = {}", pc.pair.lambda)]));
            }
            let t = pc.pair.lambda.chart().clone();
            let pts: Vec<Point> = [((1, 1), (0, 1)), ((1, 1), (1, 1)), ((1, 2), (1, 2))]
                .iter()
                .map(|&((xn, xd), (yn, yd))| {
                    let mut p = prequant::dirac::int_point(&t, &vec![0; t.dim()]);
                    p.set(t.var(t.dim() - 2), num_rational::BigRational::new(xn.into(), xd.into()));
                    p.set(t.var(t.dim() - 1), num_rational::BigRational::new(yn.into(), yd.into()));
                    p
                })
                .collect();
            let samples = contact_check(&pc.pair, &pts)?;
            let w = samples.iter().map(|s| format!("{}: det {}", s.point, s.det)).collect();
            verdict(samples.iter().all(|s| s.nondegenerate), "contact at r = 1, 2, 1/2", w)
        }
        "boundary" => {
            let c = &f.s_chart;
            let s = Scalar::var(c.var(c.dim() - 1));
            let u = Scalar::var(c.var(0));
            let zero = prequant::dirac::int_point(c, &vec![0; c.dim()]);
            let rep = f.char_boundary_check(&[zero], &[&s * &u, u.clone()])?;
            let ok = rep.kernels.iter().all(|k| k.2) && rep.basic[0].1.is_basic() && !rep.basic[1].1.is_basic();
            let w = rep.kernels.iter().flat_map(|k| k.1.iter().map(|v| v.to_string())).collect();
            verdict(ok, "kernel at s = 0 is ker sigma_M; s u basic, u not", w)
        }
        "symplectization" => {
            let (sym, _) = f.symplectization()?;
            let (dz, _) = f.contact_graph()?.diracization()?;
            let v = span_equal(sym.frame(), dz.frame())?;
            verdict(v.equal, "symplectization = Diracization of the contact graph", span_witness(&v))
        }
        _ => unreachable!("variant checked at bind time"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::load;

    fn bound(text: &str) -> Result<BoundCheck, LoadError> {
        let (ws, specs) = load(text)?;
        bind(&ws, &specs[0], 0)
    }

    #[test]
    fn lebrun_variant_checked_at_bind() {
        let e = bound(r#"{ "checks": [{ "id": "a", "op": "lebrun", "variant": "twist" }] }"#).err().unwrap();
        assert!(e.to_string().contains("unknown lebrun variant"));
    }

    #[test]
    fn leaf_needs_both_forms() {
        let e = bound(
            r#"{ "preq": [{ "id": "P", "fixture": "symplectic_r2" }],
                 "forms": { "g": { "chart": "r2", "components": ["1", "0"] } },
                 "checks": [{ "id": "a", "op": "leaf", "preq": "P", "point": { "x": "0", "y": "0" }, "expect": "lcp", "gamma": "g" }] }"#,
        )
        .err()
        .unwrap();
        assert!(e.to_string().contains("go together"));
    }

    #[test]
    fn sampling_defaults_skip_periodic() {
        let b = bound(r#"{ "preq": [{ "id": "T", "fixture": "torus" }], "checks": [{ "id": "a", "op": "lconn_rep_random", "preq": "T" }] }"#).unwrap();
        match b.bound {
            Bound::LconnRepRandom { sampling, count, unchecked, .. } => {
                assert_eq!(sampling.g_vars.len(), 1);
                assert_eq!((count, unchecked), (5, false));
            }
            _ => panic!("wrong binding"),
        }
    }

    #[test]
    fn uncertified_denominator_is_no_certificate() {
        let b = bound(r#"{ "structures": [{ "kind": "fixture", "id": "L", "name": "example2_6" }],
                          "checks": [{ "id": "a", "op": "admissible", "structure": "L", "f": "x1^2", "expect": "admissible" }] }"#)
        .unwrap();
        assert_eq!(run(&b, 0, false).verdict, Verdict::NoCertificate);
    }
}
