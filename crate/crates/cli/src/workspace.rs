//! Resolution of a parsed manifest into engine objects.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use prequant::algebroid::{AnchorRep, LCochain1};
use prequant::calculus::{KForm, KVector};
use prequant::dirac::{DiracStructure, Locus};
use prequant::djacobi::DiracJacobiStructure;
use prequant::fixtures;
use prequant::lebrun::LebrunFamily;
use prequant::linpair::{validate_frame, CouSection, E1Section};
use prequant::preq::PreqData;
use prequant::scalar::{parse_scalar, Chart, ChartRef, Domain, Point, Scalar};

use crate::manifest::*;

/// Why a manifest could not be loaded. All of these exit with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadError {
    Parse { line: usize, column: usize, msg: String },
    UnknownReference { kind: &'static str, name: String, at: String },
    Validation { at: String, msg: String },
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Parse { line, column, msg } => write!(f, "parse error at line {line}, column {column}: {msg}"),
            LoadError::UnknownReference { kind, name, at } => write!(f, "unknown {kind} `{name}` in {at}"),
            LoadError::Validation { at, msg } => write!(f, "validation error in {at}: {msg}"),
        }
    }
}

impl std::error::Error for LoadError {}

pub(crate) fn invalid(at: &str, msg: impl fmt::Display) -> LoadError {
    LoadError::Validation { at: at.to_string(), msg: msg.to_string() }
}

#[derive(Clone, Debug)]
pub enum Structure {
    Dirac(DiracStructure),
    Dj(DiracJacobiStructure),
}

impl Structure {
    pub fn chart(&self) -> &ChartRef {
        match self {
            Structure::Dirac(d) => d.chart(),
            Structure::Dj(d) => d.chart(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreqEntry {
    pub data: PreqData,
    pub integrality: Option<String>,
}

#[derive(Debug, Default)]
pub struct Workspace {
    pub name: String,
    pub seed: u64,
    pub charts: BTreeMap<String, ChartRef>,
    pub scalars: BTreeMap<String, Scalar>,
    pub forms: BTreeMap<String, KForm>,
    pub vectors: BTreeMap<String, KVector>,
    pub structures: BTreeMap<String, Structure>,
    pub preqs: BTreeMap<String, PreqEntry>,
}

impl Workspace {
    pub fn chart(&self, name: &str, at: &str) -> Result<&ChartRef, LoadError> {
        self.charts.get(name).ok_or_else(|| unknown("chart", name, at))
    }

    pub fn structure(&self, name: &str, at: &str) -> Result<&Structure, LoadError> {
        self.structures.get(name).ok_or_else(|| unknown("structure", name, at))
    }

    pub fn form(&self, name: &str, at: &str) -> Result<&KForm, LoadError> {
        self.forms.get(name).ok_or_else(|| unknown("form", name, at))
    }

    pub fn vector(&self, name: &str, at: &str) -> Result<&KVector, LoadError> {
        self.vectors.get(name).ok_or_else(|| unknown("vector", name, at))
    }

    pub fn preq(&self, name: &str, at: &str) -> Result<&PreqEntry, LoadError> {
        self.preqs.get(name).ok_or_else(|| unknown("preq block", name, at))
    }

    /// `$name` refers to a named scalar; anything else is parsed on `chart`.
    pub fn scalar(&self, text: &str, chart: &ChartRef, at: &str) -> Result<Scalar, LoadError> {
        if let Some(name) = text.strip_prefix('$') {
            let s = self.scalars.get(name).ok_or_else(|| unknown("scalar", name, at))?;
            // named scalars are stored with their own chart; coordinates are
            // shared by name, so only check that they exist here
            for v in s.vars() {
                if chart.index_of_var(v).is_none() && !chart.units().iter().any(|u| u.var == v) && v != prequant::scalar::vars::TAU {
                    return Err(invalid(at, format!("scalar `{name}` uses a coordinate missing from chart `{}`", chart.name)));
                }
            }
            return Ok(s.clone());
        }
        parse_scalar(text, chart).map_err(|e| invalid(at, format!("`{text}`: {e}")))
    }

    pub fn point(&self, spec: &BTreeMap<String, String>, chart: &ChartRef, at: &str) -> Result<Point, LoadError> {
        let mut p = Point::new();
        for (k, v) in spec {
            let i = chart.index_of(k).ok_or_else(|| unknown("coordinate", k, at))?;
            p.set(chart.var(i), rational(v, at)?);
        }
        Ok(p)
    }
}

fn unknown(kind: &'static str, name: &str, at: &str) -> LoadError {
    LoadError::UnknownReference { kind, name: name.to_string(), at: at.to_string() }
}

pub(crate) fn rational(s: &str, at: &str) -> Result<BigRational, LoadError> {
    s.trim().parse::<BigRational>().map_err(|e| invalid(at, format!("`{s}` is not a rational number: {e}")))
}

pub fn load(text: &str) -> Result<(Workspace, Vec<CheckSpec>), LoadError> {
    let m: Manifest = serde_json::from_str(text)
        .map_err(|e| LoadError::Parse { line: e.line(), column: e.column(), msg: e.to_string() })?;
    let mut ws = Workspace { name: m.name, seed: m.seed, ..Default::default() };
    for c in &m.charts {
        let at = format!("chart `{}`", c.name);
        let mut b = Chart::builder(&c.name);
        for k in &c.coords {
            let d = match k.domain {
                DomainSpec::Real => Domain::Real,
                DomainSpec::Positive => Domain::Positive,
                DomainSpec::Nonnegative => Domain::NonNegative,
            };
            b = b.coord_with(&k.name, d, k.periodic);
        }
        for u in &c.units {
            b = b.unit_rational(&u.name, &u.base, rational(&u.rate, &at)?);
        }
        let chart = b.build().map_err(|e| invalid(&at, e))?;
        if ws.charts.insert(c.name.clone(), chart).is_some() {
            return Err(invalid(&at, "duplicate chart name"));
        }
    }
    // fixtures first, so their charts can be named by scalars and tensors
    for s in &m.structures {
        if let StructureSpec::Fixture { id, .. } = s {
            let at = format!("structure `{id}`");
            let built = structure(&ws, s, &at)?;
            ws.charts.entry(built.chart().name.clone()).or_insert_with(|| built.chart().clone());
            if ws.structures.insert(id.clone(), built).is_some() {
                return Err(invalid(&at, "duplicate structure id"));
            }
        }
    }
    for p in m.preq.iter().filter(|p| p.fixture.is_some()) {
        let at = format!("preq `{}`", p.id);
        let data = preq(&ws, p, &at)?;
        for c in [data.base().chart(), data.q_chart()] {
            ws.charts.entry(c.name.clone()).or_insert_with(|| c.clone());
        }
        if ws.preqs.insert(p.id.clone(), PreqEntry { data, integrality: p.integrality.clone() }).is_some() {
            return Err(invalid(&at, "duplicate preq id"));
        }
    }
    for (name, s) in &m.scalars {
        let at = format!("scalar `{name}`");
        let chart = ws.chart(&s.chart, &at)?.clone();
        let v = parse_scalar(&s.expr, &chart).map_err(|e| invalid(&at, format!("`{}`: {e}", s.expr)))?;
        ws.scalars.insert(name.clone(), v);
    }
    for (name, t) in &m.forms {
        let at = format!("form `{name}`");
        let f = tensor(&ws, t, &at, true)?;
        ws.forms.insert(name.clone(), f.0.expect("form"));
    }
    for (name, t) in &m.vectors {
        let at = format!("vector `{name}`");
        let v = tensor(&ws, t, &at, false)?;
        ws.vectors.insert(name.clone(), v.1.expect("vector"));
    }
    for s in m.structures.iter().filter(|s| !matches!(s, StructureSpec::Fixture { .. })) {
        let at = format!("structure `{}`", s.id());
        let built = structure(&ws, s, &at)?;
        if ws.structures.insert(s.id().to_string(), built).is_some() {
            return Err(invalid(&at, "duplicate structure id"));
        }
    }
    for p in m.preq.iter().filter(|p| p.fixture.is_none()) {
        let at = format!("preq `{}`", p.id);
        let data = preq(&ws, p, &at)?;
        if ws.preqs.insert(p.id.clone(), PreqEntry { data, integrality: p.integrality.clone() }).is_some() {
            return Err(invalid(&at, "duplicate preq id"));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for c in &m.checks {
        if !seen.insert(c.id.clone()) {
            return Err(invalid(&format!("check `{}`", c.id), "duplicate check id"));
        }
    }
    Ok((ws, m.checks))
}

fn tensor(ws: &Workspace, t: &TensorSpec, at: &str, form: bool) -> Result<(Option<KForm>, Option<KVector>), LoadError> {
    let chart = ws.chart(&t.chart, at)?.clone();
    if let Some(cs) = &t.components {
        if t.degree != 1 || !t.terms.is_empty() || cs.len() != chart.dim() {
            return Err(invalid(at, format!("`components` needs degree 1 and {} entries", chart.dim())));
        }
        let v: Vec<Scalar> = cs.iter().map(|s| ws.scalar(s, &chart, at)).collect::<Result<_, _>>()?;
        return Ok(if form { (Some(KForm::one_form(&chart, v)), None) } else { (None, Some(KVector::vector(&chart, v))) });
    }
    let mut entries = Vec::new();
    for (k, v) in &t.terms {
        entries.push((k.as_str(), ws.scalar(v, &chart, at)?));
    }
    if form {
        KForm::from_named(&chart, t.degree, &entries).map(|f| (Some(f), None)).map_err(|e| invalid(at, e))
    } else {
        KVector::from_named(&chart, t.degree, &entries).map(|v| (None, Some(v))).map_err(|e| invalid(at, e))
    }
}

fn loci(chart: &ChartRef, l: &[LocusSpec], at: &str) -> Result<Vec<Locus>, LoadError> {
    l.iter()
        .map(|s| {
            let i = chart.index_of(&s.coord).ok_or_else(|| unknown("coordinate", &s.coord, at))?;
            Ok(Locus::hyperplane(chart.var(i), s.value))
        })
        .collect()
}

fn structure(ws: &Workspace, s: &StructureSpec, at: &str) -> Result<Structure, LoadError> {
    let v = |e: prequant::Error| invalid(at, e);
    Ok(match s {
        StructureSpec::GraphTwoForm { form, loci: l, .. } => {
            let w = ws.form(form, at)?;
            let d = DiracStructure::graph_two_form(w).map_err(v)?;
            let ls = loci(w.chart(), l, at)?;
            Structure::Dirac(d.with_loci(ls).map_err(v)?)
        }
        StructureSpec::GraphBivector { bivector, .. } => {
            Structure::Dirac(DiracStructure::graph_bivector(ws.vector(bivector, at)?).map_err(v)?)
        }
        StructureSpec::Jacobi { bivector, vector, .. } => {
            Structure::Dj(DiracJacobiStructure::jacobi(ws.vector(bivector, at)?, ws.vector(vector, at)?).map_err(v)?)
        }
        StructureSpec::FormPair { omega, sigma, .. } => {
            Structure::Dj(DiracJacobiStructure::form_pair(ws.form(omega, at)?, ws.form(sigma, at)?).map_err(v)?)
        }
        StructureSpec::FromDirac { of, .. } => match ws.structure(of, at)? {
            Structure::Dirac(d) => Structure::Dj(DiracJacobiStructure::from_dirac(d).map_err(v)?),
            Structure::Dj(_) => return Err(invalid(at, format!("`{of}` is already a Dirac-Jacobi structure"))),
        },
        StructureSpec::Frame { chart, e1, gens, loci: l, .. } => {
            let c = ws.chart(chart, at)?.clone();
            let n = c.dim();
            let mut cs = Vec::new();
            let mut es = Vec::new();
            for (k, g) in gens.iter().enumerate() {
                let gat = format!("{at}, generator {k}");
                if g.x.len() != n || g.xi.len() != n {
                    return Err(invalid(&gat, format!("x and xi need {n} entries")));
                }
                let x: Vec<Scalar> = g.x.iter().map(|s| ws.scalar(s, &c, &gat)).collect::<Result<_, _>>()?;
                let xi: Vec<Scalar> = g.xi.iter().map(|s| ws.scalar(s, &c, &gat)).collect::<Result<_, _>>()?;
                let (x, xi) = (KVector::vector(&c, x), KForm::one_form(&c, xi));
                if *e1 {
                    let f = ws.scalar(g.f.as_deref().unwrap_or("0"), &c, &gat)?;
                    let gg = ws.scalar(g.g.as_deref().unwrap_or("0"), &c, &gat)?;
                    es.push(E1Section::new(x, f, xi, gg).map_err(v)?);
                } else {
                    if g.f.is_some() || g.g.is_some() {
                        return Err(invalid(&gat, "f and g need \"e1\": true"));
                    }
                    cs.push(CouSection::new(x, xi).map_err(v)?);
                }
            }
            let ls = loci(&c, l, at)?;
            if *e1 {
                let fr = validate_frame(&c, es).map_err(v)?;
                Structure::Dj(DiracJacobiStructure::new(fr, ls))
            } else {
                let fr = validate_frame(&c, cs).map_err(v)?;
                Structure::Dirac(DiracStructure::new(fr, ls).map_err(v)?)
            }
        }
        StructureSpec::Fixture { name, n, .. } => fixture_structure(name, *n).map_err(|e| match e {
            FixtureError::Unknown => unknown("fixture", name, at),
            FixtureError::Engine(e) => v(e),
        })?,
    })
}

enum FixtureError {
    Unknown,
    Engine(prequant::Error),
}

impl From<prequant::Error> for FixtureError {
    fn from(e: prequant::Error) -> Self {
        FixtureError::Engine(e)
    }
}

fn fixture_structure(name: &str, n: usize) -> Result<Structure, FixtureError> {
    Ok(match name {
        "example2_6" => Structure::Dirac(fixtures::example_2_6()?),
        "lebrun.closure_zero" => Structure::Dirac(LebrunFamily::new(n)?.closure_zero()?),
        "lebrun.lebrun_poisson" => Structure::Dirac(LebrunFamily::new(n)?.lebrun_poisson()?),
        "lebrun.symplectization" => Structure::Dirac(LebrunFamily::new(n)?.symplectization()?.0),
        "lebrun.contact_graph" => Structure::Dj(LebrunFamily::new(n)?.contact_graph()?),
        "lebrun.lebrun_jacobi" => {
            let j = LebrunFamily::new(n)?.lebrun_jacobi()?;
            Structure::Dj(DiracJacobiStructure::jacobi(&j.lambda, &j.e)?)
        }
        _ => return Err(FixtureError::Unknown),
    })
}

fn preq(ws: &Workspace, p: &PreqSpec, at: &str) -> Result<PreqData, LoadError> {
    let v = |e: prequant::Error| invalid(at, e);
    if let Some(f) = &p.fixture {
        if p.base.is_some() || p.omega.is_some() || p.alpha_sigma.is_some() || p.anchor.is_some() || p.beta.is_some() {
            return Err(invalid(at, "a fixture block takes no explicit data"));
        }
        let c = p.c.unwrap_or(0);
        return match f.as_str() {
            "symplectic_r2" => fixtures::symplectic_r2(),
            "torus" => fixtures::torus(),
            "su2" => fixtures::su2(c),
            "lebrun.s" => LebrunFamily::new(1).and_then(|l| l.preq_data_s()),
            "lebrun.r" => LebrunFamily::new(1).and_then(|l| l.preq_data_r()),
            _ => return Err(unknown("fixture", f, at)),
        }
        .map_err(v);
    }
    let base_name = p.base.as_deref().ok_or_else(|| invalid(at, "needs `base` or `fixture`"))?;
    let base = match ws.structure(base_name, at)? {
        Structure::Dirac(d) => d.clone(),
        Structure::Dj(_) => return Err(invalid(at, format!("`{base_name}` is not a Dirac structure"))),
    };
    let c = base.chart().clone();
    let omega = match &p.omega {
        Some(n) => ws.form(n, at)?.clone(),
        None => KForm::zero(&c, 2),
    };
    let alpha_sigma = match &p.alpha_sigma {
        Some(n) => ws.form(n, at)?.clone(),
        None => KForm::zero(&c, 1),
    };
    match (&p.anchor, &p.beta) {
        (Some(a), None) => {
            let av = match &a.vector {
                Some(n) => ws.vector(n, at)?.clone(),
                None => KVector::zero(&c, 1),
            };
            let af = match &a.form {
                Some(n) => ws.form(n, at)?.clone(),
                None => KForm::zero(&c, 1),
            };
            PreqData::new(base, omega, AnchorRep::new(av, af).map_err(v)?, alpha_sigma).map_err(v)
        }
        (None, Some(b)) => {
            if b.len() != base.frame().len() {
                return Err(invalid(at, format!("beta needs {} values", base.frame().len())));
            }
            let values = b.iter().map(|s| ws.scalar(s, &c, at)).collect::<Result<_, _>>()?;
            PreqData::from_beta(base, omega, &LCochain1 { values }, alpha_sigma, None).map_err(v)
        }
        (None, None) => {
            let z = AnchorRep::new(KVector::zero(&c, 1), KForm::zero(&c, 1)).map_err(v)?;
            PreqData::new(base, omega, z, alpha_sigma).map_err(v)
        }
        (Some(_), Some(_)) => Err(invalid(at, "give either `anchor` or `beta`, not both")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dollar_names_a_scalar() {
        let (ws, _) = load(
            r#"{ "charts": [{ "name": "ws_r1", "coords": [{ "name": "w" }] }],
                 "scalars": { "sq": { "chart": "ws_r1", "expr": "w^2" } } }"#,
        )
        .unwrap();
        let c = ws.chart("ws_r1", "t").unwrap().clone();
        assert_eq!(ws.scalar("$sq", &c, "t").unwrap(), ws.scalar("w*w", &c, "t").unwrap());
        assert!(matches!(ws.scalar("$nope", &c, "t"), Err(LoadError::UnknownReference { .. })));
    }

    #[test]
    fn fixture_charts_are_registered() {
        let (ws, _) = load(r#"{ "preq": [{ "id": "P", "fixture": "symplectic_r2" }] }"#).unwrap();
        assert!(ws.chart("r2", "t").is_ok());
        assert!(ws.chart(&ws.preq("P", "t").unwrap().data.q_chart().name, "t").is_ok());
    }

    #[test]
    fn unknown_field_is_a_parse_error() {
        assert!(matches!(load(r#"{ "nmae": "x" }"#), Err(LoadError::Parse { .. })));
    }

    #[test]
    fn positive_domain_and_rational_point() {
        let (ws, _) = load(r#"{ "charts": [{ "name": "ws_pos", "coords": [{ "name": "v", "domain": "positive" }] }] }"#).unwrap();
        let c = ws.chart("ws_pos", "t").unwrap().clone();
        let m = [("v".to_string(), "3/2".to_string())].into();
        assert!(ws.point(&m, &c, "t").is_ok());
        let bad = [("v".to_string(), "x".to_string())].into();
        assert!(ws.point(&bad, &c, "t").is_err());
    }
}
