//! Python bindings: charts, exact scalars, forms and multivectors, Dirac and
//! Dirac-Jacobi structures, prequantization data and the manifest runner.

use std::collections::BTreeMap;

use num_rational::BigRational;
use prequant::calculus::{KForm, KVector};
use prequant::dirac::{Admissibility, DiracStructure, Integrability};
use prequant::djacobi::{reeb_solve, DiracJacobiStructure};
use prequant::lebrun::LebrunFamily;
use prequant::linpair::span_equal;
use prequant::preq::{self, Leaf, PreqData};
use prequant::scalar::{parse_scalar, Chart as CoreChart, ChartRef, Domain, Point, Scalar as CoreScalar};
use prequant::{fixtures, Error};
use prequant_cli::report::{emit, Format};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(frozen, skip_from_py_object, name = "Chart")]
#[derive(Clone)]
struct PyChart(ChartRef);

#[pymethods]
impl PyChart {
    /// `coords` in order; names listed in `positive` get a positive domain,
    /// names in `periodic` are angles.
    #[new]
    #[pyo3(signature = (name, coords, positive = vec![], periodic = vec![]))]
    fn new(name: &str, coords: Vec<String>, positive: Vec<String>, periodic: Vec<String>) -> PyResult<Self> {
        let mut b = CoreChart::builder(name);
        for c in &coords {
            let d = if positive.contains(c) { Domain::Positive } else { Domain::Real };
            b = b.coord_with(c, d, periodic.contains(c));
        }
        Ok(PyChart(b.build().map_err(err)?))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn coords(&self) -> Vec<String> {
        (0..self.0.dim()).map(|i| self.0.coord_name(i).to_string()).collect()
    }

    fn scalar(&self, expr: &str) -> PyResult<PyScalar> {
        Ok(PyScalar(parse_scalar(expr, &self.0).map_err(err)?))
    }

    /// A form from basis keys like `"dx^dy"`.
    fn form(&self, degree: usize, terms: BTreeMap<String, String>) -> PyResult<PyForm> {
        let e = self.entries(&terms)?;
        let refs: Vec<(&str, CoreScalar)> = e.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        Ok(PyForm(KForm::from_named(&self.0, degree, &refs).map_err(err)?))
    }

    /// A multivector from basis keys like `"x^y"`.
    fn multivector(&self, degree: usize, terms: BTreeMap<String, String>) -> PyResult<PyMultivector> {
        let e = self.entries(&terms)?;
        let refs: Vec<(&str, CoreScalar)> = e.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        Ok(PyMultivector(KVector::from_named(&self.0, degree, &refs).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("Chart({}, {:?})", self.0.name, self.coords())
    }
}

impl PyChart {
    fn entries(&self, terms: &BTreeMap<String, String>) -> PyResult<Vec<(String, CoreScalar)>> {
        terms
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_scalar(v, &self.0).map_err(err)?)))
            .collect()
    }

    fn point(&self, at: BTreeMap<String, String>) -> PyResult<Point> {
        let mut p = Point::new();
        for (k, v) in at {
            let i = self.0.index_of(&k).ok_or_else(|| PyKeyError::new_err(format!("no coordinate `{k}`")))?;
            p.set(self.0.var(i), v.trim().parse::<BigRational>().map_err(err)?);
        }
        Ok(p)
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Scalar")]
#[derive(Clone)]
struct PyScalar(CoreScalar);

#[pymethods]
impl PyScalar {
    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar({})", self.0)
    }

    fn __eq__(&self, o: &PyScalar) -> bool {
        self.0 == o.0
    }

    fn __add__(&self, o: &PyScalar) -> PyScalar {
        PyScalar(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &PyScalar) -> PyScalar {
        PyScalar(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &PyScalar) -> PyScalar {
        PyScalar(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &PyScalar) -> PyResult<PyScalar> {
        Ok(PyScalar(self.0.checked_div(&o.0).map_err(err)?))
    }

    fn __neg__(&self) -> PyScalar {
        PyScalar(-&self.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn diff(&self, chart: &PyChart, coord: &str) -> PyResult<PyScalar> {
        let i = chart.0.index_of(coord).ok_or_else(|| PyKeyError::new_err(format!("no coordinate `{coord}`")))?;
        Ok(PyScalar(self.0.diff(chart.0.var(i))))
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Form")]
#[derive(Clone)]
struct PyForm(KForm);

#[pymethods]
impl PyForm {
    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __eq__(&self, o: &PyForm) -> bool {
        self.0 == o.0
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn d(&self) -> PyResult<PyForm> {
        Ok(PyForm(self.0.d().map_err(err)?))
    }

    fn wedge(&self, o: &PyForm) -> PyResult<PyForm> {
        Ok(PyForm(self.0.wedge(&o.0).map_err(err)?))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The Reeb field of a contact 1-form; raises if the form is not contact.
    fn reeb(&self) -> PyResult<PyMultivector> {
        Ok(PyMultivector(reeb_solve(&self.0).map_err(err)?))
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Multivector")]
#[derive(Clone)]
struct PyMultivector(KVector);

#[pymethods]
impl PyMultivector {
    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __eq__(&self, o: &PyMultivector) -> bool {
        self.0 == o.0
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

fn witness(i: Integrability) -> Option<String> {
    match i {
        Integrability::Pass => None,
        Integrability::Fail { i, j, k, value } => Some(format!("<[e{i}, e{j}], e{k}>_+ = {value}")),
    }
}

#[pyclass(frozen, skip_from_py_object, name = "DiracStructure")]
#[derive(Clone)]
struct PyDirac(DiracStructure);

#[pymethods]
impl PyDirac {
    #[staticmethod]
    fn graph_two_form(w: &PyForm) -> PyResult<Self> {
        Ok(PyDirac(DiracStructure::graph_two_form(&w.0).map_err(err)?))
    }

    #[staticmethod]
    fn graph_bivector(l: &PyMultivector) -> PyResult<Self> {
        Ok(PyDirac(DiracStructure::graph_bivector(&l.0).map_err(err)?))
    }

    /// `example2_6`, `lebrun.closure_zero`, `lebrun.lebrun_poisson` or
    /// `lebrun.symplectization`.
    #[staticmethod]
    #[pyo3(signature = (name, n = 1))]
    fn fixture(name: &str, n: usize) -> PyResult<Self> {
        let d = match name {
            "example2_6" => fixtures::example_2_6(),
            "lebrun.closure_zero" => LebrunFamily::new(n).and_then(|f| f.closure_zero()),
            "lebrun.lebrun_poisson" => LebrunFamily::new(n).and_then(|f| f.lebrun_poisson()),
            "lebrun.symplectization" => LebrunFamily::new(n).and_then(|f| f.symplectization().map(|s| s.0)),
            _ => return Err(PyKeyError::new_err(format!("no fixture `{name}`"))),
        };
        Ok(PyDirac(d.map_err(err)?))
    }

    #[getter]
    fn chart(&self) -> PyChart {
        PyChart(self.0.chart().clone())
    }

    fn integrable(&self) -> PyResult<bool> {
        Ok(self.0.integrability().map_err(err)?.passed())
    }

    /// `None` when integrable, else the failing Courant triple.
    fn integrability_witness(&self) -> PyResult<Option<String>> {
        Ok(witness(self.0.integrability().map_err(err)?))
    }

    /// Characteristic rank at a point given as `{coord: "p/q"}`.
    fn char_rank(&self, at: BTreeMap<String, String>) -> PyResult<usize> {
        let p = self.chart().point(at)?;
        Ok(self.0.char_dist_at_point(&p).map_err(err)?.len())
    }

    fn is_basic(&self, f: &PyScalar) -> PyResult<bool> {
        Ok(self.0.is_basic(&f.0).map_err(err)?.is_basic())
    }

    /// `("admissible", X)`, `("not_certified", factor)` or `("not_admissible", None)`.
    fn admissible(&self, f: &PyScalar) -> PyResult<(String, Option<String>)> {
        Ok(match self.0.admissible_solve(&f.0) {
            Ok(Admissibility::Admissible(x)) => ("admissible".into(), Some(x.to_string())),
            Ok(Admissibility::NotCertified { factor, .. }) => ("not_certified".into(), Some(factor)),
            Err(Error::NoSolutionOverFractionField) => ("not_admissible".into(), None),
            Err(e) => return Err(err(e)),
        })
    }

    fn hamiltonian(&self, f: &PyScalar) -> PyResult<PyMultivector> {
        Ok(PyMultivector(self.0.hamiltonian(&f.0).map_err(err)?))
    }

    fn bracket(&self, f: &PyScalar, g: &PyScalar) -> PyResult<PyScalar> {
        Ok(PyScalar(self.0.adm_bracket(&f.0, &g.0).map_err(err)?))
    }

    fn jacobi_residual(&self, f: &PyScalar, g: &PyScalar, h: &PyScalar) -> PyResult<PyScalar> {
        Ok(PyScalar(self.0.jacobi_residual(&f.0, &g.0, &h.0).map_err(err)?))
    }

    fn span_equal(&self, o: &PyDirac) -> PyResult<bool> {
        Ok(span_equal(self.0.frame(), o.0.frame()).map_err(err)?.equal)
    }

    fn __len__(&self) -> usize {
        self.0.frame().len()
    }
}

#[pyclass(frozen, skip_from_py_object, name = "DiracJacobiStructure")]
#[derive(Clone)]
struct PyDj(DiracJacobiStructure);

#[pymethods]
impl PyDj {
    #[staticmethod]
    fn jacobi(lambda: &PyMultivector, e: &PyMultivector) -> PyResult<Self> {
        Ok(PyDj(DiracJacobiStructure::jacobi(&lambda.0, &e.0).map_err(err)?))
    }

    #[staticmethod]
    fn form_pair(omega: &PyForm, sigma: &PyForm) -> PyResult<Self> {
        Ok(PyDj(DiracJacobiStructure::form_pair(&omega.0, &sigma.0).map_err(err)?))
    }

    #[staticmethod]
    fn from_dirac(d: &PyDirac) -> PyResult<Self> {
        Ok(PyDj(DiracJacobiStructure::from_dirac(&d.0).map_err(err)?))
    }

    #[getter]
    fn chart(&self) -> PyChart {
        PyChart(self.0.chart().clone())
    }

    fn integrable(&self) -> PyResult<bool> {
        Ok(self.0.integrability().map_err(err)?.passed())
    }

    fn integrability_witness(&self) -> PyResult<Option<String>> {
        Ok(witness(self.0.integrability().map_err(err)?))
    }

    fn bracket(&self, f: &PyScalar, g: &PyScalar) -> PyResult<PyScalar> {
        Ok(PyScalar(self.0.bracket(&f.0, &g.0).map_err(err)?))
    }

    /// The pair `(X, phi)` of an admissible function.
    fn hamiltonian(&self, f: &PyScalar) -> PyResult<(PyMultivector, PyScalar)> {
        let p = self.0.hamiltonian(&f.0).map_err(err)?;
        Ok((PyMultivector(p.x), PyScalar(p.phi)))
    }

    fn is_basic(&self, f: &PyScalar) -> PyResult<bool> {
        Ok(self.0.is_basic(&f.0).map_err(err)?.is_basic())
    }

    /// The Dirac structure on `M x R` obtained by homogenization.
    fn diracization(&self) -> PyResult<PyDirac> {
        Ok(PyDirac(self.0.diracization().map_err(err)?.0))
    }

    fn span_equal(&self, o: &PyDj) -> PyResult<bool> {
        Ok(span_equal(self.0.frame(), o.0.frame()).map_err(err)?.equal)
    }

    fn __len__(&self) -> usize {
        self.0.frame().len()
    }
}

#[pyclass(frozen, skip_from_py_object, name = "PreqData")]
#[derive(Clone)]
struct PyPreq(PreqData);

#[pymethods]
impl PyPreq {
    /// `symplectic_r2`, `torus`, `su2` (with `c`), `lebrun.s` or `lebrun.r`.
    #[staticmethod]
    #[pyo3(signature = (name, c = 0))]
    fn fixture(name: &str, c: i64) -> PyResult<Self> {
        let d = match name {
            "symplectic_r2" => fixtures::symplectic_r2(),
            "torus" => fixtures::torus(),
            "su2" => fixtures::su2(c),
            "lebrun.s" => LebrunFamily::new(1).and_then(|l| l.preq_data_s()),
            "lebrun.r" => LebrunFamily::new(1).and_then(|l| l.preq_data_r()),
            _ => return Err(PyKeyError::new_err(format!("no fixture `{name}`"))),
        };
        Ok(PyPreq(d.map_err(err)?))
    }

    #[getter]
    fn base(&self) -> PyDirac {
        PyDirac(self.0.base().clone())
    }

    #[getter]
    fn q_chart(&self) -> PyChart {
        PyChart(self.0.q_chart().clone())
    }

    fn sigma(&self) -> PyForm {
        PyForm(self.0.sigma())
    }

    /// The Dirac-Jacobi structure on the circle bundle.
    fn lbar(&self) -> PyResult<PyDj> {
        Ok(PyDj(preq::build_lbar(&self.0).map_err(err)?))
    }

    fn hamiltonian(&self, g: &PyScalar) -> PyResult<PyMultivector> {
        Ok(PyMultivector(preq::preq_hamiltonian(&self.0, &g.0).map_err(err)?))
    }

    fn tangent_distribution(&self) -> PyResult<Vec<PyMultivector>> {
        let lb = preq::build_lbar(&self.0).map_err(err)?;
        Ok(preq::tangent_distribution(&lb).into_iter().map(PyMultivector).collect())
    }

    /// `"precontact"` or `"lcp"` at a base point.
    fn leaf(&self, at: BTreeMap<String, String>) -> PyResult<String> {
        let p = self.base().chart().point(at)?;
        Ok(match preq::leaf_classify(&self.0, &p, None).map_err(err)? {
            Leaf::Precontact { .. } => "precontact".into(),
            Leaf::Lcp { .. } => "lcp".into(),
        })
    }

    fn residual_is_zero(&self) -> PyResult<bool> {
        let b = prequant::algebroid::beta_from_pair(self.0.base(), self.0.pair()).map_err(err)?;
        let r = prequant::algebroid::preq_residual(self.0.base(), self.0.omega(), &b).map_err(err)?;
        Ok(prequant::algebroid::table_is_zero(&r))
    }

    /// The bracket of weight-`n` and weight-`m` functions, as `(n + m, coefficient)`.
    fn graded_bracket(&self, n: i64, h: &PyScalar, m: i64, k: &PyScalar) -> PyResult<(i64, PyScalar)> {
        let (w, v) = preq::graded_bracket(&self.0, (n, &h.0), (m, &k.0)).map_err(err)?;
        Ok((w, PyScalar(v)))
    }
}

/// Runs a manifest given as JSON text; returns `(exit_code, report)` with the
/// same codes as the command line tool.
#[pyfunction]
#[pyo3(signature = (text, format = "json", only = None, seed = None))]
fn check_manifest(text: &str, format: &str, only: Option<&str>, seed: Option<u64>) -> PyResult<(i32, String)> {
    let fmt = match format {
        "json" => Format::Json,
        "text" => Format::Text,
        _ => return Err(PyValueError::new_err("format is `json` or `text`")),
    };
    match prequant_cli::prepare(text, only) {
        Err(e) => Ok((2, e.to_string())),
        Ok((ws, checks)) => {
            let r = prequant_cli::run_checks(&ws, &checks, seed, false);
            Ok((if r.all_passed() { 0 } else { 1 }, emit(&r, fmt)))
        }
    }
}

#[pymodule]
fn prequant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChart>()?;
    m.add_class::<PyScalar>()?;
    m.add_class::<PyForm>()?;
    m.add_class::<PyMultivector>()?;
    m.add_class::<PyDirac>()?;
    m.add_class::<PyDj>()?;
    m.add_class::<PyPreq>()?;
    m.add_function(wrap_pyfunction!(check_manifest, m)?)?;
    Ok(())
}
