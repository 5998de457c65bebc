//! Forms and multivector fields on a chart, with exterior and Lie calculus.
//!
//! Coefficients are stored against strictly increasing index lists into the
//! chart's coordinates. A 2-form `w` evaluates as
//! `w(X, Y) = sum_{i<j} w_ij (X^i Y^j - X^j Y^i)` and a bivector as
//! `L(a, b) = sum_{i<j} L^ij (a_i b_j - a_j b_i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{unit_certify, Certificate, ChartRef, Point, Scalar, VarId};

/// Highest multivector degree supported.
pub const MAX_VECTOR_DEGREE: usize = 2;

pub(crate) fn same_chart(a: &ChartRef, b: &ChartRef) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::ChartMismatch(a.name.clone(), b.name.clone()))
    }
}

/// Sorts an index list, returning the permutation sign, or `None` on repeats.
fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Antisymmetric coefficient table shared by forms and multivectors.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Alt {
    chart: ChartRef,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Scalar>,
}

impl Alt {
    fn zero(chart: &ChartRef, degree: usize) -> Self {
        Alt { chart: chart.clone(), degree, coeffs: BTreeMap::new() }
    }

    fn add_entry(&mut self, idx: &[usize], c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_sign(idx) else { return };
        let c = if sign < 0 { -c } else { c.clone() };
        let slot = self.coeffs.entry(sorted.clone()).or_insert_with(Scalar::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.coeffs.remove(&sorted);
        }
    }

    fn get(&self, idx: &[usize]) -> Scalar {
        match sort_sign(idx) {
            None => Scalar::zero(),
            Some((sorted, sign)) => {
                let c = self.coeffs.get(&sorted).cloned().unwrap_or_default();
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    fn combine(&self, o: &Alt, sign: i32) -> Result<Alt> {
        same_chart(&self.chart, &o.chart)?;
        if self.degree != o.degree {
            return Err(Error::Invalid(format!("degree {} vs {}", self.degree, o.degree)));
        }
        let mut out = self.clone();
        for (k, c) in &o.coeffs {
            let c = if sign < 0 { -c } else { c.clone() };
            out.add_entry(k, &c);
        }
        Ok(out)
    }

    fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Alt {
        let mut out = Alt::zero(&self.chart, self.degree);
        for (k, c) in &self.coeffs {
            out.add_entry(k, &f(c));
        }
        out
    }

    fn try_map(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Alt> {
        let mut out = Alt::zero(&self.chart, self.degree);
        for (k, c) in &self.coeffs {
            out.add_entry(k, &f(c)?);
        }
        Ok(out)
    }

    fn wedge(&self, o: &Alt) -> Result<Alt> {
        same_chart(&self.chart, &o.chart)?;
        let mut out = Alt::zero(&self.chart, self.degree + o.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &o.coeffs {
                let mut idx = a.clone();
                idx.extend(b);
                out.add_entry(&idx, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// Interior product of a degree-1 object (components `v`) into the first
    /// slot.
    fn contract_first(&self, v: &[Scalar]) -> Alt {
        let mut out = Alt::zero(&self.chart, self.degree - 1);
        for (idx, c) in &self.coeffs {
            for r in 0..idx.len() {
                let x = &v[idx[r]];
                if x.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(r);
                let t = x * c;
                out.add_entry(&rest, &if r % 2 == 0 { t } else { -t });
            }
        }
        out
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, basis: impl Fn(&str) -> String, sep: &str) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let b: Vec<String> = idx.iter().map(|&i| basis(self.chart.coord_name(i))).collect();
            let b = b.join(sep);
            if idx.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{b}")?;
            } else {
                write!(f, "({c})*{b}")?;
            }
        }
        Ok(())
    }
}

/// Differential form of degree `k` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KForm(Alt);

/// Multivector field of degree 0, 1 or 2 on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVector(Alt);

fn parse_basis(chart: &ChartRef, key: &str, prefix: &str) -> Result<Vec<usize>> {
    let key = key.trim();
    if key.is_empty() || key == "1" {
        return Ok(vec![]);
    }
    key.split('^')
        .map(|part| {
            let part = part.trim();
            let name = part.strip_prefix(prefix).unwrap_or(part);
            chart
                .index_of(name)
                .ok_or_else(|| Error::Scalar(crate::scalar::ScalarError::UnknownCoordinate(name.to_string())))
        })
        .collect()
}

impl KForm {
    pub fn zero(chart: &ChartRef, degree: usize) -> Self {
        KForm(Alt::zero(chart, degree))
    }

    pub fn function(chart: &ChartRef, f: Scalar) -> Self {
        let mut a = Alt::zero(chart, 0);
        a.add_entry(&[], &f);
        KForm(a)
    }

    pub fn dx(chart: &ChartRef, i: usize) -> Self {
        let mut a = Alt::zero(chart, 1);
        a.add_entry(&[i], &Scalar::one());
        KForm(a)
    }

    /// 1-form with the given components against `dx_0, dx_1, ...`.
    pub fn one_form(chart: &ChartRef, comps: Vec<Scalar>) -> Self {
        let mut a = Alt::zero(chart, 1);
        for (i, c) in comps.iter().enumerate() {
            a.add_entry(&[i], c);
        }
        KForm(a)
    }

    /// Builds a form from `(indices, coefficient)` pairs; indices need not be
    /// sorted and repeated entries accumulate.
    pub fn from_entries(chart: &ChartRef, degree: usize, entries: &[(Vec<usize>, Scalar)]) -> Result<Self> {
        if degree > chart.dim() {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut a = Alt::zero(chart, degree);
        for (idx, c) in entries {
            if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
                return Err(Error::Invalid(format!("bad index list {idx:?} for degree {degree}")));
            }
            a.add_entry(idx, c);
        }
        Ok(KForm(a))
    }

    /// Builds a form from keys like `"dx^dy"` (or `"x^y"`) and coefficients.
    pub fn from_named(chart: &ChartRef, degree: usize, entries: &[(&str, Scalar)]) -> Result<Self> {
        let parsed: Result<Vec<_>> = entries
            .iter()
            .map(|(k, c)| Ok((parse_basis(chart, k, "d")?, c.clone())))
            .collect();
        KForm::from_entries(chart, degree, &parsed?)
    }

    /// `df` for a function on the chart.
    pub fn exact(chart: &ChartRef, f: &Scalar) -> Self {
        let comps = chart.vars().into_iter().map(|v| f.diff(v)).collect();
        KForm::one_form(chart, comps)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.0.chart
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn is_zero(&self) -> bool {
        self.0.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &[usize]) -> Scalar {
        self.0.get(idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.0.coeffs.iter()
    }

    /// Components of a 1-form, or the value of a 0-form as a single entry.
    pub fn components(&self) -> Vec<Scalar> {
        match self.degree() {
            0 => vec![self.coeff(&[])],
            1 => (0..self.chart().dim()).map(|i| self.coeff(&[i])).collect(),
            _ => panic!("components() needs degree <= 1"),
        }
    }

    pub fn as_function(&self) -> Scalar {
        assert_eq!(self.degree(), 0);
        self.coeff(&[])
    }

    pub fn add(&self, o: &KForm) -> Result<KForm> {
        Ok(KForm(self.0.combine(&o.0, 1)?))
    }

    pub fn sub(&self, o: &KForm) -> Result<KForm> {
        Ok(KForm(self.0.combine(&o.0, -1)?))
    }

    pub fn neg(&self) -> KForm {
        KForm(self.0.map(|c| -c))
    }

    pub fn scale(&self, f: &Scalar) -> KForm {
        KForm(self.0.map(|c| f * c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<KForm> {
        Ok(KForm(self.0.try_map(f)?))
    }

    pub fn wedge(&self, o: &KForm) -> Result<KForm> {
        if self.degree() + o.degree() > self.chart().dim() {
            same_chart(self.chart(), o.chart())?;
            return Ok(KForm::zero(self.chart(), self.chart().dim()));
        }
        Ok(KForm(self.0.wedge(&o.0)?))
    }

    /// `w^k`, the k-fold wedge power (k >= 1).
    pub fn wedge_pow(&self, k: usize) -> Result<KForm> {
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    pub fn d(&self) -> Result<KForm> {
        let k = self.degree();
        let n = self.chart().dim();
        if k >= n {
            return Ok(KForm::zero(self.chart(), n));
        }
        let vars = self.chart().vars();
        let mut out = Alt::zero(self.chart(), k + 1);
        for (idx, c) in &self.0.coeffs {
            for (j, &v) in vars.iter().enumerate() {
                let dc = c.diff(v);
                if dc.is_zero() {
                    continue;
                }
                let mut full = vec![j];
                full.extend(idx);
                out.add_entry(&full, &dc);
            }
        }
        Ok(KForm(out))
    }

    pub fn is_closed(&self) -> Result<bool> {
        Ok(self.d()?.is_zero())
    }

    /// Interior product `i_X w`.
    pub fn contract(&self, x: &KVector) -> Result<KForm> {
        same_chart(self.chart(), x.chart())?;
        if x.degree() != 1 {
            return Err(Error::Invalid("contraction needs a vector field".into()));
        }
        if self.degree() == 0 {
            return Ok(KForm::zero(self.chart(), 0));
        }
        Ok(KForm(self.0.contract_first(&x.components())))
    }

    /// `w(X)` for a 1-form.
    pub fn eval1(&self, x: &KVector) -> Result<Scalar> {
        Ok(self.contract(x)?.as_function())
    }

    /// `w(X, Y)` for a 2-form.
    pub fn eval2(&self, x: &KVector, y: &KVector) -> Result<Scalar> {
        self.contract(x)?.eval1(y)
    }

    /// Lie derivative by Cartan's formula.
    pub fn lie(&self, x: &KVector) -> Result<KForm> {
        same_chart(self.chart(), x.chart())?;
        if self.degree() == 0 {
            return Ok(KForm::function(self.chart(), x.apply(&self.as_function())?));
        }
        let a = self.d()?.contract(x)?;
        let b = self.contract(x)?.d()?;
        a.add(&b)
    }

    pub fn eval_at(&self, p: &Point) -> Result<KForm> {
        self.map_coeffs(|c| Ok(c.eval_at(p)?))
    }

    /// Same coefficients on another chart with identical coordinates.
    pub fn rechart(&self, chart: &ChartRef) -> Result<KForm> {
        if chart.vars() != self.chart().vars() {
            return Err(Error::ChartMismatch(self.chart().name.clone(), chart.name.clone()));
        }
        let mut a = self.0.clone();
        a.chart = chart.clone();
        Ok(KForm(a))
    }
}

impl KVector {
    pub fn zero(chart: &ChartRef, degree: usize) -> Self {
        KVector(Alt::zero(chart, degree))
    }

    pub fn partial(chart: &ChartRef, i: usize) -> Self {
        let mut a = Alt::zero(chart, 1);
        a.add_entry(&[i], &Scalar::one());
        KVector(a)
    }

    pub fn vector(chart: &ChartRef, comps: Vec<Scalar>) -> Self {
        let mut a = Alt::zero(chart, 1);
        for (i, c) in comps.iter().enumerate() {
            a.add_entry(&[i], c);
        }
        KVector(a)
    }

    pub fn from_entries(chart: &ChartRef, degree: usize, entries: &[(Vec<usize>, Scalar)]) -> Result<Self> {
        if degree > MAX_VECTOR_DEGREE || degree > chart.dim() {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut a = Alt::zero(chart, degree);
        for (idx, c) in entries {
            if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
                return Err(Error::Invalid(format!("bad index list {idx:?} for degree {degree}")));
            }
            a.add_entry(idx, c);
        }
        Ok(KVector(a))
    }

    /// Builds a multivector from keys like `"x^y"` (meaning `d/dx ^ d/dy`).
    pub fn from_named(chart: &ChartRef, degree: usize, entries: &[(&str, Scalar)]) -> Result<Self> {
        let parsed: Result<Vec<_>> = entries
            .iter()
            .map(|(k, c)| Ok((parse_basis(chart, k, "d/d")?, c.clone())))
            .collect();
        KVector::from_entries(chart, degree, &parsed?)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.0.chart
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn is_zero(&self) -> bool {
        self.0.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &[usize]) -> Scalar {
        self.0.get(idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.0.coeffs.iter()
    }

    pub fn components(&self) -> Vec<Scalar> {
        assert_eq!(self.degree(), 1, "components() needs a vector field");
        (0..self.chart().dim()).map(|i| self.coeff(&[i])).collect()
    }

    pub fn add(&self, o: &KVector) -> Result<KVector> {
        Ok(KVector(self.0.combine(&o.0, 1)?))
    }

    pub fn sub(&self, o: &KVector) -> Result<KVector> {
        Ok(KVector(self.0.combine(&o.0, -1)?))
    }

    pub fn neg(&self) -> KVector {
        KVector(self.0.map(|c| -c))
    }

    pub fn scale(&self, f: &Scalar) -> KVector {
        KVector(self.0.map(|c| f * c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<KVector> {
        Ok(KVector(self.0.try_map(f)?))
    }

    pub fn wedge(&self, o: &KVector) -> Result<KVector> {
        let deg = self.degree() + o.degree();
        if deg > MAX_VECTOR_DEGREE {
            return Err(Error::DegreeOverflow(deg));
        }
        Ok(KVector(self.0.wedge(&o.0)?))
    }

    /// Directional derivative `X . f`.
    pub fn apply(&self, f: &Scalar) -> Result<Scalar> {
        if self.degree() != 1 {
            return Err(Error::Invalid("only vector fields act on functions".into()));
        }
        let vars = self.chart().vars();
        Ok(self.entries().map(|(idx, c)| c * &f.diff(vars[idx[0]])).sum())
    }

    /// Lie bracket of vector fields: `[X,Y]^k = X(Y^k) - Y(X^k)`.
    pub fn bracket(&self, y: &KVector) -> Result<KVector> {
        same_chart(self.chart(), y.chart())?;
        if self.degree() != 1 || y.degree() != 1 {
            return Err(Error::Invalid("bracket needs vector fields".into()));
        }
        let (xc, yc) = (self.components(), y.components());
        let comps: Result<Vec<Scalar>> = (0..xc.len())
            .map(|k| Ok(&self.apply(&yc[k])? - &y.apply(&xc[k])?))
            .collect();
        Ok(KVector::vector(self.chart(), comps?))
    }

    /// Lie derivative of `t` along the vector field `self`.
    pub fn lie(&self, t: &KVector) -> Result<KVector> {
        same_chart(self.chart(), t.chart())?;
        match t.degree() {
            0 => {
                let v = self.apply(&t.coeff(&[]))?;
                KVector::from_entries(self.chart(), 0, &[(vec![], v)])
            }
            1 => self.bracket(t),
            2 => {
                let n = self.chart().dim();
                let vars = self.chart().vars();
                let x = self.components();
                let mut entries = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut v = self.apply(&t.coeff(&[i, j]))?;
                        for k in 0..n {
                            v = &v - &(&t.coeff(&[k, j]) * &x[i].diff(vars[k]));
                            v = &v - &(&t.coeff(&[i, k]) * &x[j].diff(vars[k]));
                        }
                        entries.push((vec![i, j], v));
                    }
                }
                KVector::from_entries(self.chart(), 2, &entries)
            }
            d => Err(Error::DegreeOverflow(d)),
        }
    }

    /// For a bivector `L`, the vector `L(., a)`; for a vector `X`, the
    /// function `a(X)` as a degree-0 multivector.
    pub fn sharp(&self, a: &KForm) -> Result<KVector> {
        same_chart(self.chart(), a.chart())?;
        if a.degree() != 1 {
            return Err(Error::Invalid("sharp needs a 1-form".into()));
        }
        let n = self.chart().dim();
        let ac = a.components();
        match self.degree() {
            1 => {
                let v = a.eval1(self)?;
                KVector::from_entries(self.chart(), 0, &[(vec![], v)])
            }
            2 => {
                let comps = (0..n)
                    .map(|k| (0..n).map(|j| &self.coeff(&[k, j]) * &ac[j]).sum())
                    .collect();
                Ok(KVector::vector(self.chart(), comps))
            }
            d => Err(Error::DegreeOverflow(d)),
        }
    }

    /// `L(a, b)` for a bivector.
    pub fn eval2(&self, a: &KForm, b: &KForm) -> Result<Scalar> {
        let v = self.sharp(b)?;
        a.eval1(&v)
    }

    pub fn as_function(&self) -> Scalar {
        assert_eq!(self.degree(), 0);
        self.coeff(&[])
    }

    pub fn eval_at(&self, p: &Point) -> Result<KVector> {
        self.map_coeffs(|c| Ok(c.eval_at(p)?))
    }

    pub fn rechart(&self, chart: &ChartRef) -> Result<KVector> {
        if chart.vars() != self.chart().vars() {
            return Err(Error::ChartMismatch(self.chart().name.clone(), chart.name.clone()));
        }
        let mut a = self.0.clone();
        a.chart = chart.clone();
        Ok(KVector(a))
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, |n| format!("d{n}"), "^")
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(f, |n| format!("d/d{n}"), "^")
    }
}

/// A rational change of coordinates between two charts.
///
/// `to_source` expresses source coordinates in target coordinates and
/// `to_target` the converse; coordinates missing from a map are shared by
/// both charts and map identically.
#[derive(Clone, Debug)]
pub struct CoordMap {
    source: ChartRef,
    target: ChartRef,
    to_source: Vec<Scalar>,
    to_target: Vec<Scalar>,
}

impl CoordMap {
    pub fn new(
        source: &ChartRef,
        target: &ChartRef,
        to_source: &BTreeMap<VarId, Scalar>,
        to_target: &BTreeMap<VarId, Scalar>,
    ) -> Result<Self> {
        let fill = |from: &ChartRef, to: &ChartRef, m: &BTreeMap<VarId, Scalar>| -> Result<Vec<Scalar>> {
            from.coords()
                .iter()
                .map(|c| match m.get(&c.var) {
                    Some(s) => {
                        if let Some(v) = s.vars().into_iter().find(|v| {
                            to.index_of_var(*v).is_none() && !to.units().iter().any(|u| u.var == *v) && *v != crate::scalar::vars::TAU
                        }) {
                            return Err(Error::NotInverse(format!(
                                "`{}` uses `{}` which is not a coordinate of `{}`",
                                c.name,
                                crate::scalar::vars::name(v),
                                to.name
                            )));
                        }
                        Ok(s.clone())
                    }
                    None if to.index_of_var(c.var).is_some() => Ok(Scalar::var(c.var)),
                    None => Err(Error::NotInverse(format!("no image for `{}`", c.name))),
                })
                .collect()
        };
        let ts = fill(source, target, to_source)?;
        let tt = fill(target, source, to_target)?;
        let bind = |chart: &ChartRef, vals: &[Scalar]| -> BTreeMap<VarId, Scalar> {
            chart.vars().into_iter().zip(vals.iter().cloned()).collect()
        };
        let into_target = bind(target, &tt);
        for (k, s) in ts.iter().enumerate() {
            let back = s.subst(&into_target)?;
            if back != Scalar::var(source.var(k)) {
                return Err(Error::NotInverse(format!("`{}` returns as `{}`", source.coord_name(k), back)));
            }
        }
        let into_source = bind(source, &ts);
        for (k, s) in tt.iter().enumerate() {
            let back = s.subst(&into_source)?;
            if back != Scalar::var(target.var(k)) {
                return Err(Error::NotInverse(format!("`{}` returns as `{}`", target.coord_name(k), back)));
            }
        }
        Ok(CoordMap { source: source.clone(), target: target.clone(), to_source: ts, to_target: tt })
    }

    pub fn source(&self) -> &ChartRef {
        &self.source
    }

    pub fn target(&self) -> &ChartRef {
        &self.target
    }

    fn source_bindings(&self) -> BTreeMap<VarId, Scalar> {
        self.source.vars().into_iter().zip(self.to_source.iter().cloned()).collect()
    }

    fn certify(&self, s: &Scalar) -> Result<Scalar> {
        match unit_certify(s.den(), &self.target) {
            Certificate::Certified => Ok(s.clone()),
            Certificate::Refused { factor, .. } => Err(Error::DenominatorNotCertified(factor.to_string())),
        }
    }

    /// Rewrites a source function in target coordinates.
    pub fn scalar(&self, f: &Scalar) -> Result<Scalar> {
        let out = f.subst(&self.source_bindings())?;
        self.certify(&out)
    }

    /// Jacobian `d(target_b)/d(source_a)` expressed in target coordinates.
    fn jacobian(&self) -> Result<Vec<Vec<Scalar>>> {
        let sb = self.source_bindings();
        let svars = self.source.vars();
        self.to_target
            .iter()
            .map(|phi| svars.iter().map(|&a| Ok(phi.diff(a).subst(&sb)?)).collect())
            .collect()
    }

    pub fn push_vector(&self, t: &KVector) -> Result<KVector> {
        same_chart(t.chart(), &self.source)?;
        let j = self.jacobian()?;
        let m = self.target.dim();
        let mut entries = Vec::new();
        for (idx, c) in t.entries() {
            let c = self.scalar(c)?;
            match idx.len() {
                0 => entries.push((vec![], c)),
                1 => {
                    for b in 0..m {
                        entries.push((vec![b], &c * &j[b][idx[0]]));
                    }
                }
                _ => {
                    for b in 0..m {
                        for e in 0..m {
                            entries.push((vec![b, e], &c * &(&j[b][idx[0]] * &j[e][idx[1]])));
                        }
                    }
                }
            }
        }
        let out = KVector::from_entries(&self.target, t.degree(), &entries)?;
        out.map_coeffs(|c| self.certify(c))
    }

    pub fn pull_form(&self, w: &KForm) -> Result<KForm> {
        same_chart(w.chart(), &self.source)?;
        let dpsi: Vec<KForm> = self.to_source.iter().map(|s| KForm::exact(&self.target, s)).collect();
        let mut out = KForm::zero(&self.target, w.degree());
        for (idx, c) in w.entries() {
            let mut term = KForm::function(&self.target, self.scalar(c)?);
            for &a in idx {
                term = term.wedge(&dpsi[a])?;
            }
            out = out.add(&term)?;
        }
        out.map_coeffs(|c| self.certify(c))
    }
}
