//! Certification that a polynomial is nowhere zero on a chart, and the
//! rational witness search used when certification is refused.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::chart::{Chart, Domain};
use super::coeff::GaussRat;
use super::poly::{Monomial, Poly};
use super::vars::{self, VarId, VarKind};
use super::{Scalar, ScalarError};

/// A rational point, given on a subset of a chart's coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub BTreeMap<VarId, BigRational>);

impl Point {
    pub fn new() -> Self {
        Point(BTreeMap::new())
    }

    pub fn from_ints(pairs: &[(VarId, i64)]) -> Self {
        Point(pairs.iter().map(|&(v, n)| (v, BigRational::from_integer(BigInt::from(n)))).collect())
    }

    pub fn set(&mut self, v: VarId, x: BigRational) {
        self.0.insert(v, x);
    }

    pub fn bindings(&self) -> BTreeMap<VarId, Scalar> {
        self.0
            .iter()
            .map(|(&v, x)| (v, Scalar::constant(GaussRat::from_rational(x.clone()))))
            .collect()
    }

    pub fn in_domain(&self, chart: &Chart) -> bool {
        self.0.iter().all(|(&v, x)| match chart.domain_of(v) {
            Some(Domain::Positive) => x.is_positive(),
            Some(Domain::NonNegative) => !x.is_negative(),
            _ => true,
        })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(&v, x)| format!("{}={}", vars::name(v), GaussRat::from_rational(x.clone())))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Scalar {
    /// Value (or partial evaluation) at a point. Units whose base is set to
    /// 0 evaluate to 1; any other value for a unit base is rejected since the
    /// result would leave the exact field.
    pub fn eval_at(&self, p: &Point) -> Result<Scalar, ScalarError> {
        self.subst(&p.bindings()).map_err(|e| match e {
            ScalarError::DivisionByZero => ScalarError::PointOutsideDomain,
            other => other,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Certified,
    /// `factor` is the part that could not be certified. A witness, when
    /// present, is a rational point in the domain where `factor` vanishes.
    Refused { factor: Poly, witness: Option<Point> },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

fn invertible_var(v: VarId, chart: &Chart) -> bool {
    match vars::info(v).kind {
        VarKind::Unit { .. } | VarKind::Tau => true,
        VarKind::Coord => chart.domain_of(v) == Some(Domain::Positive),
    }
}

/// Certifies that `d` has no zero on the chart domain: it must be a nonzero
/// constant times invertible generators (positive coordinates, units, tau).
pub fn unit_certify(d: &Poly, chart: &Chart) -> Certificate {
    if d.is_zero() {
        return Certificate::Refused { factor: Poly::zero(), witness: Some(default_point(chart, &BTreeSet::new())) };
    }
    let m = d.min_monomial(|_| true);
    let rest = d.div_exact(&Poly::term(GaussRat::one(), m.clone())).unwrap_or_else(|| d.clone());
    let bad: Vec<(VarId, i32)> = m.exps().iter().filter(|(v, _)| !invertible_var(*v, chart)).copied().collect();
    if let Some(&(v, _)) = bad.first() {
        let factor = Poly::term(GaussRat::one(), Monomial::from_pairs(bad.clone()));
        let mut pt = default_point(chart, &BTreeSet::new());
        pt.set(v, BigRational::zero());
        let witness = if pt.in_domain(chart) { Some(pt) } else { None };
        return Certificate::Refused { factor, witness };
    }
    if rest.is_constant() {
        return Certificate::Certified;
    }
    let witness = witness_for_zero(&rest, chart);
    Certificate::Refused { factor: super::gcd::monic(&rest), witness }
}

const GRID: [(i64, i64); 6] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2)];
const MAX_POINTS: usize = 4096;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn allowed(domain: Domain, x: &BigRational) -> bool {
    match domain {
        Domain::Real => true,
        Domain::Positive => x.is_positive(),
        Domain::NonNegative => !x.is_negative(),
    }
}

/// Coordinates that carry units must sit at 0 for exact evaluation.
fn unit_bases(p: &Poly) -> BTreeSet<VarId> {
    p.vars()
        .into_iter()
        .filter_map(|v| match vars::info(v).kind {
            VarKind::Unit { base, .. } => Some(base),
            _ => None,
        })
        .collect()
}

fn default_point(chart: &Chart, pinned_zero: &BTreeSet<VarId>) -> Point {
    let mut p = Point::new();
    for c in chart.coords() {
        let x = if pinned_zero.contains(&c.var) || c.domain != Domain::Positive { rat(0, 1) } else { rat(1, 1) };
        p.set(c.var, x);
    }
    p
}

fn candidates(chart: &Chart, v: VarId, pinned: &BTreeSet<VarId>) -> Vec<BigRational> {
    if pinned.contains(&v) {
        return vec![rat(0, 1)];
    }
    let dom = chart.domain_of(v).unwrap_or(Domain::Real);
    GRID.iter().map(|&(n, d)| rat(n, d)).filter(|x| allowed(dom, x)).collect()
}

fn value_at(p: &Poly, pt: &Point) -> Option<Scalar> {
    Scalar::from_poly(p.clone()).eval_at(pt).ok()
}

/// Rational point in the chart domain where `p` vanishes, found by a small
/// grid search plus solving for one coordinate when `p` is linear in it.
pub fn witness_for_zero(p: &Poly, chart: &Chart) -> Option<Point> {
    if p.vars().contains(&vars::TAU) {
        return None;
    }
    let pinned = unit_bases(p);
    let free: Vec<VarId> = p.vars().into_iter().filter(|v| chart.index_of_var(*v).is_some()).collect();
    if free.len() != p.vars().iter().filter(|v| !vars::is_unit(**v)).count() {
        return None;
    }
    let base = default_point(chart, &pinned);
    let mut found = None;
    for_grid(chart, &free, &pinned, &base, &mut |pt| {
        if value_at(p, pt).is_some_and(|s| s.is_zero()) {
            found = Some(pt.clone());
            return true;
        }
        // solve for a coordinate in which p is linear
        for &v in &free {
            if pinned.contains(&v) || p.degree_in(v) != 1 {
                continue;
            }
            let mut partial = pt.clone();
            partial.0.remove(&v);
            let Some(q) = value_at(p, &partial) else { continue };
            let c1 = q.diff(v);
            let c0 = q.eval_at(&Point(std::iter::once((v, rat(0, 1))).collect()));
            let (Some(c1), Ok(c0)) = (c1.constant_value(), c0) else { continue };
            let Some(c0) = c0.constant_value() else { continue };
            if c1.is_zero() {
                continue;
            }
            let x = &(-&c0) * &c1.inv().unwrap();
            if !x.is_real() {
                continue;
            }
            let dom = chart.domain_of(v).unwrap_or(Domain::Real);
            if allowed(dom, &x.re) {
                partial.set(v, x.re.clone());
                found = Some(partial);
                return true;
            }
        }
        false
    });
    found
}

/// Rational point in the chart domain where `s` is defined and nonzero.
pub fn witness_for_nonzero(s: &Scalar, chart: &Chart) -> Option<Point> {
    if s.is_zero() {
        return None;
    }
    let mut vs = s.num().vars();
    vs.extend(s.den().vars());
    if vs.contains(&vars::TAU) {
        // tau is transcendental: a point where the tau-coefficients do not all vanish
        let stripped = Scalar::from_parts(
            Poly::from_terms(s.num().terms().map(|(m, c)| (m.without(vars::TAU), c.clone()))),
            s.den().clone(),
        )
        .ok()?;
        if !stripped.is_zero() && !stripped.vars().contains(&vars::TAU) {
            return witness_for_nonzero(&stripped, chart);
        }
        return None;
    }
    let pinned = unit_bases(s.num()).union(&unit_bases(s.den())).copied().collect();
    let free: Vec<VarId> = vs.into_iter().filter(|v| chart.index_of_var(*v).is_some()).collect();
    let base = default_point(chart, &pinned);
    let mut found = None;
    for_grid(chart, &free, &pinned, &base, &mut |pt| {
        if s.eval_at(pt).is_ok_and(|v| !v.is_zero()) {
            found = Some(pt.clone());
            true
        } else {
            false
        }
    });
    found
}

fn for_grid(
    chart: &Chart,
    free: &[VarId],
    pinned: &BTreeSet<VarId>,
    base: &Point,
    visit: &mut dyn FnMut(&Point) -> bool,
) {
    let cands: Vec<Vec<BigRational>> = free.iter().map(|&v| candidates(chart, v, pinned)).collect();
    if cands.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; free.len()];
    let mut count = 0;
    loop {
        let mut pt = base.clone();
        for (k, &v) in free.iter().enumerate() {
            pt.set(v, cands[k][idx[k]].clone());
        }
        if visit(&pt) {
            return;
        }
        count += 1;
        if count >= MAX_POINTS {
            return;
        }
        let mut k = 0;
        loop {
            if k == free.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < cands[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, ChartRef};

    fn chart() -> ChartRef {
        Chart::builder("cert")
            .coord("cx1")
            .coord("cx2")
            .positive("ct")
            .coord_with("cr", Domain::NonNegative, false)
            .unit("cet", "ct", 1, 1)
            .build()
            .unwrap()
    }

    fn poly(c: &ChartRef, e: &str) -> Poly {
        let s = parse_scalar(e, c).unwrap();
        assert!(s.is_polynomial());
        s.num().clone()
    }

    #[test]
    fn positive_and_units_certify() {
        let c = chart();
        assert!(unit_certify(&poly(&c, "ct"), &c).is_certified());
        assert!(unit_certify(&poly(&c, "cet"), &c).is_certified());
        assert!(unit_certify(&poly(&c, "-3*ct^2*cet*tau"), &c).is_certified());
    }

    #[test]
    fn real_coordinate_refused_with_witness() {
        let c = chart();
        match unit_certify(&poly(&c, "cx1"), &c) {
            Certificate::Refused { factor, witness: Some(w) } => {
                assert_eq!(factor, poly(&c, "cx1"));
                assert_eq!(w.0[&vars::lookup("cx1").unwrap()], rat(0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonnegative_is_not_invertible() {
        let c = chart();
        assert!(!unit_certify(&poly(&c, "cr"), &c).is_certified());
    }

    #[test]
    fn sum_of_squares_has_no_rational_witness() {
        let c = chart();
        match unit_certify(&poly(&c, "cx1^2 + cx2^2 + 1"), &c) {
            Certificate::Refused { witness, .. } => assert!(witness.is_none()),
            other => panic!("{other:?}"),
        }
        match unit_certify(&poly(&c, "cx1 + 2*cx2 - 7"), &c) {
            Certificate::Refused { witness: Some(w), .. } => {
                let v = Scalar::from_poly(poly(&c, "cx1 + 2*cx2 - 7")).eval_at(&w).unwrap();
                assert!(v.is_zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonzero_witness() {
        let c = chart();
        let s = parse_scalar("cx1*cx2", &c).unwrap();
        let w = witness_for_nonzero(&s, &c).unwrap();
        assert!(!s.eval_at(&w).unwrap().is_zero());
    }
}
