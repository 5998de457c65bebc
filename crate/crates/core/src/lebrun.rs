//! Structures built from a contact chart `(u, q, p)` with
//! `sigma_M = du + sum p_i dq^i`: the symplectization, its closure at
//! `s = 0`, the LeBrun-Poisson end in `r = 1/s`, their prequantization, and
//! the pinch of the circle fibres at `r = 0`.

use std::collections::BTreeMap;

use crate::algebroid::AnchorRep;
use crate::calculus::{CoordMap, KForm, KVector};
use crate::dirac::{Basic, DiracStructure, Locus};
use crate::djacobi::{DiracJacobiStructure, Extension, JacobiPair};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::linpair::{span_equal, CouSection, SpanVerdict};
use crate::preq::{build_lbar, PreqData};
use crate::scalar::{Chart, ChartRef, Domain, Point, Scalar};

#[derive(Clone, Debug)]
pub struct LebrunFamily {
    pub n: usize,
    /// `(u, q, p)`.
    pub m: ChartRef,
    /// `(u, q, p, s)` with `s >= 0`.
    pub s_chart: ChartRef,
    /// `(u, q, p, r)` with `r >= 0`.
    pub r_chart: ChartRef,
    /// Overlap charts with `s > 0` and `r > 0`.
    pub s_open: ChartRef,
    pub r_open: ChartRef,
}

#[derive(Clone, Debug)]
pub struct GluedDirac {
    pub s_side: DiracStructure,
    pub r_side: DiracStructure,
    /// Transport under `overlap()` against the graph of `Lambda`.
    pub overlap: SpanVerdict,
    /// Transport under the bare `s = 1/r` against the graph of `Lambda`.
    pub bare: SpanVerdict,
    /// Transport under the bare `s = 1/r` against the graph of `-Lambda`.
    pub bare_negated: SpanVerdict,
}

/// Named outputs of `LebrunFamily::build`.
#[derive(Clone, Debug)]
pub enum Built {
    Dirac(DiracStructure),
    Glued(Box<GluedDirac>),
    Jacobi(JacobiPair),
    Preq(Box<(PreqData, PreqData)>),
}

fn names(n: usize) -> (Vec<String>, Vec<String>) {
    if n == 1 {
        (vec!["q".into()], vec!["p".into()])
    } else {
        ((1..=n).map(|i| format!("q{i}")).collect(), (1..=n).map(|i| format!("p{i}")).collect())
    }
}

impl LebrunFamily {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("need at least one (q, p) pair".into()));
        }
        let (qs, ps) = names(n);
        let mut b = Chart::builder(&format!("contact{n}")).coord("u");
        for q in &qs {
            b = b.coord(q);
        }
        for p in &ps {
            b = b.coord(p);
        }
        let m = b.build()?;
        let s_chart = m.extend(&format!("closure{n}")).coord_with("s", Domain::NonNegative, false).build()?;
        let r_chart = m.extend(&format!("lebrun{n}")).coord_with("r", Domain::NonNegative, false).build()?;
        let s_open = m.extend(&format!("closure{n}_open")).positive("s").build()?;
        let r_open = m.extend(&format!("lebrun{n}_open")).positive("r").build()?;
        Ok(LebrunFamily { n, m, s_chart, r_chart, s_open, r_open })
    }

    fn u(&self) -> usize {
        0
    }

    fn q(&self, i: usize) -> usize {
        1 + i
    }

    fn p(&self, i: usize) -> usize {
        1 + self.n + i
    }

    fn last(c: &ChartRef) -> usize {
        c.dim() - 1
    }

    /// `du + sum p_i dq^i` on any chart whose first `2n+1` coordinates are
    /// `(u, q, p)`.
    pub fn sigma_m(&self, c: &ChartRef) -> KForm {
        let mut comps = vec![Scalar::zero(); c.dim()];
        comps[self.u()] = Scalar::one();
        for i in 0..self.n {
            comps[self.q(i)] = Scalar::var(c.var(self.p(i)));
        }
        KForm::one_form(c, comps)
    }

    pub fn contact_graph(&self) -> Result<DiracJacobiStructure> {
        let s = self.sigma_m(&self.m);
        DiracJacobiStructure::form_pair(&s.d()?, &s)
    }

    /// Graph of `d(e^t sigma_M)` on the chart of `Extension::new(m)`.
    pub fn symplectization(&self) -> Result<(DiracStructure, Extension)> {
        let ext = Extension::new(&self.m)?;
        let s = ext.lift_form(&self.sigma_m(&self.m)).scale(&ext.et());
        Ok((DiracStructure::graph_two_form(&s.d()?)?, ext))
    }

    fn closure_on(&self, c: &ChartRef) -> Result<DiracStructure> {
        let s = Scalar::var(c.var(Self::last(c)));
        DiracStructure::graph_two_form(&self.sigma_m(c).scale(&s).d()?)
    }

    /// Graph of `d(s sigma_M)`, with the boundary `s = 0` declared.
    pub fn closure_zero(&self) -> Result<DiracStructure> {
        let c = &self.s_chart;
        self.closure_on(c)?.with_loci(vec![Locus::hyperplane(c.var(Self::last(c)), 0)])
    }

    /// `r[(r d_r + sum p_i d_p_i) ^ d_u + sum d_q_i ^ d_p_i]`.
    pub fn lebrun_lambda(&self, c: &ChartRef) -> Result<KVector> {
        let r = Scalar::var(c.var(Self::last(c)));
        let mut euler = KVector::partial(c, Self::last(c)).scale(&r);
        let mut sympl = KVector::zero(c, 2);
        for i in 0..self.n {
            let p = Scalar::var(c.var(self.p(i)));
            euler = euler.add(&KVector::partial(c, self.p(i)).scale(&p))?;
            sympl = sympl.add(&KVector::partial(c, self.q(i)).wedge(&KVector::partial(c, self.p(i)))?)?;
        }
        Ok(euler.wedge(&KVector::partial(c, self.u()))?.add(&sympl)?.scale(&r))
    }

    pub fn lebrun_poisson(&self) -> Result<DiracStructure> {
        let c = &self.r_chart;
        DiracStructure::graph_bivector(&self.lebrun_lambda(c)?)?.with_loci(vec![Locus::hyperplane(c.var(Self::last(c)), 0)])
    }

    /// `s = 1/r` alone, from the open `s` chart to the open `r` chart.
    pub fn overlap_bare(&self) -> Result<CoordMap> {
        self.overlap_map(false)
    }

    /// `s = 1/r` together with `u -> -u`, `p_i -> -p_i`, which turns
    /// `sigma_M` into `-sigma_M`. The displayed LeBrun bivector inverts
    /// `-d(sigma_M / r)` in the graph conventions used here, so this is the
    /// map along which the two ends glue.
    pub fn overlap(&self) -> Result<CoordMap> {
        self.overlap_map(true)
    }

    fn overlap_map(&self, flip: bool) -> Result<CoordMap> {
        let (sv, rv) = (self.s_open.var(Self::last(&self.s_open)), self.r_open.var(Self::last(&self.r_open)));
        let mut to_s: BTreeMap<_, _> = [(sv, Scalar::var(rv).inv()?)].into();
        let mut to_r: BTreeMap<_, _> = [(rv, Scalar::var(sv).inv()?)].into();
        if flip {
            let mut flipped = vec![self.u()];
            flipped.extend((0..self.n).map(|i| self.p(i)));
            for k in flipped {
                let v = self.m.var(k);
                to_s.insert(v, -&Scalar::var(v));
                to_r.insert(v, -&Scalar::var(v));
            }
        }
        CoordMap::new(&self.s_open, &self.r_open, &to_s, &to_r)
    }

    pub fn glued_dirac(&self) -> Result<GluedDirac> {
        let s_side = self.closure_zero()?;
        let r_side = self.lebrun_poisson()?;
        let here = self.closure_on(&self.s_open)?;
        let lam = self.lebrun_lambda(&self.r_open)?;
        let there = DiracStructure::graph_bivector(&lam)?;
        let opposite = DiracStructure::graph_bivector(&lam.neg())?;
        let overlap = span_equal(transport(&self.overlap()?, &here)?.frame(), there.frame())?;
        let moved = transport(&self.overlap_bare()?, &here)?;
        let bare = span_equal(moved.frame(), there.frame())?;
        let bare_negated = span_equal(moved.frame(), opposite.frame())?;
        Ok(GluedDirac { s_side, r_side, overlap, bare, bare_negated })
    }

    /// `Omega = 0`, `alpha_sigma = 0`, `beta <-> -s sigma_M`.
    pub fn preq_data_s(&self) -> Result<PreqData> {
        let c = &self.s_chart;
        let s = Scalar::var(c.var(Self::last(c)));
        let pair = AnchorRep::new(KVector::zero(c, 1), self.sigma_m(c).scale(&-s))?;
        PreqData::new(self.closure_zero()?, KForm::zero(c, 2), pair, KForm::zero(c, 1))
    }

    /// `Omega = 0`, `alpha_sigma = 0`, `A = -r d_r`.
    pub fn preq_data_r(&self) -> Result<PreqData> {
        let c = &self.r_chart;
        let r = Scalar::var(c.var(Self::last(c)));
        let pair = AnchorRep::new(KVector::partial(c, Self::last(c)).scale(&-r), KForm::zero(c, 1))?;
        PreqData::new(self.lebrun_poisson()?, KForm::zero(c, 2), pair, KForm::zero(c, 1))
    }

    /// The Jacobi pair of the prequantized Poisson end, read off `Lbar`.
    pub fn lebrun_jacobi(&self) -> Result<JacobiPair> {
        build_lbar(&self.preq_data_r()?)?.regraph_jacobi()
    }

    /// The same pair written out term by term on the chart
    /// `(u, q, p, r, theta)`.
    pub fn lebrun_jacobi_literal(&self, q: &ChartRef) -> Result<JacobiPair> {
        let (ri, ti) = (q.dim() - 2, q.dim() - 1);
        let r = Scalar::var(q.var(ri));
        let mut euler = KVector::partial(q, ri).scale(&r);
        let mut sympl = KVector::zero(q, 2);
        for i in 0..self.n {
            let p = Scalar::var(q.var(self.p(i)));
            euler = euler.add(&KVector::partial(q, self.p(i)).scale(&p))?;
            sympl = sympl.add(&KVector::partial(q, self.q(i)).wedge(&KVector::partial(q, self.p(i)))?)?;
        }
        let twist = KVector::partial(q, ti).wedge(&KVector::partial(q, ri))?;
        let lambda = euler.wedge(&KVector::partial(q, self.u()))?.add(&sympl)?.sub(&twist)?.scale(&r);
        Ok(JacobiPair { lambda, e: KVector::partial(q, ti) })
    }

    pub fn build(&self, variant: &str) -> Result<Built> {
        Ok(match variant {
            "symplectization" => Built::Dirac(self.symplectization()?.0),
            "closure_zero" => Built::Dirac(self.closure_zero()?),
            "lebrun_poisson" => Built::Dirac(self.lebrun_poisson()?),
            "glued_dirac" => Built::Glued(Box::new(self.glued_dirac()?)),
            "lebrun_jacobi" => Built::Jacobi(self.lebrun_jacobi()?),
            "preq_data" => Built::Preq(Box::new((self.preq_data_s()?, self.preq_data_r()?))),
            other => return Err(Error::Invalid(format!("unknown variant `{other}`"))),
        })
    }

    /// Kernel of `d(s sigma_M)` at boundary points against `ker sigma_M`,
    /// and the basic-function verdicts for `samples`.
    pub fn char_boundary_check(&self, points: &[Point], samples: &[Scalar]) -> Result<BoundaryReport> {
        let l = self.closure_zero()?;
        let c = &self.s_chart;
        let contact = self.contact_distribution(c)?;
        let mut kernels = Vec::new();
        for p in points {
            let sv = c.var(Self::last(c));
            if p.0.get(&sv).is_none_or(|x| *x != num_rational::BigRational::from_integer(0.into())) {
                return Err(Error::Invalid(format!("{p} is not on s = 0")));
            }
            let k = l.char_dist_at_point(p)?;
            let expected: Vec<KVector> = contact.iter().map(|v| v.eval_at(p)).collect::<Result<_>>()?;
            let matches = same_span(&k, &expected);
            kernels.push((p.clone(), k, matches));
        }
        let basic = samples.iter().map(|f| Ok((f.clone(), l.is_basic(f)?))).collect::<Result<_>>()?;
        Ok(BoundaryReport { kernels, basic })
    }

    /// `ker sigma_M` spanned by `d_p_i` and `d_q_i - p_i d_u`.
    pub fn contact_distribution(&self, c: &ChartRef) -> Result<Vec<KVector>> {
        let mut out = Vec::new();
        for i in 0..self.n {
            out.push(KVector::partial(c, self.p(i)));
            let p = Scalar::var(c.var(self.p(i)));
            out.push(KVector::partial(c, self.q(i)).sub(&KVector::partial(c, self.u()).scale(&p))?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryReport {
    /// Point, kernel basis found, whether it spans `ker sigma_M` there.
    pub kernels: Vec<(Point, Vec<KVector>, bool)>,
    pub basic: Vec<(Scalar, Basic)>,
}

fn same_span(a: &[KVector], b: &[KVector]) -> bool {
    let m = |v: &[KVector]| -> Matrix { v.iter().map(|x| x.components()).collect() };
    let (ma, mb) = (m(a), m(b));
    let ra = if ma.is_empty() { 0 } else { linalg::rank(&ma) };
    let rb = if mb.is_empty() { 0 } else { linalg::rank(&mb) };
    let both: Matrix = ma.into_iter().chain(mb).collect();
    let rboth = if both.is_empty() { 0 } else { linalg::rank(&both) };
    ra == rb && rb == rboth
}

/// Moves a Dirac structure along a coordinate change.
pub fn transport(map: &CoordMap, l: &DiracStructure) -> Result<DiracStructure> {
    let gens = l
        .frame()
        .gens()
        .iter()
        .map(|g| CouSection::new(map.push_vector(&g.x)?, map.pull_form(&g.xi)?))
        .collect::<Result<Vec<_>>>()?;
    DiracStructure::from_gens(map.target(), gens, vec![])
}

/// Degree-one Taylor truncation of each coefficient at `p`.
pub fn linearize_at_point(t: &KVector, p: &Point) -> Result<KVector> {
    let c = t.chart();
    t.map_coeffs(|a| {
        let den_at = Scalar::from_poly(a.den().clone()).eval_at(p);
        if den_at.map(|v| v.is_zero()).unwrap_or(true) {
            return Err(Error::NonPolynomialAtPoint(format!("{a} at {p}")));
        }
        let mut out = a.eval_at(p)?;
        for v in c.vars() {
            let Some(x0) = p.0.get(&v) else { continue };
            let slope = a.diff(v).eval_at(p)?;
            let shift = &Scalar::var(v) - &Scalar::constant(crate::scalar::GaussRat::from_rational(x0.clone()));
            out = &out + &(&slope * &shift);
        }
        Ok(out)
    })
}

/// Target of the pinch: `(u, q, p, x, y)` in place of `(u, q, p, r, theta)`.
pub fn pinch_chart(source: &ChartRef) -> Result<ChartRef> {
    let n = source.dim();
    let mut b = Chart::builder(&format!("{}_pinched", source.name));
    for i in 0..n - 2 {
        b = b.coord(source.coord_name(i));
    }
    Ok(b.coord("x").coord("y").build()?)
}

/// Rewrites a tensor in `(r, theta)` (the last two coordinates) through
/// `r = x^2 + y^2`, `d_theta = x d_y - y d_x` and
/// `d_r = (x d_x + y d_y) / (2(x^2 + y^2))`.
///
/// The result must be polynomial; otherwise the fibre collapse is not smooth
/// for this tensor.
pub fn pinch_tensor(t: &KVector, target: &ChartRef) -> Result<KVector> {
    let c = t.chart();
    let n = c.dim();
    let (rv, tv) = (c.var(n - 2), c.var(n - 1));
    let x = Scalar::var(target.var(n - 2));
    let y = Scalar::var(target.var(n - 1));
    let rho = &(&x * &x) + &(&y * &y);
    let sub: BTreeMap<_, _> = [(rv, rho.clone())].into();
    let image = |i: usize| -> Result<KVector> {
        Ok(if i == n - 1 {
            KVector::vector(target, {
                let mut v = vec![Scalar::zero(); n];
                v[n - 2] = -&y;
                v[n - 1] = x.clone();
                v
            })
        } else if i == n - 2 {
            let k = (&Scalar::from_int(2) * &rho).inv()?;
            KVector::vector(target, {
                let mut v = vec![Scalar::zero(); n];
                v[n - 2] = &x * &k;
                v[n - 1] = &y * &k;
                v
            })
        } else {
            KVector::partial(target, i)
        })
    };
    let mut out = KVector::zero(target, t.degree());
    for (idx, a) in t.entries() {
        if a.depends_on(tv) {
            return Err(Error::Invalid(format!("coefficient {a} depends on the fibre angle")));
        }
        let a = a.subst(&sub)?;
        let mut term = KVector::from_entries(target, 0, &[(vec![], a)])?;
        for &i in idx {
            term = term.wedge(&image(i)?)?;
        }
        out = out.add(&term)?;
    }
    if let Some((_, a)) = out.entries().find(|(_, a)| !a.is_polynomial()) {
        return Err(Error::FractionalPowerResidue(format!("{a}")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pinched {
    pub pair: JacobiPair,
    /// Linear equations cutting out the zero set of `E'`, when its
    /// components are linear.
    pub e_zero_locus: Option<Vec<String>>,
}

pub fn pinch_transform(j: &JacobiPair) -> Result<Pinched> {
    let target = pinch_chart(j.lambda.chart())?;
    let pair = JacobiPair { lambda: pinch_tensor(&j.lambda, &target)?, e: pinch_tensor(&j.e, &target)? };
    let e_zero_locus = linear_zero_locus(&pair.e);
    Ok(Pinched { pair, e_zero_locus })
}

/// Zero set of a vector field whose components are homogeneous linear
/// forms, as reduced equations `x = 0`, `y - 2 z = 0`, ...
pub fn linear_zero_locus(v: &KVector) -> Option<Vec<String>> {
    let c = v.chart();
    let vars = c.vars();
    let mut rows: Matrix = Vec::new();
    for a in v.components() {
        if a.is_zero() {
            continue;
        }
        if !a.is_polynomial() {
            return None;
        }
        let row: Vec<Scalar> = vars.iter().map(|&x| a.diff(x)).collect();
        if row.iter().any(|k| !k.is_constant()) {
            return None;
        }
        let lin: Scalar = row.iter().zip(&vars).map(|(k, &x)| k * &Scalar::var(x)).sum();
        if lin != a {
            return None;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Some(vec![]);
    }
    let red = linalg::rref(&rows, None);
    let mut piv = red.pivots.clone();
    piv.sort_by_key(|p| p.1);
    Some(
        piv.iter()
            .map(|&(r, _)| {
                let lin: Scalar = red.rows[r].iter().zip(&vars).map(|(k, &x)| k * &Scalar::var(x)).sum();
                format!("{lin} = 0")
            })
            .collect(),
    )
}

/// `(Lambda / f, E / f - Lambda(., d(1/f)))`.
pub fn conformal_transform(j: &JacobiPair, f: &Scalar) -> Result<JacobiPair> {
    let a = f.inv()?;
    let c = j.lambda.chart();
    let shift = j.lambda.sharp(&KForm::exact(c, &a))?;
    Ok(JacobiPair { lambda: j.lambda.scale(&a), e: j.e.scale(&a).sub(&shift)? })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactSample {
    pub point: Point,
    /// Determinant of the `(X, f)` block of the Jacobi graph at the point.
    pub det: Scalar,
    pub nondegenerate: bool,
}

/// The Jacobi graph is the graph of a contact form at `p` exactly when its
/// `(X, f)` block is invertible there.
pub fn contact_check(j: &JacobiPair, points: &[Point]) -> Result<Vec<ContactSample>> {
    let c = j.lambda.chart();
    let n = c.dim();
    let mut block: Matrix = Vec::new();
    let ec = j.e.components();
    for (i, ei) in ec.iter().enumerate() {
        let mut row = j.lambda.sharp(&KForm::dx(c, i))?.components();
        row.push(ei.clone());
        block.push(row);
    }
    let mut last: Vec<Scalar> = ec.iter().map(|x| -x).collect();
    last.push(Scalar::zero());
    block.push(last);
    debug_assert_eq!(block.len(), n + 1);
    points
        .iter()
        .map(|p| {
            let at: Matrix = block.iter().map(|r| r.iter().map(|x| x.eval_at(p)).collect::<std::result::Result<_, _>>()).collect::<std::result::Result<_, _>>()?;
            let det = linalg::det(&at);
            Ok(ContactSample { point: p.clone(), nondegenerate: !det.is_zero(), det })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{beta_from_pair, preq_residual, table_is_zero};
    use crate::dirac::int_point;

    fn fam() -> LebrunFamily {
        LebrunFamily::new(1).unwrap()
    }

    #[test]
    fn poisson_end_is_integrable() {
        assert!(fam().lebrun_poisson().unwrap().integrability().unwrap().passed());
    }

    #[test]
    fn overlap_agrees() {
        let g = fam().glued_dirac().unwrap();
        assert!(g.overlap.equal);
        assert!(!g.bare.equal && g.bare_negated.equal);
        assert!(g.s_side.integrability().unwrap().passed());
    }

    #[test]
    fn residuals_vanish_on_both_ends() {
        let f = fam();
        for d in [f.preq_data_s().unwrap(), f.preq_data_r().unwrap()] {
            let b = beta_from_pair(d.base(), d.pair()).unwrap();
            assert!(table_is_zero(&preq_residual(d.base(), d.omega(), &b).unwrap()));
        }
    }

    #[test]
    fn jacobi_pair_matches_literal_form() {
        let f = fam();
        let j = f.lebrun_jacobi().unwrap();
        let lit = f.lebrun_jacobi_literal(j.lambda.chart()).unwrap();
        assert_eq!(j, lit);
    }

    #[test]
    fn linearization_at_origin() {
        let f = fam();
        let c = &f.r_chart;
        let lam = f.lebrun_lambda(c).unwrap();
        let lin = linearize_at_point(&lam, &int_point(c, &[0, 0, 0, 0])).unwrap();
        let r = Scalar::var(c.var(3));
        let expect = KVector::partial(c, 1).wedge(&KVector::partial(c, 2)).unwrap().scale(&r);
        assert_eq!(lin, expect);
    }

    #[test]
    fn pinch_rules() {
        let f = fam();
        let q = f.lebrun_jacobi().unwrap().lambda.chart().clone();
        let t = pinch_chart(&q).unwrap();
        let e = pinch_tensor(&KVector::partial(&q, 4), &t).unwrap();
        assert_eq!(linear_zero_locus(&e).unwrap().len(), 2);
        assert!(matches!(pinch_tensor(&KVector::partial(&q, 3), &t), Err(Error::FractionalPowerResidue(_))));
    }

    #[test]
    fn pinch_and_conformal_change() {
        let f = fam();
        let j = f.lebrun_jacobi().unwrap();
        let p = pinch_transform(&j).unwrap();
        assert_eq!(p.e_zero_locus.as_ref().unwrap().len(), 2);
        let dj = DiracJacobiStructure::jacobi(&p.pair.lambda, &p.pair.e).unwrap();
        assert!(dj.integrability().unwrap().passed());
        let r = Scalar::var(j.lambda.chart().var(3));
        let conf = conformal_transform(&j, &r).unwrap();
        let pc = pinch_transform(&conf).unwrap();
        let djc = DiracJacobiStructure::jacobi(&pc.pair.lambda, &pc.pair.e).unwrap();
        assert!(djc.integrability().unwrap().passed());
        let tc = pc.pair.lambda.chart();
        let pts: Vec<Point> = [(1, 1, 0, 1), (1, 1, 1, 1), (1, 2, 1, 2)]
            .iter()
            .map(|&(xn, xd, yn, yd)| {
                let mut pt = int_point(tc, &[0, 0, 0]);
                pt.set(tc.var(3), num_rational::BigRational::new(xn.into(), xd.into()));
                pt.set(tc.var(4), num_rational::BigRational::new(yn.into(), yd.into()));
                pt
            })
            .collect();
        for s in contact_check(&pc.pair, &pts).unwrap() {
            assert!(s.nondegenerate, "{:?}", s);
        }
    }

    #[test]
    fn boundary_kernel_is_contact_distribution() {
        let f = fam();
        let c = &f.s_chart;
        let su = &Scalar::var(c.var(3)) * &Scalar::var(c.var(0));
        let rep = f
            .char_boundary_check(&[int_point(c, &[0, 0, 0, 0]), int_point(c, &[1, 2, 3, 0])], &[su, Scalar::var(c.var(0))])
            .unwrap();
        assert!(rep.kernels.iter().all(|k| k.2 && k.1.len() == 2));
        assert!(rep.basic[0].1.is_basic());
        assert!(!rep.basic[1].1.is_basic());
    }

    #[test]
    fn symplectization_is_diracization() {
        let f = fam();
        let (sym, _) = f.symplectization().unwrap();
        let (dz, _) = f.contact_graph().unwrap().diracization().unwrap();
        assert!(span_equal(sym.frame(), dz.frame()).unwrap().equal);
    }
}
