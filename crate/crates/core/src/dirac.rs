//! Dirac structures on a chart: Courant bracket, integrability, graphs,
//! characteristic distribution, admissible and basic functions.

use num_rational::BigRational;

use crate::calculus::{KForm, KVector};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::linpair::{certify_all, validate_frame, CouSection, Section, StructureFrame};
use crate::scalar::{witness_for_nonzero, ChartRef, GaussRat, Point, Scalar, VarId};

/// Sections that carry a bracket, so integrability can be tested uniformly.
pub trait Bracket: Section {
    fn bracket(&self, o: &Self) -> Result<Self>;
}

/// `[X1,X2] + (L_X1 xi2 - L_X2 xi1 + 1/2 d(i_X2 xi1 - i_X1 xi2))`.
pub fn courant_bracket(a: &CouSection, b: &CouSection) -> Result<CouSection> {
    let x = a.x.bracket(&b.x)?;
    let t = &a.xi.eval1(&b.x)? - &b.xi.eval1(&a.x)?;
    let corr = KForm::exact(a.chart(), &t).scale(&Scalar::from_ratio(1, 2));
    let xi = b.xi.lie(&a.x)?.sub(&a.xi.lie(&b.x)?)?.add(&corr)?;
    CouSection::new(x, xi)
}

impl Bracket for CouSection {
    fn bracket(&self, o: &Self) -> Result<Self> {
        courant_bracket(self, o)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrability {
    Pass,
    /// `<[e_i, e_j], e_k>_+ = value != 0`.
    Fail { i: usize, j: usize, k: usize, value: Scalar },
}

impl Integrability {
    pub fn passed(&self) -> bool {
        matches!(self, Integrability::Pass)
    }
}

/// Tests `<[e_i, e_j], e_k>_+ = 0` for all `i < j` and all `k`.
pub fn integrability_check<S: Bracket>(frame: &StructureFrame<S>) -> Result<Integrability> {
    let g = frame.gens();
    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            let br = g[i].bracket(&g[j])?;
            for (k, gk) in g.iter().enumerate() {
                let v = br.pair_plus(gk)?;
                if !v.is_zero() {
                    return Ok(Integrability::Fail { i, j, k, value: v });
                }
            }
        }
    }
    Ok(Integrability::Pass)
}

/// Declared site where `L cap TM` may jump in rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Locus {
    Point(Point),
    /// The hyperplane `var = value`.
    Hyperplane { var: VarId, value: BigRational },
}

impl Locus {
    pub fn hyperplane(var: VarId, value: i64) -> Locus {
        Locus::Hyperplane { var, value: BigRational::from_integer(value.into()) }
    }

    fn as_point(&self) -> Point {
        match self {
            Locus::Point(p) => p.clone(),
            Locus::Hyperplane { var, value } => Point(std::iter::once((*var, value.clone())).collect()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiracStructure {
    frame: StructureFrame<CouSection>,
    loci: Vec<Locus>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible(KVector),
    /// A hamiltonian vector field exists over the fraction field but its
    /// denominator `factor` is not certified. A witness point means the
    /// denominator vanishes in the domain.
    NotCertified { x: KVector, factor: String, witness: Option<Point> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Basic {
    Basic,
    NotBasic { witness: Option<Point>, detail: String },
}

impl Basic {
    pub fn is_basic(&self) -> bool {
        matches!(self, Basic::Basic)
    }
}

impl DiracStructure {
    pub fn new(frame: StructureFrame<CouSection>, loci: Vec<Locus>) -> Result<Self> {
        for l in &loci {
            let p = l.as_point();
            if !p.in_domain(frame.chart()) || p.0.keys().any(|v| frame.chart().index_of_var(*v).is_none()) {
                return Err(Error::PointOutsideDomain(p.to_string()));
            }
        }
        Ok(DiracStructure { frame, loci })
    }

    pub fn from_gens(chart: &ChartRef, gens: Vec<CouSection>, loci: Vec<Locus>) -> Result<Self> {
        DiracStructure::new(validate_frame(chart, gens)?, loci)
    }

    /// Graph of a 2-form: generators `d/dx_i + i_{d/dx_i} w`.
    pub fn graph_two_form(w: &KForm) -> Result<Self> {
        if w.degree() != 2 {
            return Err(Error::Invalid("graph needs a 2-form".into()));
        }
        let c = w.chart();
        let gens: Result<Vec<_>> = (0..c.dim())
            .map(|i| {
                let x = KVector::partial(c, i);
                let xi = w.contract(&x)?;
                CouSection::new(x, xi)
            })
            .collect();
        DiracStructure::from_gens(c, gens?, vec![])
    }

    /// Graph of a bivector: generators `L(., dx_i) + dx_i`.
    pub fn graph_bivector(l: &KVector) -> Result<Self> {
        if l.degree() != 2 {
            return Err(Error::Invalid("graph needs a bivector".into()));
        }
        let c = l.chart();
        let gens: Result<Vec<_>> = (0..c.dim())
            .map(|i| {
                let xi = KForm::dx(c, i);
                CouSection::new(l.sharp(&xi)?, xi)
            })
            .collect();
        DiracStructure::from_gens(c, gens?, vec![])
    }

    pub fn with_loci(mut self, loci: Vec<Locus>) -> Result<Self> {
        self.loci = loci;
        DiracStructure::new(self.frame, self.loci)
    }

    pub fn frame(&self) -> &StructureFrame<CouSection> {
        &self.frame
    }

    pub fn chart(&self) -> &ChartRef {
        self.frame.chart()
    }

    pub fn loci(&self) -> &[Locus] {
        &self.loci
    }

    pub fn integrability(&self) -> Result<Integrability> {
        integrability_check(&self.frame)
    }

    /// Basis of `L cap T_pM` at a rational point.
    pub fn char_dist_at_point(&self, p: &Point) -> Result<Vec<KVector>> {
        if !p.in_domain(self.chart()) {
            return Err(Error::PointOutsideDomain(p.to_string()));
        }
        let gens: Result<Vec<CouSection>> = self.frame.gens().iter().map(|g| g.eval_at(p)).collect();
        Ok(char_kernel(self.chart(), &gens?))
    }

    /// `L cap TM` over the fraction field.
    pub fn char_generic(&self) -> Vec<KVector> {
        char_kernel(self.chart(), self.frame.gens())
    }

    /// Hamiltonian vector field of `f`: solves `X + df` in the frame span.
    pub fn admissible_solve(&self, f: &Scalar) -> Result<Admissibility> {
        let c = self.chart();
        let df = KForm::exact(c, f);
        let xis: Matrix = self.frame.gens().iter().map(|g| g.xi.components()).collect();
        let a = linalg::transpose(&xis);
        let coeffs = linalg::solve(&a, &df.components(), Some(c)).ok_or(Error::NoSolutionOverFractionField)?;
        let mut x = KVector::zero(c, 1);
        for (ci, g) in coeffs.iter().zip(self.frame.gens()) {
            x = x.add(&g.x.scale(ci))?;
        }
        Ok(match certify_all(&x.components(), c) {
            None => Admissibility::Admissible(x),
            Some((factor, witness)) => Admissibility::NotCertified { x, factor, witness },
        })
    }

    /// Certified hamiltonian vector field or `NotAdmissible`.
    pub fn hamiltonian(&self, f: &Scalar) -> Result<KVector> {
        match self.admissible_solve(f) {
            Ok(Admissibility::Admissible(x)) => Ok(x),
            Ok(Admissibility::NotCertified { factor, .. }) => {
                Err(Error::NotAdmissible(format!("{f}: denominator {factor} not certified")))
            }
            Err(Error::NoSolutionOverFractionField) => Err(Error::NotAdmissible(format!("{f}: df not in the image"))),
            Err(e) => Err(e),
        }
    }

    /// `{f, g} = X_g . f`.
    pub fn adm_bracket(&self, f: &Scalar, g: &Scalar) -> Result<Scalar> {
        self.hamiltonian(f)?;
        let xg = self.hamiltonian(g)?;
        xg.apply(f)
    }

    /// Whether `-[X_f, X_g] + d{f,g}` lies in the frame span with certified
    /// coefficients.
    pub fn bracket_is_hamiltonian(&self, f: &Scalar, g: &Scalar) -> Result<bool> {
        let xf = self.hamiltonian(f)?;
        let xg = self.hamiltonian(g)?;
        let fg = xg.apply(f)?;
        let sec = CouSection::new(xf.bracket(&xg)?.neg(), KForm::exact(self.chart(), &fg))?;
        Ok(self.frame.contains(&sec).is_certified())
    }

    pub fn jacobi_residual(&self, f: &Scalar, g: &Scalar, h: &Scalar) -> Result<Scalar> {
        let fg = self.adm_bracket(f, g)?;
        let gh = self.adm_bracket(g, h)?;
        let hf = self.adm_bracket(h, f)?;
        let a = self.adm_bracket(&fg, h)?;
        let b = self.adm_bracket(&gh, f)?;
        let c = self.adm_bracket(&hf, g)?;
        Ok(&(&a + &b) + &c)
    }

    /// `df` annihilates `L cap TM` generically and at every declared locus.
    pub fn is_basic(&self, f: &Scalar) -> Result<Basic> {
        let c = self.chart();
        let df = KForm::exact(c, f);
        for y in self.char_generic() {
            let v = df.eval1(&y)?;
            if !v.is_zero() {
                return Ok(Basic::NotBasic {
                    witness: witness_for_nonzero(&v, c),
                    detail: format!("df({y}) = {v}"),
                });
            }
        }
        for l in &self.loci {
            let p = l.as_point();
            let gens: Result<Vec<CouSection>> = self.frame.gens().iter().map(|g| g.eval_at(&p)).collect();
            let dfp = df.eval_at(&p)?;
            for y in char_kernel(c, &gens?) {
                let v = dfp.eval1(&y)?;
                if !v.is_zero() {
                    let witness = witness_for_nonzero(&v, c).map(|mut w| {
                        w.0.extend(p.0.clone());
                        w
                    });
                    return Ok(Basic::NotBasic { witness: witness.or(Some(p.clone())), detail: format!("df({y}) = {v}") });
                }
            }
        }
        Ok(Basic::Basic)
    }
}

/// Tangent parts of the combinations of `gens` whose cotangent part vanishes.
pub(crate) fn char_kernel(chart: &ChartRef, gens: &[CouSection]) -> Vec<KVector> {
    let n = chart.dim();
    let xis: Matrix = gens.iter().map(|g| g.xi.components()).collect();
    let ker = linalg::kernel(&linalg::transpose(&xis), gens.len());
    let vecs: Matrix = ker
        .iter()
        .map(|c| (0..n).map(|a| c.iter().zip(gens).map(|(ci, g)| ci * &g.x.components()[a]).sum()).collect())
        .collect();
    if vecs.is_empty() {
        return vec![];
    }
    let red = linalg::rref(&vecs, None);
    let mut piv = red.pivots.clone();
    piv.sort_by_key(|p| p.1);
    piv.into_iter().map(|(r, _)| KVector::vector(chart, red.rows[r].clone())).collect()
}

/// Convenience for tests and fixtures: a rational point from integers.
pub fn int_point(chart: &ChartRef, vals: &[i64]) -> Point {
    Point(chart.vars().into_iter().zip(vals.iter().map(|&v| BigRational::from_integer(v.into()))).collect())
}

/// A constant-coefficient scalar.
pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::constant(GaussRat::from_ratio(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, Chart};

    fn r2() -> ChartRef {
        Chart::builder("dr_r2").coord("x1").coord("x2").build().unwrap()
    }

    fn s(c: &ChartRef, e: &str) -> Scalar {
        parse_scalar(e, c).unwrap()
    }

    fn example_2_6() -> DiracStructure {
        let c = r2();
        let w = KForm::from_named(&c, 2, &[("dx1^dx2", s(&c, "x1^2"))]).unwrap();
        let x1 = c.var(0);
        DiracStructure::graph_two_form(&w).unwrap().with_loci(vec![Locus::hyperplane(x1, 0)]).unwrap()
    }

    #[test]
    fn courant_of_constant_and_x_dy() {
        let c = r2();
        let a = CouSection::new(KVector::partial(&c, 0), KForm::zero(&c, 1)).unwrap();
        let b = CouSection::new(KVector::zero(&c, 1), KForm::one_form(&c, vec![Scalar::zero(), s(&c, "x1")])).unwrap();
        let br = courant_bracket(&a, &b).unwrap();
        assert!(br.x.is_zero());
        assert_eq!(br.xi, KForm::dx(&c, 1));
        assert!(courant_bracket(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn example_2_6_rank_jump() {
        let d = example_2_6();
        let c = d.chart().clone();
        assert_eq!(d.char_dist_at_point(&int_point(&c, &[1, 0])).unwrap().len(), 0);
        assert_eq!(d.char_dist_at_point(&int_point(&c, &[0, 0])).unwrap().len(), 2);
        assert!(d.integrability().unwrap().passed());
    }

    #[test]
    fn example_2_6_x1_squared() {
        let d = example_2_6();
        let c = d.chart().clone();
        let f = s(&c, "x1^2");
        match d.admissible_solve(&f).unwrap() {
            Admissibility::NotCertified { factor, witness, .. } => {
                assert_eq!(factor, "x1");
                assert!(witness.is_some());
            }
            other => panic!("{other:?}"),
        }
        assert!(d.is_basic(&f).unwrap().is_basic());
        assert!(!d.is_basic(&s(&c, "x2")).unwrap().is_basic());
        assert!(d.is_basic(&Scalar::from_int(7)).unwrap().is_basic());
    }

    #[test]
    fn symplectic_hamiltonians() {
        let c = r2();
        let w = KForm::from_named(&c, 2, &[("dx1^dx2", Scalar::one())]).unwrap();
        let d = DiracStructure::graph_two_form(&w).unwrap();
        assert_eq!(d.hamiltonian(&s(&c, "x1")).unwrap(), KVector::partial(&c, 1).neg());
        assert_eq!(d.adm_bracket(&s(&c, "x1"), &s(&c, "x2")).unwrap(), Scalar::one());
        assert!(d.hamiltonian(&Scalar::one()).unwrap().is_zero());
        let r = d.jacobi_residual(&s(&c, "x1^2"), &s(&c, "x2"), &s(&c, "x1*x2")).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn non_closed_form_fails() {
        let c = Chart::builder("dr_r3").coord("x").coord("y").coord("z").build().unwrap();
        let w = KForm::from_named(&c, 2, &[("dy^dz", s(&c, "x"))]).unwrap();
        let d = DiracStructure::graph_two_form(&w).unwrap();
        assert!(!d.integrability().unwrap().passed());
    }
}
