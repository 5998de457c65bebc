//! Dirac-Jacobi structures: extended Courant bracket, graphs of Jacobi pairs
//! and form pairs, Reeb fields, admissible pairs, brackets and Diracization.

use crate::calculus::{KForm, KVector};
use crate::dirac::{integrability_check, Bracket, DiracStructure, Integrability, Locus};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::linpair::{certify_all, validate_frame, CouSection, E1Section, Section, StructureFrame};
use crate::scalar::{unit_certify, witness_for_nonzero, Certificate, ChartRef, Point, Scalar, VarId};

fn half() -> Scalar {
    Scalar::from_ratio(1, 2)
}

/// The extended Courant bracket on sections of `E1(M)`.
pub fn ext_courant_bracket(a: &E1Section, b: &E1Section) -> Result<E1Section> {
    let c = a.chart();
    let x = a.x.bracket(&b.x)?;
    let f = &a.x.apply(&b.f)? - &b.x.apply(&a.f)?;
    let t = &a.xi.eval1(&b.x)? - &b.xi.eval1(&a.x)?;
    let d = |s: &Scalar| KForm::exact(c, s);
    let mut xi = b.xi.lie(&a.x)?.sub(&a.xi.lie(&b.x)?)?.add(&d(&t).scale(&half()))?;
    xi = xi.add(&b.xi.scale(&a.f))?.sub(&a.xi.scale(&b.f))?;
    let corr = d(&a.f)
        .scale(&b.g)
        .sub(&d(&b.f).scale(&a.g))?
        .sub(&d(&b.g).scale(&a.f))?
        .add(&d(&a.g).scale(&b.f))?;
    xi = xi.add(&corr.scale(&half()))?;
    let g0 = &a.x.apply(&b.g)? - &b.x.apply(&a.g)?;
    let g1 = &(&t - &(&b.f * &a.g)) + &(&a.f * &b.g);
    let g = &g0 + &(&half() * &g1);
    E1Section::new(x, f, xi, g)
}

impl Bracket for E1Section {
    fn bracket(&self, o: &Self) -> Result<Self> {
        ext_courant_bracket(self, o)
    }
}

/// `M x R` with coordinate `t` and the unit `e^t`, as used by the embedding
/// `U` and by Diracization.
#[derive(Clone, Debug)]
pub struct Extension {
    pub base: ChartRef,
    pub chart: ChartRef,
    pub t: VarId,
    pub et: VarId,
}

impl Extension {
    pub fn new(base: &ChartRef) -> Result<Self> {
        let tname = base.fresh_name("t");
        let ename = base.fresh_name(&format!("e{tname}"));
        let chart = base
            .extend(&format!("{}_x_R", base.name))
            .coord(&tname)
            .unit(&ename, &tname, 1, 1)
            .build()?;
        let t = chart.var(chart.dim() - 1);
        let et = chart.unit_var(&ename).expect("unit just added");
        Ok(Extension { base: base.clone(), chart, t, et })
    }

    pub fn et(&self) -> Scalar {
        Scalar::var(self.et)
    }

    pub fn lift_vector(&self, x: &KVector) -> KVector {
        let mut c = x.components();
        c.push(Scalar::zero());
        KVector::vector(&self.chart, c)
    }

    pub fn lift_form(&self, w: &KForm) -> KForm {
        let mut c = w.components();
        c.push(Scalar::zero());
        KForm::one_form(&self.chart, c)
    }

    /// `U((X,f) + (xi,g)) = (X + f d/dt) + e^t (xi + g dt)`.
    pub fn embed(&self, s: &E1Section) -> CouSection {
        let mut xc = s.x.components();
        xc.push(s.f.clone());
        let et = self.et();
        let mut wc: Vec<Scalar> = s.xi.components().iter().map(|c| &et * c).collect();
        wc.push(&et * &s.g);
        CouSection {
            x: KVector::vector(&self.chart, xc),
            xi: KForm::one_form(&self.chart, wc),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiracJacobiStructure {
    frame: StructureFrame<E1Section>,
    loci: Vec<Locus>,
}

/// `(X_f, phi_f)` with `(X_f, phi_f) + (df, f)` in the structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissiblePair {
    pub x: KVector,
    pub phi: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DjAdmissibility {
    Admissible(AdmissiblePair),
    NotCertified { pair: AdmissiblePair, factor: String, witness: Option<Point> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiPair {
    pub lambda: KVector,
    pub e: KVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormPair {
    pub omega: KForm,
    pub sigma: KForm,
}

fn e1(x: KVector, f: Scalar, xi: KForm, g: Scalar) -> Result<E1Section> {
    E1Section::new(x, f, xi, g)
}

impl DiracJacobiStructure {
    pub fn new(frame: StructureFrame<E1Section>, loci: Vec<Locus>) -> Self {
        DiracJacobiStructure { frame, loci }
    }

    pub fn from_gens(chart: &ChartRef, gens: Vec<E1Section>) -> Result<Self> {
        Ok(DiracJacobiStructure { frame: validate_frame(chart, gens)?, loci: vec![] })
    }

    pub fn with_loci(mut self, loci: Vec<Locus>) -> Self {
        self.loci = loci;
        self
    }

    /// Graph of `((L~, -E); (E, 0))`: generators `(L(.,dx_i), E_i) + (dx_i, 0)`
    /// and `(-E, 0) + (0, 1)`.
    pub fn jacobi(lambda: &KVector, e: &KVector) -> Result<Self> {
        let c = lambda.chart();
        let ec = e.components();
        let mut gens = Vec::new();
        for (i, ei) in ec.iter().enumerate() {
            let dx = KForm::dx(c, i);
            gens.push(e1(lambda.sharp(&dx)?, ei.clone(), dx, Scalar::zero())?);
        }
        gens.push(e1(e.neg(), Scalar::zero(), KForm::zero(c, 1), Scalar::one())?);
        DiracJacobiStructure::from_gens(c, gens)
    }

    /// Graph of `((W~, s); (-s, 0))`: generators `(d_i, 0) + (i_{d_i} W, -s_i)`
    /// and `(0, 1) + (s, 0)`.
    pub fn form_pair(omega: &KForm, sigma: &KForm) -> Result<Self> {
        let c = omega.chart();
        let sc = sigma.components();
        let mut gens = Vec::new();
        for (i, si) in sc.iter().enumerate() {
            let x = KVector::partial(c, i);
            gens.push(e1(x.clone(), Scalar::zero(), omega.contract(&x)?, -si)?);
        }
        gens.push(e1(KVector::zero(c, 1), Scalar::one(), sigma.clone(), Scalar::zero())?);
        DiracJacobiStructure::from_gens(c, gens)
    }

    /// `{(X,0) + (xi,g) : X + xi in L}`.
    pub fn from_dirac(l: &DiracStructure) -> Result<Self> {
        let c = l.chart();
        let mut gens: Vec<E1Section> = l
            .frame()
            .gens()
            .iter()
            .map(|g| e1(g.x.clone(), Scalar::zero(), g.xi.clone(), Scalar::zero()))
            .collect::<Result<_>>()?;
        gens.push(e1(KVector::zero(c, 1), Scalar::zero(), KForm::zero(c, 1), Scalar::one())?);
        Ok(DiracJacobiStructure::from_gens(c, gens)?.with_loci(l.loci().to_vec()))
    }

    pub fn frame(&self) -> &StructureFrame<E1Section> {
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

    /// Rows of the frame rewritten so the block `cols` becomes the identity.
    fn normalize_on(&self, cols: &[usize]) -> Result<Matrix> {
        let m = self.frame.matrix();
        let block: Matrix = m.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        let det = linalg::det(&block);
        if det.is_zero() {
            return Err(Error::RegraphNotInvertible("projection is singular".into()));
        }
        if let Certificate::Refused { factor, .. } = unit_certify(det.num(), self.chart()) {
            return Err(Error::RegraphNotInvertible(format!("determinant factor {factor} not certified")));
        }
        let k = m.len();
        let mut out = Vec::new();
        for j in 0..k {
            // row j of block^{-1} * m: solve block^T y = e_j
            let ej: Vec<Scalar> = (0..k).map(|i| if i == j { Scalar::one() } else { Scalar::zero() }).collect();
            let y = linalg::solve(&linalg::transpose(&block), &ej, Some(self.chart()))
                .ok_or_else(|| Error::RegraphNotInvertible("projection is singular".into()))?;
            let row: Vec<Scalar> = (0..m[0].len()).map(|c| (0..k).map(|i| &y[i] * &m[i][c]).sum()).collect();
            out.push(row);
        }
        if let Some((factor, _)) = certify_all(&out.concat(), self.chart()) {
            return Err(Error::RegraphNotInvertible(format!("denominator {factor} not certified")));
        }
        Ok(out)
    }

    /// The Jacobi pair whose graph is this structure.
    pub fn regraph_jacobi(&self) -> Result<JacobiPair> {
        let c = self.chart();
        let n = c.dim();
        let cols: Vec<usize> = (n + 1..2 * n + 2).collect();
        let rows = self.normalize_on(&cols)?;
        let e = KVector::vector(c, rows[n][..n].iter().map(|v| -v).collect());
        let mut entries = Vec::new();
        for i in 0..n {
            for k in 0..n {
                // component k of L(., dx_i) is L^{ki}
                if k < i {
                    entries.push((vec![k, i], rows[i][k].clone()));
                }
            }
        }
        let lambda = KVector::from_entries(c, 2, &entries)?;
        let back = DiracJacobiStructure::jacobi(&lambda, &e)?;
        if back.frame.matrix() != rows {
            return Err(Error::RegraphNotInvertible("normalized frame is not a Jacobi graph".into()));
        }
        Ok(JacobiPair { lambda, e })
    }

    /// The form pair `(W, s)` whose graph is this structure.
    pub fn regraph_form_pair(&self) -> Result<FormPair> {
        let c = self.chart();
        let n = c.dim();
        let cols: Vec<usize> = (0..n + 1).collect();
        let rows = self.normalize_on(&cols)?;
        let sigma = KForm::one_form(c, rows[n][n + 1..2 * n + 1].to_vec());
        let mut entries = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                entries.push((vec![i, j], rows[i][n + 1 + j].clone()));
            }
        }
        let omega = KForm::from_entries(c, 2, &entries)?;
        let back = DiracJacobiStructure::form_pair(&omega, &sigma)?;
        if back.frame.matrix() != rows {
            return Err(Error::RegraphNotInvertible("normalized frame is not a form-pair graph".into()));
        }
        Ok(FormPair { omega, sigma })
    }

    /// Solves `(X, phi) + (df, f)` in the frame span.
    pub fn admissible_solve(&self, f: &Scalar) -> Result<DjAdmissibility> {
        let c = self.chart();
        let n = c.dim();
        let mut target = KForm::exact(c, f).components();
        target.push(f.clone());
        let cot: Matrix = self.frame.matrix().iter().map(|r| r[n + 1..].to_vec()).collect();
        let coeffs =
            linalg::solve(&linalg::transpose(&cot), &target, Some(c)).ok_or(Error::NoSolutionOverFractionField)?;
        let s = self.frame.combine(&coeffs);
        let pair = AdmissiblePair { x: s.x, phi: s.f };
        let mut all = pair.x.components();
        all.push(pair.phi.clone());
        Ok(match certify_all(&all, c) {
            None => DjAdmissibility::Admissible(pair),
            Some((factor, witness)) => DjAdmissibility::NotCertified { pair, factor, witness },
        })
    }

    pub fn hamiltonian(&self, f: &Scalar) -> Result<AdmissiblePair> {
        match self.admissible_solve(f) {
            Ok(DjAdmissibility::Admissible(p)) => Ok(p),
            Ok(DjAdmissibility::NotCertified { factor, .. }) => {
                Err(Error::NotAdmissible(format!("{f}: denominator {factor} not certified")))
            }
            Err(Error::NoSolutionOverFractionField) => Err(Error::NotAdmissible(format!("{f}: (df, f) not in the image"))),
            Err(e) => Err(e),
        }
    }

    /// `{f, g} = X_g . f + f phi_g`.
    pub fn bracket(&self, f: &Scalar, g: &Scalar) -> Result<Scalar> {
        self.hamiltonian(f)?;
        let pg = self.hamiltonian(g)?;
        Ok(&pg.x.apply(f)? + &(f * &pg.phi))
    }

    /// Checks that the bracket of the admissible sections of `f` and `g`
    /// equals `([X_f,X_g], X_f.phi_g - X_g.phi_f) + (-d{f,g}, -{f,g})`.
    pub fn bracket_identity(&self, f: &Scalar, g: &Scalar) -> Result<bool> {
        let c = self.chart();
        let pf = self.hamiltonian(f)?;
        let pg = self.hamiltonian(g)?;
        let sf = e1(pf.x.clone(), pf.phi.clone(), KForm::exact(c, f), f.clone())?;
        let sg = e1(pg.x.clone(), pg.phi.clone(), KForm::exact(c, g), g.clone())?;
        let lhs = ext_courant_bracket(&sf, &sg)?;
        let fg = self.bracket(f, g)?;
        let rhs = e1(
            pf.x.bracket(&pg.x)?,
            &pf.x.apply(&pg.phi)? - &pg.x.apply(&pf.phi)?,
            KForm::exact(c, &fg).neg(),
            -&fg,
        )?;
        Ok(lhs == rhs)
    }

    pub fn jacobi_residual(&self, f: &Scalar, g: &Scalar, h: &Scalar) -> Result<Scalar> {
        let fg = self.bracket(f, g)?;
        let gh = self.bracket(g, h)?;
        let hf = self.bracket(h, f)?;
        Ok(&(&self.bracket(&fg, h)? + &self.bracket(&gh, f)?) + &self.bracket(&hf, g)?)
    }

    /// `(X, f)` parts of `L cap (TM x R)` over the fraction field.
    fn char_generic_at(&self, gens: &[E1Section]) -> Vec<(KVector, Scalar)> {
        let c = self.chart();
        let n = c.dim();
        let cot: Matrix = gens.iter().map(|g| g.comps()[n + 1..].to_vec()).collect();
        let ker = linalg::kernel(&linalg::transpose(&cot), gens.len());
        ker.iter()
            .map(|k| {
                let s = gens
                    .iter()
                    .zip(k)
                    .fold(E1Section::zero(c), |acc, (g, ci)| acc.add(&g.scale(ci)));
                (s.x, s.f)
            })
            .collect()
    }

    /// `X . psi + psi f = 0` on `L cap (TM x R)`, generically and at loci.
    pub fn is_basic(&self, psi: &Scalar) -> Result<crate::dirac::Basic> {
        let c = self.chart();
        for (x, f) in self.char_generic_at(self.frame.gens()) {
            let v = &x.apply(psi)? + &(psi * &f);
            if !v.is_zero() {
                return Ok(crate::dirac::Basic::NotBasic { witness: witness_for_nonzero(&v, c), detail: format!("{v}") });
            }
        }
        for l in &self.loci {
            let p = match l {
                Locus::Point(p) => p.clone(),
                Locus::Hyperplane { var, value } => Point(std::iter::once((*var, value.clone())).collect()),
            };
            let gens: Result<Vec<E1Section>> = self.frame.gens().iter().map(|g| g.eval_at(&p)).collect();
            for (x, f) in self.char_generic_at(&gens?) {
                // derivatives first, then restrict to the locus
                let v = (&x.apply(psi)? + &(psi * &f)).eval_at(&p)?;
                if !v.is_zero() {
                    return Ok(crate::dirac::Basic::NotBasic { witness: Some(p), detail: format!("{v}") });
                }
            }
        }
        Ok(crate::dirac::Basic::Basic)
    }

    /// `{psi, h} = X_h . psi + psi phi_h` for basic `psi`, admissible `h`.
    pub fn basic_bracket(&self, psi: &Scalar, h: &Scalar) -> Result<Scalar> {
        if let crate::dirac::Basic::NotBasic { detail, .. } = self.is_basic(psi)? {
            return Err(Error::NotBasic(detail));
        }
        let ph = self.hamiltonian(h)?;
        Ok(&ph.x.apply(psi)? + &(psi * &ph.phi))
    }

    /// The Dirac structure `{U(e) : e in L}` on `M x R`.
    pub fn diracization(&self) -> Result<(DiracStructure, Extension)> {
        let ext = Extension::new(self.chart())?;
        let gens = self.frame.gens().iter().map(|g| ext.embed(g)).collect();
        Ok((DiracStructure::from_gens(&ext.chart, gens, vec![])?, ext))
    }
}

/// Reeb field of a contact form: `s(E) = 1`, `i_E ds = 0`.
pub fn reeb_solve(sigma: &KForm) -> Result<KVector> {
    let c = sigma.chart();
    let n = c.dim();
    if n % 2 == 0 {
        return Err(Error::NotContact(format!("chart `{}` has even dimension {n}", c.name)));
    }
    let ds = sigma.d()?;
    let m = (n - 1) / 2;
    let vol = if m == 0 { sigma.clone() } else { sigma.wedge(&ds.wedge_pow(m)?)? };
    let top = vol.coeff(&(0..n).collect::<Vec<_>>());
    if top.is_zero() {
        return Err(Error::NotContact(format!("{sigma} ^ (d {sigma})^{m} vanishes identically")));
    }
    for part in [top.num(), top.den()] {
        if let Certificate::Refused { factor, witness } = unit_certify(part, c) {
            let at = witness.map(|w| format!(" at {w}")).unwrap_or_default();
            return Err(Error::NotContact(format!("volume factor {factor} may vanish{at}")));
        }
    }
    let mut a: Matrix = (0..n).map(|i| (0..n).map(|j| ds.coeff(&[j, i])).collect()).collect();
    let mut b = vec![Scalar::zero(); n];
    a.push(sigma.components());
    b.push(Scalar::one());
    let e = linalg::solve(&a, &b, Some(c)).ok_or_else(|| Error::NotContact("no Reeb solution".into()))?;
    Ok(KVector::vector(c, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, Chart};

    fn contact() -> ChartRef {
        Chart::builder("dj_c").coord("u").coord("q").coord("p").build().unwrap()
    }

    fn s(c: &ChartRef, e: &str) -> Scalar {
        parse_scalar(e, c).unwrap()
    }

    fn sigma(c: &ChartRef) -> KForm {
        KForm::from_named(c, 1, &[("du", Scalar::one()), ("dq", s(c, "p"))]).unwrap()
    }

    #[test]
    fn ext_bracket_example() {
        let c = Chart::builder("dj_r2").coord("x").coord("y").build().unwrap();
        let a = e1(KVector::partial(&c, 0), Scalar::zero(), KForm::zero(&c, 1), Scalar::zero()).unwrap();
        let b = e1(KVector::zero(&c, 1), Scalar::zero(), KForm::from_named(&c, 1, &[("dy", s(&c, "x"))]).unwrap(), Scalar::zero())
            .unwrap();
        let r = ext_courant_bracket(&a, &b).unwrap();
        assert!(r.x.is_zero() && r.f.is_zero() && r.g.is_zero());
        assert_eq!(r.xi, KForm::dx(&c, 1));
    }

    #[test]
    fn reeb_fields() {
        let c = contact();
        assert_eq!(reeb_solve(&sigma(&c)).unwrap(), KVector::partial(&c, 0));
        assert!(matches!(reeb_solve(&KForm::dx(&c, 0)), Err(Error::NotContact(_))));
    }

    #[test]
    fn contact_regraph() {
        let c = contact();
        let sg = sigma(&c);
        let fp = DiracJacobiStructure::form_pair(&sg.d().unwrap(), &sg).unwrap();
        assert!(fp.integrability().unwrap().passed());
        let jp = fp.regraph_jacobi().unwrap();
        assert_eq!(jp.e, KVector::partial(&c, 0));
        let back = DiracJacobiStructure::jacobi(&jp.lambda, &jp.e).unwrap();
        assert!(crate::linpair::span_equal(back.frame(), fp.frame()).unwrap().equal);
        let again = back.regraph_form_pair().unwrap();
        assert_eq!(again.sigma, sg);
    }

    #[test]
    fn jacobi_admissible_formula() {
        let c = contact();
        let sg = sigma(&c);
        let jp = DiracJacobiStructure::form_pair(&sg.d().unwrap(), &sg).unwrap().regraph_jacobi().unwrap();
        let dj = DiracJacobiStructure::jacobi(&jp.lambda, &jp.e).unwrap();
        let one = dj.hamiltonian(&Scalar::one()).unwrap();
        assert_eq!(one.x, KVector::partial(&c, 0).neg());
        assert!(one.phi.is_zero());
        assert!(dj.bracket(&Scalar::one(), &Scalar::one()).unwrap().is_zero());
        let f = s(&c, "q*p + u");
        let g = s(&c, "u^2 - p");
        let expect = &(&jp.lambda.eval2(&KForm::exact(&c, &f), &KForm::exact(&c, &g)).unwrap()
            + &(&f * &jp.e.apply(&g).unwrap()))
            - &(&g * &jp.e.apply(&f).unwrap());
        assert_eq!(dj.bracket(&f, &g).unwrap(), expect);
        assert!(dj.bracket_identity(&f, &g).unwrap());
    }

    #[test]
    fn broken_jacobi_pair_fails() {
        // (d/dx ^ d/dy, d/dx) satisfies both Jacobi conditions since E ^ L = 0
        let c = Chart::builder("dj_r3b").coord("x").coord("y").coord("z").build().unwrap();
        let l = KVector::from_named(&c, 2, &[("x^y", Scalar::one())]).unwrap();
        let ok = DiracJacobiStructure::jacobi(&l, &KVector::partial(&c, 0)).unwrap();
        assert!(ok.integrability().unwrap().passed());
        let bad = DiracJacobiStructure::jacobi(&l, &KVector::partial(&c, 2)).unwrap();
        assert!(!bad.integrability().unwrap().passed());
        let zero = DiracJacobiStructure::jacobi(&KVector::zero(&c, 2), &KVector::partial(&c, 0)).unwrap();
        assert!(zero.integrability().unwrap().passed());
    }
}
