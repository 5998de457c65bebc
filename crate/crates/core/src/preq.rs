//! Prequantization of a Dirac manifold `(P, L)` on the trivial circle bundle
//! `Q = P x U(1)`, with fibre coordinate `theta`, `E = d/dtheta` and
//! connection `sigma = dtheta + alpha_sigma`.
//!
//! Functions on `Q` of weight `k` are `h chi^k` with `E chi^k = k tau chi^k`;
//! only the coefficient `h` on `P` is ever stored.

use std::collections::BTreeMap;

use crate::algebroid::{beta_from_pair, beta_to_pair, preq_residual, table_is_zero, AnchorRep, LCochain1, Splitting};
use crate::calculus::{KForm, KVector};
use crate::dirac::{courant_bracket, DiracStructure, Locus};
use crate::djacobi::DiracJacobiStructure;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::linpair::{certify_all, E1Section, Section, StructureFrame};
use crate::scalar::{ChartRef, Point, Scalar};

#[derive(Clone, Debug)]
pub struct PreqData {
    base: DiracStructure,
    omega: KForm,
    pair: AnchorRep,
    alpha_sigma: KForm,
    beta: LCochain1,
    q: ChartRef,
}

// theta is appended last, so base indices carry over unchanged
fn lift_entries<'a>(entries: impl Iterator<Item = (&'a Vec<usize>, &'a Scalar)>) -> Vec<(Vec<usize>, Scalar)> {
    entries.map(|(k, v)| (k.clone(), v.clone())).collect()
}

impl PreqData {
    /// Checks `d alpha_sigma = Omega`, isotropy of the pair and the
    /// prequantization condition before accepting the data.
    pub fn new(base: DiracStructure, omega: KForm, pair: AnchorRep, alpha_sigma: KForm) -> Result<Self> {
        let c = base.chart().clone();
        for ch in [omega.chart(), alpha_sigma.chart(), pair.a.chart()] {
            crate::calculus::same_chart(&c, ch)?;
        }
        if alpha_sigma.d()? != omega {
            return Err(Error::SuppliedDataInvalid(format!("d({alpha_sigma}) != {omega}")));
        }
        if !pair.is_isotropic()? {
            return Err(Error::SuppliedDataInvalid(format!("pair is not isotropic: alpha(A) = {}", pair.alpha.eval1(&pair.a)?)));
        }
        let beta = beta_from_pair(&base, &pair)?;
        let res = preq_residual(&base, &omega, &beta)?;
        if !table_is_zero(&res) {
            let (i, j, v) = res
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, v)))
                .find(|t| !t.2.is_zero())
                .expect("nonzero entry");
            return Err(Error::SuppliedDataInvalid(format!("prequantization residual ({i},{j}) = {v}")));
        }
        let theta = c.fresh_name("theta");
        let q = c.extend(&format!("{}_x_U1", c.name)).periodic(&theta).build()?;
        Ok(PreqData { base, omega, pair, alpha_sigma, beta, q })
    }

    /// Same as `new` with the cochain given directly; the pair is recovered
    /// by `beta_to_pair`.
    pub fn from_beta(
        base: DiracStructure,
        omega: KForm,
        beta: &LCochain1,
        alpha_sigma: KForm,
        hint: Option<&Splitting>,
    ) -> Result<Self> {
        let pair = beta_to_pair(&base, beta, hint)?;
        PreqData::new(base, omega, pair, alpha_sigma)
    }

    pub fn base(&self) -> &DiracStructure {
        &self.base
    }

    pub fn omega(&self) -> &KForm {
        &self.omega
    }

    pub fn pair(&self) -> &AnchorRep {
        &self.pair
    }

    pub fn alpha_sigma(&self) -> &KForm {
        &self.alpha_sigma
    }

    pub fn beta(&self) -> &LCochain1 {
        &self.beta
    }

    pub fn q_chart(&self) -> &ChartRef {
        &self.q
    }

    fn theta(&self) -> usize {
        self.q.dim() - 1
    }

    pub fn e(&self) -> KVector {
        KVector::partial(&self.q, self.theta())
    }

    /// `sigma = dtheta + pi* alpha_sigma`.
    pub fn sigma(&self) -> KForm {
        KForm::dx(&self.q, self.theta()).add(&self.pull_form(&self.alpha_sigma)).expect("same chart")
    }

    /// Base vector or bivector viewed on `Q` with no fibre component.
    pub fn lift(&self, x: &KVector) -> KVector {
        let e = lift_entries(x.entries());
        KVector::from_entries(&self.q, x.degree(), &e).expect("indices fit")
    }

    pub fn pull_form(&self, w: &KForm) -> KForm {
        let e = lift_entries(w.entries());
        KForm::from_entries(&self.q, w.degree(), &e).expect("indices fit")
    }

    /// `X^H = X - alpha_sigma(X) E`.
    pub fn horizontal(&self, x: &KVector) -> Result<KVector> {
        let a = self.alpha_sigma.eval1(x)?;
        self.lift(x).sub(&self.e().scale(&a))
    }

    /// Horizontal lift of a bivector: `sum L^ij d_i^H ^ d_j^H`.
    pub fn horizontal_bivector(&self, l: &KVector) -> Result<KVector> {
        let b = self.base.chart();
        let mut out = KVector::zero(&self.q, 2);
        for (k, v) in l.entries() {
            let hi = self.horizontal(&KVector::partial(b, k[0]))?;
            let hj = self.horizontal(&KVector::partial(b, k[1]))?;
            out = out.add(&hi.wedge(&hj)?.scale(v))?;
        }
        Ok(out)
    }

    /// `beta` evaluated on any section of `L` (not only generators).
    pub fn beta_on(&self, x: &KVector, xi: &KForm) -> Result<Scalar> {
        Ok(&xi.eval1(&self.pair.a)? + &self.pair.alpha.eval1(x)?)
    }

    /// Data for `L(Q, sigma + pi* gamma, beta + shift)`, where the shift is
    /// `rho* gamma` when `shift_beta` is set and zero otherwise.
    pub fn shifted(&self, gamma: &KForm, shift_beta: bool) -> Result<PreqData> {
        let alpha_sigma = self.alpha_sigma.add(gamma)?;
        let omega = alpha_sigma.d()?;
        let pair = if shift_beta {
            let p = AnchorRep::new(self.pair.a.clone(), self.pair.alpha.add(gamma)?)?;
            if p.is_isotropic()? {
                p
            } else {
                let b = beta_from_pair(&self.base, &p)?;
                beta_to_pair(&self.base, &b, None)?
            }
        } else {
            self.pair.clone()
        };
        let mut d = PreqData::new(self.base.clone(), omega, pair, alpha_sigma)?;
        d.q = self.q.clone();
        Ok(d)
    }
}

fn e1(x: KVector, f: Scalar, xi: KForm, g: Scalar) -> Result<E1Section> {
    E1Section::new(x, f, xi, g)
}

/// The Dirac-Jacobi structure on `Q` spanned by
/// `(X^H + beta(e) E, 0) + (xi, 0)` for `e = X + xi` in `L`,
/// `(-E, 0) + (0, 1)` and `(-A^H, 1) + (sigma - alpha, 0)`.
pub fn build_lbar(d: &PreqData) -> Result<DiracJacobiStructure> {
    let q = d.q_chart();
    let e = d.e();
    let mut gens = Vec::new();
    for (g, b) in d.base.frame().gens().iter().zip(&d.beta.values) {
        let x = d.horizontal(&g.x)?.add(&e.scale(b))?;
        gens.push(e1(x, Scalar::zero(), d.pull_form(&g.xi), Scalar::zero())?);
    }
    gens.push(e1(e.neg(), Scalar::zero(), KForm::zero(q, 1), Scalar::one())?);
    let ah = d.horizontal(&d.pair.a)?;
    gens.push(e1(ah.neg(), Scalar::one(), d.sigma().sub(&d.pull_form(&d.pair.alpha))?, Scalar::zero())?);
    let loci = d.base.loci().to_vec();
    Ok(DiracJacobiStructure::from_gens(q, gens)?.with_loci(loci))
}

/// The Jacobi pair `(Lambda^H + E ^ A^H, E)` for a Poisson base.
pub fn poisson_lift(d: &PreqData, lambda: &KVector) -> Result<(KVector, KVector)> {
    let l = d.horizontal_bivector(lambda)?.add(&d.e().wedge(&d.horizontal(&d.pair.a)?)?)?;
    Ok((l, d.e()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForwardWitness {
    /// Frame coefficients and the section of `Lbar` they produce.
    Found(Vec<Scalar>, E1Section),
    Fail(String),
}

impl ForwardWitness {
    pub fn found(&self) -> bool {
        matches!(self, ForwardWitness::Found(..))
    }
}

/// Looks for `(Y, f) + (pi* xi, g)` in `Lbar` with `pi_* Y = X` for the base
/// section `(X, f) + (xi, g)`.
pub fn forward_image_witness(d: &PreqData, lbar: &DiracJacobiStructure, target: &E1Section) -> Result<ForwardWitness> {
    crate::calculus::same_chart(target.chart(), d.base.chart())?;
    let q = d.q_chart();
    let n = d.base.chart().dim();
    // component layout on Q: [X_0..X_n, f, xi_0..xi_n, g], theta at index n
    let keep: Vec<usize> = (0..2 * (n + 2)).filter(|&k| k != n).collect();
    let m = lbar.frame().matrix();
    let a: Matrix = keep.iter().map(|&k| m.iter().map(|r| r[k].clone()).collect()).collect();
    let tc = target.comps();
    // target layout on P: [X_0..X_{n-1}, f, xi_0..xi_{n-1}, g]
    let mut b: Vec<Scalar> = tc[..n + 1].to_vec();
    b.extend_from_slice(&tc[n + 1..2 * n + 1]);
    b.push(Scalar::zero());
    b.push(tc[2 * n + 1].clone());
    match linalg::solve(&a, &b, Some(q)) {
        None => Ok(ForwardWitness::Fail(format!("{target} is not the image of a section of Lbar"))),
        Some(c) => match certify_all(&c, q) {
            None => {
                let s = lbar.frame().combine(&c);
                Ok(ForwardWitness::Found(c, s))
            }
            Some((factor, _)) => Ok(ForwardWitness::Fail(format!("coefficient denominator {factor} not certified"))),
        },
    }
}

/// `Lbar cap TQ` over the fraction field: tangent parts of combinations
/// whose `f`, `xi` and `g` parts vanish.
pub fn tangent_distribution(lbar: &DiracJacobiStructure) -> Vec<KVector> {
    let q = lbar.chart();
    let n = q.dim();
    let m = lbar.frame().matrix();
    let rest: Matrix = (n..2 * n + 2).map(|k| m.iter().map(|r| r[k].clone()).collect()).collect();
    let ker = linalg::kernel(&rest, m.len());
    let vecs: Matrix = ker
        .iter()
        .map(|c| (0..n).map(|a| c.iter().zip(&m).map(|(ci, r)| ci * &r[a]).sum()).collect())
        .filter(|v: &Vec<Scalar>| v.iter().any(|x| !x.is_zero()))
        .collect();
    if vecs.is_empty() {
        return vec![];
    }
    let red = linalg::rref(&vecs, None);
    let mut piv = red.pivots.clone();
    piv.sort_by_key(|p| p.1);
    piv.into_iter().map(|(r, _)| KVector::vector(q, red.rows[r].clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaf {
    /// `sigma + pi*(xi_A - alpha)`.
    Precontact { form: KForm },
    /// Locally conformal presymplectic; the pair `(omega_F, Omega_F)` when the
    /// caller supplied `gamma~` and `Omega~_L`.
    Lcp { data: Option<(KForm, KForm)> },
}

/// Leaf type of `Lbar` through the fibre over the base point `p`.
///
/// The leaf is precontact iff some section with zero tangent part at `p`
/// has `f != 0`, i.e. `ker rho_TQ` is not inside `ker rho_1`. Read the other
/// way round the test would always say precontact, since `(-E, 0) + (0, 1)`
/// lies in `ker rho_1`.
pub fn leaf_classify(d: &PreqData, p: &Point, lcp_data: Option<(&KForm, &KForm)>) -> Result<Leaf> {
    let b = d.base.chart();
    if !p.in_domain(b) {
        return Err(Error::PointOutsideDomain(p.to_string()));
    }
    let lbar = build_lbar(d)?;
    let q = d.q_chart();
    let n = q.dim();
    let gens: Vec<E1Section> = lbar.frame().gens().iter().map(|g| g.eval_at(p)).collect::<Result<_>>()?;
    let xrows: Matrix = (0..n).map(|a| gens.iter().map(|g| g.x.components()[a].clone()).collect()).collect();
    let precontact = linalg::kernel(&xrows, gens.len())
        .iter()
        .any(|c| !c.iter().zip(&gens).map(|(ci, g)| ci * &g.f).sum::<Scalar>().is_zero());
    if precontact {
        let xi_a = solve_xi_a(d, p)?;
        let form = d.sigma().add(&d.pull_form(&xi_a.sub(&d.pair.alpha)?))?;
        return Ok(Leaf::Precontact { form });
    }
    let Some((gamma, om_l)) = lcp_data else { return Ok(Leaf::Lcp { data: None }) };
    for g in d.base.frame().gens() {
        let v = gamma.eval1(&g.x)?;
        if !v.is_zero() {
            return Err(Error::SuppliedDataInvalid(format!("gamma({}) = {v}", g.x)));
        }
    }
    let ga = gamma.eval1(&d.pair.a)?;
    if !ga.is_one() {
        return Err(Error::SuppliedDataInvalid(format!("gamma(A) = {ga}")));
    }
    let fr = d.base.frame().gens();
    for a in fr {
        for bb in fr {
            // the leafwise form is Omega_L(X1, X2) = xi1(X2)
            let lhs = om_l.eval2(&a.x, &bb.x)?;
            let rhs = a.xi.eval1(&bb.x)?;
            if lhs != rhs {
                return Err(Error::SuppliedDataInvalid(format!("Omega_L({}, {}) = {lhs}, expected {rhs}", a.x, bb.x)));
            }
        }
    }
    if !om_l.contract(&d.pair.a)?.is_zero() {
        return Err(Error::SuppliedDataInvalid("Omega_L does not annihilate A".into()));
    }
    let pg = d.pull_form(gamma);
    let big = d.sigma().sub(&d.pull_form(&d.pair.alpha))?.wedge(&pg)?.add(&d.pull_form(om_l))?;
    Ok(Leaf::Lcp { data: Some((pg, big)) })
}

/// Some `xi_A` with `A + xi_A` in `L`, generically if possible, otherwise at
/// the point.
fn solve_xi_a(d: &PreqData, p: &Point) -> Result<KForm> {
    let c = d.base.chart();
    let gens = d.base.frame().gens();
    let xs: Matrix = gens.iter().map(|g| g.x.components()).collect();
    let t = linalg::transpose(&xs);
    if let Some(co) = linalg::solve(&t, &d.pair.a.components(), Some(c)) {
        if certify_all(&co, c).is_none() {
            return Ok(gens.iter().zip(&co).fold(KForm::zero(c, 1), |acc, (g, k)| acc.add(&g.xi.scale(k)).expect("same chart")));
        }
    }
    let at: Vec<_> = gens.iter().map(|g| g.eval_at(p)).collect::<Result<_>>()?;
    let xs: Matrix = at.iter().map(|g| g.x.components()).collect();
    let a = d.pair.a.eval_at(p)?;
    let co = linalg::solve(&linalg::transpose(&xs), &a.components(), None)
        .ok_or_else(|| Error::XiANotSolvable(format!("A = {} not tangent to L at {p}", d.pair.a)))?;
    Ok(at.iter().zip(&co).fold(KForm::zero(c, 1), |acc, (g, k)| acc.add(&g.xi.scale(k)).expect("same chart")))
}

/// Adds `(0,0) + (i_X d gamma + f gamma, -gamma(X))` to every generator.
pub fn ext_bfield(s: &DiracJacobiStructure, gamma: &KForm) -> Result<DiracJacobiStructure> {
    let c = s.chart();
    crate::calculus::same_chart(c, gamma.chart())?;
    let dg = gamma.d()?;
    let gens = s
        .frame()
        .gens()
        .iter()
        .map(|g| {
            let xi = g.xi.add(&dg.contract(&g.x)?)?.add(&gamma.scale(&g.f))?;
            e1(g.x.clone(), g.f.clone(), xi, &g.g - &gamma.eval1(&g.x)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiracJacobiStructure::from_gens(c, gens)?.with_loci(s.loci().to_vec()))
}

/// `X_{pi* g} = X_g^H + (beta(X_g + dg) - g) E`, checked against `Lbar`.
pub fn preq_hamiltonian(d: &PreqData, g: &Scalar) -> Result<KVector> {
    let (xg, mu) = hamiltonian_parts(d, g)?;
    let x = d.lift(&xg).add(&d.e().scale(&mu))?;
    let lbar = build_lbar(d)?;
    let q = d.q_chart();
    let n = q.dim();
    // (X, phi) + (d pi*g, pi*g) in Lbar for some phi
    let m = lbar.frame().matrix();
    let keep: Vec<usize> = (0..2 * n + 2).filter(|&k| k != n).collect();
    let a: Matrix = keep.iter().map(|&k| m.iter().map(|r| r[k].clone()).collect()).collect();
    let mut b = x.components();
    b.extend(d.pull_form(&KForm::exact(d.base.chart(), g)).components());
    b.push(g.clone());
    match linalg::solve(&a, &b, Some(q)) {
        Some(c) if certify_all(&c, q).is_none() => Ok(x),
        _ => Err(Error::NotAdmissible(format!("{x} is not a hamiltonian vector field of {g} on Q"))),
    }
}

/// The base part `X_g` and the fibre coefficient of `X_{pi* g}`.
fn hamiltonian_parts(d: &PreqData, g: &Scalar) -> Result<(KVector, Scalar)> {
    let xg = d.base.hamiltonian(g)?;
    let dg = KForm::exact(d.base.chart(), g);
    let mu = &(&d.beta_on(&xg, &dg)? - &d.alpha_sigma.eval1(&xg)?) - g;
    Ok((xg, mu))
}

/// Finite sum `sum_k h_k chi^k` with coefficients on the base.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedFunction(pub BTreeMap<i64, Scalar>);

impl GradedFunction {
    pub fn single(k: i64, h: Scalar) -> Self {
        let mut m = BTreeMap::new();
        if !h.is_zero() {
            m.insert(k, h);
        }
        GradedFunction(m)
    }

    pub fn get(&self, k: i64) -> Scalar {
        self.0.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn grades(&self) -> Vec<i64> {
        self.0.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|h| h.is_zero())
    }

    pub fn sub(&self, o: &GradedFunction) -> GradedFunction {
        let mut m = self.0.clone();
        for (k, h) in &o.0 {
            let v = &m.get(k).cloned().unwrap_or_else(Scalar::zero) - h;
            m.insert(*k, v);
        }
        m.retain(|_, v| !v.is_zero());
        GradedFunction(m)
    }

    fn map(&self, f: impl Fn(i64, &Scalar) -> Result<Scalar>) -> Result<GradedFunction> {
        let mut m = BTreeMap::new();
        for (k, h) in &self.0 {
            let v = f(*k, h)?;
            if !v.is_zero() {
                m.insert(*k, v);
            }
        }
        Ok(GradedFunction(m))
    }
}

/// `Y + mu E` acting on `h chi^k`: `(Y.h + k tau mu h) chi^k`.
fn act(y: &KVector, mu: &Scalar, k: i64, h: &Scalar) -> Result<Scalar> {
    Ok(&y.apply(h)? + &(&(&Scalar::tau() * &Scalar::from_int(k)) * &(mu * h)))
}

/// `{pi* g, phi} = -X_{pi* g} . phi`.
pub fn rep_apply(d: &PreqData, g: &Scalar, phi: &GradedFunction) -> Result<GradedFunction> {
    let (xg, mu) = hamiltonian_parts(d, g)?;
    phi.map(|k, h| Ok(-&act(&xg, &mu, k, h)?))
}

/// `{g1, g2}` on the base in the bracket convention matching `rep_apply`.
pub fn base_bracket(d: &PreqData, g1: &Scalar, g2: &Scalar) -> Result<Scalar> {
    d.base.adm_bracket(g1, g2)
}

/// `g1^ g2^ phi - g2^ g1^ phi - {g1, g2}^ phi`.
pub fn rep_commutator_defect(d: &PreqData, g1: &Scalar, g2: &Scalar, phi: &GradedFunction) -> Result<GradedFunction> {
    let a = rep_apply(d, g1, &rep_apply(d, g2, phi)?)?;
    let b = rep_apply(d, g2, &rep_apply(d, g1, phi)?)?;
    let c = rep_apply(d, &base_bracket(d, g1, g2)?, phi)?;
    Ok(a.sub(&b).sub(&c))
}

/// Hamiltonian pair of `h chi^n` on `Lbar`, divided by `chi^n`.
fn graded_pair(d: &PreqData, lbar: &DiracJacobiStructure, n: i64, h: &Scalar) -> Result<(KVector, Scalar)> {
    let q = d.q_chart();
    let nn = q.dim();
    let mut target = d.pull_form(&KForm::exact(d.base.chart(), h)).components();
    target[nn - 1] = &(&Scalar::tau() * &Scalar::from_int(n)) * h;
    target.push(h.clone());
    let m = lbar.frame().matrix();
    let cot: Matrix = (nn + 1..2 * nn + 2).map(|k| m.iter().map(|r| r[k].clone()).collect()).collect();
    let c = linalg::solve(&cot, &target, Some(q)).ok_or_else(|| Error::NotAdmissible(format!("{h} in weight {n}")))?;
    if let Some((factor, _)) = certify_all(&c, q) {
        return Err(Error::NotAdmissible(format!("{h} in weight {n}: denominator {factor}")));
    }
    let s = lbar.frame().combine(&c);
    Ok((s.x, s.f))
}

/// `{h1 chi^n1, h2 chi^n2}` on `Q` for basic `h1 chi^n1` and admissible
/// `h2 chi^n2`, returned as weight and coefficient.
pub fn graded_bracket(d: &PreqData, f1: (i64, &Scalar), f2: (i64, &Scalar)) -> Result<(i64, Scalar)> {
    let lbar = build_lbar(d)?;
    let (x, phi) = graded_pair(d, &lbar, f2.0, f2.1)?;
    let q = d.q_chart();
    let theta = q.dim() - 1;
    let h = f1.1.clone();
    let xb = KVector::vector(q, {
        let mut c = x.components();
        c[theta] = Scalar::zero();
        c
    });
    let v = &act(&xb, &x.components()[theta], f1.0, &h)? + &(&h * &phi);
    Ok((f1.0 + f2.0, v))
}

/// `D_e h = X.h + tau (alpha_sigma(X) - beta(e)) h` on weight `-1`
/// coefficients.
#[derive(Clone, Debug)]
pub struct LConnection {
    data: PreqData,
}

pub fn lconn(d: &PreqData) -> LConnection {
    LConnection { data: d.clone() }
}

impl LConnection {
    pub fn data(&self) -> &PreqData {
        &self.data
    }

    /// `D` along an arbitrary section `X + xi` of `L`.
    pub fn apply(&self, x: &KVector, xi: &KForm, h: &Scalar) -> Result<Scalar> {
        let d = &self.data;
        let k = &d.alpha_sigma.eval1(x)? - &d.beta_on(x, xi)?;
        Ok(&x.apply(h)? + &(&Scalar::tau() * &(&k * h)))
    }

    fn apply_gen(&self, i: usize, h: &Scalar) -> Result<Scalar> {
        let g = &self.data.base.frame().gens()[i];
        self.apply(&g.x, &g.xi, h)
    }

    /// `R_D(e_i, e_j) h = D_i D_j h - D_j D_i h - D_[e_i,e_j] h`.
    pub fn curvature_apply(&self, i: usize, j: usize, h: &Scalar) -> Result<Scalar> {
        let fr = self.data.base.frame();
        let br = courant_bracket(&fr.gens()[i], &fr.gens()[j])?;
        let c = fr.solve(&br).ok_or(Error::BracketNotInSpan(i, j))?;
        let mut v = &self.apply_gen(i, &self.apply_gen(j, h)?)? - &self.apply_gen(j, &self.apply_gen(i, h)?)?;
        for (k, ck) in c.iter().enumerate() {
            if !ck.is_zero() {
                v = &v - &(ck * &self.apply_gen(k, h)?);
            }
        }
        Ok(v)
    }

    /// The multiplier `R_D(e_i, e_j)`, checked to act as multiplication on
    /// `probe`.
    pub fn curvature(&self, i: usize, j: usize, probe: &Scalar) -> Result<Scalar> {
        let r = self.curvature_apply(i, j, &Scalar::one())?;
        let rp = self.curvature_apply(i, j, probe)?;
        if rp != &r * probe {
            return Err(Error::Invalid(format!("curvature ({i},{j}) is not a multiplication operator")));
        }
        Ok(r)
    }

    /// `L cap TP` generators `Y` with `D_Y h != 0`, generically or at a locus.
    pub fn domain_defect(&self, h: &Scalar) -> Result<Option<String>> {
        let base = &self.data.base;
        let c = base.chart();
        let zero = KForm::zero(c, 1);
        for y in base.char_generic() {
            let v = self.apply(&y, &zero, h)?;
            if !v.is_zero() {
                return Ok(Some(format!("D_({y}) h = {v}")));
            }
        }
        for l in base.loci() {
            let p = match l {
                Locus::Point(p) => p.clone(),
                Locus::Hyperplane { var, value } => Point(std::iter::once((*var, value.clone())).collect()),
            };
            for y in base.char_dist_at_point(&p)? {
                let v = self.apply(&y, &zero, h)?.eval_at(&p)?;
                if !v.is_zero() {
                    return Ok(Some(format!("D_({y}) h = {v} at {p}")));
                }
            }
        }
        Ok(None)
    }

    /// `g^ s = -(D_{X_g + dg} s + tau g s)` without the domain check.
    pub fn rep_unchecked(&self, g: &Scalar, h: &Scalar) -> Result<Scalar> {
        let base = &self.data.base;
        let xg = base.hamiltonian(g)?;
        let dg = KForm::exact(base.chart(), g);
        Ok(-&(&self.apply(&xg, &dg, h)? + &(&Scalar::tau() * &(g * h))))
    }
}

/// `lconn_rep` on a weight `-1` function, refusing sections outside the
/// polarized domain.
pub fn lconn_rep(dconn: &LConnection, g: &Scalar, s: &GradedFunction) -> Result<GradedFunction> {
    if s.grades().iter().any(|&k| k != -1) {
        return Err(Error::NotInDomain("only weight -1 sections".into()));
    }
    let h = s.get(-1);
    if let Some(why) = dconn.domain_defect(&h)? {
        return Err(Error::NotInDomain(why));
    }
    Ok(GradedFunction::single(-1, dconn.rep_unchecked(g, &h)?))
}

/// Frame on `Q` used by callers that want the raw generator list.
pub fn lbar_frame(d: &PreqData) -> Result<StructureFrame<E1Section>> {
    Ok(build_lbar(d)?.frame().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::upsilon;
    use crate::dirac::int_point;
    use crate::linpair::span_equal;
    use crate::scalar::{parse_scalar, Chart};

    fn s(c: &ChartRef, e: &str) -> Scalar {
        parse_scalar(e, c).unwrap()
    }

    fn symp() -> PreqData {
        let c = Chart::builder("pq_r2").coord("px").coord("py").build().unwrap();
        let w = KForm::from_named(&c, 2, &[("dpx^dpy", Scalar::one())]).unwrap();
        let l = DiracStructure::graph_two_form(&w).unwrap();
        let a = KForm::one_form(&c, vec![Scalar::zero(), s(&c, "px")]);
        let pair = AnchorRep::new(KVector::zero(&c, 1), KForm::zero(&c, 1)).unwrap();
        PreqData::new(l, w, pair, a).unwrap()
    }

    #[test]
    fn symplectic_lbar_is_contact_graph() {
        let d = symp();
        let lb = build_lbar(&d).unwrap();
        assert!(lb.integrability().unwrap().passed());
        let sig = d.sigma();
        let g = DiracJacobiStructure::form_pair(&sig.d().unwrap(), &sig).unwrap();
        assert!(span_equal(lb.frame(), g.frame()).unwrap().equal);
    }

    #[test]
    fn symplectic_hamiltonian_and_rep() {
        let d = symp();
        let c = d.base().chart().clone();
        let x = preq_hamiltonian(&d, &s(&c, "px")).unwrap();
        assert_eq!(x, d.lift(&KVector::partial(&c, 1)).neg());
        let h = s(&c, "px^2*py + 3");
        let phi = GradedFunction::single(-1, h.clone());
        let out = rep_apply(&d, &Scalar::from_int(5), &phi).unwrap();
        assert_eq!(out, GradedFunction::single(-1, &(&Scalar::from_int(-5) * &Scalar::tau()) * &h));
        for (a, b) in [("px", "py"), ("px*py", "py^2")] {
            assert!(rep_commutator_defect(&d, &s(&c, a), &s(&c, b), &phi).unwrap().is_zero());
        }
    }

    #[test]
    fn curvature_is_tau_upsilon() {
        let d = symp();
        let c = d.base().chart().clone();
        let dc = lconn(&d);
        let up = upsilon(d.base()).unwrap();
        let r = dc.curvature(0, 1, &s(&c, "px*py^2")).unwrap();
        assert_eq!(r, &Scalar::tau() * &up[0][1]);
        assert_eq!(r, Scalar::tau());
        let h = s(&c, "px - py^3");
        let via_rep = rep_apply(&d, &s(&c, "px"), &GradedFunction::single(-1, h.clone())).unwrap();
        assert_eq!(lconn_rep(&dc, &s(&c, "px"), &GradedFunction::single(-1, h)).unwrap(), via_rep);
    }

    #[test]
    fn leaf_of_symplectic_prequantization_is_precontact() {
        let d = symp();
        let p = int_point(d.base().chart(), &[1, 2]);
        match leaf_classify(&d, &p, None).unwrap() {
            Leaf::Precontact { form } => assert_eq!(form, d.sigma()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn forward_witnesses() {
        let d = symp();
        let lb = build_lbar(&d).unwrap();
        let tl = DiracJacobiStructure::from_dirac(d.base()).unwrap();
        for g in tl.frame().gens() {
            assert!(forward_image_witness(&d, &lb, g).unwrap().found());
        }
        let c = d.base().chart();
        let bad = E1Section::new(KVector::partial(c, 0), Scalar::zero(), KForm::zero(c, 1), Scalar::zero()).unwrap();
        assert!(!forward_image_witness(&d, &lb, &bad).unwrap().found());
    }

    #[test]
    fn bfield_lemmas() {
        let d = symp();
        let c = d.base().chart().clone();
        let lb = build_lbar(&d).unwrap();
        assert_eq!(ext_bfield(&lb, &KForm::zero(d.q_chart(), 1)).unwrap().frame().matrix(), lb.frame().matrix());
        let gamma = KForm::one_form(&c, vec![s(&c, "py"), Scalar::zero()]);
        let shifted = build_lbar(&d.shifted(&gamma, true).unwrap()).unwrap();
        assert!(span_equal(lb.frame(), shifted.frame()).unwrap().equal);
        let dx = KForm::dx(&c, 0);
        let moved = build_lbar(&d.shifted(&dx, false).unwrap()).unwrap();
        let bf = ext_bfield(&lb, &d.pull_form(&dx)).unwrap();
        assert!(span_equal(bf.frame(), moved.frame()).unwrap().equal);
    }
}
