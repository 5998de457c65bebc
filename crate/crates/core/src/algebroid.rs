//! Cochains of the Lie algebroid of a Dirac structure, written against the
//! frame generators `e_i = X_i + xi_i`.
//!
//! Brackets `[e_i, e_j]` are resolved back into the frame over the fraction
//! field, which gives structure functions `c_ij^k`. All differentials use
//! them, so nothing here needs a dual frame.

use crate::calculus::{KForm, KVector};
use crate::dirac::{courant_bracket, DiracStructure};
use crate::error::{Error, Result};
use crate::linpair::{CouSection, Section, Sign};
use crate::scalar::Scalar;

/// Frame-indexed 2-cochain, `t[i][j] = c(e_i, e_j)`.
pub type Table = Vec<Vec<Scalar>>;

/// A section of `L*`, stored as its values on the frame generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LCochain1 {
    pub values: Vec<Scalar>,
}

impl LCochain1 {
    pub fn zero(l: &DiracStructure) -> Self {
        LCochain1 { values: vec![Scalar::zero(); l.frame().len()] }
    }

    /// `rho* gamma`: `e_i -> gamma(X_i)`.
    pub fn pullback(l: &DiracStructure, gamma: &KForm) -> Result<Self> {
        let values = l.frame().gens().iter().map(|g| gamma.eval1(&g.x)).collect::<Result<_>>()?;
        Ok(LCochain1 { values })
    }

    pub fn add(&self, o: &LCochain1) -> LCochain1 {
        LCochain1 { values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() }
    }

    pub fn neg(&self) -> LCochain1 {
        LCochain1 { values: self.values.iter().map(|a| -a).collect() }
    }

    /// Value on an arbitrary combination `sum c_k e_k`.
    pub fn eval(&self, coeffs: &[Scalar]) -> Scalar {
        coeffs.iter().zip(&self.values).map(|(c, b)| c * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

/// A section `A + alpha` of `TP + T*P` representing a cochain through
/// `beta = 2 <A + alpha, .>_+`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorRep {
    pub a: KVector,
    pub alpha: KForm,
}

impl AnchorRep {
    pub fn new(a: KVector, alpha: KForm) -> Result<Self> {
        let s = CouSection::new(a, alpha)?;
        Ok(AnchorRep { a: s.x, alpha: s.xi })
    }

    pub fn is_isotropic(&self) -> Result<bool> {
        Ok(self.alpha.eval1(&self.a)?.is_zero())
    }

    fn section(&self) -> CouSection {
        CouSection { x: self.a.clone(), xi: self.alpha.clone() }
    }
}

/// Which components of `A` and `alpha` the `to_pair` solver may use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Splitting {
    pub tangent: Vec<usize>,
    pub cotangent: Vec<usize>,
}

/// `c[i][j]` holds the coefficients of `[e_i, e_j]` in the frame.
pub fn structure_functions(l: &DiracStructure) -> Result<Vec<Vec<Vec<Scalar>>>> {
    let g = l.frame().gens();
    let n = g.len();
    let mut c = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let br = courant_bracket(&g[i], &g[j])?;
            let k = l.frame().solve(&br).ok_or(Error::BracketNotInSpan(i, j))?;
            c[j][i] = k.iter().map(|x| -x).collect();
            c[i][j] = k;
        }
    }
    Ok(c)
}

/// `d_L f`: the anchor applied to `f`.
pub fn dl_scalar(l: &DiracStructure, f: &Scalar) -> Result<LCochain1> {
    let values = l.frame().gens().iter().map(|g| g.x.apply(f)).collect::<Result<_>>()?;
    Ok(LCochain1 { values })
}

/// `(d_L b)(e_i, e_j) = X_i b_j - X_j b_i - b([e_i, e_j])`.
pub fn dl_cochain1(l: &DiracStructure, b: &LCochain1) -> Result<Table> {
    let c = structure_functions(l)?;
    dl1_with(l, b, &c)
}

fn dl1_with(l: &DiracStructure, b: &LCochain1, c: &[Vec<Vec<Scalar>>]) -> Result<Table> {
    let g = l.frame().gens();
    let n = g.len();
    check_len(n, b.values.len())?;
    let mut t = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = &(&g[i].x.apply(&b.values[j])? - &g[j].x.apply(&b.values[i])?) - &b.eval(&c[i][j]);
            t[j][i] = -&v;
            t[i][j] = v;
        }
    }
    Ok(t)
}

/// `d_L` of a 2-cochain, as values on `(e_i, e_j, e_k)` for `i < j < k`.
pub fn dl_cochain2(l: &DiracStructure, t: &Table) -> Result<Vec<((usize, usize, usize), Scalar)>> {
    let c = structure_functions(l)?;
    let g = l.frame().gens();
    let n = g.len();
    check_len(n, t.len())?;
    // t extended to a combination in its first slot
    let tc = |coeffs: &[Scalar], k: usize| -> Scalar { coeffs.iter().enumerate().map(|(m, x)| x * &t[m][k]).sum() };
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut v = &(&g[i].x.apply(&t[j][k])? - &g[j].x.apply(&t[i][k])?) + &g[k].x.apply(&t[i][j])?;
                v = &(&(&v - &tc(&c[i][j], k)) + &tc(&c[i][k], j)) - &tc(&c[j][k], i);
                out.push(((i, j, k), v));
            }
        }
    }
    Ok(out)
}

/// The minus pairing restricted to `L`.
pub fn upsilon(l: &DiracStructure) -> Result<Table> {
    let g = l.frame().gens();
    g.iter().map(|a| g.iter().map(|b| a.pairing(b, Sign::Minus)).collect()).collect()
}

/// `rho* w` for a 2-form `w`.
pub fn pullback2(l: &DiracStructure, w: &KForm) -> Result<Table> {
    let g = l.frame().gens();
    g.iter().map(|a| g.iter().map(|b| w.eval2(&a.x, &b.x)).collect()).collect()
}

/// `Omega(X_i, X_j) - Upsilon(e_i, e_j) - d_L beta(e_i, e_j)`.
pub fn preq_residual(l: &DiracStructure, omega: &KForm, beta: &LCochain1) -> Result<Table> {
    if omega.degree() != 2 {
        return Err(Error::Invalid("curvature must be a 2-form".into()));
    }
    let dw = omega.d()?;
    if !dw.is_zero() {
        return Err(Error::OmegaNotClosed(dw.to_string()));
    }
    let om = pullback2(l, omega)?;
    let up = upsilon(l)?;
    let db = dl_cochain1(l, beta)?;
    Ok(om
        .iter()
        .zip(&up)
        .zip(&db)
        .map(|((a, b), c)| a.iter().zip(b).zip(c).map(|((x, y), z)| &(x - y) - z).collect())
        .collect())
}

pub fn table_is_zero(t: &Table) -> bool {
    t.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// `beta_i = 2 <A + alpha, e_i>_+ = xi_i(A) + alpha(X_i)`.
pub fn beta_from_pair(l: &DiracStructure, rep: &AnchorRep) -> Result<LCochain1> {
    let s = rep.section();
    let two = Scalar::from_int(2);
    let values = l.frame().gens().iter().map(|g| Ok(&two * &s.pair_plus(g)?)).collect::<Result<_>>()?;
    Ok(LCochain1 { values })
}

/// Recovers an isotropic `A + alpha` with `beta_from_pair = beta`.
///
/// Without a hint the solver tries `A = 0` and then `alpha = 0`; both are
/// isotropic for free. A hint restricts the unknowns to the listed
/// components and the result is checked for isotropy.
pub fn beta_to_pair(l: &DiracStructure, beta: &LCochain1, hint: Option<&Splitting>) -> Result<AnchorRep> {
    let c = l.chart();
    let n = c.dim();
    check_len(l.frame().len(), beta.values.len())?;
    let tries: Vec<Splitting> = match hint {
        Some(h) => vec![h.clone()],
        None => vec![
            Splitting { tangent: vec![], cotangent: (0..n).collect() },
            Splitting { tangent: (0..n).collect(), cotangent: vec![] },
        ],
    };
    for sp in tries {
        if sp.tangent.iter().chain(&sp.cotangent).any(|&k| k >= n) {
            return Err(Error::Invalid("splitting index out of range".into()));
        }
        // unknowns: A^k for k in tangent, then alpha_k for k in cotangent
        let rows: Vec<Vec<Scalar>> = l
            .frame()
            .gens()
            .iter()
            .map(|g| {
                let xi = g.xi.components();
                let x = g.x.components();
                sp.tangent.iter().map(|&k| xi[k].clone()).chain(sp.cotangent.iter().map(|&k| x[k].clone())).collect()
            })
            .collect();
        let Some(sol) = crate::linalg::solve(&rows, &beta.values, Some(c)) else { continue };
        let mut a = vec![Scalar::zero(); n];
        let mut al = vec![Scalar::zero(); n];
        for (pos, &k) in sp.tangent.iter().enumerate() {
            a[k] = sol[pos].clone();
        }
        for (pos, &k) in sp.cotangent.iter().enumerate() {
            al[k] = sol[sp.tangent.len() + pos].clone();
        }
        let rep = AnchorRep { a: KVector::vector(c, a), alpha: KForm::one_form(c, al) };
        if rep.is_isotropic()? && beta_from_pair(l, &rep)? == *beta {
            return Ok(rep);
        }
    }
    Err(Error::SolverNeedsExplicitPair)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::WrongFrameSize { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_scalar, Chart, ChartRef};

    fn r2() -> ChartRef {
        Chart::builder("alg_r2").coord("alg_x").coord("alg_y").build().unwrap()
    }

    fn s(c: &ChartRef, e: &str) -> Scalar {
        parse_scalar(e, c).unwrap()
    }

    fn symp(c: &ChartRef) -> DiracStructure {
        let w = KForm::from_named(c, 2, &[("dalg_x^dalg_y", Scalar::one())]).unwrap();
        DiracStructure::graph_two_form(&w).unwrap()
    }

    #[test]
    fn upsilon_of_two_form_graph_is_the_form() {
        let c = r2();
        let l = symp(&c);
        let w = KForm::from_named(&c, 2, &[("dalg_x^dalg_y", Scalar::one())]).unwrap();
        assert_eq!(upsilon(&l).unwrap(), pullback2(&l, &w).unwrap());
    }

    #[test]
    fn symplectic_residual_vanishes() {
        let c = r2();
        let l = symp(&c);
        let w = KForm::from_named(&c, 2, &[("dalg_x^dalg_y", Scalar::one())]).unwrap();
        assert!(table_is_zero(&preq_residual(&l, &w, &LCochain1::zero(&l)).unwrap()));
    }

    #[test]
    fn dl_of_pullback_is_pullback_of_d() {
        let c = r2();
        let l = symp(&c);
        let gamma = KForm::one_form(&c, vec![Scalar::zero(), s(&c, "alg_x")]);
        let b = LCochain1::pullback(&l, &gamma).unwrap();
        assert_eq!(dl_cochain1(&l, &b).unwrap(), pullback2(&l, &gamma.d().unwrap()).unwrap());
    }

    #[test]
    fn dl_squares_to_zero_on_bivector_graph() {
        let c = Chart::builder("alg_r3").coord("alg_a").coord("alg_b").coord("alg_c").build().unwrap();
        let lam = KVector::from_named(&c, 2, &[("alg_a^alg_b", s(&c, "alg_c")), ("alg_b^alg_c", s(&c, "alg_a"))]).unwrap();
        let l = DiracStructure::graph_bivector(&lam).unwrap();
        let f = s(&c, "alg_a^2*alg_b + alg_c");
        let df = dl_scalar(&l, &f).unwrap();
        assert!(table_is_zero(&dl_cochain1(&l, &df).unwrap()));
        let up = upsilon(&l).unwrap();
        assert!(dl_cochain2(&l, &up).unwrap().iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn non_closed_curvature_is_rejected() {
        let c = Chart::builder("alg_r3b").coord("alg_u").coord("alg_v").coord("alg_w").build().unwrap();
        let w = KForm::from_named(&c, 2, &[("dalg_u^dalg_v", s(&c, "alg_w"))]).unwrap();
        let l = DiracStructure::graph_two_form(&KForm::zero(&c, 2)).unwrap();
        assert!(matches!(preq_residual(&l, &w, &LCochain1::zero(&l)), Err(Error::OmegaNotClosed(_))));
    }

    #[test]
    fn su2_residual_vanishes() {
        let c = Chart::builder("alg_su2").coord("alg_phi").coord("alg_z").positive("alg_t").build().unwrap();
        let lam = KVector::from_named(&c, 2, &[("alg_phi^alg_z", s(&c, "alg_t"))]).unwrap();
        let l = DiracStructure::graph_bivector(&lam).unwrap();
        for cc in [0, 1, 3] {
            let om = KForm::from_named(&c, 2, &[("dalg_phi^dalg_z", Scalar::from_int(cc))]).unwrap();
            let a = KVector::vector(&c, vec![Scalar::zero(), Scalar::zero(), s(&c, &format!("{cc}*alg_t^2 - alg_t"))]);
            let rep = AnchorRep::new(a, KForm::zero(&c, 1)).unwrap();
            let beta = beta_from_pair(&l, &rep).unwrap();
            assert!(table_is_zero(&preq_residual(&l, &om, &beta).unwrap()), "c = {cc}");
        }
    }

    #[test]
    fn pair_round_trip() {
        let c = r2();
        let l = symp(&c);
        let rep = AnchorRep::new(KVector::zero(&c, 1), KForm::one_form(&c, vec![s(&c, "alg_y"), Scalar::zero()])).unwrap();
        let b = beta_from_pair(&l, &rep).unwrap();
        assert_eq!(b.values, vec![s(&c, "alg_y"), Scalar::zero()]);
        let back = beta_to_pair(&l, &b, None).unwrap();
        assert_eq!(beta_from_pair(&l, &back).unwrap(), b);
        let zero = beta_to_pair(&l, &LCochain1::zero(&l), None).unwrap();
        assert!(zero.a.is_zero() && zero.alpha.is_zero());
    }
}
