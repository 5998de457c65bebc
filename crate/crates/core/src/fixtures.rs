//! Small named structures reused by tests, the acceptance run, the CLI and
//! the Python bindings.

use crate::algebroid::{AnchorRep, LCochain1};
use crate::calculus::{KForm, KVector};
use crate::dirac::{DiracStructure, Locus};
use crate::preq::PreqData;
use crate::scalar::{parse_scalar, Chart, ChartRef, Scalar};
use crate::Result;

fn s(c: &ChartRef, e: &str) -> Result<Scalar> {
    Ok(parse_scalar(e, c)?)
}

/// `graph(x1^2 dx1 ^ dx2)` on R^2, with the degenerate line `x1 = 0` declared.
pub fn example_2_6() -> Result<DiracStructure> {
    let c = Chart::builder("ex26").coord("x1").coord("x2").build()?;
    let w = KForm::from_named(&c, 2, &[("dx1^dx2", s(&c, "x1^2")?)])?;
    DiracStructure::graph_two_form(&w)?.with_loci(vec![Locus::hyperplane(c.var(0), 0)])
}

pub fn r2() -> Result<ChartRef> {
    Ok(Chart::builder("r2").coord("x").coord("y").build()?)
}

/// Symplectic R^2 with `Omega = dx ^ dy`, `beta = 0` and `alpha_sigma = x dy`.
pub fn symplectic_r2() -> Result<PreqData> {
    let c = r2()?;
    let w = KForm::from_named(&c, 2, &[("dx^dy", Scalar::one())])?;
    let l = DiracStructure::graph_two_form(&w)?;
    let pair = AnchorRep::new(KVector::zero(&c, 1), KForm::zero(&c, 1))?;
    PreqData::new(l, w, pair, KForm::one_form(&c, vec![Scalar::zero(), s(&c, "x")?]))
}

/// `epsilon = x3 (dx1 + x3 dx2)` on T^2 x R.
pub fn torus_epsilon() -> Result<KForm> {
    let c = Chart::builder("torus").periodic("x1").periodic("x2").coord("x3").build()?;
    Ok(KForm::one_form(&c, vec![s(&c, "x3")?, s(&c, "x3^2")?, Scalar::zero()]))
}

/// `(T^2 x R, d epsilon)` with `Omega = 0`, `alpha_sigma = 0` and
/// `beta = -rho* epsilon`.
pub fn torus() -> Result<PreqData> {
    let eps = torus_epsilon()?;
    let c = eps.chart().clone();
    let l = DiracStructure::graph_two_form(&eps.d()?)?;
    let beta = LCochain1::pullback(&l, &eps)?.neg();
    PreqData::from_beta(l, KForm::zero(&c, 2), &beta, KForm::zero(&c, 1), None)
}

/// The leaf generator of `Lbar cap TQ` for the torus, on the chart of `q`.
pub fn torus_expected(q: &ChartRef) -> Result<KVector> {
    Ok(KVector::vector(q, vec![s(q, "2*x3")?, Scalar::from_int(-1), Scalar::zero(), s(q, "-x3^2")?]))
}

/// su(2)* away from the origin as `(phi, z, t)`, `t > 0`, with
/// `Lambda = t d/dphi ^ d/dz`.
pub fn su2_lambda() -> Result<KVector> {
    let c = Chart::builder("su2").coord("phi").coord("z").positive("t").build()?;
    KVector::from_named(&c, 2, &[("phi^z", s(&c, "t")?)])
}

/// `A = (c t^2 - t) d/dt`, `Omega = c dphi ^ dz`, `alpha_sigma = -c z dphi`.
pub fn su2(c: i64) -> Result<PreqData> {
    let lam = su2_lambda()?;
    let ch = lam.chart().clone();
    let l = DiracStructure::graph_bivector(&lam)?;
    let om = KForm::from_named(&ch, 2, &[("dphi^dz", Scalar::from_int(c))])?;
    let a = KVector::vector(&ch, vec![Scalar::zero(), Scalar::zero(), s(&ch, &format!("{c}*t^2 - t"))?]);
    let alpha_sigma = KForm::one_form(&ch, vec![s(&ch, &format!("-{c}*z"))?, Scalar::zero(), Scalar::zero()]);
    PreqData::new(l, om, AnchorRep::new(a, KForm::zero(&ch, 1))?, alpha_sigma)
}

/// The function `(c t - 1)/t` whose lift has zero hamiltonian vector field.
pub fn su2_kernel_function(d: &PreqData, c: i64) -> Result<Scalar> {
    s(d.base().chart(), &format!("({c}*t - 1)/t"))
}

/// `du + p dq` on R^3.
pub fn contact_r3() -> Result<KForm> {
    let c = Chart::builder("r3c").coord("u").coord("q").coord("p").build()?;
    Ok(KForm::one_form(&c, vec![Scalar::one(), s(&c, "p")?, Scalar::zero()]))
}
