//! One line per acceptance criterion. Exits nonzero if any line fails.

use std::process::ExitCode;

use num_rational::BigRational;
use prequant::algebroid::{beta_from_pair, preq_residual, table_is_zero, upsilon};
use prequant::calculus::{KForm, KVector};
use prequant::dirac::{courant_bracket, int_point, Admissibility, DiracStructure, Integrability};
use prequant::djacobi::{ext_courant_bracket, reeb_solve, DiracJacobiStructure, Extension};
use prequant::fixtures;
use prequant::lebrun::*;
use prequant::linpair::{span_equal, E1Section};
use prequant::preq::*;
use prequant::sample::Sampler;
use prequant::scalar::vars::TAU;
use prequant::scalar::{parse_scalar, Chart, ChartRef, Point, Scalar};
use prequant::{Error, Result};

const SEED: u64 = 20;

/// Failed sub-checks, by name.
struct Crit {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Crit {
    fn new() -> Self {
        Crit { failed: vec![], notes: vec![] }
    }

    fn check(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn run(n: usize, title: &str, f: impl FnOnce(&mut Crit) -> Result<()>) -> bool {
    let mut c = Crit::new();
    let r = f(&mut c);
    if let Err(e) = r {
        c.failed.push(format!("error: {e}"));
    }
    let ok = c.failed.is_empty();
    let mut line = format!("[{}] {n:>2}. {title}", if ok { "PASS" } else { "FAIL" });
    if !c.notes.is_empty() {
        line += &format!(" ({})", c.notes.join("; "));
    }
    if !ok {
        line += &format!(" -- failed: {}", c.failed.join(", "));
    }
    println!("{line}");
    ok
}

fn s(c: &ChartRef, e: &str) -> Scalar {
    parse_scalar(e, c).expect("test expression")
}

fn rat_point(c: &ChartRef, vals: &[(i64, i64)]) -> Point {
    let mut p = Point::new();
    for (k, &(n, d)) in vals.iter().enumerate() {
        p.set(c.var(k), BigRational::new(n.into(), d.into()));
    }
    p
}

/// Every prequantization fixture, by name.
fn preq_fixtures() -> Result<Vec<(&'static str, PreqData)>> {
    let lb = LebrunFamily::new(1)?;
    Ok(vec![
        ("symplectic_r2", fixtures::symplectic_r2()?),
        ("torus", fixtures::torus()?),
        ("su2 c=0", fixtures::su2(0)?),
        ("su2 c=1", fixtures::su2(1)?),
        ("lebrun s", lb.preq_data_s()?),
        ("lebrun r", lb.preq_data_r()?),
    ])
}

fn c1(c: &mut Crit) -> Result<()> {
    let d = fixtures::example_2_6()?;
    let ch = d.chart().clone();
    c.check("rank 0 at (1,0)", d.char_dist_at_point(&int_point(&ch, &[1, 0]))?.is_empty());
    c.check("rank 2 at (0,0)", d.char_dist_at_point(&int_point(&ch, &[0, 0]))?.len() == 2);
    let f = s(&ch, "x1^2");
    c.check("x1^2 basic", d.is_basic(&f)?.is_basic());
    match d.admissible_solve(&f)? {
        Admissibility::NotCertified { factor, .. } => c.check("denominator witness x1", factor == "x1"),
        _ => c.check("x1^2 not admissible", false),
    }
    c.check("integrable", d.integrability()?.passed());
    Ok(())
}

fn c2(c: &mut Crit) -> Result<()> {
    let ch = fixtures::r2()?;
    let w = KForm::from_named(&ch, 2, &[("dx^dy", Scalar::one())])?;
    let l = KVector::from_named(&ch, 2, &[("x^y", Scalar::one())])?;
    let a = DiracStructure::graph_two_form(&w)?;
    let b = DiracStructure::graph_bivector(&l)?;
    let (x, y) = (s(&ch, "x"), s(&ch, "y"));
    c.check("{x,y}=1 (form)", a.adm_bracket(&x, &y)?.is_one());
    c.check("{x,y}=1 (bivector)", b.adm_bracket(&x, &y)?.is_one());
    c.check("graphs span-equal", span_equal(a.frame(), b.frame())?.equal);
    let mut smp = Sampler::new(SEED);
    let mut bad = 0;
    for _ in 0..25 {
        let (f, g, h) = (smp.poly(&ch, 3, 4), smp.poly(&ch, 3, 4), smp.poly(&ch, 3, 4));
        if !a.jacobi_residual(&f, &g, &h)?.is_zero() || !b.jacobi_residual(&f, &g, &h)?.is_zero() {
            bad += 1;
        }
    }
    c.check("Jacobi residual on 25 triples", bad == 0);
    c.note("25 triples".into());
    Ok(())
}

fn c3(c: &mut Crit) -> Result<()> {
    for (name, d) in preq_fixtures()? {
        c.check(&format!("{name} integrable"), build_lbar(&d)?.integrability()?.passed());
    }
    let d = fixtures::symplectic_r2()?;
    let sg = d.sigma();
    let g = DiracJacobiStructure::form_pair(&sg.d()?, &sg)?;
    c.check("presymplectic = graph(dsigma, sigma)", span_equal(build_lbar(&d)?.frame(), g.frame())?.equal);
    let mut poisson = vec![];
    for k in [0, 1] {
        let d = fixtures::su2(k)?;
        poisson.push((d.clone(), fixtures::su2_lambda()?.rechart(d.base().chart())?));
    }
    let lb = LebrunFamily::new(1)?;
    let r = lb.preq_data_r()?;
    poisson.push((r.clone(), lb.lebrun_lambda(r.base().chart())?));
    for (d, lam) in poisson {
        let (l, e) = poisson_lift(&d, &lam)?;
        let j = DiracJacobiStructure::jacobi(&l, &e)?;
        c.check(&format!("Poisson on {} = Jacobi graph", d.base().chart().name), span_equal(build_lbar(&d)?.frame(), j.frame())?.equal);
    }
    Ok(())
}

fn c4(c: &mut Crit) -> Result<()> {
    let d = fixtures::torus()?;
    let f = tangent_distribution(&build_lbar(&d)?);
    let want = fixtures::torus_expected(d.q_chart())?;
    c.check("rank 1", f.len() == 1);
    if let Some(v) = f.first() {
        // the span of one vector, compared by the 2x2 minors
        let (a, b) = (v.components(), want.components());
        let all = (0..a.len()).all(|i| (0..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]));
        c.check("span 2x3 d1 - d2 - x3^2 dtheta", all);
        c.note(format!("generator {v}"));
    }
    Ok(())
}

fn c5(c: &mut Crit) -> Result<()> {
    for k in [0, 1] {
        let d = fixtures::su2(k)?;
        let g = fixtures::su2_kernel_function(&d, k)?;
        c.check(&format!("X = 0 for c = {k}"), preq_hamiltonian(&d, &g)?.is_zero());
    }
    Ok(())
}

fn c6(c: &mut Crit) -> Result<()> {
    let mut total = 0;
    for (name, d) in preq_fixtures()? {
        let lbar = build_lbar(&d)?;
        for (i, g) in DiracJacobiStructure::from_dirac(d.base())?.frame().gens().iter().enumerate() {
            total += 1;
            c.check(&format!("{name} generator {i}"), forward_image_witness(&d, &lbar, g)?.found());
        }
    }
    c.note(format!("{total} generators"));
    Ok(())
}

fn random_e1(smp: &mut Sampler, ch: &ChartRef) -> Result<E1Section> {
    let n = ch.dim();
    let x = KVector::vector(ch, (0..n).map(|_| smp.poly(ch, 2, 2)).collect());
    let xi = KForm::one_form(ch, (0..n).map(|_| smp.poly(ch, 2, 2)).collect());
    E1Section::new(x, smp.poly(ch, 2, 2), xi, smp.poly(ch, 2, 2))
}

fn c7(c: &mut Crit) -> Result<()> {
    let sg = fixtures::contact_r3()?;
    let ch = sg.chart().clone();
    let cg = DiracJacobiStructure::form_pair(&sg.d()?, &sg)?;
    let (dz, ext) = cg.diracization()?;
    let esig = ext.lift_form(&sg).scale(&ext.et());
    let sym = DiracStructure::graph_two_form(&esig.d()?)?;
    c.check("Diracization = graph d(e^t sigma)", span_equal(dz.frame(), sym.frame())?.equal);
    let mut smp = Sampler::new(SEED);
    let u = Extension::new(&ch)?;
    for k in 0..5 {
        let (a, b) = (random_e1(&mut smp, &ch)?, random_e1(&mut smp, &ch)?);
        let lhs = u.embed(&ext_courant_bracket(&a, &b)?);
        let rhs = courant_bracket(&u.embed(&a), &u.embed(&b))?;
        c.check(&format!("U brackets pair {k}"), lhs == rhs);
    }
    for k in 0..5 {
        let (f, g) = (smp.poly(&ch, 2, 3), smp.poly(&ch, 2, 3));
        let et = ext.et();
        let lhs = &et * &cg.bracket(&f, &g)?.rechart_scalar(&ext.chart)?;
        let (ef, eg) = (&et * &f, &et * &g);
        let rhs = dz.adm_bracket(&ef, &eg)?;
        c.check(&format!("e^t homomorphism pair {k}"), lhs == rhs);
    }
    c.note("5 + 5 random pairs".into());
    Ok(())
}

trait Rechart {
    fn rechart_scalar(self, c: &ChartRef) -> Result<Scalar>;
}

impl Rechart for Scalar {
    // coordinates are shared by name, so a scalar needs no conversion
    fn rechart_scalar(self, _c: &ChartRef) -> Result<Scalar> {
        Ok(self)
    }
}

/// A random admissible function. On the closure of the symplectization these
/// are the functions `s h` with `h` on the contact base.
fn hamiltonian_sample(smp: &mut Sampler, d: &PreqData, name: &str) -> Scalar {
    let ch = d.base().chart();
    if name == "lebrun s" {
        let m = Chart::builder("m_only").coord("u").coord("q").coord("p").build().expect("chart");
        &Scalar::var(ch.var(3)) * &smp.poly(&m, 2, 3)
    } else {
        smp.poly(ch, 2, 3)
    }
}

/// A weight -1 section inside the polarized domain of `d`, or `None` when
/// the domain has no nonzero rational sections (torus).
fn section(smp: &mut Sampler, d: &PreqData, name: &str) -> Option<Scalar> {
    let ch = d.base().chart();
    let h = smp.nonzero_poly(ch, 3, 4);
    match name {
        "torus" => None,
        // flat along the contact distribution at s = 0
        "lebrun s" => Some(&(&Scalar::var(ch.var(3)) * &h) + &Scalar::from_int(2)),
        _ => Some(h),
    }
}

fn c8(c: &mut Crit) -> Result<()> {
    let mut smp = Sampler::new(SEED);
    let mut pairs = 0;
    for (name, d) in preq_fixtures()? {
        let dc = lconn(&d);
        let up = upsilon(d.base())?;
        let probe = smp.nonzero_poly(d.base().chart(), 2, 3);
        let n = d.base().frame().len();
        for i in 0..n {
            for j in 0..n {
                pairs += 1;
                let r = dc.curvature(i, j, &probe)?;
                c.check(&format!("{name} R_D({i},{j})"), r == &Scalar::tau() * &up[i][j]);
            }
        }
        for k in 0..5 {
            let g = hamiltonian_sample(&mut smp, &d, name);
            let (got, h) = match section(&mut smp, &d, name) {
                Some(h) => (lconn_rep(&dc, &g, &GradedFunction::single(-1, h.clone()))?, h),
                None => {
                    let h = smp.poly(d.base().chart(), 3, 4);
                    (GradedFunction::single(-1, dc.rep_unchecked(&g, &h)?), h)
                }
            };
            let want = rep_apply(&d, &g, &GradedFunction::single(-1, h))?;
            c.check(&format!("{name} section {k}"), got == want);
        }
    }
    c.note(format!("{pairs} frame pairs, 5 sections per fixture; torus without domain check"));
    Ok(())
}

/// `Lbar` copied to a chart with `chi = e^theta`, so that `tau` acts as 1.
fn lbar_with_unit(d: &PreqData) -> Result<(DiracJacobiStructure, Scalar)> {
    let q = d.q_chart();
    let theta = q.coord_name(q.dim() - 1).to_string();
    let qu = q.extend(&format!("{}_chi", q.name)).unit("chi", &theta, 1, 1).build()?;
    let gens = build_lbar(d)?
        .frame()
        .gens()
        .iter()
        .map(|g| E1Section::new(g.x.rechart(&qu)?, g.f.clone(), g.xi.rechart(&qu)?, g.g.clone()))
        .collect::<Result<Vec<_>>>()?;
    let chi = Scalar::var(qu.unit_var("chi").expect("unit just added"));
    Ok((DiracJacobiStructure::from_gens(&qu, gens)?, chi))
}

fn c9(c: &mut Crit) -> Result<()> {
    let mut smp = Sampler::new(SEED);
    let tau1 = [(TAU, Scalar::one())].into();
    for (name, d) in preq_fixtures()?.into_iter().filter(|(n, _)| !n.starts_with("lebrun")) {
        let ch = d.base().chart().clone();
        for k in 0..3 {
            let (f, g) = (smp.poly(&ch, 2, 3), smp.poly(&ch, 2, 3));
            let mut phi = GradedFunction::default();
            for n in -2..=2 {
                phi.0.insert(n, smp.nonzero_poly(&ch, 2, 3));
            }
            c.check(&format!("{name} commutator sample {k}"), rep_commutator_defect(&d, &f, &g, &phi)?.is_zero());
        }
        let (lb, chi) = lbar_with_unit(&d)?;
        let cv = *chi.vars().iter().next().expect("chi");
        // on the torus only weight 0 has nonzero basic or admissible functions
        let grades: Vec<i64> = if name == "torus" { vec![0] } else { (-2..=2).collect() };
        for &n in &grades {
            for &m in &grades {
                let (h, k) = (smp.poly(&ch, 2, 3), smp.poly(&ch, 2, 3));
                let (w, v) = graded_bracket(&d, (n, &h), (m, &k))?;
                let direct = lb.basic_bracket(&(&h * &chi.pow(n as i32)?), &(&k * &chi.pow(m as i32)?))?;
                let coeff = direct.checked_div(&chi.pow((n + m) as i32)?)?;
                let ok = w == n + m && !coeff.depends_on(cv) && coeff == v.subst(&tau1)?;
                c.check(&format!("{name} grades ({n},{m})"), ok);
            }
        }
    }
    c.note("n, n' in -2..2 on symplectic_r2 and su2; weight 0 on the torus".into());
    Ok(())
}

fn c10(c: &mut Crit) -> Result<()> {
    let f = LebrunFamily::new(1)?;
    for d in [f.preq_data_s()?, f.preq_data_r()?] {
        let b = beta_from_pair(d.base(), d.pair())?;
        c.check(&format!("residual on {}", d.base().chart().name), table_is_zero(&preq_residual(d.base(), d.omega(), &b)?));
    }
    let g = f.glued_dirac()?;
    c.check("overlap span-equal", g.overlap.equal);
    c.note(format!(
        "glued along s=1/r with (u,p) -> (-u,-p); bare s=1/r gives graph(-Lambda): {}",
        !g.bare.equal && g.bare_negated.equal
    ));
    let rc = &f.r_chart;
    let lin = linearize_at_point(&f.lebrun_lambda(rc)?, &int_point(rc, &[0, 0, 0, 0]))?;
    let want = KVector::partial(rc, 1).wedge(&KVector::partial(rc, 2))?.scale(&Scalar::var(rc.var(3)));
    c.check("linearization r dq^dp", lin == want);
    let j = f.lebrun_jacobi()?;
    c.check("Jacobi pair as displayed", j == f.lebrun_jacobi_literal(j.lambda.chart())?);
    let p = pinch_transform(&j)?;
    let t = p.pair.lambda.chart().clone();
    let (xi, yi) = (t.dim() - 2, t.dim() - 1);
    let e_want = KVector::vector(&t, {
        let mut v = vec![Scalar::zero(); t.dim()];
        v[xi] = -&Scalar::var(t.var(yi));
        v[yi] = Scalar::var(t.var(xi));
        v
    });
    let poly = p.pair.lambda.entries().map(|e| e.1).chain(p.pair.e.entries().map(|e| e.1)).all(|s| s.is_polynomial());
    c.check("pinch polynomial", poly);
    c.check("E' = x dy - y dx", p.pair.e == e_want);
    let zl = p.e_zero_locus.clone().unwrap_or_default();
    c.check("E' vanishes exactly at x=y=0", zl.len() == 2);
    let r = Scalar::var(j.lambda.chart().var(3));
    let pc = pinch_transform(&conformal_transform(&j, &r)?)?;
    let poly = pc.pair.lambda.entries().map(|e| e.1).chain(pc.pair.e.entries().map(|e| e.1)).all(|s| s.is_polynomial());
    c.check("conformal then pinch polynomial", poly);
    let tc = pc.pair.lambda.chart().clone();
    let pts: Vec<Point> = [((1, 1), (0, 1)), ((1, 1), (1, 1)), ((1, 2), (1, 2))]
        .iter()
        .map(|&(x, y)| rat_point(&tc, &[(0, 1), (0, 1), (0, 1), x, y]))
        .collect();
    for smp in contact_check(&pc.pair, &pts)? {
        c.check(&format!("contact at {}", smp.point), smp.nondegenerate);
    }
    c.note("sample points with r = x^2 + y^2 in {1, 2, 1/2}".into());
    Ok(())
}

fn c11(c: &mut Crit) -> Result<()> {
    let ch = Chart::builder("neg_r3").coord("x").coord("y").coord("z").build()?;
    let w = KForm::from_named(&ch, 2, &[("dy^dz", s(&ch, "x"))])?;
    match DiracStructure::graph_two_form(&w)?.integrability()? {
        Integrability::Fail { i, j, k, value } => c.note(format!("witness triple ({i},{j},{k}) -> {value}")),
        Integrability::Pass => c.check("non-closed form fails", false),
    }
    let l = KVector::from_named(&ch, 2, &[("x^y", Scalar::one())])?;
    let bad = DiracJacobiStructure::jacobi(&l, &KVector::partial(&ch, 2))?;
    c.check("non-Jacobi pair fails", !bad.integrability()?.passed());
    c.check("du is not contact", matches!(reeb_solve(&KForm::dx(&ch, 0)), Err(Error::NotContact(_))));
    Ok(())
}

fn main() -> ExitCode {
    let crits: [(&str, fn(&mut Crit) -> Result<()>); 11] = [
        ("Degenerate graph x1^2 dx1^dx2", c1),
        ("Symplectic R^2", c2),
        ("Lbar construction", c3),
        ("Torus leaf direction", c4),
        ("su(2)* kernel", c5),
        ("Forward map witnesses", c6),
        ("Diracization", c7),
        ("L-connection", c8),
        ("Representation laws", c9),
        ("LeBrun suite", c10),
        ("Negative controls", c11),
    ];
    let mut all = true;
    for (k, (title, f)) in crits.into_iter().enumerate() {
        all &= run(k + 1, title, f);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
