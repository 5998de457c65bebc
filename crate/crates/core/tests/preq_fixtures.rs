use prequant::algebroid::upsilon;
use prequant::calculus::{KForm, KVector};
use prequant::dirac::int_point;
use prequant::djacobi::DiracJacobiStructure;
use prequant::fixtures;
use prequant::linpair::{span_equal, E1Section};
use prequant::preq::*;
use prequant::sample::Sampler;
use prequant::scalar::vars::TAU;
use prequant::scalar::{parse_scalar, Scalar};

#[test]
fn torus_leaf_direction() {
    let d = fixtures::torus().unwrap();
    let lb = build_lbar(&d).unwrap();
    assert!(lb.integrability().unwrap().passed());
    let f = tangent_distribution(&lb);
    assert_eq!(f.len(), 1);
    let want = fixtures::torus_expected(d.q_chart()).unwrap();
    // one generator each way: compare as rank-1 spans
    let ratio = f[0].components()[1].checked_div(&want.components()[1]).unwrap();
    assert_eq!(want.scale(&ratio), f[0]);
}

#[test]
fn su2_kernel_functions() {
    for c in [0, 1] {
        let d = fixtures::su2(c).unwrap();
        let g = fixtures::su2_kernel_function(&d, c).unwrap();
        assert!(preq_hamiltonian(&d, &g).unwrap().is_zero(), "c = {c}");
        assert!(build_lbar(&d).unwrap().integrability().unwrap().passed());
    }
}

#[test]
fn su2_poisson_lbar_is_jacobi_graph() {
    for c in [0, 1, 2] {
        let d = fixtures::su2(c).unwrap();
        let lam = fixtures::su2_lambda().unwrap();
        let lam = lam.rechart(d.base().chart()).unwrap();
        let (l, e) = poisson_lift(&d, &lam).unwrap();
        let j = DiracJacobiStructure::jacobi(&l, &e).unwrap();
        let lb = build_lbar(&d).unwrap();
        assert!(span_equal(lb.frame(), j.frame()).unwrap().equal, "c = {c}");
    }
}

#[test]
fn su2_leaf_is_lcp() {
    let d = fixtures::su2(0).unwrap();
    let c = d.base().chart().clone();
    let p = int_point(&c, &[1, 2, 3]);
    let gamma = KForm::one_form(&c, vec![Scalar::zero(), Scalar::zero(), parse_scalar("-1/t", &c).unwrap()]);
    let om = KForm::from_named(&c, 2, &[("dphi^dz", parse_scalar("1/t", &c).unwrap())]).unwrap();
    match leaf_classify(&d, &p, Some((&gamma, &om))).unwrap() {
        Leaf::Lcp { data: Some((g, _)) } => assert_eq!(g, d.pull_form(&gamma)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(leaf_classify(&d, &p, None).unwrap(), Leaf::Lcp { data: None }));
}

#[test]
fn forward_witnesses_on_all_small_fixtures() {
    for d in [fixtures::symplectic_r2().unwrap(), fixtures::torus().unwrap(), fixtures::su2(1).unwrap()] {
        let lb = build_lbar(&d).unwrap();
        let lift = DiracJacobiStructure::from_dirac(d.base()).unwrap();
        for g in lift.frame().gens() {
            assert!(forward_image_witness(&d, &lb, g).unwrap().found(), "{g}");
        }
        let c = d.base().chart();
        let direct = E1Section::new(KVector::zero(c, 1), Scalar::zero(), KForm::zero(c, 1), Scalar::one()).unwrap();
        assert!(forward_image_witness(&d, &lb, &direct).unwrap().found());
    }
}

#[test]
fn curvature_on_all_small_fixtures() {
    let mut smp = Sampler::new(11);
    for d in [fixtures::symplectic_r2().unwrap(), fixtures::torus().unwrap(), fixtures::su2(1).unwrap()] {
        let dc = lconn(&d);
        let up = upsilon(d.base()).unwrap();
        let n = d.base().frame().len();
        let probe = smp.nonzero_poly(d.base().chart(), 2, 3);
        for i in 0..n {
            for j in 0..n {
                let r = dc.curvature(i, j, &probe).unwrap();
                assert_eq!(r, &Scalar::tau() * &up[i][j]);
            }
            assert!(dc.curvature(i, i, &probe).unwrap().is_zero());
        }
    }
}

#[test]
fn lconn_rep_matches_rep_apply() {
    let mut smp = Sampler::new(5);
    for d in [fixtures::symplectic_r2().unwrap(), fixtures::su2(1).unwrap(), fixtures::torus().unwrap()] {
        let c = d.base().chart().clone();
        let dc = lconn(&d);
        let periodic = c.coords().iter().any(|k| k.periodic);
        for _ in 0..5 {
            let g = smp.poly(&c, 2, 3);
            let h = smp.poly(&c, 3, 4);
            let s = GradedFunction::single(-1, h.clone());
            let want = rep_apply(&d, &g, &s).unwrap();
            let got = if periodic {
                // no nonzero rational section is D-flat along L cap TP here
                GradedFunction::single(-1, dc.rep_unchecked(&g, &h).unwrap())
            } else {
                lconn_rep(&dc, &g, &s).unwrap()
            };
            assert_eq!(got, want);
        }
    }
}

#[test]
fn torus_sections_outside_polarized_domain_are_refused() {
    let d = fixtures::torus().unwrap();
    let c = d.base().chart().clone();
    let s = GradedFunction::single(-1, parse_scalar("x3", &c).unwrap());
    assert!(lconn_rep(&lconn(&d), &Scalar::one(), &s).is_err());
    assert!(lconn_rep(&lconn(&d), &Scalar::one(), &GradedFunction::default()).unwrap().is_zero());
}

/// `Lbar` moved onto a chart carrying `chi = e^theta`, where `E chi = chi`,
/// i.e. `tau` specialised to 1.
fn lbar_with_unit(d: &PreqData) -> (DiracJacobiStructure, Scalar) {
    let q = d.q_chart();
    let theta = q.coord_name(q.dim() - 1).to_string();
    let qu = q.extend("q_chi").unit("chi", &theta, 1, 1).build().unwrap();
    let gens: Vec<E1Section> = build_lbar(d)
        .unwrap()
        .frame()
        .gens()
        .iter()
        .map(|g| E1Section::new(g.x.rechart(&qu).unwrap(), g.f.clone(), g.xi.rechart(&qu).unwrap(), g.g.clone()).unwrap())
        .collect();
    let chi = Scalar::var(qu.unit_var("chi").unwrap());
    (DiracJacobiStructure::from_gens(&qu, gens).unwrap(), chi)
}

#[test]
fn graded_bracket_against_exponential_chart() {
    let mut smp = Sampler::new(3);
    let tau1 = [(TAU, Scalar::one())].into();
    for d in [fixtures::symplectic_r2().unwrap(), fixtures::su2(1).unwrap()] {
        let (lb, chi) = lbar_with_unit(&d);
        let c = d.base().chart().clone();
        for n in -2..=2 {
            for m in -2..=2 {
                let h = smp.poly(&c, 2, 3);
                let k = smp.poly(&c, 2, 3);
                let (w, v) = graded_bracket(&d, (n, &h), (m, &k)).unwrap();
                assert_eq!(w, n + m);
                let f = &h * &chi.pow(n as i32).unwrap();
                let g = &k * &chi.pow(m as i32).unwrap();
                let direct = lb.bracket(&f, &g).unwrap();
                let coeff = direct.checked_div(&chi.pow((n + m) as i32).unwrap()).unwrap();
                assert!(!coeff.depends_on(chi.vars().into_iter().next().unwrap()), "{n} {m}");
                assert_eq!(coeff, v.subst(&tau1).unwrap(), "{n} {m}");
            }
        }
    }
}

#[test]
fn representation_law_on_graded_functions() {
    let mut smp = Sampler::new(9);
    for d in [fixtures::symplectic_r2().unwrap(), fixtures::su2(1).unwrap(), fixtures::torus().unwrap()] {
        let c = d.base().chart().clone();
        for _ in 0..3 {
            let f = smp.poly(&c, 2, 3);
            let g = smp.poly(&c, 2, 3);
            let mut phi = GradedFunction::default();
            for k in -2..=2 {
                phi.0.insert(k, smp.nonzero_poly(&c, 2, 3));
            }
            assert!(rep_commutator_defect(&d, &f, &g, &phi).unwrap().is_zero());
            let out = rep_apply(&d, &f, &GradedFunction::single(-2, phi.get(-2))).unwrap();
            assert!(out.grades().iter().all(|&k| k == -2));
        }
    }
}
