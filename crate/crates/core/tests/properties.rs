use proptest::prelude::*;

use prequant::algebroid::{beta_from_pair, preq_residual, AnchorRep, LCochain1};
use prequant::calculus::{KForm, KVector};
use prequant::dirac::{courant_bracket, DiracStructure};
use prequant::djacobi::{ext_courant_bracket, Extension};
use prequant::fixtures;
use prequant::linpair::E1Section;
use prequant::sample::Sampler;
use prequant::scalar::{unit_certify, Chart, ChartRef, Scalar};

fn r3() -> ChartRef {
    Chart::builder("prop_r3").coord("a").coord("b").coord("c").positive("t").unit("et", "t", 1, 1).build().unwrap()
}

fn form(smp: &mut Sampler, c: &ChartRef, k: usize) -> KForm {
    let n = c.dim();
    let mut idx: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        idx = idx
            .into_iter()
            .flat_map(|v| {
                let start = v.last().map_or(0, |l| l + 1);
                (start..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    let e: Vec<_> = idx.into_iter().map(|i| (i, smp.poly(c, 2, 2))).collect();
    KForm::from_entries(c, k, &e).unwrap()
}

fn vector(smp: &mut Sampler, c: &ChartRef) -> KVector {
    KVector::vector(c, (0..c.dim()).map(|_| smp.poly(c, 2, 2)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn rewrites_are_equal(seed in any::<u64>()) {
        let c = r3();
        let mut smp = Sampler::new(seed);
        let (p, q, r) = (smp.poly(&c, 2, 3), smp.nonzero_poly(&c, 2, 3), smp.nonzero_poly(&c, 2, 3));
        // (p/q + r) * q = p + r q, and (p*r)/(q*r) = p/q
        let lhs = &(&p.checked_div(&q).unwrap() + &r) * &q;
        prop_assert_eq!(lhs, &p + &(&r * &q));
        let a = (&p * &r).checked_div(&(&q * &r)).unwrap();
        let b = p.checked_div(&q).unwrap();
        prop_assert!((&a - &b).is_zero());
        prop_assert!(!(&(&p + &Scalar::one()) - &p).is_zero());
    }

    #[test]
    fn partials_commute(seed in any::<u64>()) {
        let c = r3();
        let mut smp = Sampler::new(seed);
        let f = smp.poly(&c, 3, 4).checked_div(&smp.nonzero_poly(&c, 1, 2)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(f.diff(c.var(i)).diff(c.var(j)), f.diff(c.var(j)).diff(c.var(i)));
            }
        }
    }

    #[test]
    fn certification_is_multiplicative(seed in any::<u64>()) {
        let c = r3();
        let mut smp = Sampler::new(seed);
        let t = Scalar::var(c.var(3));
        let et = Scalar::var(c.unit_var("et").unwrap());
        let pick = |smp: &mut Sampler| -> Scalar {
            match smp.int(0, 3) {
                0 => &t * &t,
                1 => &et * &Scalar::from_int(3),
                2 => smp.nonzero_poly(&c, 2, 3),
                _ => Scalar::from_int(-2),
            }
        };
        let (d1, d2) = (pick(&mut smp), pick(&mut smp));
        let prod = &d1 * &d2;
        let ok = |s: &Scalar| unit_certify(s.num(), &c).is_certified();
        prop_assert_eq!(ok(&prod), ok(&d1) && ok(&d2));
    }

    #[test]
    fn d_squared_is_zero(seed in any::<u64>(), k in 0usize..=2) {
        let c = r3();
        let mut smp = Sampler::new(seed);
        let w = form(&mut smp, &c, k);
        prop_assert!(w.d().unwrap().d().unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_is_a_derivation(seed in any::<u64>()) {
        let c = r3();
        let mut smp = Sampler::new(seed);
        let x = vector(&mut smp, &c);
        let a = form(&mut smp, &c, 1);
        let b = form(&mut smp, &c, 1);
        let lhs = a.wedge(&b).unwrap().lie(&x).unwrap();
        let rhs = a.lie(&x).unwrap().wedge(&b).unwrap().add(&a.wedge(&b.lie(&x).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // Cartan
        let cartan = a.d().unwrap().contract(&x).unwrap().add(&a.contract(&x).unwrap().d().unwrap()).unwrap();
        prop_assert_eq!(a.lie(&x).unwrap(), cartan);
    }

    #[test]
    fn vector_bracket_jacobi(seed in any::<u64>()) {
        let c = r3();
        let mut smp = Sampler::new(seed);
        let (x, y, z) = (vector(&mut smp, &c), vector(&mut smp, &c), vector(&mut smp, &c));
        let j = x.bracket(&y.bracket(&z).unwrap()).unwrap()
            .add(&y.bracket(&z.bracket(&x).unwrap()).unwrap()).unwrap()
            .add(&z.bracket(&x.bracket(&y).unwrap()).unwrap()).unwrap();
        prop_assert!(j.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn embedding_preserves_brackets(seed in any::<u64>()) {
        let c = fixtures::r2().unwrap();
        let u = Extension::new(&c).unwrap();
        let mut smp = Sampler::new(seed);
        let sec = |smp: &mut Sampler| {
            E1Section::new(vector(smp, &c), smp.poly(&c, 2, 2), form(smp, &c, 1), smp.poly(&c, 2, 2)).unwrap()
        };
        let (a, b) = (sec(&mut smp), sec(&mut smp));
        prop_assert_eq!(u.embed(&ext_courant_bracket(&a, &b).unwrap()), courant_bracket(&u.embed(&a), &u.embed(&b)).unwrap());
    }

    #[test]
    fn residual_invariant_under_exact_shift(seed in any::<u64>()) {
        let d = fixtures::symplectic_r2().unwrap();
        let l = d.base();
        let c = l.chart().clone();
        let mut smp = Sampler::new(seed);
        let gamma = form(&mut smp, &c, 1);
        let beta = beta_from_pair(l, d.pair()).unwrap();
        let moved = beta.add(&LCochain1::pullback(l, &gamma).unwrap());
        let om2 = d.omega().add(&gamma.d().unwrap()).unwrap();
        prop_assert_eq!(preq_residual(l, d.omega(), &beta).unwrap(), preq_residual(l, &om2, &moved).unwrap());
    }

    #[test]
    fn residual_depends_only_on_the_cochain(seed in any::<u64>()) {
        // shifting A + alpha by a section of L leaves beta unchanged
        let lam = fixtures::su2_lambda().unwrap();
        let c = lam.chart().clone();
        let l = DiracStructure::graph_bivector(&lam).unwrap();
        let mut smp = Sampler::new(seed);
        let a = KVector::vector(&c, vec![Scalar::zero(), Scalar::zero(), smp.poly(&c, 2, 2)]);
        let p1 = AnchorRep::new(a.clone(), KForm::zero(&c, 1)).unwrap();
        let xi = form(&mut smp, &c, 1);
        let p2 = AnchorRep::new(a.add(&lam.sharp(&xi).unwrap()).unwrap(), xi).unwrap();
        let b1 = beta_from_pair(&l, &p1).unwrap();
        let b2 = beta_from_pair(&l, &p2).unwrap();
        prop_assert_eq!(&b1, &b2);
        let om = KForm::zero(&c, 2);
        prop_assert_eq!(preq_residual(&l, &om, &b1).unwrap(), preq_residual(&l, &om, &b2).unwrap());
    }
}
