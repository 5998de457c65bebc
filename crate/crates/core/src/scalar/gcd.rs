//! Multivariate gcd over Q(i) by recursive primitive pseudo-remainder
//! sequences. Inputs are ordinary polynomials (no negative exponents).

use super::coeff::GaussRat;
use super::poly::{Monomial, Poly};
use super::vars::VarId;

/// Scales so the grlex-leading coefficient is 1.
pub fn monic(p: &Poly) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let inv = p.lc().inv().expect("nonzero leading coefficient");
    p.scale(&inv)
}

/// Monic gcd of `a` and `b`; gcd(0, 0) = 0.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return monic(b);
    }
    if b.is_zero() {
        return monic(a);
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return monic(a);
    }
    let all = |_| true;
    let ma = a.min_monomial(all);
    let mb = b.min_monomial(all);
    let mono = ma.min_with(&mb);
    let a1 = a.div_exact(&Poly::term(GaussRat::one(), ma.clone())).expect("monomial content");
    let b1 = b.div_exact(&Poly::term(GaussRat::one(), mb.clone())).expect("monomial content");
    let mono_poly = Poly::term(GaussRat::one(), mono);
    if a1.is_constant() || b1.is_constant() {
        return mono_poly;
    }
    let common: Vec<VarId> = a1.vars().intersection(&b1.vars()).copied().collect();
    if common.is_empty() {
        return mono_poly;
    }
    // trial division catches the frequent "one divides the other" case cheaply
    if b1.num_terms() <= a1.num_terms() && a1.div_exact(&b1).is_some() {
        return monic(&mono_poly.mul(&b1));
    }
    if a1.num_terms() <= b1.num_terms() && b1.div_exact(&a1).is_some() {
        return monic(&mono_poly.mul(&a1));
    }
    let v = *common
        .iter()
        .min_by_key(|&&v| a1.degree_in(v).max(b1.degree_in(v)))
        .unwrap();
    let g = gcd_in(&a1, &b1, v);
    monic(&mono_poly.mul(&g))
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive(coeffs: &[Poly]) -> (Poly, Vec<Poly>) {
    let c = content(coeffs);
    if c.is_one() || c.is_zero() {
        return (c, coeffs.to_vec());
    }
    let out = coeffs
        .iter()
        .map(|x| x.div_exact(&c).expect("content divides coefficient"))
        .collect();
    (c, out)
}

fn trim(mut p: Vec<Poly>) -> Vec<Poly> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn deg(p: &[Poly]) -> usize {
    p.len() - 1
}

/// Pseudo-remainder of `a` by `b` as univariate polynomials over a ring.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let lb = b.last().unwrap().clone();
    let db = deg(b);
    let mut r = a.to_vec();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = deg(&r);
        if dr < db {
            break;
        }
        let lr = r.last().unwrap().clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lb)).collect();
        for (k, bc) in b.iter().enumerate() {
            let t = bc.mul(&lr);
            next[k + shift] = next[k + shift].sub(&t);
        }
        r = trim(next);
        if r.iter().all(|c| c.is_zero()) {
            return vec![Poly::zero()];
        }
    }
    r
}

fn gcd_in(a: &Poly, b: &Poly, v: VarId) -> Poly {
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let (ca, pa) = primitive(&ua);
    let (cb, pb) = primitive(&ub);
    let c = gcd(&ca, &cb);
    let (mut r0, mut r1) = if deg(&pa) >= deg(&pb) { (pa, pb) } else { (pb, pa) };
    loop {
        let r = prem(&r0, &r1);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        if deg(&r) == 0 {
            r1 = vec![Poly::one()];
            break;
        }
        let (_, pr) = primitive(&r);
        r0 = r1;
        r1 = pr;
    }
    let (_, g) = primitive(&r1);
    let g = Poly::from_univariate(&g, v);
    c.mul(&g)
}

/// Product of the variable powers common to every term, as a monomial.
pub fn monomial_content(p: &Poly) -> Monomial {
    p.min_monomial(|_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::vars;

    fn p(v: VarId) -> Poly {
        Poly::var(v)
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let x = vars::coord("g_x").unwrap();
        let y = vars::coord("g_y").unwrap();
        let z = vars::coord("g_z").unwrap();
        let common = p(x).mul(&p(y)).add(&p(z)).add(&Poly::one());
        let a = common.mul(&p(x).sub(&p(y)));
        let b = common.mul(&p(z).mul(&p(z)).add(&p(y)));
        let g = gcd(&a, &b);
        assert_eq!(g, monic(&common));
    }

    #[test]
    fn coprime_gives_one() {
        let x = vars::coord("g_x").unwrap();
        let y = vars::coord("g_y").unwrap();
        let a = p(x).add(&Poly::one());
        let b = p(y).add(&Poly::one());
        assert!(gcd(&a, &b).is_one());
        let c = p(x).mul(&p(x)).add(&p(y).mul(&p(y)));
        let d = p(x).add(&p(y));
        assert!(gcd(&c, &d).is_one());
    }

    #[test]
    fn monomial_gcd() {
        let x = vars::coord("g_x").unwrap();
        let a = p(x);
        let b = p(x).mul(&p(x));
        assert_eq!(gcd(&a, &b), p(x));
    }
}
