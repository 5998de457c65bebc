//! Exact coefficients: canonical rational functions over Q(i) in chart
//! coordinates, exponential units and the formal constant `tau` (2*pi*i).

mod certify;
mod chart;
pub mod coeff;
pub mod gcd;
mod parse;
pub mod poly;
pub mod vars;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

pub use certify::{unit_certify, witness_for_nonzero, witness_for_zero, Certificate, Point};
pub use chart::{Chart, ChartBuilder, ChartRef, Coord, Domain, ExpUnit};
pub use coeff::GaussRat;
pub use parse::parse_scalar;
pub use poly::{Monomial, Poly};
pub use vars::VarId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("binding for `{0}` breaks the defining relation of an exponential unit")]
    SubstitutionIntoExpUnitBase(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("`{0}` is reserved")]
    ReservedName(String),
    #[error("`{0}` is already registered with a different kind")]
    VariableKindConflict(String),
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("exponential unit `{unit}` has unknown base `{base}`")]
    UnknownUnitBase { unit: String, base: String },
    #[error("point lies outside the domain: denominator vanishes")]
    PointOutsideDomain,
}

/// Canonical fraction `num / den`.
///
/// `den` is an ordinary polynomial, monic in grlex, not divisible by any
/// unit variable, and coprime to `num`. `num` may carry negative powers of
/// unit variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

fn split_units(p: &Poly) -> (Monomial, Poly) {
    let m = p.min_monomial(vars::is_unit);
    if m.is_one() {
        return (m, p.clone());
    }
    let inv = Monomial::one().div(&m);
    (m, p.mul_monomial(&inv))
}

/// Pulls negative exponents of ordinary coordinates out of a polynomial that
/// only tolerates them for units (they can appear after a Laurent shift).
fn clear_negative(p: &Poly) -> (Poly, Monomial) {
    let m = p.min_monomial(|v| !vars::is_unit(v));
    let neg = Monomial::from_pairs(m.exps().iter().filter(|e| e.1 < 0).map(|&(v, e)| (v, -e)).collect());
    if neg.is_one() {
        (p.clone(), neg)
    } else {
        (p.mul_monomial(&neg), neg)
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar::from_poly(Poly::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::constant(GaussRat::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::constant(GaussRat::from_ratio(n, d))
    }

    pub fn constant(c: GaussRat) -> Self {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn i() -> Self {
        Scalar::constant(GaussRat::i())
    }

    pub fn tau() -> Self {
        Scalar::var(vars::TAU)
    }

    pub fn var(v: VarId) -> Self {
        Scalar::from_poly(Poly::var(v))
    }

    /// Polynomial (no denominator). Unit powers may be negative.
    pub fn from_poly(p: Poly) -> Self {
        let (p, neg) = clear_negative(&p);
        if neg.is_one() {
            Scalar { num: p, den: Poly::one() }
        } else {
            Scalar::from_parts(p, Poly::term(GaussRat::one(), neg)).expect("nonzero monomial")
        }
    }

    /// Builds the canonical form of `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar::zero());
        }
        let (num, nn) = clear_negative(&num);
        let (den, nd) = clear_negative(&den);
        let (num, den) = (num.mul_monomial(&nd), den.mul_monomial(&nn));
        let (mu_n, n1) = split_units(&num);
        let (mu_d, d1) = split_units(&den);
        let (n2, d2) = if d1.is_constant() {
            (n1, d1)
        } else {
            let g = gcd::gcd(&n1, &d1);
            if g.is_one() {
                (n1, d1)
            } else {
                (
                    n1.div_exact(&g).expect("gcd divides numerator"),
                    d1.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let inv = d2.lc().inv().expect("nonzero denominator");
        let shift = mu_n.div(&mu_d);
        Ok(Scalar { num: n2.scale(&inv).mul_monomial(&shift), den: d2.scale(&inv) })
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<GaussRat> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn vars(&self) -> std::collections::BTreeSet<VarId> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn depends_on(&self, v: VarId) -> bool {
        self.num.vars().contains(&v) || self.den.vars().contains(&v)
    }

    /// Rough size, used to pick simple pivots.
    pub fn weight(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        if o.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(c) = o.constant_value() {
            let inv = c.inv().expect("nonzero constant");
            return Ok(Scalar { num: self.num.scale(&inv), den: self.den.clone() });
        }
        Scalar::from_parts(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        Scalar::one().checked_div(self)
    }

    pub fn pow(&self, e: i32) -> Result<Scalar, ScalarError> {
        if e >= 0 {
            Ok(Scalar {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            })
        } else {
            self.inv()?.pow(-e)
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Scalar {
        Scalar { num: self.num.scale(c), den: if c.is_zero() { Poly::one() } else { self.den.clone() } }
    }

    /// Partial derivative with respect to the coordinate `v`.
    pub fn diff(&self, v: VarId) -> Scalar {
        if self.den.is_one() {
            return Scalar::from_poly(self.num.deriv(v));
        }
        let dn = self.num.deriv(v);
        let dd = self.den.deriv(v);
        if dd.is_zero() {
            return Scalar::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        let top = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Scalar::from_parts(top, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Simultaneous substitution of coordinates.
    ///
    /// A unit whose base coordinate is bound must see that coordinate bound
    /// to itself or to the constant 0 (where the unit evaluates to 1).
    pub fn subst(&self, bindings: &BTreeMap<VarId, Scalar>) -> Result<Scalar, ScalarError> {
        let n = subst_poly(&self.num, bindings)?;
        let d = subst_poly(&self.den, bindings)?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        n.checked_div(&d)
    }

    /// Complex conjugate with respect to `i`. `tau` maps to `-tau`.
    pub fn conj(&self) -> Scalar {
        let flip = |p: &Poly| {
            Poly::from_terms(p.terms().map(|(m, c)| {
                let c = c.conj();
                if m.exp(vars::TAU) % 2 != 0 {
                    (m.clone(), -&c)
                } else {
                    (m.clone(), c)
                }
            }))
        };
        Scalar::from_parts(flip(&self.num), flip(&self.den)).expect("nonzero denominator")
    }
}

fn subst_poly(p: &Poly, bindings: &BTreeMap<VarId, Scalar>) -> Result<Scalar, ScalarError> {
    for &v in bindings.keys() {
        match vars::info(v).kind {
            vars::VarKind::Coord | vars::VarKind::Tau => {}
            _ => return Err(ScalarError::UnknownCoordinate(vars::name(v))),
        }
    }
    // unit variables whose base is rebound
    let mut unit_to_one = Vec::new();
    for v in p.vars() {
        if let vars::VarKind::Unit { base, .. } = vars::info(v).kind {
            if let Some(b) = bindings.get(&base) {
                if *b == Scalar::var(base) {
                    continue;
                }
                if b.is_zero() {
                    unit_to_one.push(v);
                } else {
                    return Err(ScalarError::SubstitutionIntoExpUnitBase(vars::name(base)));
                }
            }
        }
    }
    if p.vars().iter().all(|v| !bindings.contains_key(v) && !unit_to_one.contains(v)) {
        return Ok(Scalar::from_poly(p.clone()));
    }
    // clear denominators: each bound var v -> n_v / d_v, scale by d_v^maxdeg
    let mut max_deg: BTreeMap<VarId, i32> = BTreeMap::new();
    for (v, b) in bindings {
        if !b.den.is_one() {
            let d = p.degree_in(*v);
            if d > 0 {
                max_deg.insert(*v, d);
            }
        }
    }
    let mut num_pow_cache: BTreeMap<(VarId, i32), Poly> = BTreeMap::new();
    let mut den_pow_cache: BTreeMap<(VarId, i32), Poly> = BTreeMap::new();
    let mut total = Poly::zero();
    for (m, c) in p.terms() {
        let mut t = Poly::constant(c.clone());
        let mut rest = Vec::new();
        for &(v, e) in m.exps() {
            if let Some(b) = bindings.get(&v) {
                let np = num_pow_cache
                    .entry((v, e))
                    .or_insert_with(|| b.num.pow(e as u32))
                    .clone();
                t = t.mul(&np);
                if let Some(&md) = max_deg.get(&v) {
                    let k = md - e;
                    if k > 0 {
                        let dp = den_pow_cache
                            .entry((v, k))
                            .or_insert_with(|| b.den.pow(k as u32))
                            .clone();
                        t = t.mul(&dp);
                    }
                }
            } else if unit_to_one.contains(&v) {
                // e^{rate * 0} = 1
            } else {
                rest.push((v, e));
            }
        }
        for (&v, &md) in &max_deg {
            if m.exp(v) == 0 {
                let dp = den_pow_cache
                    .entry((v, md))
                    .or_insert_with(|| bindings[&v].den.pow(md as u32))
                    .clone();
                t = t.mul(&dp);
            }
        }
        total = total.add(&t.mul_monomial(&Monomial::from_pairs(rest)));
    }
    let mut den = Poly::one();
    for (&v, &md) in &max_deg {
        den = den.mul(&bindings[&v].den.pow(md as u32));
    }
    Scalar::from_parts(total, den)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |p: &Poly| {
            if p.num_terms() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", paren(&self.num), paren(&self.den))
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: self.num.add(&o.num), den: Poly::one() };
        }
        if self.den == o.den {
            return Scalar::from_parts(self.num.add(&o.num), self.den.clone()).expect("nonzero");
        }
        if o.den.is_one() {
            return Scalar { num: self.num.add(&o.num.mul(&self.den)), den: self.den.clone() };
        }
        if self.den.is_one() {
            return Scalar { num: o.num.add(&self.num.mul(&o.den)), den: o.den.clone() };
        }
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Scalar::from_parts(n, self.den.mul(&o.den)).expect("nonzero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar::from_poly(self.num.mul(&o.num));
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        Scalar::from_parts(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { (&self).$m(&o) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar { (&self).$m(o) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}
